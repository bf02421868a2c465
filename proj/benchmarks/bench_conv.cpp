// Copyright 2026 The IrisNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <irisnet/model.hpp>
#include <irisnet/ops.hpp>
#include <irisnet/random.hpp>
#include <irisnet/retinaconv.hpp>

using namespace irisnet;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(std::move(shape), 0.0);
  for (auto& v : t.storage()) v = rng.uniform(-1.0, 1.0);
  return t;
}

RetinaConvLayer random_layer(std::size_t cin, std::size_t cout, std::size_t ks, std::size_t kd, int d) {
  return RetinaConvLayer{random_tensor({cout, cin, ks, ks}, 1), random_tensor({cout, cin, kd, kd}, 2),
                         random_tensor({cout}, 3), d};
}

// args: channels, extent, dilation
void BM_Conv2dDirect(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const int d = static_cast<int>(state.range(2));
  const Tensor x = random_tensor({1, c, n, n}, 4);
  const Tensor k = random_tensor({c, c, 3, 3}, 5);
  const ConvSpec spec = ConvSpec::same(3, d);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_direct(x, k, Tensor(), spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c * c * 9 * n * n));
}

void BM_Conv2dLowered(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const int d = static_cast<int>(state.range(2));
  const Tensor x = random_tensor({1, c, n, n}, 4);
  const Tensor k = random_tensor({c, c, 3, 3}, 5);
  const ConvSpec spec = ConvSpec::same(3, d);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_lowered(x, k, Tensor(), spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c * c * 9 * n * n));
}

void BM_RetinaConvFused(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const RetinaConvLayer layer = random_layer(c, c, 3, 3, static_cast<int>(state.range(2)));
  const Tensor x = random_tensor({1, c, n, n}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(retinaconv_forward(x, layer));
}

void BM_RetinaConvTwoPass(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const RetinaConvLayer layer = random_layer(c, c, 3, 3, static_cast<int>(state.range(2)));
  const Tensor x = random_tensor({1, c, n, n}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(retinaconv_reference(x, layer));
}

void BM_TransposedConv(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const Tensor x = random_tensor({1, c, n, n}, 7);
  const Tensor k = random_tensor({c, c / 2, 2, 2}, 8);
  for (auto _ : state) benchmark::DoNotOptimize(transposed_conv2d(x, k, 2));
}

void BM_IrisNetForward(benchmark::State& state) {
  ArchConfig cfg;
  cfg.depth = 3;
  cfg.base_filters = 8;
  cfg.input_size = static_cast<int>(state.range(0));
  Model model = build_irisnet(cfg, 11);
  const auto n = static_cast<std::size_t>(cfg.input_size);
  const Tensor x = random_tensor({1, 1, n, n}, 9);
  forward(model, x, Mode::train);
  const ConvPath path = state.range(1) == 0 ? ConvPath::fused : ConvPath::two_pass;
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, x, Mode::eval, path));
}

}  // namespace

BENCHMARK(BM_Conv2dDirect)->Args({8, 32, 1})->Args({16, 64, 2});
BENCHMARK(BM_Conv2dLowered)->Args({8, 32, 1})->Args({16, 64, 2});
BENCHMARK(BM_RetinaConvFused)->Args({16, 64, 1})->Args({16, 64, 2})->Args({16, 64, 4});
BENCHMARK(BM_RetinaConvTwoPass)->Args({16, 64, 1})->Args({16, 64, 2})->Args({16, 64, 4});
BENCHMARK(BM_TransposedConv)->Args({16, 32});
BENCHMARK(BM_IrisNetForward)->Args({64, 0})->Args({64, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

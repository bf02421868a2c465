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

#include <gtest/gtest.h>

#include <cmath>
#include <irisnet/autograd.hpp>
#include <irisnet/ops.hpp>

#include "oracles.hpp"

namespace irisnet {
namespace {

using testing::conv_oracle;
using testing::random_tensor;

TEST(Conv2d, IdentityKernel) {
  const Tensor x = random_tensor({2, 1, 5, 6}, 1);
  const Tensor k({1, 1, 1, 1}, 1.0);
  EXPECT_EQ(conv2d(x, k, Tensor({1}, 0.0), ConvSpec::same(1)), x);
}

TEST(Conv2d, ConstantInputInteriorSum) {
  const Tensor x({1, 1, 6, 6}, 5.0);
  const Tensor k({1, 1, 3, 3}, 1.0);
  const Tensor y = conv2d(x, k, Tensor(), ConvSpec::same(3));
  for (std::size_t r = 1; r < 5; ++r)
    for (std::size_t c = 1; c < 5; ++c) EXPECT_DOUBLE_EQ(y.at(0, 0, r, c), 45.0);
  EXPECT_DOUBLE_EQ(y.at(0, 0, 0, 0), 20.0);
}

TEST(Conv2d, DilatedTapsAtOffsetsTwo) {
  const Tensor x = random_tensor({1, 1, 8, 8}, 2);
  const Tensor k = random_tensor({1, 1, 3, 3}, 3);
  const Tensor y = conv2d(x, k, Tensor(), ConvSpec::same(3, 2));
  for (long r = 0; r < 8; ++r)
    for (long c = 0; c < 8; ++c) {
      double acc = 0.0;
      for (long u = 0; u < 3; ++u)
        for (long v = 0; v < 3; ++v) {
          const long rr = r + 2 * (u - 1), cc = c + 2 * (v - 1);
          if (rr >= 0 && cc >= 0 && rr < 8 && cc < 8) {
            acc += x.at(0, 0, static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) *
                   k.at(0, 0, static_cast<std::size_t>(u), static_cast<std::size_t>(v));
          }
        }
      EXPECT_NEAR(y.at(0, 0, static_cast<std::size_t>(r), static_cast<std::size_t>(c)), acc, 1e-13);
    }
}

struct ConvCase {
  std::size_t cin, cout, k;
  int d, stride;
  std::optional<int> pad;
};

class ConvPaths : public ::testing::TestWithParam<ConvCase> {};

TEST_P(ConvPaths, DirectAndLoweredMatchOracle) {
  const auto p = GetParam();
  const Tensor x = random_tensor({2, p.cin, 9, 10}, 10 + p.k);
  const Tensor k = random_tensor({p.cout, p.cin, p.k, p.k}, 20 + p.k);
  const Tensor b = random_tensor({p.cout}, 30);
  const ConvSpec spec{static_cast<int>(p.k), p.d, p.stride, p.pad};
  const Tensor ref = conv_oracle(x, k, b.storage(), p.d, spec.resolved_padding(), p.stride);
  EXPECT_LT(max_abs_diff(conv2d_direct(x, k, b, spec), ref), 1e-12);
  EXPECT_LT(max_abs_diff(conv2d_lowered(x, k, b, spec), ref), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Geometry, ConvPaths,
                         ::testing::Values(ConvCase{1, 1, 3, 1, 1, std::nullopt}, ConvCase{2, 3, 3, 2, 1, std::nullopt},
                                           ConvCase{3, 2, 5, 1, 1, std::nullopt}, ConvCase{2, 2, 1, 1, 1, std::nullopt},
                                           ConvCase{2, 4, 3, 3, 1, std::nullopt}, ConvCase{2, 2, 3, 1, 2, 1},
                                           ConvCase{1, 2, 3, 2, 1, 0}));

TEST(Conv2d, InvalidSpecsRejected) {
  const Tensor x({1, 2, 6, 6}, 1.0);
  EXPECT_THROW(conv2d(x, Tensor({1, 3, 3, 3}, 1.0), Tensor(), ConvSpec::same(3)), ShapeError);
  EXPECT_THROW(conv2d(x, Tensor({1, 2, 2, 2}, 1.0), Tensor(), ConvSpec::same(2)), std::invalid_argument);
  EXPECT_THROW(conv2d(x, Tensor({1, 2, 3, 3}, 1.0), Tensor(), ConvSpec::same(3, 0)), std::invalid_argument);
}

TEST(Conv2d, BackwardMatchesFiniteDifferences) {
  Rng rng(7);
  const Tensor x = random_tensor({1, 2, 5, 5}, rng);
  const Tensor k = random_tensor({2, 2, 3, 3}, rng);
  const Tensor w = random_tensor({1, 2, 5, 5}, rng);
  const ConvSpec spec = ConvSpec::same(3, 2);
  const auto g = conv2d_backward(w, x, k, spec);
  const double ex = finite_difference_check([&](const Tensor& xi) { return dot(conv2d(xi, k, Tensor(), spec), w); },
                                            x, g.input, 1e-6);
  const double ek = finite_difference_check([&](const Tensor& ki) { return dot(conv2d(x, ki, Tensor(), spec), w); },
                                            k, g.kernel, 1e-6);
  EXPECT_LT(ex, 1e-6);
  EXPECT_LT(ek, 1e-6);
}

TEST(TransposedConv, SinglePixelScatter) {
  const Tensor y = transposed_conv2d(Tensor({1, 1, 1, 1}, 1.0), Tensor({1, 1, 2, 2}, 1.0), 2);
  EXPECT_EQ(y, Tensor({1, 1, 2, 2}, 1.0));
}

TEST(TransposedConv, ShapeLaw) {
  const Tensor y = transposed_conv2d(Tensor({1, 3, 4, 4}, 1.0), Tensor({3, 2, 2, 2}, 1.0), 2);
  EXPECT_EQ(y.shape(), (Shape{1, 2, 8, 8}));
}

TEST(TransposedConv, KernelSmallerThanStrideRejected) {
  EXPECT_THROW(transposed_conv2d(Tensor({1, 1, 2, 2}, 1.0), Tensor({1, 1, 1, 1}, 1.0), 2), std::invalid_argument);
}

TEST(TransposedConv, LoweredMatchesScatter) {
  Rng rng(8);
  for (int s : {1, 2, 3}) {
    const Tensor x = random_tensor({2, 3, 4, 5}, rng);
    const Tensor k = random_tensor({3, 2, 3, 3}, rng);
    EXPECT_LT(max_abs_diff(transposed_conv2d(x, k, s), transposed_conv2d_direct(x, k, s)), 1e-12);
  }
}

TEST(TransposedConv, AdjointOfConvolution) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int stride = 1 + static_cast<int>(rng.below(2));
    const std::size_t cin = 1 + rng.below(3), cout = 1 + rng.below(3);
    const Tensor k = random_tensor({cout, cin, 3, 3}, rng);
    const std::size_t n = 7;
    const Tensor x = random_tensor({1, cin, n, n}, rng);
    const ConvSpec spec = ConvSpec::valid(3, 1, stride);
    const Tensor cx = conv2d(x, k, Tensor(), spec);
    const Tensor y = random_tensor(cx.shape(), rng);
    // The conv kernel (Cout x Cin) is read as a transposed kernel with Cin' = Cout.
    const Tensor ty = transposed_conv2d(y, k, stride);
    ASSERT_EQ(ty.shape(), x.shape());
    EXPECT_NEAR(dot(cx, y), dot(x, ty), 1e-10);
  }
}

TEST(MaxPool, SmallWindow) {
  const auto r = maxpool2d(Tensor({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(r.output[0], 4.0);
  EXPECT_EQ(r.argmax[0], 3u);
}

TEST(MaxPool, TieGoesToFirst) {
  const auto r = maxpool2d(Tensor({1, 1, 4, 4}, 2.5));
  for (double v : r.output.data()) EXPECT_EQ(v, 2.5);
  EXPECT_EQ(r.argmax[0], 0u);
  EXPECT_EQ(r.argmax[1], 2u);
}

TEST(MaxPool, MatchesWindowScan) {
  const Tensor x = random_tensor({2, 2, 6, 6}, 11);
  const auto r = maxpool2d(x);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          double best = -INFINITY;
          for (std::size_t u = 0; u < 2; ++u)
            for (std::size_t v = 0; v < 2; ++v) best = std::max(best, x.at(b, c, 2 * i + u, 2 * j + v));
          EXPECT_EQ(r.output.at(b, c, i, j), best);
        }
}

TEST(MaxPool, OddExtentMentionsPadding) {
  try {
    maxpool2d(Tensor({1, 1, 5, 4}, 0.0));
    FAIL() << "expected error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("pad"), std::string::npos);
  }
}

TEST(BatchNorm, ConstantInputNormalizesToZero) {
  BatchNormState st(2);
  const Tensor y = batchnorm2d(Tensor({3, 2, 4, 4}, 3.0), Tensor({2}, 1.0), Tensor({2}, 0.0), st, Mode::train);
  EXPECT_LT(max_abs(y), 1e-12);
}

TEST(BatchNorm, ZeroScaleGivesShift) {
  BatchNormState st(2);
  const Tensor y =
      batchnorm2d(random_tensor({2, 2, 3, 3}, 12), Tensor({2}, 0.0), Tensor({2}, 7.0), st, Mode::train);
  for (double v : y.data()) EXPECT_EQ(v, 7.0);
}

TEST(BatchNorm, OutputMomentsFollowAffine) {
  BatchNormState st(3, 1e-12);
  const Tensor gamma({3}, std::vector<double>{0.5, 2.0, 1.5});
  const Tensor beta({3}, std::vector<double>{-1.0, 0.0, 3.0});
  const Tensor y = batchnorm2d(random_tensor({4, 3, 5, 5}, 13, -3.0, 5.0), gamma, beta, st, Mode::train);
  for (std::size_t c = 0; c < 3; ++c) {
    double m = 0.0, sq = 0.0;
    const double n = 4 * 25;
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t i = 0; i < 25; ++i) m += y.at(b, c, i / 5, i % 5);
    m /= n;
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t i = 0; i < 25; ++i) sq += std::pow(y.at(b, c, i / 5, i % 5) - m, 2);
    EXPECT_NEAR(m, beta[c], 1e-6);
    EXPECT_NEAR(std::sqrt(sq / n), gamma[c], 1e-6);
  }
}

TEST(BatchNorm, EvalBeforeTrainingThrows) {
  BatchNormState st(1);
  EXPECT_THROW(batchnorm2d(Tensor({1, 1, 2, 2}, 1.0), Tensor({1}, 1.0), Tensor({1}, 0.0), st, Mode::eval),
               std::logic_error);
}

TEST(BatchNorm, RunningStatisticsUpdate) {
  BatchNormState st(1, 1e-5, 0.1);
  const Tensor x({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  batchnorm2d(x, Tensor({1}, 1.0), Tensor({1}, 0.0), st, Mode::train);
  EXPECT_TRUE(st.initialized);
  EXPECT_DOUBLE_EQ(st.running_mean[0], 0.9 * 0.0 + 0.1 * 2.5);
  EXPECT_DOUBLE_EQ(st.running_var[0], 0.9 * 1.0 + 0.1 * (5.0 / 3.0));
}

TEST(Relu, Values) {
  EXPECT_EQ(relu(Tensor({3}, std::vector<double>{-1, 0, 2})), Tensor({3}, std::vector<double>{0, 0, 2}));
  EXPECT_EQ(relu(Tensor({4}, -3.0)), Tensor({4}, 0.0));
  const Tensor x = random_tensor({2, 2, 3, 3}, 14);
  EXPECT_EQ(relu(relu(x)), relu(x));
}

TEST(Softmax, SymmetricLogits) {
  const Tensor y = softmax_channels(Tensor({1, 2, 2, 2}, 0.0));
  for (double v : y.data()) EXPECT_EQ(v, 0.5);
}

TEST(Softmax, LargeLogitsStable) {
  Tensor x({1, 2, 1, 1}, 0.0);
  x[0] = 1000.0;
  const Tensor y = softmax_channels(x);
  EXPECT_EQ(y[0], 1.0);
  EXPECT_LT(y[1], 1e-300);
  EXPECT_TRUE(y.all_finite());
}

TEST(Softmax, JacobianMatchesFiniteDifferences) {
  const Tensor x = random_tensor({2, 2, 2, 2}, 15);
  const Tensor w = random_tensor({2, 2, 2, 2}, 16);
  const Tensor g = softmax_channels_backward(w, softmax_channels(x));
  EXPECT_LT(finite_difference_check([&](const Tensor& xi) { return dot(softmax_channels(xi), w); }, x, g, 1e-5), 1e-6);
}

}  // namespace
}  // namespace irisnet

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

#include <filesystem>
#include <fstream>
#include <irisnet/model.hpp>

#include "oracles.hpp"

namespace irisnet {
namespace {

using testing::random_tensor;

ArchConfig toy() {
  ArchConfig c;
  c.depth = 1;
  c.base_filters = 2;
  c.input_size = 4;
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("irisnet_model_test_" + name);
}

TEST(Arch, DefaultDilationSchedule) {
  ArchConfig c;
  EXPECT_EQ(c.resolved_dilations(), (std::vector<int>{1, 2, 2, 2, 2, 2, 2, 2, 1}));
  c.depth = 1;
  EXPECT_EQ(c.resolved_dilations(), (std::vector<int>{1, 2, 1}));
}

TEST(Arch, InvalidConfigsNameTheField) {
  auto expect_field = [](ArchConfig c, const std::string& field) {
    try {
      c.validate();
      FAIL() << "expected ConfigError for " << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  ArchConfig c = toy();
  c.depth = 0;
  expect_field(c, "depth");
  c = toy();
  c.input_size = 5;
  expect_field(c, "input_size");
  c = toy();
  c.dilation_schedule = {1, 2};
  expect_field(c, "dilation_schedule");
  c = toy();
  c.dilation_schedule = {2, 2, 1};
  expect_field(c, "dilation_schedule");
  c = toy();
  c.standard_kernel = 4;
  expect_field(c, "standard_kernel");
}

TEST(Arch, JsonRoundTrip) {
  ArchConfig c = toy();
  c.dilation_schedule = {1, 3, 1};
  c.bn_momentum = 0.05;
  EXPECT_EQ(arch_from_json(arch_to_json(c)), c);
  EXPECT_EQ(arch_from_json(arch_to_json(ArchConfig{})), ArchConfig{});
}

TEST(Model, ToyTopologyByHand) {
  Model m = build_irisnet(toy(), 1);
  std::vector<std::string> names;
  for (const auto& p : m.parameters()) names.push_back(p.name);
  const std::vector<std::string> unit = {".g", ".h", ".bias", ".bn.gamma", ".bn.beta"};
  std::vector<std::string> expect;
  for (const char* stage : {"enc0", "bottleneck", "dec0"}) {
    if (std::string(stage) == "dec0") expect.push_back("dec0.up");
    for (const char* conv : {".conv1", ".conv2"})
      for (const auto& s : unit) expect.push_back(std::string(stage) + conv + s);
  }
  expect.push_back("head.kernel");
  expect.push_back("head.bias");
  EXPECT_EQ(names, expect);
  EXPECT_EQ(m.bn_states().size(), 6u);

  const Tensor y = forward(m, random_tensor({1, 1, 4, 4}, 2), Mode::train);
  EXPECT_EQ(y.shape(), (Shape{1, 2, 4, 4}));
}

TEST(Model, ToyParameterCountByHand) {
  // enc0: 1->2 and 2->2 units; bottleneck: 2->4, 4->4; dec0: 4x2 up, 4->2, 2->2; head 2->2.
  auto unit = [](int in, int out) { return out * in * (9 + 9) + out + 2 * out; };
  const int hand = unit(1, 2) + unit(2, 2) + unit(2, 4) + unit(4, 4) + 4 * 2 * 2 * 2 + unit(4, 2) + unit(2, 2) +
                   2 * 2 + 2;
  EXPECT_EQ(hand, 842);
  const Model m = build_irisnet(toy(), 3);
  EXPECT_EQ(count_parameters(m), 842u);
  EXPECT_EQ(expected_parameter_count(toy()), 842u);
}

TEST(Model, CountIndependentOfSeed) {
  const ArchConfig c;
  EXPECT_EQ(count_parameters(build_irisnet(c, 1)), count_parameters(build_irisnet(c, 99)));
  EXPECT_EQ(count_parameters(build_irisnet(c, 1)), expected_parameter_count(c));
}

TEST(Model, ClosedFormMatchesAcrossConfigs) {
  for (int depth = 1; depth <= 4; ++depth)
    for (bool bottleneck : {true, false}) {
      if (!bottleneck && depth == 1) continue;
      ArchConfig c;
      c.depth = depth;
      c.base_filters = 3;
      c.bottleneck = bottleneck;
      c.dilated_kernel = 5;
      c.input_size = 16;
      EXPECT_EQ(count_parameters(build_irisnet(c, 1)), expected_parameter_count(c)) << depth << bottleneck;
    }
}

TEST(Model, SeedDeterminism) {
  const Model a = build_irisnet(toy(), 5), b = build_irisnet(toy(), 5), c = build_irisnet(toy(), 6);
  bool differs = false;
  for (std::size_t i = 0; i < a.parameters().size(); ++i) {
    EXPECT_EQ(a.parameters()[i].value, b.parameters()[i].value);
    differs = differs || !(a.parameters()[i].value == c.parameters()[i].value);
  }
  EXPECT_TRUE(differs);
}

TEST(Model, FullSizeShapeLaw) {
  ArchConfig c;
  Model m = build_irisnet(c, 1);
  const Tensor y = forward(m, random_tensor({1, 1, 128, 128}, 3, 0.0, 1.0), Mode::train);
  EXPECT_EQ(y.shape(), (Shape{1, 2, 128, 128}));
}

TEST(Model, OutputOnSimplexAndOpen) {
  ArchConfig c;
  c.depth = 2;
  c.base_filters = 4;
  c.input_size = 16;
  Model m = build_irisnet(c, 4);
  const Tensor y = forward(m, random_tensor({3, 1, 16, 16}, 5, 0.0, 1.0), Mode::train);
  ASSERT_TRUE(y.all_finite());
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < 256; ++i) {
      const double p0 = y.at(b, 0, i / 16, i % 16), p1 = y.at(b, 1, i / 16, i % 16);
      EXPECT_GT(p1, 0.0);
      EXPECT_LT(p1, 1.0);
      EXPECT_NEAR(p0 + p1, 1.0, 1e-12);
    }
}

TEST(Model, WrongSizeInstructsResize) {
  Model m = build_irisnet(toy(), 1);
  try {
    forward(m, Tensor({1, 1, 8, 8}, 0.0), Mode::train);
    FAIL() << "expected error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
}

TEST(Model, FusedAndTwoPassAgree) {
  ArchConfig c;
  c.depth = 2;
  c.base_filters = 4;
  c.input_size = 16;
  Model m = build_irisnet(c, 7);
  const Tensor x = random_tensor({2, 1, 16, 16}, 8, 0.0, 1.0);
  forward(m, x, Mode::train);
  EXPECT_LT(max_abs_diff(forward(m, x, Mode::eval, ConvPath::fused), forward(m, x, Mode::eval, ConvPath::two_pass)),
            1e-12);
}

TEST(Model, NoBottleneckVariant) {
  ArchConfig c;
  c.depth = 3;
  c.base_filters = 2;
  c.input_size = 8;
  c.bottleneck = false;
  EXPECT_EQ(c.block_count(), 5);
  Model m = build_irisnet(c, 1);
  EXPECT_FALSE(m.bottleneck().has_value());
  EXPECT_EQ(m.decoders().size(), 2u);
  EXPECT_EQ(forward(m, random_tensor({1, 1, 8, 8}, 2), Mode::train).shape(), (Shape{1, 2, 8, 8}));
}

TEST(Checkpoint, RoundTripBitExact) {
  ArchConfig c;
  c.depth = 2;
  c.base_filters = 3;
  c.input_size = 8;
  Model m = build_irisnet(c, 9);
  const Tensor x = random_tensor({2, 1, 8, 8}, 10);
  forward(m, x, Mode::train);
  const auto path = temp_file("roundtrip.ckpt");
  save_checkpoint(m, path);
  Model back = load_checkpoint(path);
  EXPECT_EQ(back.config(), m.config());
  EXPECT_EQ(back.seed(), m.seed());
  EXPECT_EQ(forward(back, x, Mode::eval), forward(m, x, Mode::eval));
  std::filesystem::remove(path);
}

TEST(Checkpoint, TruncatedFileRejected) {
  Model m = build_irisnet(toy(), 1);
  const auto path = temp_file("trunc.ckpt");
  save_checkpoint(m, path);
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 9);
  EXPECT_THROW(load_checkpoint(path), CheckpointError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, CorruptByteRejected) {
  Model m = build_irisnet(toy(), 1);
  const auto path = temp_file("corrupt.ckpt");
  save_checkpoint(m, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(static_cast<std::streamoff>(std::filesystem::file_size(path) / 2));
    f.put('\x5a');
  }
  EXPECT_THROW(load_checkpoint(path), CheckpointError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, IncompatibleArchNamesField) {
  Model m = build_irisnet(toy(), 1);
  const auto path = temp_file("arch.ckpt");
  save_checkpoint(m, path);
  ArchConfig other = toy();
  other.base_filters = 4;
  try {
    load_checkpoint(path, other);
    FAIL() << "expected CheckpointError";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("base_filters"), std::string::npos);
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace irisnet

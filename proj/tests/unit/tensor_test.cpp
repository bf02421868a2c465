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

#include <irisnet/tensor.hpp>

#include "oracles.hpp"

namespace irisnet {
namespace {

TEST(Tensor, FillCreatesZeros) {
  const Tensor t = tensor_create({2, 2}, 0.0);
  EXPECT_EQ(t.size(), 4u);
  for (double v : t.data()) EXPECT_EQ(v, 0.0);
}

TEST(Tensor, ValuesAreRowMajor) {
  const Tensor t = tensor_create({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(t.at(0, 0, 0, 0), 1.0);
  EXPECT_EQ(t.at(0, 0, 0, 1), 2.0);
  EXPECT_EQ(t.at(0, 0, 1, 0), 3.0);
  EXPECT_EQ(t.at(0, 0, 1, 1), 4.0);
}

TEST(Tensor, LengthMismatchNamesBothSizes) {
  try {
    tensor_create({3}, std::vector<double>{1, 2});
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('2'), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
  }
}

TEST(Tensor, ZeroExtentRejected) { EXPECT_THROW(Tensor({2, 0}, 1.0), ShapeError); }

TEST(Tensor, AddSmallCase) {
  const Tensor a({2}, std::vector<double>{1, 2});
  const Tensor b({2}, std::vector<double>{3, 4});
  EXPECT_EQ(elementwise_add(a, b), Tensor({2}, std::vector<double>{4, 6}));
}

TEST(Tensor, AddZerosIsIdentity) {
  const Tensor x = testing::random_tensor({2, 3, 4, 5}, 1);
  EXPECT_EQ(elementwise_add(x, Tensor::zeros_like(x)), x);
}

TEST(Tensor, AddMatchesScalarLoop) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor a = testing::random_tensor({2, 3, 4, 4}, rng);
    const Tensor b = testing::random_tensor({2, 3, 4, 4}, rng);
    const Tensor s = elementwise_add(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(s[i], a[i] + b[i]);
  }
}

TEST(Tensor, AddShapeMismatchThrows) {
  EXPECT_THROW(elementwise_add(Tensor({2}, 0.0), Tensor({3}, 0.0)), ShapeError);
  EXPECT_THROW(elementwise_add(Tensor({2, 3}, 0.0), Tensor({3, 2}, 0.0)), ShapeError);
}

TEST(Tensor, ConcatChannelsShape) {
  const Tensor c = concat_channels(Tensor({1, 2, 4, 4}, 1.0), Tensor({1, 3, 4, 4}, 2.0));
  EXPECT_EQ(c.shape(), (Shape{1, 5, 4, 4}));
}

TEST(Tensor, ConcatSliceRoundTrip) {
  const Tensor a = testing::random_tensor({2, 2, 3, 3}, 3);
  const Tensor b = testing::random_tensor({2, 4, 3, 3}, 4);
  const Tensor c = concat_channels(a, b);
  EXPECT_EQ(slice_channels(c, 0, 2), a);
  EXPECT_EQ(slice_channels(c, 2, 6), b);
}

TEST(Tensor, ConcatSpatialMismatchListsDims) {
  try {
    concat_channels(Tensor({1, 2, 4, 4}, 0.0), Tensor({1, 2, 4, 5}, 0.0));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find('5'), std::string::npos);
  }
  EXPECT_THROW(concat_channels(Tensor({2, 2, 4, 4}, 0.0), Tensor({1, 2, 4, 4}, 0.0)), ShapeError);
}

TEST(Tensor, Reductions) {
  const Tensor a({3}, std::vector<double>{1, -4, 2});
  const Tensor b({3}, std::vector<double>{2, 1, 1});
  EXPECT_EQ(sum(a), -1.0);
  EXPECT_EQ(dot(a, b), 0.0);
  EXPECT_EQ(max_abs(a), 4.0);
  EXPECT_EQ(max_abs_diff(a, b), 5.0);
}

TEST(Tensor, SliceBatch) {
  const Tensor t = testing::random_tensor({3, 2, 2, 2}, 5);
  const Tensor s = slice_batch(t, 1, 2);
  EXPECT_EQ(s.shape(), (Shape{1, 2, 2, 2}));
  EXPECT_EQ(s.at(0, 1, 1, 0), t.at(1, 1, 1, 0));
}

}  // namespace
}  // namespace irisnet

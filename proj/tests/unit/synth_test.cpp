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
#include <irisnet/synth.hpp>
#include <set>

#include "oracles.hpp"

namespace irisnet {
namespace {

PhantomParams params(std::uint64_t seed) {
  PhantomParams p;
  p.seed = seed;
  return p;
}

TEST(Phantom, Deterministic) {
  const auto a = generate_phantom(params(3)), b = generate_phantom(params(3)), c = generate_phantom(params(4));
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.centerline, b.centerline);
  EXPECT_FALSE(a.image == c.image);
}

TEST(Phantom, CleanImageMatchesMask) {
  PhantomParams p = params(5);
  p.speckle_sigma = 0.0;
  p.shadow_max = 0;
  const auto s = generate_phantom(p);
  EXPECT_EQ(binarize(s.image, p.background_level + 1e-9), s.foreground());
  for (double v : s.image.data()) EXPECT_TRUE(v == p.background_level || v == s.info.brightness);
}

TEST(Phantom, MaskConsistentAndCenterlineInside) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = generate_phantom(params(seed));
    EXPECT_TRUE(mask_is_consistent(s.mask));
    const BinaryMask fg = s.foreground();
    for (const auto& pt : s.centerline) {
      EXPECT_TRUE(fg.at(static_cast<std::size_t>(pt.row), static_cast<std::size_t>(pt.col)));
    }
    EXPECT_TRUE(is_valid_contour(s.centerline));
    for (double v : s.image.data()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Phantom, SkeletonContourNearCenterline) {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const auto s = generate_phantom(params(seed));
    const Contour c = mask_to_contour(skeletonize(s.foreground()));
    EXPECT_LE(msd(s.centerline, c), s.info.thickness / 2.0 + 1.0) << "seed " << seed;
  }
}

TEST(Phantom, DegenerateBandRejected) {
  PhantomParams p = params(1);
  p.rows = 16;
  p.band_top = 0.5;
  p.band_bottom = 0.6;
  EXPECT_THROW(generate_phantom(p), std::invalid_argument);
}

TEST(Pchip, InterpolatesKnotsAndStaysMonotone) {
  const std::vector<double> x{0, 1, 2, 3}, y{0, 1, 1, 3};
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(pchip(x, y, x[i]), y[i]);
  double prev = -1.0;
  for (double t = 0.0; t <= 3.0; t += 0.01) {
    const double v = pchip(x, y, t);
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  for (double t = 1.0; t <= 2.0; t += 0.05) EXPECT_NEAR(pchip(x, y, t), 1.0, 1e-12);
}

TEST(Augment, IdentityIsExact) {
  const auto s = generate_phantom(params(7));
  const auto out = apply_augmentation(s, AugmentParams{});
  EXPECT_EQ(out.image, s.image);
  EXPECT_EQ(out.mask, s.mask);
  EXPECT_EQ(out.centerline, s.centerline);
  Rng rng(1);
  EXPECT_EQ(augment(s, rng, AugmentRanges::none()).image, s.image);
}

TEST(Augment, DoubleFlipRestores) {
  const auto s = generate_phantom(params(8));
  AugmentParams flip;
  flip.flip = true;
  const auto once = apply_augmentation(s, flip);
  EXPECT_FALSE(once.image == s.image);
  const auto twice = apply_augmentation(once, flip);
  EXPECT_EQ(twice.image, s.image);
  EXPECT_EQ(twice.mask, s.mask);
  EXPECT_EQ(twice.centerline, s.centerline);
}

TEST(Augment, MasksStayBinaryOverManyDraws) {
  const auto s = generate_phantom(params(9));
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto out = augment(s, rng, AugmentRanges{});
    ASSERT_TRUE(mask_is_consistent(out.mask)) << "draw " << i;
    const BinaryMask fg = out.foreground();
    for (const auto& p : out.centerline) {
      ASSERT_TRUE(fg.at(static_cast<std::size_t>(p.row), static_cast<std::size_t>(p.col)));
    }
  }
}

TEST(Augment, OutOfRangeRejected) {
  AugmentRanges r;
  r.max_rotation_deg = 40.0;
  Rng rng(3);
  EXPECT_THROW(sample_augmentation(r, rng), std::invalid_argument);
  r = AugmentRanges{};
  r.zoom_min = 0.2;
  EXPECT_THROW(sample_augmentation(r, rng), std::invalid_argument);
}

TEST(Augment, ShiftMovesContent) {
  PhantomParams p = params(10);
  p.speckle_sigma = 0.0;
  p.shadow_max = 0;
  const auto s = generate_phantom(p);
  AugmentParams a;
  a.shift_x = 3.0;
  a.shift_y = -2.0;
  const auto out = apply_augmentation(s, a);
  for (std::size_t r = 0; r + 2 < 64; ++r)
    for (std::size_t c = 3; c < 64; ++c) EXPECT_EQ(out.image[r * 64 + c], s.image[(r + 2) * 64 + c - 3]);
}

TEST(Split, DefaultRatios) {
  const auto a = split_indices(100, SplitRatios{}, 1);
  EXPECT_EQ(a.train.size(), 80u);
  EXPECT_EQ(a.validation.size(), 10u);
  EXPECT_EQ(a.test.size(), 10u);
  const auto b = split_indices(10, SplitRatios{}, 1);
  EXPECT_EQ(b.train.size(), 8u);
  EXPECT_EQ(b.validation.size(), 1u);
  EXPECT_EQ(b.test.size(), 1u);
  EXPECT_THROW(split_indices(5, SplitRatios{}, 1), std::invalid_argument);
}

TEST(Split, PartitionsAreDisjointAndExhaustive) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = split_indices(37, SplitRatios{}, seed);
    std::multiset<std::size_t> all;
    for (const auto* part : {&s.train, &s.validation, &s.test}) all.insert(part->begin(), part->end());
    ASSERT_EQ(all.size(), 37u);
    for (std::size_t i = 0; i < 37; ++i) ASSERT_EQ(all.count(i), 1u);
    EXPECT_EQ(split_indices(37, SplitRatios{}, seed).train, s.train);
  }
}

TEST(Split, DatasetTemplate) {
  std::vector<int> v(20);
  for (int i = 0; i < 20; ++i) v[static_cast<std::size_t>(i)] = i;
  const auto s = split_dataset(v, SplitRatios{}, 4);
  EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), 20u);
}

TEST(Io, PgmRoundTripQuantizes) {
  Tensor img({3, 5}, 0.0);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(i) / 14.0;
  const auto path = std::filesystem::temp_directory_path() / "irisnet_synth_test.pgm";
  write_pgm(path, img);
  const Tensor back = read_pgm(path);
  ASSERT_EQ(back.shape(), img.shape());
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back[i], img[i], 0.5 / 255.0 + 1e-12);
  std::filesystem::remove(path);
}

TEST(Io, SampleRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "irisnet_synth_sample";
  std::filesystem::create_directories(dir);
  auto s = generate_phantom(params(11));
  s.id = "x";
  save_sample(dir, s);
  const auto back = load_sample(dir, "x");
  EXPECT_EQ(back.mask, s.mask);
  EXPECT_EQ(back.centerline, s.centerline);
  EXPECT_EQ(phantom_params_to_json(back.params), phantom_params_to_json(s.params));
  EXPECT_EQ(back.info.span_begin, s.info.span_begin);
  std::filesystem::remove_all(dir);
}

TEST(Io, ParamsJsonRoundTrip) {
  PhantomParams p = params(12);
  p.thickness_min = 3.25;
  p.shadow_max = 1;
  EXPECT_EQ(phantom_params_to_json(phantom_params_from_json(phantom_params_to_json(p))), phantom_params_to_json(p));
}

}  // namespace
}  // namespace irisnet

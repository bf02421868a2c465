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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "irisnet/eval.hpp"
#include "irisnet/random.hpp"
#include "irisnet/tensor.hpp"

namespace irisnet {

/// Generator settings for an ultrasound-like tongue phantom. Ranges are
/// sampled per phantom from `seed`.
struct PhantomParams {
  std::size_t rows = 64;
  std::size_t cols = 64;
  int control_points = 5;
  double band_top = 0.45;     ///< fraction of height
  double band_bottom = 0.80;  ///< fraction of height
  double span_left_min = 0.05, span_left_max = 0.20;    ///< curve start, fraction of width
  double span_right_min = 0.80, span_right_max = 0.95;  ///< curve end, fraction of width
  double thickness_min = 4.0, thickness_max = 8.0;      ///< pixels
  double brightness_min = 0.7, brightness_max = 1.0;
  double background_level = 0.15;
  int speckle_grain = 2;  ///< box-blur width of the speckle field, pixels
  double speckle_sigma = 0.35;
  int shadow_max = 3;  ///< distractor curves drawn: uniform in [0, shadow_max]
  double shadow_intensity = 0.35;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Values realized for one phantom.
struct PhantomInfo {
  double thickness = 0.0;
  double brightness = 0.0;
  int shadows = 0;
  std::size_t span_begin = 0, span_end = 0;  ///< inclusive column range of the curve
};

struct SegmentationSample {
  std::string id;
  Tensor image;  ///< H x W in [0, 1]
  Tensor mask;   ///< 2 x H x W; channel 0 background, channel 1 foreground
  Contour centerline;
  PhantomParams params;
  PhantomInfo info;

  std::size_t rows() const { return image.dim(0); }
  std::size_t cols() const { return image.dim(1); }
  BinaryMask foreground() const;
};

/// Checks mask values in {0,1} and background + foreground == 1 everywhere.
bool mask_is_consistent(const Tensor& mask);
/// Two-channel mask from a foreground mask.
Tensor two_channel_mask(const BinaryMask& foreground);

SegmentationSample generate_phantom(const PhantomParams& params);

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolation through
/// (x[i], y[i]) with strictly increasing x, evaluated at `at`.
double pchip(const std::vector<double>& x, const std::vector<double>& y, double at);

// ---------------------------------------------------------------------------

struct AugmentRanges {
  double flip_probability = 0.5;
  double max_rotation_deg = 25.0;
  double max_shift_px = 40.0;  ///< per axis
  double zoom_min = 0.5;
  double zoom_max = 1.5;

  static AugmentRanges none() { return AugmentRanges{0.0, 0.0, 0.0, 1.0, 1.0}; }
  void validate() const;
};

struct AugmentParams {
  bool flip = false;
  double angle_deg = 0.0;
  double shift_x = 0.0;
  double shift_y = 0.0;
  double zoom = 1.0;
};

AugmentParams sample_augmentation(const AugmentRanges& ranges, Rng& rng);

/// Flip, then rotate and zoom about the image centre, then shift. Image and
/// mask are resampled bilinearly with zero fill; the foreground channel is
/// re-binarized at 0.5 and the background recomputed as its complement. The
/// centerline follows the same map and keeps only points that land on the
/// transformed foreground.
SegmentationSample apply_augmentation(const SegmentationSample& sample, const AugmentParams& params);
SegmentationSample augment(const SegmentationSample& sample, Rng& rng, const AugmentRanges& ranges);

// ---------------------------------------------------------------------------

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct SplitIndices {
  std::vector<std::size_t> train, validation, test;
};

/// Seeded shuffle then contiguous partition. Validation and test sizes are
/// floor(n * ratio); the remainder goes to training.
SplitIndices split_indices(std::size_t count, const SplitRatios& ratios, std::uint64_t seed);

template <typename T>
struct Split {
  std::vector<T> train, validation, test;
};

template <typename T>
Split<T> split_dataset(const std::vector<T>& samples, const SplitRatios& ratios, std::uint64_t seed) {
  const auto idx = split_indices(samples.size(), ratios, seed);
  Split<T> s;
  for (auto i : idx.train) s.train.push_back(samples[i]);
  for (auto i : idx.validation) s.validation.push_back(samples[i]);
  for (auto i : idx.test) s.test.push_back(samples[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Persistence: binary PGM (P5, maxval 255) and a JSON sidecar.

void write_pgm(const std::filesystem::path& path, const Tensor& image);
Tensor read_pgm(const std::filesystem::path& path);

/// Writes <id>.pgm, <id>_mask.pgm (foreground only) and <id>.json.
void save_sample(const std::filesystem::path& dir, const SegmentationSample& sample);
SegmentationSample load_sample(const std::filesystem::path& dir, const std::string& id);

std::string phantom_params_to_json(const PhantomParams& params);
PhantomParams phantom_params_from_json(const std::string& text);

}  // namespace irisnet

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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "irisnet/tensor.hpp"

namespace irisnet {

/// H x W grid of {0, 1}.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t rows, std::size_t cols);
  BinaryMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return bits_.size(); }

  std::uint8_t at(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, bool on) { bits_[r * cols_ + c] = on ? 1 : 0; }
  /// Out-of-range coordinates read as background.
  std::uint8_t get(long r, long c) const {
    if (r < 0 || c < 0 || r >= static_cast<long>(rows_) || c >= static_cast<long>(cols_)) return 0;
    return bits_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)];
  }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::size_t count() const;
  bool empty_foreground() const { return count() == 0; }
  bool contains(const BinaryMask& other) const;  ///< other is a subset of this

  /// H x W tensor of 0.0 / 1.0.
  Tensor to_tensor() const;
  static BinaryMask from_tensor(const Tensor& t);  ///< values must be exactly 0 or 1

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct Point {
  double row = 0.0;
  double col = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered tongue curve, left to right. Coordinates are real so that a
/// column's mean row is kept exactly.
using Contour = std::vector<Point>;

/// Checks ordering (non-decreasing column), uniqueness, and length >= 2.
bool is_valid_contour(const Contour& contour);

// ---------------------------------------------------------------------------

/// mask = prob >= tau. `prob` is an H x W map in [0, 1]; tau in (0, 1).
BinaryMask binarize(const Tensor& prob, double tau);

/// |a & b| / |a | b|, 1 when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);
/// sum(min(p, t)) / sum(max(p, t)), 1 when both are identically zero.
double soft_iou(const Tensor& prob, const BinaryMask& truth);
double miou(const std::vector<std::pair<BinaryMask, BinaryMask>>& pairs);

/// Zhang-Suen thinning iterated to a fixed point.
BinaryMask skeletonize(const BinaryMask& mask);

/// 8-connected components as labels 1..n (0 = background), numbered in
/// row-major order of their first pixel.
std::vector<int> label_components(const BinaryMask& mask, int* count = nullptr);
BinaryMask largest_component(const BinaryMask& mask);

/// Largest 8-connected component, then one point per occupied column at the
/// mean row of that column's pixels.
Contour mask_to_contour(const BinaryMask& skeleton);

/// Symmetric mean of nearest-point distances, in pixels.
double msd(const Contour& a, const Contour& b);

inline double px_to_mm(double px, double mm_per_px) { return px * mm_per_px; }

struct DiversityReport {
  std::vector<double> distances;  ///< RMS distance of each image to the mean image
  double score = 0.0;             ///< mean of `distances`
};

DiversityReport dataset_diversity(const std::vector<Tensor>& images);

void write_contour_csv(const std::filesystem::path& path, const Contour& contour);
Contour read_contour_csv(const std::filesystem::path& path);

}  // namespace irisnet

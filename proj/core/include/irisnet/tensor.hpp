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
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace irisnet {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_volume(const Shape& shape);

/// Raised for every shape, length, or argument contract violation in the
/// numeric core.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major array of doubles. 4-D tensors use B x C x H x W.
///
/// A Tensor owns its storage and has value semantics; copies are deep.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, double fill);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }
  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_, 0.0); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // 4-D accessors, unchecked.
  double& at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
    return data_[((b * shape_[1] + c) * shape_[2] + y) * shape_[3] + x];
  }
  double at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[((b * shape_[1] + c) * shape_[2] + y) * shape_[3] + x];
  }

  std::size_t batch() const { return dim(0); }
  std::size_t channels() const { return dim(1); }
  std::size_t height() const { return dim(2); }
  std::size_t width() const { return dim(3); }

  /// Same data, new shape with equal volume.
  Tensor reshaped(Shape shape) const;

  bool all_finite() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Builds a tensor, validating the shape and (for value lists) the length.
Tensor tensor_create(Shape shape, double fill);
Tensor tensor_create(Shape shape, std::vector<double> values);

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);
void require_rank(const Tensor& t, std::size_t rank, const char* what);

Tensor elementwise_add(const Tensor& a, const Tensor& b);
Tensor elementwise_sub(const Tensor& a, const Tensor& b);
Tensor elementwise_mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
/// a += b in place.
void accumulate(Tensor& a, const Tensor& b);

double sum(const Tensor& a);
double dot(const Tensor& a, const Tensor& b);
double max_abs(const Tensor& a);
double max_abs_diff(const Tensor& a, const Tensor& b);

/// Concatenates along channels; a's channels come first.
Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Channels [begin, end) of a 4-D tensor.
Tensor slice_channels(const Tensor& t, std::size_t begin, std::size_t end);

/// Batch items [begin, end) of a 4-D tensor.
Tensor slice_batch(const Tensor& t, std::size_t begin, std::size_t end);

}  // namespace irisnet

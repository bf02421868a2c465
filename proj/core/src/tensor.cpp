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

#include "irisnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace irisnet {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

std::size_t shape_volume(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one extent");
  for (auto e : shape) {
    if (e == 0) throw ShapeError("tensor extents must be >= 1, got " + shape_to_string(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_volume(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  validate_shape(shape_);
  const auto expected = shape_volume(shape_);
  if (data_.size() != expected) {
    throw ShapeError("value length " + std::to_string(data_.size()) + " != " +
                     std::to_string(expected) + " required by shape " + shape_to_string(shape_));
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                     shape_to_string(shape_));
  }
  return shape_[axis];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_volume(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " + shape_to_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor tensor_create(Shape shape, double fill) { return Tensor(std::move(shape), fill); }

Tensor tensor_create(Shape shape, std::vector<double> values) {
  return Tensor(std::move(shape), std::move(values));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
  }
}

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) +
                     ", got shape " + shape_to_string(t.shape()));
  }
}

namespace {

template <typename F>
Tensor zip(const Tensor& a, const Tensor& b, const char* what, F f) {
  require_same_shape(a, b, what);
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

}  // namespace

Tensor elementwise_add(const Tensor& a, const Tensor& b) {
  return zip(a, b, "elementwise_add", [](double x, double y) { return x + y; });
}

Tensor elementwise_sub(const Tensor& a, const Tensor& b) {
  return zip(a, b, "elementwise_sub", [](double x, double y) { return x - y; });
}

Tensor elementwise_mul(const Tensor& a, const Tensor& b) {
  return zip(a, b, "elementwise_mul", [](double x, double y) { return x * y; });
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = a;
  for (auto& v : out.storage()) v *= factor;
  return out;
}

void accumulate(Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "accumulate");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

double sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return s;
}

double dot(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  require_rank(a, 4, "concat_channels");
  require_rank(b, 4, "concat_channels");
  if (a.batch() != b.batch() || a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError("concat_channels: batch/spatial mismatch " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
  }
  const std::size_t ca = a.channels(), cb = b.channels();
  const std::size_t plane = a.height() * a.width();
  Tensor out({a.batch(), ca + cb, a.height(), a.width()}, 0.0);
  auto dst = out.storage().begin();
  for (std::size_t n = 0; n < a.batch(); ++n) {
    auto sa = a.storage().begin() + static_cast<std::ptrdiff_t>(n * ca * plane);
    dst = std::copy(sa, sa + static_cast<std::ptrdiff_t>(ca * plane), dst);
    auto sb = b.storage().begin() + static_cast<std::ptrdiff_t>(n * cb * plane);
    dst = std::copy(sb, sb + static_cast<std::ptrdiff_t>(cb * plane), dst);
  }
  return out;
}

Tensor slice_channels(const Tensor& t, std::size_t begin, std::size_t end) {
  require_rank(t, 4, "slice_channels");
  if (begin >= end || end > t.channels()) {
    throw ShapeError("slice_channels: invalid range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") for shape " + shape_to_string(t.shape()));
  }
  const std::size_t plane = t.height() * t.width();
  const std::size_t c = end - begin;
  Tensor out({t.batch(), c, t.height(), t.width()}, 0.0);
  for (std::size_t n = 0; n < t.batch(); ++n) {
    auto src = t.storage().begin() + static_cast<std::ptrdiff_t>((n * t.channels() + begin) * plane);
    std::copy(src, src + static_cast<std::ptrdiff_t>(c * plane),
              out.storage().begin() + static_cast<std::ptrdiff_t>(n * c * plane));
  }
  return out;
}

Tensor slice_batch(const Tensor& t, std::size_t begin, std::size_t end) {
  require_rank(t, 4, "slice_batch");
  if (begin >= end || end > t.batch()) {
    throw ShapeError("slice_batch: invalid range for shape " + shape_to_string(t.shape()));
  }
  const std::size_t item = t.channels() * t.height() * t.width();
  std::vector<double> values(t.storage().begin() + static_cast<std::ptrdiff_t>(begin * item),
                             t.storage().begin() + static_cast<std::ptrdiff_t>(end * item));
  return Tensor({end - begin, t.channels(), t.height(), t.width()}, std::move(values));
}

}  // namespace irisnet

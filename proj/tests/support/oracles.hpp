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

// Independent brute-force references used by the unit and acceptance tests.
// Written from the definitions, sharing no code with the library kernels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <irisnet/eval.hpp>
#include <irisnet/random.hpp>
#include <irisnet/tensor.hpp>

namespace irisnet::testing {

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape), 0.0);
  for (auto& v : t.storage()) v = rng.uniform(lo, hi);
  return t;
}

inline Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  return random_tensor(std::move(shape), rng, lo, hi);
}

/// Zero-padded "same" or explicit-pad cross-correlation straight from the sum.
inline Tensor conv_oracle(const Tensor& x, const Tensor& k, const std::vector<double>& bias, int dilation, int pad,
                          int stride = 1) {
  const long B = static_cast<long>(x.dim(0)), C = static_cast<long>(x.dim(1));
  const long H = static_cast<long>(x.dim(2)), W = static_cast<long>(x.dim(3));
  const long O = static_cast<long>(k.dim(0)), K = static_cast<long>(k.dim(2));
  const long span = (K - 1) * dilation + 1;
  const long Ho = (H + 2 * pad - span) / stride + 1, Wo = (W + 2 * pad - span) / stride + 1;
  Tensor y({static_cast<std::size_t>(B), static_cast<std::size_t>(O), static_cast<std::size_t>(Ho),
            static_cast<std::size_t>(Wo)},
           0.0);
  for (long b = 0; b < B; ++b)
    for (long o = 0; o < O; ++o)
      for (long i = 0; i < Ho; ++i)
        for (long j = 0; j < Wo; ++j) {
          double acc = bias.empty() ? 0.0 : bias[static_cast<std::size_t>(o)];
          for (long c = 0; c < C; ++c)
            for (long u = 0; u < K; ++u)
              for (long v = 0; v < K; ++v) {
                const long r = i * stride - pad + u * dilation, q = j * stride - pad + v * dilation;
                if (r < 0 || q < 0 || r >= H || q >= W) continue;
                acc += x[static_cast<std::size_t>(((b * C + c) * H + r) * W + q)] *
                       k[static_cast<std::size_t>(((o * C + c) * K + u) * K + v)];
              }
          y[static_cast<std::size_t>(((b * O + o) * Ho + i) * Wo + j)] = acc;
        }
  return y;
}

inline double iou_oracle(const BinaryMask& a, const BinaryMask& b) {
  long inter = 0, uni = 0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      inter += (a.at(r, c) && b.at(r, c)) ? 1 : 0;
      uni += (a.at(r, c) || b.at(r, c)) ? 1 : 0;
    }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double soft_iou_oracle(const Tensor& p, const BinaryMask& t) {
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const double pv = p[r * t.cols() + c], tv = t.at(r, c);
      num += std::min(pv, tv);
      den += std::max(pv, tv);
    }
  return den == 0.0 ? 1.0 : num / den;
}

inline double msd_oracle(const Contour& a, const Contour& b) {
  auto side = [](const Contour& from, const Contour& to) {
    double total = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, std::hypot(p.row - q.row, p.col - q.col));
      total += best;
    }
    return total;
  };
  return (side(a, b) + side(b, a)) / static_cast<double>(a.size() + b.size());
}

/// Dice loss on channel 1 of B x 2 x H x W tensors, smoothing s.
inline double dice_oracle(const Tensor& p, const Tensor& t, double s) {
  double inter = 0.0, ps = 0.0, ts = 0.0;
  const std::size_t plane = p.dim(2) * p.dim(3);
  for (std::size_t b = 0; b < p.dim(0); ++b)
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t k = (b * 2 + 1) * plane + i;
      inter += p[k] * t[k];
      ps += p[k];
      ts += t[k];
    }
  return 1.0 - (2.0 * inter + s) / (ps + ts + s);
}

inline BinaryMask mask_from_bits(std::size_t rows, std::size_t cols, unsigned long bits) {
  BinaryMask m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) m.set(i / cols, i % cols, ((bits >> i) & 1UL) != 0);
  return m;
}

inline BinaryMask random_mask(std::size_t rows, std::size_t cols, Rng& rng, double p = 0.5) {
  BinaryMask m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rng.bernoulli(p));
  return m;
}

/// Union of random filled discs and rectangles.
inline BinaryMask random_blob(std::size_t rows, std::size_t cols, Rng& rng) {
  BinaryMask m(rows, cols);
  const int shapes = 1 + static_cast<int>(rng.below(4));
  for (int s = 0; s < shapes; ++s) {
    const double cy = rng.uniform(0.0, static_cast<double>(rows)), cx = rng.uniform(0.0, static_cast<double>(cols));
    const double ry = rng.uniform(1.0, static_cast<double>(rows) / 3.0);
    const double rx = rng.uniform(1.0, static_cast<double>(cols) / 3.0);
    const bool disc = rng.bernoulli(0.5);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const double dy = (static_cast<double>(r) - cy) / ry, dx = (static_cast<double>(c) - cx) / rx;
        const bool in = disc ? dy * dy + dx * dx <= 1.0 : std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
        if (in) m.set(r, c, true);
      }
  }
  return m;
}

/// True when no 2 x 2 window is entirely foreground.
inline bool one_pixel_wide(const BinaryMask& m) {
  for (std::size_t r = 0; r + 1 < m.rows(); ++r)
    for (std::size_t c = 0; c + 1 < m.cols(); ++c)
      if (m.at(r, c) && m.at(r + 1, c) && m.at(r, c + 1) && m.at(r + 1, c + 1)) return false;
  return true;
}

/// Number of 8-connected foreground components, by flood fill.
inline int component_count(const BinaryMask& m) {
  std::vector<char> seen(m.size(), 0);
  int n = 0;
  for (std::size_t start = 0; start < m.size(); ++start) {
    if (!m.bits()[start] || seen[start]) continue;
    ++n;
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const long r = static_cast<long>(i / m.cols()), c = static_cast<long>(i % m.cols());
      for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc) {
          if (!m.get(r + dr, c + dc)) continue;
          const std::size_t j = static_cast<std::size_t>(r + dr) * m.cols() + static_cast<std::size_t>(c + dc);
          if (!seen[j]) {
            seen[j] = 1;
            stack.push_back(j);
          }
        }
    }
  }
  return n;
}

}  // namespace irisnet::testing

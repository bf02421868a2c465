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

#include "irisnet/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace irisnet {

BinaryMask::BinaryMask(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

BinaryMask::BinaryMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> bits)
    : rows_(rows), cols_(cols), bits_(std::move(bits)) {
  if (bits_.size() != rows * cols) {
    throw ShapeError("BinaryMask: " + std::to_string(bits_.size()) + " values for a " +
                     std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("BinaryMask: values must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BinaryMask::contains(const BinaryMask& other) const {
  if (other.rows_ != rows_ || other.cols_ != cols_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (other.bits_[i] && !bits_[i]) return false;
  }
  return true;
}

Tensor BinaryMask::to_tensor() const {
  Tensor t({rows_, cols_}, 0.0);
  for (std::size_t i = 0; i < bits_.size(); ++i) t[i] = bits_[i];
  return t;
}

BinaryMask BinaryMask::from_tensor(const Tensor& t) {
  require_rank(t, 2, "BinaryMask::from_tensor");
  std::vector<std::uint8_t> bits(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != 0.0 && t[i] != 1.0) throw std::invalid_argument("BinaryMask::from_tensor: non-binary value");
    bits[i] = t[i] == 1.0 ? 1 : 0;
  }
  return BinaryMask(t.dim(0), t.dim(1), std::move(bits));
}

bool is_valid_contour(const Contour& contour) {
  if (contour.size() < 2) return false;
  for (std::size_t i = 1; i < contour.size(); ++i) {
    if (contour[i].col < contour[i - 1].col) return false;
  }
  for (std::size_t i = 0; i < contour.size(); ++i) {
    for (std::size_t j = i + 1; j < contour.size() && contour[j].col == contour[i].col; ++j) {
      if (contour[j] == contour[i]) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

BinaryMask binarize(const Tensor& prob, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("binarize: threshold must lie in (0, 1), got " + std::to_string(tau));
  }
  require_rank(prob, 2, "binarize");
  BinaryMask m(prob.dim(0), prob.dim(1));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) m.set(r, c, prob[r * m.cols() + c] >= tau);
  }
  return m;
}

namespace {

void require_same_grid(std::size_t ra, std::size_t ca, std::size_t rb, std::size_t cb, const char* what) {
  if (ra != rb || ca != cb) {
    throw ShapeError(std::string(what) + ": grid mismatch " + std::to_string(ra) + "x" + std::to_string(ca) +
                     " vs " + std::to_string(rb) + "x" + std::to_string(cb));
  }
}

}  // namespace

double iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_grid(a.rows(), a.cols(), b.rows(), b.cols(), "iou");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a.bits()[i] & b.bits()[i];
    uni += a.bits()[i] | b.bits()[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double soft_iou(const Tensor& prob, const BinaryMask& truth) {
  require_rank(prob, 2, "soft_iou");
  require_same_grid(prob.dim(0), prob.dim(1), truth.rows(), truth.cols(), "soft_iou");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double t = truth.bits()[i];
    num += std::min(prob[i], t);
    den += std::max(prob[i], t);
  }
  return den == 0.0 ? 1.0 : num / den;
}

double miou(const std::vector<std::pair<BinaryMask, BinaryMask>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("miou: no prediction/truth pairs");
  double s = 0.0;
  for (const auto& [pred, truth] : pairs) s += iou(pred, truth);
  return s / static_cast<double>(pairs.size());
}

// ---------------------------------------------------------------------------

namespace {

// Neighbours P2..P9 clockwise from north.
constexpr std::array<std::array<int, 2>, 8> kRing{{{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

bool thinning_pass(BinaryMask& m, int subiteration) {
  std::vector<std::pair<std::size_t, std::size_t>> doomed;
  std::array<int, 8> p{};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!m.at(r, c)) continue;
      int b = 0;
      for (std::size_t k = 0; k < 8; ++k) {
        p[k] = m.get(static_cast<long>(r) + kRing[k][0], static_cast<long>(c) + kRing[k][1]);
        b += p[k];
      }
      if (b < 2 || b > 6) continue;
      int a = 0;
      for (std::size_t k = 0; k < 8; ++k) a += (p[k] == 0 && p[(k + 1) % 8] == 1);
      if (a != 1) continue;
      // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W).
      if (subiteration == 0) {
        if (p[0] * p[2] * p[4] != 0 || p[2] * p[4] * p[6] != 0) continue;
      } else {
        if (p[0] * p[2] * p[6] != 0 || p[0] * p[4] * p[6] != 0) continue;
      }
      doomed.emplace_back(r, c);
    }
  }
  for (const auto& [r, c] : doomed) m.set(r, c, false);
  return !doomed.empty();
}

// True when removing (r, c) changes neither the 8-connectivity of the
// foreground nor the 4-connectivity of the background in its 3x3 window.
bool is_simple(const BinaryMask& m, std::size_t r, std::size_t c) {
  std::array<int, 9> cell{};
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      cell[static_cast<std::size_t>((dy + 1) * 3 + dx + 1)] =
          m.get(static_cast<long>(r) + dy, static_cast<long>(c) + dx);
    }
  }
  auto components = [&](int value, bool eight, bool need_four_neighbour) {
    std::array<bool, 9> seen{};
    int n = 0;
    for (std::size_t s = 0; s < 9; ++s) {
      if (s == 4 || seen[s] || cell[s] != value) continue;
      bool touches = false;
      std::vector<std::size_t> stack{s};
      seen[s] = true;
      while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        if (i == 1 || i == 3 || i == 5 || i == 7) touches = true;
        for (std::size_t j = 0; j < 9; ++j) {
          if (j == 4 || seen[j] || cell[j] != value) continue;
          const int dy = std::abs(static_cast<int>(i / 3) - static_cast<int>(j / 3));
          const int dx = std::abs(static_cast<int>(i % 3) - static_cast<int>(j % 3));
          const bool adjacent = eight ? (dy <= 1 && dx <= 1) : (dy + dx == 1);
          if (!adjacent) continue;
          seen[j] = true;
          stack.push_back(j);
        }
      }
      if (!need_four_neighbour || touches) ++n;
    }
    return n;
  };
  return components(1, true, false) == 1 && components(0, false, true) == 1;
}

// Zhang-Suen can leave 2x2 squares on staircase diagonals. One simple,
// non-endpoint pixel of each such square is removed.
bool staircase_pass(BinaryMask& m) {
  bool changed = false;
  for (std::size_t r = 0; r + 1 < m.rows(); ++r) {
    for (std::size_t c = 0; c + 1 < m.cols(); ++c) {
      if (!(m.at(r, c) && m.at(r, c + 1) && m.at(r + 1, c) && m.at(r + 1, c + 1))) continue;
      const std::array<std::pair<std::size_t, std::size_t>, 4> corners{
          {{r, c}, {r, c + 1}, {r + 1, c}, {r + 1, c + 1}}};
      for (const auto& [y, x] : corners) {
        if (is_simple(m, y, x)) {
          m.set(y, x, false);
          changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

}  // namespace

BinaryMask skeletonize(const BinaryMask& mask) {
  BinaryMask m = mask;
  bool changed = true;
  while (changed) {
    changed = false;
    while (true) {
      const bool a = thinning_pass(m, 0);
      const bool b = thinning_pass(m, 1);
      if (!a && !b) break;
      changed = true;
    }
    if (staircase_pass(m)) changed = true;
  }
  return m;
}

std::vector<int> label_components(const BinaryMask& mask, int* count) {
  std::vector<int> labels(mask.size(), 0);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask.bits()[start] || labels[start]) continue;
    labels[start] = ++next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const long r = static_cast<long>(i / mask.cols()), c = static_cast<long>(i % mask.cols());
      for (const auto& d : kRing) {
        const long nr = r + d[0], nc = c + d[1];
        if (!mask.get(nr, nc)) continue;
        const std::size_t j = static_cast<std::size_t>(nr) * mask.cols() + static_cast<std::size_t>(nc);
        if (labels[j]) continue;
        labels[j] = next;
        stack.push_back(j);
      }
    }
  }
  if (count) *count = next;
  return labels;
}

BinaryMask largest_component(const BinaryMask& mask) {
  int n = 0;
  const auto labels = label_components(mask, &n);
  BinaryMask out(mask.rows(), mask.cols());
  if (n == 0) return out;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n) + 1, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  int best = 1;
  for (int l = 2; l <= n; ++l) {
    if (sizes[static_cast<std::size_t>(l)] > sizes[static_cast<std::size_t>(best)]) best = l;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == best) out.set(i / mask.cols(), i % mask.cols(), true);
  }
  return out;
}

Contour mask_to_contour(const BinaryMask& skeleton) {
  const BinaryMask kept = largest_component(skeleton);
  Contour out;
  for (std::size_t c = 0; c < kept.cols(); ++c) {
    double rows = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < kept.rows(); ++r) {
      if (kept.at(r, c)) {
        rows += static_cast<double>(r);
        ++n;
      }
    }
    if (n) out.push_back(Point{rows / static_cast<double>(n), static_cast<double>(c)});
  }
  if (out.empty()) throw std::runtime_error("no contour found");
  return out;
}

double msd(const Contour& a, const Contour& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("msd: contours must be nonempty");
  auto directed = [](const Contour& from, const Contour& to) {
    double total = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, std::hypot(p.row - q.row, p.col - q.col));
      total += best;
    }
    return total;
  };
  return (directed(a, b) + directed(b, a)) / static_cast<double>(a.size() + b.size());
}

DiversityReport dataset_diversity(const std::vector<Tensor>& images) {
  if (images.size() < 2) throw std::invalid_argument("dataset_diversity: need at least two images");
  Tensor mean = Tensor::zeros_like(images.front());
  for (const auto& img : images) {
    require_same_shape(img, mean, "dataset_diversity");
    accumulate(mean, img);
  }
  mean = scale(mean, 1.0 / static_cast<double>(images.size()));
  DiversityReport r;
  for (const auto& img : images) {
    double sq = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) sq += (img[i] - mean[i]) * (img[i] - mean[i]);
    r.distances.push_back(std::sqrt(sq / static_cast<double>(img.size())));
  }
  for (double d : r.distances) r.score += d;
  r.score /= static_cast<double>(r.distances.size());
  return r;
}

void write_contour_csv(const std::filesystem::path& path, const Contour& contour) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write contour file " + path.string());
  f.precision(17);
  f << "row,col\n";
  for (const auto& p : contour) f << p.row << ',' << p.col << '\n';
}

Contour read_contour_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read contour file " + path.string());
  std::string line;
  if (!std::getline(f, line) || line != "row,col") {
    throw std::runtime_error("contour file " + path.string() + " lacks the row,col header");
  }
  Contour c;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed contour row: " + line);
    c.push_back(Point{std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return c;
}

}  // namespace irisnet

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

#include "irisnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace irisnet {

using nlohmann::json;

void PhantomParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("PhantomParams: " + what); };
  if (rows < 8 || cols < 8) fail("image must be at least 8x8");
  if (control_points < 2) fail("need at least 2 control points");
  if (!(band_top > 0.0 && band_top < band_bottom && band_bottom < 1.0)) {
    fail("band region must satisfy 0 < band_top < band_bottom < 1");
  }
  if (!(span_left_min >= 0.0 && span_left_min <= span_left_max && span_left_max < span_right_min &&
        span_right_min <= span_right_max && span_right_max <= 1.0)) {
    fail("curve span fractions must be ordered inside [0, 1]");
  }
  if (!(thickness_min >= 2.0 && thickness_min <= thickness_max)) fail("thickness must be >= 2 px and min <= max");
  if (!(brightness_min > 0.0 && brightness_min <= brightness_max && brightness_max <= 1.0)) {
    fail("brightness must lie in (0, 1] with min <= max");
  }
  if (!(background_level >= 0.0 && background_level < brightness_min)) {
    fail("background level must be non-negative and below the band brightness");
  }
  if (speckle_grain < 1) fail("speckle grain must be >= 1");
  if (speckle_sigma < 0.0) fail("speckle sigma must be >= 0");
  if (shadow_max < 0) fail("shadow count must be >= 0");
  if (!(shadow_intensity >= 0.0 && shadow_intensity <= 1.0)) fail("shadow intensity must lie in [0, 1]");
  const double usable = (band_bottom - band_top) * static_cast<double>(rows) - thickness_max;
  if (usable < 1.0) {
    throw std::invalid_argument("PhantomParams: band region degenerate (" +
                                std::to_string((band_bottom - band_top) * static_cast<double>(rows)) +
                                " rows cannot hold a band of thickness " + std::to_string(thickness_max) + ")");
  }
}

BinaryMask SegmentationSample::foreground() const {
  BinaryMask m(rows(), cols());
  const std::size_t plane = rows() * cols();
  for (std::size_t i = 0; i < plane; ++i) m.set(i / cols(), i % cols(), mask[plane + i] == 1.0);
  return m;
}

bool mask_is_consistent(const Tensor& mask) {
  if (mask.rank() != 3 || mask.dim(0) != 2) return false;
  const std::size_t plane = mask.dim(1) * mask.dim(2);
  for (std::size_t i = 0; i < plane; ++i) {
    const double bg = mask[i], fg = mask[plane + i];
    if ((bg != 0.0 && bg != 1.0) || (fg != 0.0 && fg != 1.0) || bg + fg != 1.0) return false;
  }
  return true;
}

Tensor two_channel_mask(const BinaryMask& foreground) {
  Tensor m({2, foreground.rows(), foreground.cols()}, 0.0);
  const std::size_t plane = foreground.size();
  for (std::size_t i = 0; i < plane; ++i) {
    const double fg = foreground.bits()[i];
    m[i] = 1.0 - fg;
    m[plane + i] = fg;
  }
  return m;
}

double pchip(const std::vector<double>& x, const std::vector<double>& y, double at) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("pchip: need >= 2 matching knots");
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  std::vector<double> delta(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  d.front() = delta.front();
  d.back() = delta.back();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
    const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  // Endpoint slopes limited to keep the first and last pieces monotone.
  for (std::size_t e : {std::size_t{0}, n - 1}) {
    const double s = delta[e == 0 ? 0 : n - 2];
    if (d[e] * s <= 0.0) d[e] = 0.0;
    else if (std::abs(d[e]) > 3.0 * std::abs(s)) d[e] = 3.0 * s;
  }
  std::size_t k = 0;
  while (k + 2 < n && at > x[k + 1]) ++k;
  const double h = x[k + 1] - x[k];
  const double t = (at - x[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h * d[k] + (-2 * t3 + 3 * t2) * y[k + 1] +
         (t3 - t2) * h * d[k + 1];
}

namespace {

// Smooth curve y(col) over [begin, end] through `knots` random rows in [lo, hi].
std::vector<double> random_curve(Rng& rng, std::size_t begin, std::size_t end, int knots, double lo, double hi) {
  std::vector<double> kx(static_cast<std::size_t>(knots)), ky(static_cast<std::size_t>(knots));
  for (int i = 0; i < knots; ++i) {
    kx[static_cast<std::size_t>(i)] =
        static_cast<double>(begin) + (static_cast<double>(end - begin) * i) / (knots - 1);
    ky[static_cast<std::size_t>(i)] = rng.uniform(lo, hi);
  }
  std::vector<double> ys;
  for (std::size_t c = begin; c <= end; ++c) ys.push_back(pchip(kx, ky, static_cast<double>(c)));
  return ys;
}

Tensor speckle_field(Rng& rng, std::size_t rows, std::size_t cols, int grain) {
  Tensor raw({rows, cols}, 0.0);
  for (auto& v : raw.storage()) v = rng.normal();
  if (grain <= 1) return raw;
  Tensor blurred({rows, cols}, 0.0);
  const long g = grain;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      int n = 0;
      for (long dy = 0; dy < g; ++dy) {
        for (long dx = 0; dx < g; ++dx) {
          const long y = static_cast<long>(r) + dy - g / 2, x = static_cast<long>(c) + dx - g / 2;
          if (y < 0 || x < 0 || y >= static_cast<long>(rows) || x >= static_cast<long>(cols)) continue;
          s += raw[static_cast<std::size_t>(y) * cols + static_cast<std::size_t>(x)];
          ++n;
        }
      }
      blurred[r * cols + c] = s / n;
    }
  }
  double mean = 0.0, sq = 0.0;
  for (double v : blurred.data()) mean += v;
  mean /= static_cast<double>(blurred.size());
  for (double v : blurred.data()) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(blurred.size()));
  for (auto& v : blurred.storage()) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return blurred;
}

}  // namespace

SegmentationSample generate_phantom(const PhantomParams& params) {
  params.validate();
  Rng rng(derive_seed(params.seed, 0x7a4e));
  const std::size_t rows = params.rows, cols = params.cols;
  const double H = static_cast<double>(rows), W1 = static_cast<double>(cols - 1);

  SegmentationSample s;
  s.params = params;
  s.id = "phantom_" + std::to_string(params.seed);
  auto& info = s.info;
  info.span_begin = static_cast<std::size_t>(std::lround(rng.uniform(params.span_left_min, params.span_left_max) * W1));
  info.span_end = static_cast<std::size_t>(std::lround(rng.uniform(params.span_right_min, params.span_right_max) * W1));
  info.thickness = rng.uniform(params.thickness_min, params.thickness_max);
  info.brightness = rng.uniform(params.brightness_min, params.brightness_max);
  const double half = info.thickness / 2.0;

  const double lo = params.band_top * H + half;
  const double hi = params.band_bottom * H - half - 1.0;
  const auto curve = random_curve(rng, info.span_begin, info.span_end, params.control_points, lo, hi);

  BinaryMask fg(rows, cols);
  Tensor base({rows, cols}, params.background_level);
  for (std::size_t c = info.span_begin; c <= info.span_end; ++c) {
    const double y = curve[c - info.span_begin];
    for (std::size_t r = 0; r < rows; ++r) {
      if (std::abs(static_cast<double>(r) - y) < half) {
        fg.set(r, c, true);
        base[r * cols + c] = info.brightness;
      }
    }
    s.centerline.push_back(Point{static_cast<double>(std::lround(y)), static_cast<double>(c)});
  }

  // Dim distractor curves above the band.
  info.shadows = static_cast<int>(rng.below(static_cast<std::uint64_t>(params.shadow_max) + 1));
  const double shadow_lo = 0.08 * H, shadow_hi = params.band_top * H - info.thickness - 2.0;
  for (int k = 0; k < info.shadows && shadow_hi > shadow_lo + 1.0; ++k) {
    const auto b = static_cast<std::size_t>(std::lround(rng.uniform(0.0, 0.4) * W1));
    const auto e = static_cast<std::size_t>(std::lround(rng.uniform(0.6, 1.0) * W1));
    const auto line = random_curve(rng, b, e, 3, shadow_lo, shadow_hi);
    for (std::size_t c = b; c <= e; ++c) {
      for (std::size_t r = 0; r < rows; ++r) {
        if (std::abs(static_cast<double>(r) - line[c - b]) < 1.0 && !fg.at(r, c)) {
          base[r * cols + c] = std::max(base[r * cols + c], params.shadow_intensity);
        }
      }
    }
  }

  s.image = base;
  if (params.speckle_sigma > 0.0) {
    const Tensor noise = speckle_field(rng, rows, cols, params.speckle_grain);
    for (std::size_t i = 0; i < s.image.size(); ++i) {
      s.image[i] = std::clamp(base[i] * (1.0 + params.speckle_sigma * noise[i]), 0.0, 1.0);
    }
  }
  s.mask = two_channel_mask(fg);
  return s;
}

// ---------------------------------------------------------------------------

void AugmentRanges::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("AugmentRanges: " + what); };
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) fail("flip probability must lie in [0, 1]");
  if (!(max_rotation_deg >= 0.0 && max_rotation_deg <= 25.0)) fail("rotation bound must lie in [0, 25] degrees");
  if (!(max_shift_px >= 0.0 && max_shift_px <= 40.0)) fail("shift bound must lie in [0, 40] px per axis");
  if (!(zoom_min >= 0.5 && zoom_min <= zoom_max && zoom_max <= 1.5)) fail("zoom range must lie within [0.5, 1.5]");
}

AugmentParams sample_augmentation(const AugmentRanges& ranges, Rng& rng) {
  ranges.validate();
  AugmentParams p;
  p.flip = rng.bernoulli(ranges.flip_probability);
  p.angle_deg = rng.uniform(-ranges.max_rotation_deg, ranges.max_rotation_deg);
  p.shift_x = rng.uniform(-ranges.max_shift_px, ranges.max_shift_px);
  p.shift_y = rng.uniform(-ranges.max_shift_px, ranges.max_shift_px);
  p.zoom = rng.uniform(ranges.zoom_min, ranges.zoom_max);
  return p;
}

namespace {

struct Affine {
  double cx, cy, cos_a, sin_a, zoom, tx, ty, width;
  bool flip;

  // Input -> output pixel coordinates.
  void forward(double x, double y, double& ox, double& oy) const {
    if (flip) x = width - 1.0 - x;
    const double u = (x - cx) * zoom, v = (y - cy) * zoom;
    ox = cos_a * u - sin_a * v + cx + tx;
    oy = sin_a * u + cos_a * v + cy + ty;
  }
  // Output -> input.
  void inverse(double ox, double oy, double& x, double& y) const {
    const double u = ox - tx - cx, v = oy - ty - cy;
    x = (cos_a * u + sin_a * v) / zoom + cx;
    y = (-sin_a * u + cos_a * v) / zoom + cy;
    if (flip) x = width - 1.0 - x;
  }
};

double bilinear(const double* plane, std::size_t rows, std::size_t cols, double x, double y) {
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const double fx = x - fx0, fy = y - fy0;
  const long x0 = static_cast<long>(fx0), y0 = static_cast<long>(fy0);
  auto px = [&](long yy, long xx) {
    if (yy < 0 || xx < 0 || yy >= static_cast<long>(rows) || xx >= static_cast<long>(cols)) return 0.0;
    return plane[static_cast<std::size_t>(yy) * cols + static_cast<std::size_t>(xx)];
  };
  double v = (1.0 - fx) * (1.0 - fy) * px(y0, x0);
  if (fx != 0.0) v += fx * (1.0 - fy) * px(y0, x0 + 1);
  if (fy != 0.0) v += (1.0 - fx) * fy * px(y0 + 1, x0);
  if (fx != 0.0 && fy != 0.0) v += fx * fy * px(y0 + 1, x0 + 1);
  return v;
}

}  // namespace

SegmentationSample apply_augmentation(const SegmentationSample& sample, const AugmentParams& p) {
  if (!(p.zoom > 0.0)) throw std::invalid_argument("apply_augmentation: zoom must be > 0");
  const std::size_t rows = sample.rows(), cols = sample.cols();
  const double rad = p.angle_deg * std::numbers::pi / 180.0;
  const Affine a{(static_cast<double>(cols) - 1.0) / 2.0,
                 (static_cast<double>(rows) - 1.0) / 2.0,
                 p.angle_deg == 0.0 ? 1.0 : std::cos(rad),
                 p.angle_deg == 0.0 ? 0.0 : std::sin(rad),
                 p.zoom,
                 p.shift_x,
                 p.shift_y,
                 static_cast<double>(cols),
                 p.flip};

  SegmentationSample out = sample;
  const std::size_t plane = rows * cols;
  const double* fg_in = sample.mask.storage().data() + plane;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double x, y;
      a.inverse(static_cast<double>(c), static_cast<double>(r), x, y);
      out.image[r * cols + c] = std::clamp(bilinear(sample.image.storage().data(), rows, cols, x, y), 0.0, 1.0);
      const double fg = bilinear(fg_in, rows, cols, x, y) >= 0.5 ? 1.0 : 0.0;
      out.mask[plane + r * cols + c] = fg;
      out.mask[r * cols + c] = 1.0 - fg;
    }
  }

  Contour moved;
  for (const auto& pt : sample.centerline) {
    double ox, oy;
    a.forward(pt.col, pt.row, ox, oy);
    const double rr = std::round(oy), cc = std::round(ox);
    if (rr < 0.0 || cc < 0.0 || rr > static_cast<double>(rows - 1) || cc > static_cast<double>(cols - 1)) continue;
    if (out.mask[plane + static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc)] != 1.0) continue;
    moved.push_back(Point{rr, cc});
  }
  std::sort(moved.begin(), moved.end(), [](const Point& l, const Point& r) {
    return l.col != r.col ? l.col < r.col : l.row < r.row;
  });
  moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
  out.centerline = std::move(moved);
  return out;
}

SegmentationSample augment(const SegmentationSample& sample, Rng& rng, const AugmentRanges& ranges) {
  return apply_augmentation(sample, sample_augmentation(ranges, rng));
}

// ---------------------------------------------------------------------------

SplitIndices split_indices(std::size_t count, const SplitRatios& ratios, std::uint64_t seed) {
  if (!(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0) ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split_dataset: ratios must be positive and sum to 1");
  }
  if (count < 10) {
    throw std::invalid_argument("split_dataset: need at least 10 samples, got " + std::to_string(count));
  }
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x5b117));
  for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  const auto n = static_cast<double>(count);
  const auto n_val = static_cast<std::size_t>(std::floor(n * ratios.validation + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * ratios.test + 1e-9));
  const std::size_t n_train = count - n_val - n_test;
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

// ---------------------------------------------------------------------------

void write_pgm(const std::filesystem::path& path, const Tensor& image) {
  require_rank(image, 2, "write_pgm");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "P5\n" << image.dim(1) << ' ' << image.dim(0) << "\n255\n";
  std::string bytes(image.size(), '\0');
  for (std::size_t i = 0; i < image.size(); ++i) {
    bytes[i] = static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(image[i], 0.0, 1.0) * 255.0)));
  }
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

Tensor read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  auto token = [&]() {
    std::string t;
    char ch;
    while (f.get(ch)) {
      if (ch == '#') {
        std::string skip;
        std::getline(f, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(ch);
    }
    return t;
  };
  if (token() != "P5") throw std::runtime_error(path.string() + " is not a binary PGM (P5)");
  std::size_t width = 0, height = 0, maxval = 0;
  try {
    width = std::stoul(token());
    height = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::exception&) {
    throw std::runtime_error(path.string() + ": malformed PGM header");
  }
  if (maxval != 255 || width == 0 || height == 0) {
    throw std::runtime_error(path.string() + ": only 8-bit PGM with maxval 255 is supported");
  }
  std::string bytes(width * height, '\0');
  f.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(f.gcount()) != bytes.size()) throw std::runtime_error(path.string() + ": truncated PGM");
  Tensor t({height, width}, 0.0);
  for (std::size_t i = 0; i < bytes.size(); ++i) t[i] = static_cast<unsigned char>(bytes[i]) / 255.0;
  return t;
}

namespace {

json params_json(const PhantomParams& p) {
  return json{{"rows", p.rows},
              {"cols", p.cols},
              {"control_points", p.control_points},
              {"band_top", p.band_top},
              {"band_bottom", p.band_bottom},
              {"span_left", {p.span_left_min, p.span_left_max}},
              {"span_right", {p.span_right_min, p.span_right_max}},
              {"thickness", {p.thickness_min, p.thickness_max}},
              {"brightness", {p.brightness_min, p.brightness_max}},
              {"background_level", p.background_level},
              {"speckle_grain", p.speckle_grain},
              {"speckle_sigma", p.speckle_sigma},
              {"shadow_max", p.shadow_max},
              {"shadow_intensity", p.shadow_intensity},
              {"seed", p.seed}};
}

PhantomParams params_from(const json& j) {
  PhantomParams p;
  p.rows = j.value("rows", p.rows);
  p.cols = j.value("cols", p.cols);
  p.control_points = j.value("control_points", p.control_points);
  p.band_top = j.value("band_top", p.band_top);
  p.band_bottom = j.value("band_bottom", p.band_bottom);
  auto range = [&](const char* key, double& lo, double& hi) {
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument(std::string("PhantomParams.") + key + " must be [min, max]");
    lo = v[0];
    hi = v[1];
  };
  range("span_left", p.span_left_min, p.span_left_max);
  range("span_right", p.span_right_min, p.span_right_max);
  range("thickness", p.thickness_min, p.thickness_max);
  range("brightness", p.brightness_min, p.brightness_max);
  p.background_level = j.value("background_level", p.background_level);
  p.speckle_grain = j.value("speckle_grain", p.speckle_grain);
  p.speckle_sigma = j.value("speckle_sigma", p.speckle_sigma);
  p.shadow_max = j.value("shadow_max", p.shadow_max);
  p.shadow_intensity = j.value("shadow_intensity", p.shadow_intensity);
  p.seed = j.value("seed", p.seed);
  return p;
}

}  // namespace

std::string phantom_params_to_json(const PhantomParams& params) { return params_json(params).dump(2); }

PhantomParams phantom_params_from_json(const std::string& text) { return params_from(json::parse(text)); }

void save_sample(const std::filesystem::path& dir, const SegmentationSample& sample) {
  write_pgm(dir / (sample.id + ".pgm"), sample.image);
  write_pgm(dir / (sample.id + "_mask.pgm"), sample.foreground().to_tensor());
  json side;
  side["id"] = sample.id;
  side["rows"] = sample.rows();
  side["cols"] = sample.cols();
  json pts = json::array();
  for (const auto& p : sample.centerline) pts.push_back({p.row, p.col});
  side["centerline"] = pts;
  side["params"] = params_json(sample.params);
  side["realized"] = {{"thickness", sample.info.thickness},
                      {"brightness", sample.info.brightness},
                      {"shadows", sample.info.shadows},
                      {"span", {sample.info.span_begin, sample.info.span_end}}};
  std::ofstream f(dir / (sample.id + ".json"), std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write sidecar for " + sample.id);
  f << side.dump(2) << '\n';
}

SegmentationSample load_sample(const std::filesystem::path& dir, const std::string& id) {
  SegmentationSample s;
  s.id = id;
  s.image = read_pgm(dir / (id + ".pgm"));
  const Tensor fg = read_pgm(dir / (id + "_mask.pgm"));
  require_same_shape(s.image, fg, "load_sample");
  BinaryMask m(fg.dim(0), fg.dim(1));
  for (std::size_t i = 0; i < fg.size(); ++i) m.set(i / m.cols(), i % m.cols(), fg[i] > 0.5);
  s.mask = two_channel_mask(m);
  std::ifstream f(dir / (id + ".json"));
  if (!f) throw std::runtime_error("missing sidecar " + (dir / (id + ".json")).string());
  const json side = json::parse(f);
  for (const auto& p : side.at("centerline")) s.centerline.push_back(Point{p.at(0).get<double>(), p.at(1).get<double>()});
  s.params = params_from(side.at("params"));
  if (side.contains("realized")) {
    const auto& r = side.at("realized");
    s.info.thickness = r.value("thickness", 0.0);
    s.info.brightness = r.value("brightness", 0.0);
    s.info.shadows = r.value("shadows", 0);
    if (r.contains("span")) {
      s.info.span_begin = r.at("span").at(0).get<std::size_t>();
      s.info.span_end = r.at("span").at(1).get<std::size_t>();
    }
  }
  return s;
}

}  // namespace irisnet

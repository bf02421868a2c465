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

#include "irisnet/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace irisnet {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

std::size_t ConvSpec::output_extent(std::size_t input_extent) const {
  const long padded = static_cast<long>(input_extent) + 2L * resolved_padding();
  const long eff = effective_extent();
  if (padded < eff) {
    throw ShapeError("conv2d: padded extent " + std::to_string(padded) +
                     " smaller than effective kernel extent " + std::to_string(eff));
  }
  return static_cast<std::size_t>((padded - eff) / stride + 1);
}

void ConvSpec::validate() const {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw ShapeError("conv2d: kernel_size must be a positive odd integer, got " +
                     std::to_string(kernel_size));
  }
  if (dilation < 1) throw ShapeError("conv2d: dilation must be >= 1, got " + std::to_string(dilation));
  if (stride < 1) throw ShapeError("conv2d: stride must be >= 1, got " + std::to_string(stride));
  if (padding && *padding < 0) throw ShapeError("conv2d: padding must be non-negative");
}

namespace {

struct ConvGeometry {
  std::size_t batch, in_ch, out_ch, h, w, out_h, out_w;
  int k, dil, stride, pad;
};

ConvGeometry check_conv(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                        const ConvSpec& spec) {
  spec.validate();
  require_rank(input, 4, "conv2d input");
  require_rank(kernel, 4, "conv2d kernel");
  if (kernel.dim(2) != static_cast<std::size_t>(spec.kernel_size) ||
      kernel.dim(3) != static_cast<std::size_t>(spec.kernel_size)) {
    throw ShapeError("conv2d: kernel " + shape_to_string(kernel.shape()) +
                     " does not match kernel_size " + std::to_string(spec.kernel_size));
  }
  if (kernel.dim(1) != input.channels()) {
    throw ShapeError("conv2d: kernel expects " + std::to_string(kernel.dim(1)) +
                     " input channels, input has " + std::to_string(input.channels()));
  }
  if (!bias.empty() && bias.shape() != Shape{kernel.dim(0)}) {
    throw ShapeError("conv2d: bias shape " + shape_to_string(bias.shape()) + " != (" +
                     std::to_string(kernel.dim(0)) + ")");
  }
  ConvGeometry g{};
  g.batch = input.batch();
  g.in_ch = input.channels();
  g.out_ch = kernel.dim(0);
  g.h = input.height();
  g.w = input.width();
  g.out_h = spec.output_extent(g.h);
  g.out_w = spec.output_extent(g.w);
  g.k = spec.kernel_size;
  g.dil = spec.dilation;
  g.stride = spec.stride;
  g.pad = spec.resolved_padding();
  return g;
}

// Patch matrix for one image: rows (c, i, j), columns (y, x).
void im2col(const double* image, const ConvGeometry& g, double* cols) {
  const long h = static_cast<long>(g.h), w = static_cast<long>(g.w);
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.in_ch; ++c) {
    const double* src = image + c * g.h * g.w;
    for (int i = 0; i < g.k; ++i) {
      for (int j = 0; j < g.k; ++j) {
        double* row = cols + ((c * g.k + i) * g.k + j) * plane;
        for (std::size_t y = 0; y < g.out_h; ++y) {
          const long sy = static_cast<long>(y) * g.stride + i * g.dil - g.pad;
          double* dst = row + y * g.out_w;
          if (sy < 0 || sy >= h) {
            std::fill(dst, dst + g.out_w, 0.0);
            continue;
          }
          const double* line = src + sy * w;
          for (std::size_t x = 0; x < g.out_w; ++x) {
            const long sx = static_cast<long>(x) * g.stride + j * g.dil - g.pad;
            dst[x] = (sx >= 0 && sx < w) ? line[sx] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* cols, const ConvGeometry& g, double* image) {
  const long h = static_cast<long>(g.h), w = static_cast<long>(g.w);
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.in_ch; ++c) {
    double* dst = image + c * g.h * g.w;
    for (int i = 0; i < g.k; ++i) {
      for (int j = 0; j < g.k; ++j) {
        const double* row = cols + ((c * g.k + i) * g.k + j) * plane;
        for (std::size_t y = 0; y < g.out_h; ++y) {
          const long sy = static_cast<long>(y) * g.stride + i * g.dil - g.pad;
          if (sy < 0 || sy >= h) continue;
          double* line = dst + sy * w;
          const double* src = row + y * g.out_w;
          for (std::size_t x = 0; x < g.out_w; ++x) {
            const long sx = static_cast<long>(x) * g.stride + j * g.dil - g.pad;
            if (sx >= 0 && sx < w) line[sx] += src[x];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d_direct(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                     const ConvSpec& spec) {
  const auto g = check_conv(input, kernel, bias, spec);
  Tensor out({g.batch, g.out_ch, g.out_h, g.out_w}, 0.0);
  const long h = static_cast<long>(g.h), w = static_cast<long>(g.w);
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t o = 0; o < g.out_ch; ++o) {
      const double bo = bias.empty() ? 0.0 : bias[o];
      for (std::size_t y = 0; y < g.out_h; ++y) {
        for (std::size_t x = 0; x < g.out_w; ++x) {
          double acc = bo;
          for (std::size_t c = 0; c < g.in_ch; ++c) {
            for (int i = 0; i < g.k; ++i) {
              const long sy = static_cast<long>(y) * g.stride + i * g.dil - g.pad;
              if (sy < 0 || sy >= h) continue;
              for (int j = 0; j < g.k; ++j) {
                const long sx = static_cast<long>(x) * g.stride + j * g.dil - g.pad;
                if (sx < 0 || sx >= w) continue;
                acc += input.at(b, c, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx)) *
                       kernel.at(o, c, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
              }
            }
          }
          out.at(b, o, y, x) = acc;
        }
      }
    }
  }
  return out;
}

Tensor conv2d_lowered(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                      const ConvSpec& spec) {
  const auto g = check_conv(input, kernel, bias, spec);
  const std::size_t patch = g.in_ch * static_cast<std::size_t>(g.k * g.k);
  const std::size_t plane = g.out_h * g.out_w;
  Tensor out({g.batch, g.out_ch, g.out_h, g.out_w}, 0.0);
  std::vector<double> cols(patch * plane);
  ConstMatrixMap weights(kernel.storage().data(), static_cast<Eigen::Index>(g.out_ch),
                         static_cast<Eigen::Index>(patch));
  for (std::size_t b = 0; b < g.batch; ++b) {
    im2col(input.storage().data() + b * g.in_ch * g.h * g.w, g, cols.data());
    ConstMatrixMap colmat(cols.data(), static_cast<Eigen::Index>(patch),
                          static_cast<Eigen::Index>(plane));
    MatrixMap result(out.storage().data() + b * g.out_ch * plane,
                     static_cast<Eigen::Index>(g.out_ch), static_cast<Eigen::Index>(plane));
    result.noalias() = weights * colmat;
    if (!bias.empty()) {
      for (std::size_t o = 0; o < g.out_ch; ++o) result.row(static_cast<Eigen::Index>(o)).array() += bias[o];
    }
  }
  return out;
}

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, const ConvSpec& spec) {
  return conv2d_lowered(input, kernel, bias, spec);
}

Tensor conv2d_backward_input(const Tensor& grad_output, const Tensor& kernel,
                             const ConvSpec& spec, const Shape& input_shape) {
  const Tensor probe(input_shape, 0.0);
  const auto g = check_conv(probe, kernel, Tensor(), spec);
  if (grad_output.shape() != Shape{g.batch, g.out_ch, g.out_h, g.out_w}) {
    throw ShapeError("conv2d backward: upstream gradient shape " +
                     shape_to_string(grad_output.shape()) + " inconsistent with forward");
  }
  const std::size_t patch = g.in_ch * static_cast<std::size_t>(g.k * g.k);
  const std::size_t plane = g.out_h * g.out_w;
  Tensor grad_in(input_shape, 0.0);
  std::vector<double> cols(patch * plane);
  ConstMatrixMap weights(kernel.storage().data(), static_cast<Eigen::Index>(g.out_ch),
                         static_cast<Eigen::Index>(patch));
  for (std::size_t b = 0; b < g.batch; ++b) {
    ConstMatrixMap dy(grad_output.storage().data() + b * g.out_ch * plane,
                      static_cast<Eigen::Index>(g.out_ch), static_cast<Eigen::Index>(plane));
    MatrixMap colmat(cols.data(), static_cast<Eigen::Index>(patch), static_cast<Eigen::Index>(plane));
    colmat.noalias() = weights.transpose() * dy;
    col2im(cols.data(), g, grad_in.storage().data() + b * g.in_ch * g.h * g.w);
  }
  return grad_in;
}

Tensor conv2d_backward_kernel(const Tensor& grad_output, const Tensor& input,
                              const ConvSpec& spec) {
  spec.validate();
  require_rank(input, 4, "conv2d input");
  require_rank(grad_output, 4, "conv2d upstream gradient");
  const std::size_t out_ch = grad_output.channels();
  const auto k = static_cast<std::size_t>(spec.kernel_size);
  const Tensor probe_kernel({out_ch, input.channels(), k, k}, 0.0);
  const auto g = check_conv(input, probe_kernel, Tensor(), spec);
  if (grad_output.shape() != Shape{g.batch, g.out_ch, g.out_h, g.out_w}) {
    throw ShapeError("conv2d backward: upstream gradient shape " +
                     shape_to_string(grad_output.shape()) + " inconsistent with forward");
  }
  const std::size_t patch = g.in_ch * k * k;
  const std::size_t plane = g.out_h * g.out_w;
  Tensor grad_k({out_ch, g.in_ch, k, k}, 0.0);
  MatrixMap dk(grad_k.storage().data(), static_cast<Eigen::Index>(out_ch),
               static_cast<Eigen::Index>(patch));
  std::vector<double> cols(patch * plane);
  for (std::size_t b = 0; b < g.batch; ++b) {
    im2col(input.storage().data() + b * g.in_ch * g.h * g.w, g, cols.data());
    ConstMatrixMap colmat(cols.data(), static_cast<Eigen::Index>(patch),
                          static_cast<Eigen::Index>(plane));
    ConstMatrixMap dy(grad_output.storage().data() + b * out_ch * plane,
                      static_cast<Eigen::Index>(out_ch), static_cast<Eigen::Index>(plane));
    dk.noalias() += dy * colmat.transpose();
  }
  return grad_k;
}

Conv2dGrads conv2d_backward(const Tensor& grad_output, const Tensor& input, const Tensor& kernel,
                            const ConvSpec& spec) {
  Conv2dGrads grads;
  grads.input = conv2d_backward_input(grad_output, kernel, spec, input.shape());
  grads.kernel = conv2d_backward_kernel(grad_output, input, spec);
  grads.bias = Tensor({kernel.dim(0)}, 0.0);
  const std::size_t plane = grad_output.height() * grad_output.width();
  for (std::size_t b = 0; b < grad_output.batch(); ++b) {
    for (std::size_t o = 0; o < kernel.dim(0); ++o) {
      const double* p = grad_output.storage().data() + (b * kernel.dim(0) + o) * plane;
      double s = 0.0;
      for (std::size_t i = 0; i < plane; ++i) s += p[i];
      grads.bias[o] += s;
    }
  }
  return grads;
}

// ---------------------------------------------------------------------------

namespace {

void check_transposed(const Tensor& input, const Tensor& kernel, int stride, int padding) {
  require_rank(input, 4, "transposed_conv2d input");
  require_rank(kernel, 4, "transposed_conv2d kernel");
  if (stride < 1) throw ShapeError("transposed_conv2d: stride must be >= 1");
  if (padding < 0) throw ShapeError("transposed_conv2d: padding must be non-negative");
  if (kernel.dim(2) != kernel.dim(3)) throw ShapeError("transposed_conv2d: kernel must be square");
  if (kernel.dim(2) < static_cast<std::size_t>(stride)) {
    throw ShapeError("transposed_conv2d: kernel size " + std::to_string(kernel.dim(2)) +
                     " smaller than stride " + std::to_string(stride));
  }
  if (kernel.dim(0) != input.channels()) {
    throw ShapeError("transposed_conv2d: kernel expects " + std::to_string(kernel.dim(0)) +
                     " input channels, input has " + std::to_string(input.channels()));
  }
}

Shape transposed_output_shape(const Tensor& input, const Tensor& kernel, int stride, int padding) {
  const long k = static_cast<long>(kernel.dim(2));
  const long oh = (static_cast<long>(input.height()) - 1) * stride + k - 2L * padding;
  const long ow = (static_cast<long>(input.width()) - 1) * stride + k - 2L * padding;
  if (oh < 1 || ow < 1) throw ShapeError("transposed_conv2d: padding leaves an empty output");
  return {input.batch(), kernel.dim(1), static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
}

// conv2d_backward_input requires odd kernels through ConvSpec::validate; the
// lowering itself does not, so even kernels go through this unchecked path.
Tensor scatter_lowered(const Tensor& input, const Tensor& kernel, int stride, int padding,
                       const Shape& out_shape) {
  ConvGeometry g{};
  g.batch = input.batch();
  g.in_ch = out_shape[1];
  g.out_ch = input.channels();
  g.h = out_shape[2];
  g.w = out_shape[3];
  g.out_h = input.height();
  g.out_w = input.width();
  g.k = static_cast<int>(kernel.dim(2));
  g.dil = 1;
  g.stride = stride;
  g.pad = padding;
  const std::size_t patch = g.in_ch * static_cast<std::size_t>(g.k * g.k);
  const std::size_t plane = g.out_h * g.out_w;
  Tensor out(out_shape, 0.0);
  std::vector<double> cols(patch * plane);
  ConstMatrixMap weights(kernel.storage().data(), static_cast<Eigen::Index>(g.out_ch),
                         static_cast<Eigen::Index>(patch));
  for (std::size_t b = 0; b < g.batch; ++b) {
    ConstMatrixMap x(input.storage().data() + b * g.out_ch * plane,
                     static_cast<Eigen::Index>(g.out_ch), static_cast<Eigen::Index>(plane));
    MatrixMap colmat(cols.data(), static_cast<Eigen::Index>(patch), static_cast<Eigen::Index>(plane));
    colmat.noalias() = weights.transpose() * x;
    col2im(cols.data(), g, out.storage().data() + b * g.in_ch * g.h * g.w);
  }
  return out;
}

}  // namespace

Tensor transposed_conv2d(const Tensor& input, const Tensor& kernel, int stride, int padding) {
  check_transposed(input, kernel, stride, padding);
  return scatter_lowered(input, kernel, stride, padding,
                         transposed_output_shape(input, kernel, stride, padding));
}

Tensor transposed_conv2d_direct(const Tensor& input, const Tensor& kernel, int stride,
                                int padding) {
  check_transposed(input, kernel, stride, padding);
  const Shape os = transposed_output_shape(input, kernel, stride, padding);
  Tensor out(os, 0.0);
  const long k = static_cast<long>(kernel.dim(2));
  for (std::size_t b = 0; b < input.batch(); ++b) {
    for (std::size_t c = 0; c < input.channels(); ++c) {
      for (std::size_t y = 0; y < input.height(); ++y) {
        for (std::size_t x = 0; x < input.width(); ++x) {
          const double v = input.at(b, c, y, x);
          for (std::size_t o = 0; o < os[1]; ++o) {
            for (long i = 0; i < k; ++i) {
              const long ty = static_cast<long>(y) * stride + i - padding;
              if (ty < 0 || ty >= static_cast<long>(os[2])) continue;
              for (long j = 0; j < k; ++j) {
                const long tx = static_cast<long>(x) * stride + j - padding;
                if (tx < 0 || tx >= static_cast<long>(os[3])) continue;
                out.at(b, o, static_cast<std::size_t>(ty), static_cast<std::size_t>(tx)) +=
                    v * kernel.at(c, o, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
              }
            }
          }
        }
      }
    }
  }
  return out;
}

TransposedConv2dGrads transposed_conv2d_backward(const Tensor& grad_output, const Tensor& input,
                                                 const Tensor& kernel, int stride, int padding) {
  check_transposed(input, kernel, stride, padding);
  const Shape os = transposed_output_shape(input, kernel, stride, padding);
  if (grad_output.shape() != os) {
    throw ShapeError("transposed_conv2d backward: upstream gradient shape " +
                     shape_to_string(grad_output.shape()) + " != " + shape_to_string(os));
  }
  // Forward conv of the upstream gradient, built without the odd-kernel check.
  ConvGeometry g{};
  g.batch = input.batch();
  g.in_ch = os[1];
  g.out_ch = input.channels();
  g.h = os[2];
  g.w = os[3];
  g.out_h = input.height();
  g.out_w = input.width();
  g.k = static_cast<int>(kernel.dim(2));
  g.dil = 1;
  g.stride = stride;
  g.pad = padding;
  const std::size_t patch = g.in_ch * static_cast<std::size_t>(g.k * g.k);
  const std::size_t plane = g.out_h * g.out_w;
  TransposedConv2dGrads grads{Tensor::zeros_like(input), Tensor::zeros_like(kernel)};
  std::vector<double> cols(patch * plane);
  ConstMatrixMap weights(kernel.storage().data(), static_cast<Eigen::Index>(g.out_ch),
                         static_cast<Eigen::Index>(patch));
  MatrixMap dk(grads.kernel.storage().data(), static_cast<Eigen::Index>(g.out_ch),
               static_cast<Eigen::Index>(patch));
  for (std::size_t b = 0; b < g.batch; ++b) {
    im2col(grad_output.storage().data() + b * g.in_ch * g.h * g.w, g, cols.data());
    ConstMatrixMap colmat(cols.data(), static_cast<Eigen::Index>(patch),
                          static_cast<Eigen::Index>(plane));
    MatrixMap dx(grads.input.storage().data() + b * g.out_ch * plane,
                 static_cast<Eigen::Index>(g.out_ch), static_cast<Eigen::Index>(plane));
    dx.noalias() = weights * colmat;
    ConstMatrixMap x(input.storage().data() + b * g.out_ch * plane,
                     static_cast<Eigen::Index>(g.out_ch), static_cast<Eigen::Index>(plane));
    dk.noalias() += x * colmat.transpose();
  }
  return grads;
}

// ---------------------------------------------------------------------------

MaxPoolResult maxpool2d(const Tensor& input) {
  require_rank(input, 4, "maxpool2d");
  if (input.height() % 2 != 0 || input.width() % 2 != 0) {
    throw ShapeError("maxpool2d: spatial extent " + shape_to_string(input.shape()) +
                     " must be even; pad the input to an even size");
  }
  const std::size_t oh = input.height() / 2, ow = input.width() / 2;
  MaxPoolResult r{Tensor({input.batch(), input.channels(), oh, ow}, 0.0), {}};
  r.argmax.resize(r.output.size());
  std::size_t out_i = 0;
  for (std::size_t bc = 0; bc < input.batch() * input.channels(); ++bc) {
    const std::size_t base = bc * input.height() * input.width();
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x, ++out_i) {
        std::size_t best = base + (2 * y) * input.width() + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = base + (2 * y + dy) * input.width() + 2 * x + dx;
            if (input[idx] > input[best]) best = idx;
          }
        }
        r.output[out_i] = input[best];
        r.argmax[out_i] = best;
      }
    }
  }
  return r;
}

Tensor maxpool2d_backward(const Tensor& grad_output, const MaxPoolResult& forward,
                          const Shape& input_shape) {
  require_same_shape(grad_output, forward.output, "maxpool2d backward");
  Tensor grad_in(input_shape, 0.0);
  for (std::size_t i = 0; i < grad_output.size(); ++i) grad_in[forward.argmax[i]] += grad_output[i];
  return grad_in;
}

// ---------------------------------------------------------------------------

BatchNormState::BatchNormState(std::size_t channels, double eps_, double momentum_)
    : running_mean({channels}, 0.0), running_var({channels}, 1.0), eps(eps_), momentum(momentum_) {}

namespace {

void check_bn(const Tensor& input, const Tensor& gamma, const Tensor& beta,
              const BatchNormState& state) {
  require_rank(input, 4, "batchnorm2d");
  const Shape cs{input.channels()};
  if (gamma.shape() != cs || beta.shape() != cs) {
    throw ShapeError("batchnorm2d: gamma/beta must have shape " + shape_to_string(cs));
  }
  if (state.running_mean.shape() != cs || state.running_var.shape() != cs) {
    throw ShapeError("batchnorm2d: running statistics must have shape " + shape_to_string(cs));
  }
}

struct ChannelStats {
  std::vector<double> mean, var;
};

ChannelStats batch_stats(const Tensor& input) {
  const std::size_t c_n = input.channels(), plane = input.height() * input.width();
  const double n = static_cast<double>(input.batch() * plane);
  ChannelStats s{std::vector<double>(c_n, 0.0), std::vector<double>(c_n, 0.0)};
  for (std::size_t c = 0; c < c_n; ++c) {
    double acc = 0.0;
    for (std::size_t b = 0; b < input.batch(); ++b) {
      const double* p = input.storage().data() + (b * c_n + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) acc += p[i];
    }
    const double mean = acc / n;
    double sq = 0.0;
    for (std::size_t b = 0; b < input.batch(); ++b) {
      const double* p = input.storage().data() + (b * c_n + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) sq += (p[i] - mean) * (p[i] - mean);
    }
    s.mean[c] = mean;
    s.var[c] = sq / n;
  }
  return s;
}

ChannelStats stats_for_mode(const Tensor& input, const BatchNormState& state, Mode mode) {
  if (mode == Mode::train) return batch_stats(input);
  if (!state.initialized) {
    throw std::logic_error(
        "batchnorm2d: eval mode requires running statistics; run at least one train step first");
  }
  return ChannelStats{state.running_mean.storage(), state.running_var.storage()};
}

Tensor normalize(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                 const ChannelStats& s, double eps) {
  const std::size_t c_n = input.channels(), plane = input.height() * input.width();
  Tensor out = Tensor::zeros_like(input);
  for (std::size_t b = 0; b < input.batch(); ++b) {
    for (std::size_t c = 0; c < c_n; ++c) {
      const double inv_std = 1.0 / std::sqrt(s.var[c] + eps);
      const double* p = input.storage().data() + (b * c_n + c) * plane;
      double* q = out.storage().data() + (b * c_n + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) q[i] = gamma[c] * (p[i] - s.mean[c]) * inv_std + beta[c];
    }
  }
  return out;
}

}  // namespace

Tensor batchnorm2d_stateless(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                             const BatchNormState& state, Mode mode) {
  check_bn(input, gamma, beta, state);
  return normalize(input, gamma, beta, stats_for_mode(input, state, mode), state.eps);
}

Tensor batchnorm2d(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                   BatchNormState& state, Mode mode) {
  check_bn(input, gamma, beta, state);
  const ChannelStats s = stats_for_mode(input, state, mode);
  Tensor out = normalize(input, gamma, beta, s, state.eps);
  if (mode == Mode::train) {
    const double n = static_cast<double>(input.batch() * input.height() * input.width());
    const double unbias = n > 1.0 ? n / (n - 1.0) : 1.0;
    for (std::size_t c = 0; c < input.channels(); ++c) {
      state.running_mean[c] = (1.0 - state.momentum) * state.running_mean[c] + state.momentum * s.mean[c];
      state.running_var[c] =
          (1.0 - state.momentum) * state.running_var[c] + state.momentum * s.var[c] * unbias;
    }
    state.initialized = true;
  }
  return out;
}

BatchNormGrads batchnorm2d_backward(const Tensor& grad_output, const Tensor& input,
                                    const Tensor& gamma, const BatchNormState& state, Mode mode) {
  require_same_shape(grad_output, input, "batchnorm2d backward");
  const ChannelStats s = stats_for_mode(input, state, mode);
  const std::size_t c_n = input.channels(), plane = input.height() * input.width();
  const double n = static_cast<double>(input.batch() * plane);
  BatchNormGrads g{Tensor::zeros_like(input), Tensor({c_n}, 0.0), Tensor({c_n}, 0.0)};
  for (std::size_t c = 0; c < c_n; ++c) {
    const double inv_std = 1.0 / std::sqrt(s.var[c] + state.eps);
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < input.batch(); ++b) {
      const double* x = input.storage().data() + (b * c_n + c) * plane;
      const double* dy = grad_output.storage().data() + (b * c_n + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += dy[i];
        sum_dy_xhat += dy[i] * (x[i] - s.mean[c]) * inv_std;
      }
    }
    g.beta[c] = sum_dy;
    g.gamma[c] = sum_dy_xhat;
    for (std::size_t b = 0; b < input.batch(); ++b) {
      const double* x = input.storage().data() + (b * c_n + c) * plane;
      const double* dy = grad_output.storage().data() + (b * c_n + c) * plane;
      double* dx = g.input.storage().data() + (b * c_n + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        if (mode == Mode::train) {
          const double xhat = (x[i] - s.mean[c]) * inv_std;
          dx[i] = gamma[c] * inv_std * (dy[i] - sum_dy / n - xhat * sum_dy_xhat / n);
        } else {
          dx[i] = gamma[c] * inv_std * dy[i];
        }
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (auto& v : out.storage()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& grad_output, const Tensor& input) {
  require_same_shape(grad_output, input, "relu backward");
  Tensor g = grad_output;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(input[i] > 0.0)) g[i] = 0.0;
  }
  return g;
}

Tensor softmax_channels(const Tensor& input) {
  require_rank(input, 4, "softmax_channels");
  if (input.channels() < 2) throw ShapeError("softmax_channels: need at least 2 channels");
  const std::size_t c_n = input.channels(), plane = input.height() * input.width();
  Tensor out = Tensor::zeros_like(input);
  std::vector<double> e(c_n);
  for (std::size_t b = 0; b < input.batch(); ++b) {
    const double* x = input.storage().data() + b * c_n * plane;
    double* y = out.storage().data() + b * c_n * plane;
    for (std::size_t p = 0; p < plane; ++p) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < c_n; ++c) m = std::max(m, x[c * plane + p]);
      double z = 0.0;
      for (std::size_t c = 0; c < c_n; ++c) {
        e[c] = std::exp(x[c * plane + p] - m);
        z += e[c];
      }
      for (std::size_t c = 0; c < c_n; ++c) y[c * plane + p] = e[c] / z;
    }
  }
  return out;
}

Tensor softmax_channels_backward(const Tensor& grad_output, const Tensor& output) {
  require_same_shape(grad_output, output, "softmax_channels backward");
  const std::size_t c_n = output.channels(), plane = output.height() * output.width();
  Tensor g = Tensor::zeros_like(output);
  for (std::size_t b = 0; b < output.batch(); ++b) {
    const double* s = output.storage().data() + b * c_n * plane;
    const double* dy = grad_output.storage().data() + b * c_n * plane;
    double* dx = g.storage().data() + b * c_n * plane;
    for (std::size_t p = 0; p < plane; ++p) {
      double inner = 0.0;
      for (std::size_t c = 0; c < c_n; ++c) inner += dy[c * plane + p] * s[c * plane + p];
      for (std::size_t c = 0; c < c_n; ++c) dx[c * plane + p] = s[c * plane + p] * (dy[c * plane + p] - inner);
    }
  }
  return g;
}

}  // namespace irisnet

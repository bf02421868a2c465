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

#include "irisnet/retinaconv.hpp"

#include <algorithm>
#include <string>

#include "irisnet/ops.hpp"

namespace irisnet {

void RetinaConvLayer::validate() const {
  require_rank(g, 4, "RetinaConv standard kernel");
  require_rank(h, 4, "RetinaConv dilated kernel");
  if (g.dim(2) != g.dim(3) || h.dim(2) != h.dim(3)) {
    throw ShapeError("RetinaConv: kernels must be square");
  }
  if (g.dim(2) % 2 == 0 || h.dim(2) % 2 == 0) {
    throw ShapeError("RetinaConv: kernel sizes must be odd, got ks=" + std::to_string(g.dim(2)) +
                     " kd=" + std::to_string(h.dim(2)));
  }
  if (g.dim(0) != h.dim(0) || g.dim(1) != h.dim(1)) {
    throw ShapeError("RetinaConv: standard kernel " + shape_to_string(g.shape()) +
                     " and dilated kernel " + shape_to_string(h.shape()) + " disagree on channels");
  }
  if (bias.shape() != Shape{g.dim(0)}) {
    throw ShapeError("RetinaConv: bias must have shape (" + std::to_string(g.dim(0)) + ")");
  }
  if (dilation < 1) throw ShapeError("RetinaConv: dilation must be >= 1");
}

int composed_extent(int standard_size, int dilated_size, int dilation) {
  return std::max(standard_size, (dilated_size - 1) * dilation + 1);
}

std::size_t retinaconv_parameter_count(std::size_t in_channels, std::size_t out_channels,
                                       int standard_size, int dilated_size) {
  const auto taps = static_cast<std::size_t>(standard_size * standard_size + dilated_size * dilated_size);
  return out_channels * in_channels * taps + out_channels;
}

std::size_t parameter_count(const RetinaConvLayer& layer) {
  return layer.g.size() + layer.h.size() + layer.bias.size();
}

int effective_receptive_field(const RetinaConvLayer& layer) {
  return composed_extent(layer.standard_size(), layer.dilated_size(), layer.dilation);
}

Tensor compose_kernels(const Tensor& g, const Tensor& h, int dilation) {
  const int ks = static_cast<int>(g.dim(2));
  const int kd = static_cast<int>(h.dim(2));
  const int extent = composed_extent(ks, kd, dilation);
  const int centre = (extent - 1) / 2;
  const std::size_t out_ch = g.dim(0), in_ch = g.dim(1);
  const auto e = static_cast<std::size_t>(extent);
  Tensor k({out_ch, in_ch, e, e}, 0.0);
  const int g_off = centre - (ks - 1) / 2;
  const int h_half = (kd - 1) / 2;
  for (std::size_t o = 0; o < out_ch; ++o) {
    for (std::size_t c = 0; c < in_ch; ++c) {
      for (int i = 0; i < ks; ++i) {
        for (int j = 0; j < ks; ++j) {
          k.at(o, c, static_cast<std::size_t>(g_off + i), static_cast<std::size_t>(g_off + j)) +=
              g.at(o, c, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
      }
      for (int i = 0; i < kd; ++i) {
        for (int j = 0; j < kd; ++j) {
          const int y = centre + (i - h_half) * dilation;
          const int x = centre + (j - h_half) * dilation;
          k.at(o, c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) +=
              h.at(o, c, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
      }
    }
  }
  return k;
}

Tensor compose_kernels(const RetinaConvLayer& layer) {
  layer.validate();
  return compose_kernels(layer.g, layer.h, layer.dilation);
}

namespace {

void check_input(const Tensor& input, const RetinaConvLayer& layer) {
  layer.validate();
  require_rank(input, 4, "RetinaConv input");
  if (input.channels() != layer.in_channels()) {
    throw ShapeError("RetinaConv: layer expects " + std::to_string(layer.in_channels()) +
                     " input channels, input has " + std::to_string(input.channels()));
  }
}

}  // namespace

Tensor retinaconv_forward(const Tensor& input, const RetinaConvLayer& layer) {
  check_input(input, layer);
  const Tensor k = compose_kernels(layer.g, layer.h, layer.dilation);
  return conv2d(input, k, layer.bias, ConvSpec::same(static_cast<int>(k.dim(2))));
}

Tensor retinaconv_reference(const Tensor& input, const RetinaConvLayer& layer) {
  check_input(input, layer);
  Tensor out = conv2d(input, layer.g, Tensor(), ConvSpec::same(layer.standard_size()));
  accumulate(out, conv2d(input, layer.h, Tensor(), ConvSpec::same(layer.dilated_size(), layer.dilation)));
  const std::size_t plane = out.height() * out.width();
  for (std::size_t b = 0; b < out.batch(); ++b) {
    for (std::size_t o = 0; o < out.channels(); ++o) {
      double* p = out.storage().data() + (b * out.channels() + o) * plane;
      for (std::size_t i = 0; i < plane; ++i) p[i] += layer.bias[o];
    }
  }
  return out;
}

void scatter_composed_gradient(const Tensor& grad_composed, int standard_size, int dilated_size,
                               int dilation, Tensor& grad_g, Tensor& grad_h) {
  const std::size_t out_ch = grad_composed.dim(0), in_ch = grad_composed.dim(1);
  const int extent = static_cast<int>(grad_composed.dim(2));
  const int centre = (extent - 1) / 2;
  const int g_off = centre - (standard_size - 1) / 2;
  const int h_half = (dilated_size - 1) / 2;
  const auto ks = static_cast<std::size_t>(standard_size);
  const auto kd = static_cast<std::size_t>(dilated_size);
  grad_g = Tensor({out_ch, in_ch, ks, ks}, 0.0);
  grad_h = Tensor({out_ch, in_ch, kd, kd}, 0.0);
  for (std::size_t o = 0; o < out_ch; ++o) {
    for (std::size_t c = 0; c < in_ch; ++c) {
      for (int i = 0; i < standard_size; ++i) {
        for (int j = 0; j < standard_size; ++j) {
          grad_g.at(o, c, static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
              grad_composed.at(o, c, static_cast<std::size_t>(g_off + i),
                               static_cast<std::size_t>(g_off + j));
        }
      }
      for (int i = 0; i < dilated_size; ++i) {
        for (int j = 0; j < dilated_size; ++j) {
          grad_h.at(o, c, static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
              grad_composed.at(o, c, static_cast<std::size_t>(centre + (i - h_half) * dilation),
                               static_cast<std::size_t>(centre + (j - h_half) * dilation));
        }
      }
    }
  }
}

RetinaConvGrads retinaconv_backward(const Tensor& grad_output, const Tensor& input,
                                    const RetinaConvLayer& layer) {
  check_input(input, layer);
  const Tensor k = compose_kernels(layer.g, layer.h, layer.dilation);
  auto conv = conv2d_backward(grad_output, input, k, ConvSpec::same(static_cast<int>(k.dim(2))));
  RetinaConvGrads r;
  r.input = std::move(conv.input);
  r.bias = std::move(conv.bias);
  scatter_composed_gradient(conv.kernel, layer.standard_size(), layer.dilated_size(),
                            layer.dilation, r.g, r.h);
  return r;
}

namespace ag {

Var retinaconv(Tape& t, Var input, Var g, Var h, Var bias, int dilation) {
  auto as_layer = [dilation](const Tape::Inputs& in) {
    return RetinaConvLayer{*in[1], *in[2], *in[3], dilation};
  };
  return t.record(
      "retinaconv", {input, g, h, bias},
      [as_layer](const Tape::Inputs& in) { return retinaconv_forward(*in[0], as_layer(in)); },
      [as_layer](const Tensor& grad, const Tape::Inputs& in, const Tensor&) {
        auto r = retinaconv_backward(grad, *in[0], as_layer(in));
        return std::vector<Tensor>{std::move(r.input), std::move(r.g), std::move(r.h),
                                   std::move(r.bias)};
      });
}

Var retinaconv_two_pass(Tape& t, Var input, Var g, Var h, Var bias, int dilation) {
  const int ks = static_cast<int>(t.value(g).dim(2));
  const int kd = static_cast<int>(t.value(h).dim(2));
  Var standard = conv2d(t, input, g, bias, ConvSpec::same(ks));
  Var dilated = conv2d(t, input, h, ConvSpec::same(kd, dilation));
  return add(t, standard, dilated);
}

}  // namespace ag
}  // namespace irisnet

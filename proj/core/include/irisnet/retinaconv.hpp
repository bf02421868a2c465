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

#include "irisnet/autograd.hpp"
#include "irisnet/tensor.hpp"

namespace irisnet {

/// A standard kernel and a dilated kernel that share one output and one bias.
///
/// Because convolution distributes over kernel addition, `x * g + x * h_d`
/// equals `x * K` where K is the dense kernel obtained by writing g into the
/// centre of a zero K x K grid and adding h at taps spaced `dilation` apart
/// around the same centre. The centre tap receives both contributions.
struct RetinaConvLayer {
  Tensor g;     ///< Cout x Cin x ks x ks
  Tensor h;     ///< Cout x Cin x kd x kd, applied with `dilation`
  Tensor bias;  ///< Cout
  int dilation = 1;

  std::size_t out_channels() const { return g.dim(0); }
  std::size_t in_channels() const { return g.dim(1); }
  int standard_size() const { return static_cast<int>(g.dim(2)); }
  int dilated_size() const { return static_cast<int>(h.dim(2)); }

  /// Throws ShapeError naming the violated condition.
  void validate() const;
};

/// max(ks, (kd - 1) * d + 1); odd whenever ks and kd are.
int composed_extent(int standard_size, int dilated_size, int dilation);

std::size_t retinaconv_parameter_count(std::size_t in_channels, std::size_t out_channels,
                                       int standard_size, int dilated_size);
std::size_t parameter_count(const RetinaConvLayer& layer);

int effective_receptive_field(const RetinaConvLayer& layer);

Tensor compose_kernels(const Tensor& g, const Tensor& h, int dilation);
Tensor compose_kernels(const RetinaConvLayer& layer);

/// One dense "same" convolution with the composed kernel.
Tensor retinaconv_forward(const Tensor& input, const RetinaConvLayer& layer);

/// Two separate convolutions summed, plus the bias. Verification oracle and
/// throughput baseline for the fused path.
Tensor retinaconv_reference(const Tensor& input, const RetinaConvLayer& layer);

struct RetinaConvGrads {
  Tensor input;
  Tensor g;
  Tensor h;
  Tensor bias;
};

/// Backward through the composed kernel: dK is computed once and scattered to
/// g and h at the taps each one contributed. Taps shared by both kernels hand
/// the same dK entry to each.
RetinaConvGrads retinaconv_backward(const Tensor& grad_output, const Tensor& input,
                                    const RetinaConvLayer& layer);

/// Inverse of composition for gradients: slices dK back onto g's and h's taps.
void scatter_composed_gradient(const Tensor& grad_composed, int standard_size, int dilated_size,
                               int dilation, Tensor& grad_g, Tensor& grad_h);

namespace ag {

/// Fused path on a tape.
Var retinaconv(Tape& t, Var input, Var g, Var h, Var bias, int dilation);
/// Two-pass path on a tape (differentiated through two conv2d nodes).
Var retinaconv_two_pass(Tape& t, Var input, Var g, Var h, Var bias, int dilation);

}  // namespace ag
}  // namespace irisnet

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
#include <optional>
#include <vector>

#include "irisnet/tensor.hpp"

namespace irisnet {

/// Geometry of a square 2-D convolution.
struct ConvSpec {
  int kernel_size = 3;
  int dilation = 1;
  int stride = 1;
  /// Explicit zero padding; empty means "same".
  std::optional<int> padding;

  static ConvSpec same(int kernel_size, int dilation = 1) {
    return ConvSpec{kernel_size, dilation, 1, std::nullopt};
  }
  static ConvSpec valid(int kernel_size, int dilation = 1, int stride = 1) {
    return ConvSpec{kernel_size, dilation, stride, 0};
  }

  int effective_extent() const { return (kernel_size - 1) * dilation + 1; }
  int resolved_padding() const { return padding ? *padding : (effective_extent() - 1) / 2; }
  std::size_t output_extent(std::size_t input_extent) const;
  void validate() const;
};

enum class Mode { train, eval };

// ---------------------------------------------------------------------------
// Convolution. Kernel layout Cout x Cin x k x k, taps outside the padded image
// read zero.

/// Scalar-loop reference implementation.
Tensor conv2d_direct(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                     const ConvSpec& spec);
/// Patch-matrix (im2col + GEMM) implementation; matches conv2d_direct to 1e-12.
Tensor conv2d_lowered(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                      const ConvSpec& spec);
/// Default path used by the model (lowered).
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, const ConvSpec& spec);

struct Conv2dGrads {
  Tensor input;
  Tensor kernel;
  Tensor bias;
};

Conv2dGrads conv2d_backward(const Tensor& grad_output, const Tensor& input, const Tensor& kernel,
                            const ConvSpec& spec);

/// Gradient of conv2d with respect to its input only; `input_shape` fixes the
/// spatial size that strided convolutions leave ambiguous.
Tensor conv2d_backward_input(const Tensor& grad_output, const Tensor& kernel,
                             const ConvSpec& spec, const Shape& input_shape);
Tensor conv2d_backward_kernel(const Tensor& grad_output, const Tensor& input,
                              const ConvSpec& spec);

// ---------------------------------------------------------------------------
// Transposed convolution. Kernel layout Cin x Cout x k x k, so that a conv2d
// kernel and its adjoint share one tensor. Output extent (H-1)*stride + k - 2*pad.

Tensor transposed_conv2d(const Tensor& input, const Tensor& kernel, int stride, int padding = 0);
/// Scatter-loop reference.
Tensor transposed_conv2d_direct(const Tensor& input, const Tensor& kernel, int stride,
                                int padding = 0);

struct TransposedConv2dGrads {
  Tensor input;
  Tensor kernel;
};

TransposedConv2dGrads transposed_conv2d_backward(const Tensor& grad_output, const Tensor& input,
                                                 const Tensor& kernel, int stride, int padding = 0);

// ---------------------------------------------------------------------------

struct MaxPoolResult {
  Tensor output;
  /// Flat index into the input for every output element.
  std::vector<std::size_t> argmax;
};

/// 2x2 window, stride 2. Ties resolve to the first element in row-major order.
MaxPoolResult maxpool2d(const Tensor& input);
Tensor maxpool2d_backward(const Tensor& grad_output, const MaxPoolResult& forward,
                          const Shape& input_shape);

// ---------------------------------------------------------------------------

struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;
  bool initialized = false;
  double eps = 1e-5;
  double momentum = 0.1;

  BatchNormState() = default;
  explicit BatchNormState(std::size_t channels, double eps = 1e-5, double momentum = 0.1);
};

/// Train mode normalizes with batch statistics and folds them into the running
/// averages (unbiased variance); eval mode uses the running averages.
Tensor batchnorm2d(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                   BatchNormState& state, Mode mode);

/// Same as batchnorm2d but never touches `state` beyond reading it in eval mode.
Tensor batchnorm2d_stateless(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                             const BatchNormState& state, Mode mode);

struct BatchNormGrads {
  Tensor input;
  Tensor gamma;
  Tensor beta;
};

BatchNormGrads batchnorm2d_backward(const Tensor& grad_output, const Tensor& input,
                                    const Tensor& gamma, const BatchNormState& state, Mode mode);

// ---------------------------------------------------------------------------

Tensor relu(const Tensor& input);
/// Subgradient at exactly zero is zero.
Tensor relu_backward(const Tensor& grad_output, const Tensor& input);

Tensor softmax_channels(const Tensor& input);
Tensor softmax_channels_backward(const Tensor& grad_output, const Tensor& output);

}  // namespace irisnet

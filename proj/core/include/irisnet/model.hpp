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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irisnet/autograd.hpp"
#include "irisnet/ops.hpp"
#include "irisnet/retinaconv.hpp"

namespace irisnet {

/// Encoder-decoder geometry. Blocks are numbered in execution order:
/// encoder levels 0..depth-1, the bottleneck (when enabled), then decoder
/// levels depth-1..0. `dilation_schedule` holds one dilation per block.
struct ArchConfig {
  int depth = 4;
  int base_filters = 16;
  std::vector<int> dilation_schedule;  ///< empty: 1 at both ends, 2 inside
  int input_size = 128;
  int in_channels = 1;
  int out_classes = 2;
  int standard_kernel = 3;
  int dilated_kernel = 3;
  bool bottleneck = true;
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;

  int block_count() const;
  int encoder_levels() const { return depth; }
  /// Decoder levels; without a bottleneck the deepest encoder takes its place.
  int decoder_levels() const { return bottleneck ? depth : depth - 1; }
  int pooling_steps() const { return bottleneck ? depth : depth - 1; }
  std::vector<int> resolved_dilations() const;
  std::size_t level_channels(int level) const {
    return static_cast<std::size_t>(base_filters) << level;
  }

  /// Throws ConfigError naming the violated invariant.
  void validate() const;

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string arch_to_json(const ArchConfig& config);
ArchConfig arch_from_json(const std::string& text);

/// RetinaConv followed by batch norm and ReLU; parameter and state indices
/// refer into the owning Model.
struct ConvUnit {
  std::size_t g = 0, h = 0, bias = 0, gamma = 0, beta = 0;
  std::size_t bn = 0;
  int dilation = 1;
};

struct Stage {
  ConvUnit first;
  ConvUnit second;
};

struct DecoderStage {
  std::size_t up_kernel = 0;  ///< transposed conv, Cin x Cout x 2 x 2
  Stage convs;
  int skip_level = 0;  ///< encoder level whose output is concatenated
};

enum class ConvPath { fused, two_pass };

class Model {
 public:
  const ArchConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& init_scheme() const { return init_scheme_; }

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  std::vector<BatchNormState>& bn_states() { return bn_states_; }
  const std::vector<BatchNormState>& bn_states() const { return bn_states_; }

  const std::vector<Stage>& encoders() const { return encoders_; }
  const std::optional<Stage>& bottleneck() const { return bottleneck_; }
  const std::vector<DecoderStage>& decoders() const { return decoders_; }
  std::size_t head_kernel() const { return head_kernel_; }
  std::size_t head_bias() const { return head_bias_; }

  /// The RetinaConv layer held by a unit (copies its tensors).
  RetinaConvLayer retina_layer(const ConvUnit& unit) const;

 private:
  friend Model build_irisnet(const ArchConfig& config, std::uint64_t seed);
  friend Model load_checkpoint(const std::filesystem::path& path);

  std::size_t add_param(std::string name, Tensor value);
  std::size_t add_bn(std::size_t channels);
  ConvUnit add_unit(const std::string& prefix, std::size_t in_ch, std::size_t out_ch, int dilation);
  Stage add_stage(const std::string& prefix, std::size_t in_ch, std::size_t out_ch, int dilation);
  void build_topology();

  ArchConfig config_;
  std::uint64_t seed_ = 0;
  std::string init_scheme_ = "fan_in_uniform";
  std::vector<Parameter> params_;
  std::vector<BatchNormState> bn_states_;
  std::vector<Stage> encoders_;
  std::optional<Stage> bottleneck_;
  std::vector<DecoderStage> decoders_;
  std::size_t head_kernel_ = 0;
  std::size_t head_bias_ = 0;
};

/// Builds the network and draws its weights from `seed`: convolution kernels
/// U(-b, b) with b = sqrt(6 / fan_in) (sqrt(3 / fan_in) for the upsampling and
/// head kernels), biases and BN shifts zero, BN scales one.
Model build_irisnet(const ArchConfig& config, std::uint64_t seed);

/// Records the network on `tape`; returns the B x 2 x H x W probability map.
/// Channel 0 is background, channel 1 foreground.
Var forward(Tape& tape, Model& model, Var batch, Mode mode, ConvPath path = ConvPath::fused);
Tensor forward(Model& model, const Tensor& batch, Mode mode, ConvPath path = ConvPath::fused);

std::size_t count_parameters(const Model& model);
/// Closed-form count from the configuration alone.
std::size_t expected_parameter_count(const ArchConfig& config);

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);
/// Loads and requires the stored architecture to equal `expected`.
Model load_checkpoint(const std::filesystem::path& path, const ArchConfig& expected);

}  // namespace irisnet

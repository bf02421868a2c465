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

#include "irisnet/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>

#include "irisnet/random.hpp"

namespace irisnet {

using nlohmann::json;

// ---------------------------------------------------------------------------
// ArchConfig

int ArchConfig::block_count() const { return encoder_levels() + (bottleneck ? 1 : 0) + decoder_levels(); }

std::vector<int> ArchConfig::resolved_dilations() const {
  if (!dilation_schedule.empty()) return dilation_schedule;
  std::vector<int> d(static_cast<std::size_t>(std::max(block_count(), 1)), 2);
  d.front() = 1;
  d.back() = 1;
  return d;
}

void ArchConfig::validate() const {
  if (depth < 1) throw ConfigError("ArchConfig.depth must be >= 1");
  if (base_filters < 1) throw ConfigError("ArchConfig.base_filters must be >= 1");
  if (in_channels != 1) throw ConfigError("ArchConfig.in_channels must be 1 (grayscale)");
  if (out_classes != 2) throw ConfigError("ArchConfig.out_classes must be 2 (background, foreground)");
  if (standard_kernel < 1 || standard_kernel % 2 == 0 || dilated_kernel < 1 || dilated_kernel % 2 == 0) {
    throw ConfigError("ArchConfig.standard_kernel and dilated_kernel must be positive odd integers");
  }
  if (input_size < 1 || input_size % (1 << depth) != 0) {
    throw ConfigError("ArchConfig.input_size " + std::to_string(input_size) +
                      " must be a positive multiple of 2^depth = " + std::to_string(1 << depth));
  }
  if (block_count() < 1) throw ConfigError("ArchConfig: configuration has no convolution blocks");
  const auto d = resolved_dilations();
  if (static_cast<int>(d.size()) != block_count()) {
    throw ConfigError("ArchConfig.dilation_schedule has " + std::to_string(d.size()) +
                      " entries, expected " + std::to_string(block_count()));
  }
  for (int v : d) {
    if (v < 1) throw ConfigError("ArchConfig.dilation_schedule entries must be >= 1");
  }
  if (d.front() != 1) throw ConfigError("ArchConfig.dilation_schedule[first] must be 1");
  if (d.back() != 1) throw ConfigError("ArchConfig.dilation_schedule[last] must be 1");
  if (!(bn_eps > 0.0)) throw ConfigError("ArchConfig.bn_eps must be > 0");
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0)) throw ConfigError("ArchConfig.bn_momentum must be in (0, 1]");
}

namespace {

json arch_json(const ArchConfig& c) {
  return json{{"depth", c.depth},
              {"base_filters", c.base_filters},
              {"dilation_schedule", c.dilation_schedule},
              {"input_size", c.input_size},
              {"in_channels", c.in_channels},
              {"out_classes", c.out_classes},
              {"standard_kernel", c.standard_kernel},
              {"dilated_kernel", c.dilated_kernel},
              {"bottleneck", c.bottleneck},
              {"bn_eps", c.bn_eps},
              {"bn_momentum", c.bn_momentum}};
}

ArchConfig arch_from(const json& j) {
  ArchConfig c;
  c.depth = j.value("depth", c.depth);
  c.base_filters = j.value("base_filters", c.base_filters);
  if (j.contains("dilation_schedule")) c.dilation_schedule = j.at("dilation_schedule").get<std::vector<int>>();
  c.input_size = j.value("input_size", c.input_size);
  c.in_channels = j.value("in_channels", c.in_channels);
  c.out_classes = j.value("out_classes", c.out_classes);
  c.standard_kernel = j.value("standard_kernel", c.standard_kernel);
  c.dilated_kernel = j.value("dilated_kernel", c.dilated_kernel);
  c.bottleneck = j.value("bottleneck", c.bottleneck);
  c.bn_eps = j.value("bn_eps", c.bn_eps);
  c.bn_momentum = j.value("bn_momentum", c.bn_momentum);
  return c;
}

}  // namespace

std::string arch_to_json(const ArchConfig& config) { return arch_json(config).dump(2); }

ArchConfig arch_from_json(const std::string& text) {
  try {
    return arch_from(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ArchConfig JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Model construction

std::size_t Model::add_param(std::string name, Tensor value) {
  params_.push_back(Parameter{std::move(name), std::move(value)});
  return params_.size() - 1;
}

std::size_t Model::add_bn(std::size_t channels) {
  bn_states_.emplace_back(channels, config_.bn_eps, config_.bn_momentum);
  return bn_states_.size() - 1;
}

ConvUnit Model::add_unit(const std::string& prefix, std::size_t in_ch, std::size_t out_ch, int dilation) {
  const auto ks = static_cast<std::size_t>(config_.standard_kernel);
  const auto kd = static_cast<std::size_t>(config_.dilated_kernel);
  ConvUnit u;
  u.dilation = dilation;
  u.g = add_param(prefix + ".g", Tensor({out_ch, in_ch, ks, ks}, 0.0));
  u.h = add_param(prefix + ".h", Tensor({out_ch, in_ch, kd, kd}, 0.0));
  u.bias = add_param(prefix + ".bias", Tensor({out_ch}, 0.0));
  u.gamma = add_param(prefix + ".bn.gamma", Tensor({out_ch}, 1.0));
  u.beta = add_param(prefix + ".bn.beta", Tensor({out_ch}, 0.0));
  u.bn = add_bn(out_ch);
  return u;
}

Stage Model::add_stage(const std::string& prefix, std::size_t in_ch, std::size_t out_ch, int dilation) {
  Stage s;
  s.first = add_unit(prefix + ".conv1", in_ch, out_ch, dilation);
  s.second = add_unit(prefix + ".conv2", out_ch, out_ch, dilation);
  return s;
}

void Model::build_topology() {
  config_.validate();
  config_.dilation_schedule = config_.resolved_dilations();
  const auto& dil = config_.dilation_schedule;
  std::size_t block = 0;
  std::size_t in_ch = static_cast<std::size_t>(config_.in_channels);
  for (int level = 0; level < config_.depth; ++level) {
    const std::size_t out_ch = config_.level_channels(level);
    encoders_.push_back(add_stage("enc" + std::to_string(level), in_ch, out_ch, dil[block++]));
    in_ch = out_ch;
  }
  if (config_.bottleneck) {
    const std::size_t out_ch = config_.level_channels(config_.depth);
    bottleneck_ = add_stage("bottleneck", in_ch, out_ch, dil[block++]);
    in_ch = out_ch;
  }
  for (int i = 0; i < config_.decoder_levels(); ++i) {
    const int level = config_.decoder_levels() - 1 - i;
    const std::size_t out_ch = config_.level_channels(level);
    const std::string prefix = "dec" + std::to_string(level);
    DecoderStage d;
    d.skip_level = level;
    d.up_kernel = add_param(prefix + ".up", Tensor({in_ch, out_ch, 2, 2}, 0.0));
    d.convs = add_stage(prefix, 2 * out_ch, out_ch, dil[block++]);
    decoders_.push_back(d);
    in_ch = out_ch;
  }
  const auto classes = static_cast<std::size_t>(config_.out_classes);
  head_kernel_ = add_param("head.kernel", Tensor({classes, in_ch, 1, 1}, 0.0));
  head_bias_ = add_param("head.bias", Tensor({classes}, 0.0));
}

RetinaConvLayer Model::retina_layer(const ConvUnit& unit) const {
  return RetinaConvLayer{params_[unit.g].value, params_[unit.h].value, params_[unit.bias].value,
                         unit.dilation};
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void fill_uniform(Tensor& t, double bound, Rng& rng) {
  for (auto& v : t.storage()) v = rng.uniform(-bound, bound);
}

}  // namespace

Model build_irisnet(const ArchConfig& config, std::uint64_t seed) {
  Model m;
  m.config_ = config;
  m.seed_ = seed;
  m.build_topology();
  Rng rng(derive_seed(seed, 0x1417));
  const double taps = config.standard_kernel * config.standard_kernel +
                      config.dilated_kernel * config.dilated_kernel;
  for (auto& p : m.params_) {
    if (ends_with(p.name, ".g") || ends_with(p.name, ".h")) {
      const double fan_in = static_cast<double>(p.value.dim(1)) * taps;
      fill_uniform(p.value, std::sqrt(6.0 / fan_in), rng);
    } else if (ends_with(p.name, ".up")) {
      fill_uniform(p.value, std::sqrt(3.0 / static_cast<double>(p.value.dim(0))), rng);
    } else if (p.name == "head.kernel") {
      fill_uniform(p.value, std::sqrt(3.0 / static_cast<double>(p.value.dim(1))), rng);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Forward

namespace {

Var unit_forward(Tape& t, Model& m, const ConvUnit& u, Var x, Mode mode, ConvPath path) {
  auto& p = m.parameters();
  Var g = t.parameter(p[u.g]);
  Var h = t.parameter(p[u.h]);
  Var b = t.parameter(p[u.bias]);
  Var y = path == ConvPath::fused ? ag::retinaconv(t, x, g, h, b, u.dilation)
                                  : ag::retinaconv_two_pass(t, x, g, h, b, u.dilation);
  y = ag::batchnorm2d(t, y, t.parameter(p[u.gamma]), t.parameter(p[u.beta]), m.bn_states()[u.bn], mode);
  return ag::relu(t, y);
}

Var stage_forward(Tape& t, Model& m, const Stage& s, Var x, Mode mode, ConvPath path) {
  return unit_forward(t, m, s.second, unit_forward(t, m, s.first, x, mode, path), mode, path);
}

}  // namespace

Var forward(Tape& tape, Model& model, Var batch, Mode mode, ConvPath path) {
  const auto& cfg = model.config();
  const Tensor& in = tape.value(batch);
  const auto n = static_cast<std::size_t>(cfg.input_size);
  if (in.rank() != 4 || in.channels() != static_cast<std::size_t>(cfg.in_channels) ||
      in.height() != n || in.width() != n) {
    throw ShapeError("IrisNet forward: input " + shape_to_string(in.shape()) + " must be B x " +
                     std::to_string(cfg.in_channels) + " x " + std::to_string(n) + " x " +
                     std::to_string(n) + "; resize or pad images to " + std::to_string(n) + "x" +
                     std::to_string(n));
  }
  std::vector<Var> skips;
  Var x = batch;
  for (int level = 0; level < cfg.depth; ++level) {
    x = stage_forward(tape, model, model.encoders()[static_cast<std::size_t>(level)], x, mode, path);
    if (level < cfg.pooling_steps()) {
      skips.push_back(x);
      x = ag::maxpool2d(tape, x);
    }
  }
  if (model.bottleneck()) x = stage_forward(tape, model, *model.bottleneck(), x, mode, path);
  auto& p = model.parameters();
  for (const auto& d : model.decoders()) {
    Var up = ag::transposed_conv2d(tape, x, tape.parameter(p[d.up_kernel]), 2);
    x = ag::concat_channels(tape, skips[static_cast<std::size_t>(d.skip_level)], up);
    x = stage_forward(tape, model, d.convs, x, mode, path);
  }
  Var logits = ag::conv2d(tape, x, tape.parameter(p[model.head_kernel()]),
                          tape.parameter(p[model.head_bias()]), ConvSpec::same(1));
  return ag::softmax_channels(tape, logits);
}

Tensor forward(Model& model, const Tensor& batch, Mode mode, ConvPath path) {
  Tape tape;
  Var out = forward(tape, model, tape.input(batch), mode, path);
  return tape.value(out);
}

std::size_t count_parameters(const Model& model) {
  std::size_t n = 0;
  for (const auto& p : model.parameters()) n += p.value.size();
  return n;
}

std::size_t expected_parameter_count(const ArchConfig& config) {
  config.validate();
  const int ks = config.standard_kernel, kd = config.dilated_kernel;
  auto unit = [&](std::size_t in, std::size_t out) {
    return retinaconv_parameter_count(in, out, ks, kd) + 2 * out;  // + BN gamma, beta
  };
  auto stage = [&](std::size_t in, std::size_t out) { return unit(in, out) + unit(out, out); };
  std::size_t total = 0;
  std::size_t in_ch = static_cast<std::size_t>(config.in_channels);
  for (int level = 0; level < config.depth; ++level) {
    total += stage(in_ch, config.level_channels(level));
    in_ch = config.level_channels(level);
  }
  if (config.bottleneck) {
    total += stage(in_ch, config.level_channels(config.depth));
    in_ch = config.level_channels(config.depth);
  }
  for (int level = config.decoder_levels() - 1; level >= 0; --level) {
    const std::size_t out = config.level_channels(level);
    total += in_ch * out * 4 + stage(2 * out, out);
    in_ch = out;
  }
  const auto classes = static_cast<std::size_t>(config.out_classes);
  return total + classes * in_ch + classes;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'I', 'R', 'I', 'S', 'C', 'K', 'P', 'T'};

std::uint64_t fnv1a(const std::string& bytes, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(bytes[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (end_ - pos_ < n) throw CheckpointError("checkpoint truncated: payload ends early");
  }
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  json header;
  header["format"] = "irisnet-checkpoint";
  header["arch"] = arch_json(model.config());
  header["seed"] = model.seed();
  header["init"] = model.init_scheme();
  json params = json::array();
  for (const auto& p : model.parameters()) params.push_back({{"name", p.name}, {"shape", p.value.shape()}});
  header["parameters"] = params;
  json bns = json::array();
  for (const auto& s : model.bn_states()) {
    bns.push_back({{"channels", s.running_mean.size()}, {"initialized", s.initialized}});
  }
  header["batchnorm"] = bns;
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u64(out, text.size());
  out += text;
  for (const auto& p : model.parameters()) {
    for (double v : p.value.data()) put_f64(out, v);
  }
  for (const auto& s : model.bn_states()) {
    for (double v : s.running_mean.data()) put_f64(out, v);
    for (double v : s.running_var.data()) put_f64(out, v);
  }
  put_u64(out, fnv1a(out, out.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("cannot open checkpoint for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw CheckpointError("failed writing checkpoint: " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8) throw CheckpointError("checkpoint truncated: " + path.string());
  if (bytes.compare(0, sizeof(kMagic), std::string(kMagic, sizeof(kMagic))) != 0) {
    throw CheckpointError("not an IrisNet checkpoint (bad magic): " + path.string());
  }
  const std::size_t body = bytes.size() - 8;
  {
    Reader r(bytes, bytes.size());
    (void)r.str(body);
    if (r.u64() != fnv1a(bytes, body)) {
      throw CheckpointError("checkpoint checksum mismatch (corrupt or truncated): " + path.string());
    }
  }
  Reader r(bytes, body);
  (void)r.str(sizeof(kMagic));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t len = r.u64();
  if (len > body) throw CheckpointError("checkpoint header length out of range");
  json header;
  try {
    header = json::parse(r.str(len));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }

  Model m;
  try {
    m.config_ = arch_from(header.at("arch"));
    m.seed_ = header.at("seed").get<std::uint64_t>();
    m.init_scheme_ = header.at("init").get<std::string>();
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint header incomplete: ") + e.what());
  }
  m.build_topology();
  const auto& names = header.at("parameters");
  if (names.size() != m.params_.size()) {
    throw CheckpointError("checkpoint parameter list does not match its architecture");
  }
  for (std::size_t i = 0; i < m.params_.size(); ++i) {
    auto& p = m.params_[i];
    if (names[i].at("name").get<std::string>() != p.name ||
        names[i].at("shape").get<Shape>() != p.value.shape()) {
      throw CheckpointError("checkpoint parameter " + std::to_string(i) + " does not match '" + p.name + "'");
    }
    for (auto& v : p.value.storage()) v = r.f64();
  }
  const auto& bns = header.at("batchnorm");
  if (bns.size() != m.bn_states_.size()) throw CheckpointError("checkpoint batch-norm list mismatch");
  for (std::size_t i = 0; i < m.bn_states_.size(); ++i) {
    auto& s = m.bn_states_[i];
    s.initialized = bns[i].at("initialized").get<bool>();
    for (auto& v : s.running_mean.storage()) v = r.f64();
    for (auto& v : s.running_var.storage()) v = r.f64();
  }
  if (r.position() != body) throw CheckpointError("checkpoint has trailing bytes before checksum");
  return m;
}

Model load_checkpoint(const std::filesystem::path& path, const ArchConfig& expected) {
  Model m = load_checkpoint(path);
  const ArchConfig& got = m.config();
  auto mismatch = [](const std::string& field) {
    throw CheckpointError("checkpoint architecture mismatch in field '" + field + "'");
  };
  if (got.depth != expected.depth) mismatch("depth");
  if (got.base_filters != expected.base_filters) mismatch("base_filters");
  if (got.resolved_dilations() != expected.resolved_dilations()) mismatch("dilation_schedule");
  if (got.input_size != expected.input_size) mismatch("input_size");
  if (got.in_channels != expected.in_channels) mismatch("in_channels");
  if (got.out_classes != expected.out_classes) mismatch("out_classes");
  if (got.standard_kernel != expected.standard_kernel) mismatch("standard_kernel");
  if (got.dilated_kernel != expected.dilated_kernel) mismatch("dilated_kernel");
  if (got.bottleneck != expected.bottleneck) mismatch("bottleneck");
  if (got.bn_eps != expected.bn_eps) mismatch("bn_eps");
  if (got.bn_momentum != expected.bn_momentum) mismatch("bn_momentum");
  return m;
}

}  // namespace irisnet

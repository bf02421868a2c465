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

#include "irisnet_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include <irisnet/train.hpp>

namespace irisnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PhantomParams phantom_for(const TrainConfig& c, std::uint64_t seed) {
  PhantomParams p = c.phantom;
  p.rows = static_cast<std::size_t>(c.arch.input_size);
  p.cols = static_cast<std::size_t>(c.arch.input_size);
  p.seed = seed;
  return p;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void TrainConfig::validate() const {
  arch.validate();
  if (epochs < 1) throw ConfigError("TrainConfig.epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("TrainConfig.batch_size must be >= 1");
  try {
    adam.validate();
    augmentation.validate();
    phantom_for(*this, seed).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("TrainConfig: ") + e.what());
  }
  if (!(split.train > 0.0 && split.validation > 0.0 && split.test > 0.0) ||
      std::abs(split.train + split.validation + split.test - 1.0) > 1e-9) {
    throw ConfigError("TrainConfig.split ratios must be positive and sum to 1");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("TrainConfig.threshold must lie in (0, 1)");
  if (!(mm_per_px > 0.0)) throw ConfigError("TrainConfig.mm_per_px must be > 0");
  if (bench_frames < 1) throw ConfigError("TrainConfig.bench_frames must be >= 1");
}

bool operator==(const TrainConfig& a, const TrainConfig& b) {
  const auto& x = a.augmentation;
  const auto& y = b.augmentation;
  return a.arch == b.arch && a.epochs == b.epochs && a.batch_size == b.batch_size && a.adam == b.adam &&
         a.loss == b.loss && x.flip_probability == y.flip_probability && x.max_rotation_deg == y.max_rotation_deg &&
         x.max_shift_px == y.max_shift_px && x.zoom_min == y.zoom_min && x.zoom_max == y.zoom_max &&
         a.split.train == b.split.train && a.split.validation == b.split.validation && a.split.test == b.split.test &&
         a.threshold == b.threshold && a.mm_per_px == b.mm_per_px && a.seed == b.seed &&
         phantom_params_to_json(a.phantom) == phantom_params_to_json(b.phantom) &&
         a.history_wall_time == b.history_wall_time && a.bench_frames == b.bench_frames;
}

namespace {

json config_json(const TrainConfig& c) {
  return json{{"arch", json::parse(arch_to_json(c.arch))},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.adam.learning_rate},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"adam_epsilon", c.adam.epsilon},
              {"loss", loss_mode_name(c.loss)},
              {"augmentation",
               {{"flip_probability", c.augmentation.flip_probability},
                {"max_rotation_deg", c.augmentation.max_rotation_deg},
                {"max_shift_px", c.augmentation.max_shift_px},
                {"zoom_min", c.augmentation.zoom_min},
                {"zoom_max", c.augmentation.zoom_max}}},
              {"split", {{"train", c.split.train}, {"validation", c.split.validation}, {"test", c.split.test}}},
              {"threshold", c.threshold},
              {"mm_per_px", c.mm_per_px},
              {"seed", c.seed},
              {"phantom", json::parse(phantom_params_to_json(c.phantom))},
              {"history_wall_time", c.history_wall_time},
              {"bench_frames", c.bench_frames}};
}

}  // namespace

std::string config_to_json(const TrainConfig& config) { return config_json(config).dump(2) + "\n"; }

TrainConfig config_from_json(const std::string& text) {
  TrainConfig c;
  try {
    const json j = json::parse(text);
    require_keys(j,
                 {"arch", "epochs", "batch_size", "learning_rate", "beta1", "beta2", "adam_epsilon", "loss",
                  "augmentation", "split", "threshold", "mm_per_px", "seed", "phantom", "history_wall_time",
                  "bench_frames"},
                 "config");
    if (j.contains("arch")) {
      require_keys(j.at("arch"),
                   {"depth", "base_filters", "dilation_schedule", "input_size", "in_channels", "out_classes",
                    "standard_kernel", "dilated_kernel", "bottleneck", "bn_eps", "bn_momentum"},
                   "config.arch");
      c.arch = arch_from_json(j.at("arch").dump());
    }
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.adam.learning_rate = j.value("learning_rate", c.adam.learning_rate);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.epsilon = j.value("adam_epsilon", c.adam.epsilon);
    if (j.contains("loss")) c.loss = loss_mode_from_name(j.at("loss").get<std::string>());
    if (j.contains("augmentation")) {
      const auto& a = j.at("augmentation");
      require_keys(a, {"flip_probability", "max_rotation_deg", "max_shift_px", "zoom_min", "zoom_max"},
                   "config.augmentation");
      c.augmentation.flip_probability = a.value("flip_probability", c.augmentation.flip_probability);
      c.augmentation.max_rotation_deg = a.value("max_rotation_deg", c.augmentation.max_rotation_deg);
      c.augmentation.max_shift_px = a.value("max_shift_px", c.augmentation.max_shift_px);
      c.augmentation.zoom_min = a.value("zoom_min", c.augmentation.zoom_min);
      c.augmentation.zoom_max = a.value("zoom_max", c.augmentation.zoom_max);
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      require_keys(s, {"train", "validation", "test"}, "config.split");
      c.split.train = s.value("train", c.split.train);
      c.split.validation = s.value("validation", c.split.validation);
      c.split.test = s.value("test", c.split.test);
    }
    c.threshold = j.value("threshold", c.threshold);
    c.mm_per_px = j.value("mm_per_px", c.mm_per_px);
    c.seed = j.value("seed", c.seed);
    if (j.contains("phantom")) c.phantom = phantom_params_from_json(j.at("phantom").dump());
    c.history_wall_time = j.value("history_wall_time", c.history_wall_time);
    c.bench_frames = j.value("bench_frames", c.bench_frames);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) throw;
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

TrainConfig load_config(const fs::path& path) { return config_from_json(read_text(path)); }

void save_config(const TrainConfig& config, const fs::path& path) { write_text(path, config_to_json(config)); }

// ---------------------------------------------------------------------------
// Dataset manifest

const std::vector<std::string>& Manifest::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "validation" || name == "val") return validation;
  if (name == "test") return test;
  throw std::invalid_argument("unknown split '" + name + "' (expected train, validation or test)");
}

Manifest read_manifest(const fs::path& data_dir) {
  const fs::path path = data_dir / "manifest.json";
  if (!fs::exists(path)) throw std::runtime_error("missing manifest " + path.string() + " (run gen-data first)");
  const json j = json::parse(read_text(path));
  Manifest m;
  for (const auto& s : j.at("samples")) m.ids.push_back(s.at("id").get<std::string>());
  const auto& splits = j.at("splits");
  m.train = splits.at("train").get<std::vector<std::string>>();
  m.validation = splits.at("validation").get<std::vector<std::string>>();
  m.test = splits.at("test").get<std::vector<std::string>>();
  return m;
}

std::vector<SegmentationSample> load_split(const fs::path& data_dir, const Manifest& manifest,
                                           const std::string& split) {
  std::vector<SegmentationSample> out;
  for (const auto& id : manifest.split(split)) out.push_back(load_sample(data_dir, id));
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalSummary evaluate_predictions(const std::vector<SegmentationSample>& samples, const std::vector<Tensor>& probs,
                                 double tau, double mm_per_px) {
  if (samples.size() != probs.size()) {
    throw std::invalid_argument("evaluate_predictions: " + std::to_string(samples.size()) + " samples but " +
                                std::to_string(probs.size()) + " predictions");
  }
  EvalSummary s;
  std::vector<double> soft, hard, dpx, dmm;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EvalRow row;
    row.sample_id = samples[i].id;
    const BinaryMask truth = samples[i].foreground();
    const BinaryMask pred = binarize(probs[i], tau);
    row.soft_iou = soft_iou(probs[i], truth);
    row.iou_at_tau = iou(pred, truth);
    try {
      const Contour c = mask_to_contour(skeletonize(pred));
      row.msd_px = msd(c, samples[i].centerline);
      row.msd_mm = px_to_mm(row.msd_px, mm_per_px);
    } catch (const std::exception& e) {
      row.failed = true;
      row.failure = e.what();
    }
    if (row.failed) {
      ++s.failures;
    } else {
      soft.push_back(row.soft_iou);
      hard.push_back(row.iou_at_tau);
      dpx.push_back(row.msd_px);
      dmm.push_back(row.msd_mm);
    }
    s.rows.push_back(std::move(row));
  }
  s.mean = EvalRow{"mean", mean_of(soft), mean_of(hard), mean_of(dpx), mean_of(dmm), false, {}};
  s.stddev = EvalRow{"std", sample_std(soft), sample_std(hard), sample_std(dpx), sample_std(dmm), false, {}};
  return s;
}

void write_eval_csv(const fs::path& path, const EvalSummary& summary) {
  std::string out = "sample_id,soft_iou,iou_at_tau,msd_px,msd_mm,status\n";
  for (const auto& r : summary.rows) {
    out += r.sample_id + "," + num(r.soft_iou) + "," + num(r.iou_at_tau) + ",";
    out += r.failed ? ",,failed\n" : num(r.msd_px) + "," + num(r.msd_mm) + ",ok\n";
  }
  for (const auto* r : {&summary.mean, &summary.stddev}) {
    out += r->sample_id + "," + num(r->soft_iou) + "," + num(r->iou_at_tau) + "," + num(r->msd_px) + "," +
           num(r->msd_mm) + ",aggregate\n";
  }
  write_text(path, out);
}

// ---------------------------------------------------------------------------
// Benchmark

BenchReport run_bench(const TrainConfig& config, int runs) {
  config.validate();
  if (runs < 1) throw std::invalid_argument("bench: runs must be >= 1");
  Model model = build_irisnet(config.arch, config.seed);
  const auto n = static_cast<std::size_t>(config.arch.input_size);
  Rng rng(derive_seed(config.seed, 0xBE4C));
  Tensor image({1, 1, n, n}, 0.0);
  for (auto& v : image.storage()) v = rng.uniform();
  // One train-mode pass fills the batch-norm running statistics.
  forward(model, image, Mode::train);

  BenchReport r;
  r.params = count_parameters(model);
  r.frames_per_run = config.bench_frames;
  r.input_size = config.arch.input_size;
  using Clock = std::chrono::steady_clock;
  for (ConvPath path : {ConvPath::fused, ConvPath::two_pass}) {
    auto& samples = path == ConvPath::fused ? r.fused_fps : r.reference_fps;
    forward(model, image, Mode::eval, path);
    for (int run = 0; run < runs; ++run) {
      const auto t0 = Clock::now();
      for (int f = 0; f < config.bench_frames; ++f) forward(model, image, Mode::eval, path);
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      samples.push_back(static_cast<double>(config.bench_frames) / secs);
    }
  }
  r.fused_mean = mean_of(r.fused_fps);
  r.fused_std = sample_std(r.fused_fps);
  r.reference_mean = mean_of(r.reference_fps);
  r.reference_std = sample_std(r.reference_fps);
  return r;
}

std::string bench_to_json(const BenchReport& r) {
  const json j{{"fps_fused_mean", r.fused_mean},
               {"fps_fused_std", r.fused_std},
               {"fps_reference_mean", r.reference_mean},
               {"fps_reference_std", r.reference_std},
               {"params", r.params},
               {"runs", r.fused_fps.size()},
               {"frames_per_run", r.frames_per_run},
               {"input_size", r.input_size},
               {"samples", {{"fused", r.fused_fps}, {"reference", r.reference_fps}}}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Commands

namespace {

template <typename F>
int guarded(const char* name, std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << name << ": error: " << e.what() << '\n';
    return 1;
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create directory " + dir.string());
}

std::string sample_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%04zu", i);
  return buf;
}

}  // namespace

int cmd_gen_data(const TrainConfig& config, std::size_t count, const fs::path& out_dir, std::ostream& log,
                 std::ostream& err) {
  return guarded("gen-data", err, [&] {
    config.validate();
    ensure_dir(out_dir);
    const SplitIndices split = split_indices(count, config.split, config.seed);
    std::vector<std::string> assignment(count);
    for (auto i : split.train) assignment[i] = "train";
    for (auto i : split.validation) assignment[i] = "validation";
    for (auto i : split.test) assignment[i] = "test";

    json samples = json::array();
    for (std::size_t i = 0; i < count; ++i) {
      SegmentationSample s = generate_phantom(phantom_for(config, derive_seed(config.seed, 0x9E4A, i)));
      s.id = sample_id(i);
      save_sample(out_dir, s);
      samples.push_back({{"id", s.id},
                         {"image", s.id + ".pgm"},
                         {"mask", s.id + "_mask.pgm"},
                         {"sidecar", s.id + ".json"},
                         {"split", assignment[i]}});
    }
    json splits;
    for (const auto& [name, idx] : {std::pair{"train", &split.train}, std::pair{"validation", &split.validation},
                                    std::pair{"test", &split.test}}) {
      std::vector<std::string> ids;
      for (auto i : *idx) ids.push_back(sample_id(i));
      std::sort(ids.begin(), ids.end());
      splits[name] = ids;
    }
    const json manifest{{"format", "irisnet-dataset"}, {"version", 1}, {"count", count},
                        {"seed", config.seed},         {"samples", samples}, {"splits", splits}};
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    log << "gen-data: wrote " << count << " samples (" << split.train.size() << " train, "
        << split.validation.size() << " validation, " << split.test.size() << " test) to " << out_dir.string()
        << '\n';
    return 0;
  });
}

int cmd_train(const TrainConfig& config, const fs::path& data_dir, const fs::path& out_dir, std::ostream& log,
              std::ostream& err) {
  return guarded("train", err, [&] {
    config.validate();
    const Manifest manifest = read_manifest(data_dir);
    const auto train_set = load_split(data_dir, manifest, "train");
    const auto val_set = load_split(data_dir, manifest, "validation");
    if (train_set.empty() || val_set.empty()) throw std::runtime_error("train and validation splits must be nonempty");
    for (const auto* set : {&train_set, &val_set}) {
      for (const auto& s : *set) {
        if (s.rows() != static_cast<std::size_t>(config.arch.input_size) || s.cols() != s.rows()) {
          throw std::runtime_error("sample '" + s.id + "' is " + std::to_string(s.rows()) + "x" +
                                   std::to_string(s.cols()) + " but arch.input_size is " +
                                   std::to_string(config.arch.input_size));
        }
      }
    }
    ensure_dir(out_dir);

    Model model = build_irisnet(config.arch, config.seed);
    TrainOptions opt;
    opt.epochs = config.epochs;
    opt.batch_size = config.batch_size;
    opt.adam = config.adam;
    opt.loss = config.loss;
    opt.augmentation = config.augmentation;
    opt.seed = config.seed;
    opt.checkpoint_path = out_dir / "best.ckpt";
    opt.history_wall_time = config.history_wall_time;
    opt.on_epoch = [&](const EpochRecord& r) {
      log << "epoch " << r.epoch << "/" << config.epochs << "  train dice " << r.train_dice << " bce "
          << r.train_bce << "  val dice " << r.val_dice << " bce " << r.val_bce << (r.saved ? "  [saved]" : "")
          << '\n';
    };
    const TrainResult result = train(model, train_set, val_set, opt);
    result.history.write_csv(out_dir / "history.csv");

    const auto& last = result.history.records.back();
    const int best = result.history.best_epoch();
    const json summary{
        {"params", count_parameters(result.best)},
        {"epochs_run", result.history.records.size()},
        {"best_epoch", best},
        {"best_val_dice", result.history.records[static_cast<std::size_t>(best - 1)].val_dice},
        {"final",
         {{"train_dice", last.train_dice}, {"train_bce", last.train_bce}, {"val_dice", last.val_dice},
          {"val_bce", last.val_bce}}},
        {"wall_seconds", result.wall_seconds},
        {"checkpoint", "best.ckpt"},
        {"history", "history.csv"},
        {"config", config_json(config)}};
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    log << "train: best epoch " << best << ", checkpoint " << (out_dir / "best.ckpt").string() << '\n';
    return 0;
  });
}

int cmd_infer(const TrainConfig& config, const fs::path& checkpoint, const fs::path& input, const fs::path& out_dir,
              std::ostream& log, std::ostream& err) {
  return guarded("infer", err, [&] {
    Model model = load_checkpoint(checkpoint);
    const auto n = static_cast<std::size_t>(model.config().input_size);
    std::vector<fs::path> images;
    if (fs::is_directory(input)) {
      for (const auto& e : fs::directory_iterator(input)) {
        const auto name = e.path().filename().string();
        if (e.path().extension() == ".pgm" && name.find("_mask.pgm") == std::string::npos) images.push_back(e.path());
      }
      std::sort(images.begin(), images.end());
    } else if (fs::exists(input)) {
      images.push_back(input);
    }
    if (images.empty()) throw std::runtime_error("no PGM images found at " + input.string());
    ensure_dir(out_dir);

    int status = 0;
    for (const auto& path : images) {
      const Tensor img = read_pgm(path);
      if (img.dim(0) != n || img.dim(1) != n) {
        throw std::runtime_error(path.string() + " is " + std::to_string(img.dim(0)) + "x" +
                                 std::to_string(img.dim(1)) + "; the model requires " + std::to_string(n) + "x" +
                                 std::to_string(n));
      }
      const Tensor out = forward(model, img.reshaped({1, 1, n, n}), Mode::eval);
      const Tensor prob = slice_channels(out, 1, 2).reshaped({n, n});
      const BinaryMask mask = binarize(prob, config.threshold);
      const BinaryMask skel = skeletonize(mask);
      const std::string stem = path.stem().string();
      write_pgm(out_dir / (stem + "_prob.pgm"), prob);
      write_pgm(out_dir / (stem + "_mask.pgm"), mask.to_tensor());
      write_pgm(out_dir / (stem + "_skeleton.pgm"), skel.to_tensor());
      Contour contour;
      try {
        contour = mask_to_contour(skel);
      } catch (const std::runtime_error& e) {
        err << "infer: " << stem << ": " << e.what() << '\n';
        status = 1;
        continue;
      }
      if (!is_valid_contour(contour)) {
        err << "infer: " << stem << ": contour spans " << contour.size() << " column(s), need at least 2\n";
        status = 1;
        continue;
      }
      write_contour_csv(out_dir / (stem + "_contour.csv"), contour);
      log << "infer: " << stem << " -> " << out_dir.string() << '\n';
    }
    return status;
  });
}

int cmd_eval(const TrainConfig& config, const fs::path& checkpoint, const fs::path& data_dir,
             const std::string& split, const fs::path& out_dir, std::ostream& log, std::ostream& err) {
  return guarded("eval", err, [&] {
    Model model = load_checkpoint(checkpoint);
    const Manifest manifest = read_manifest(data_dir);
    const auto samples = load_split(data_dir, manifest, split);
    if (samples.empty()) throw std::runtime_error("split '" + split + "' is empty");
    ensure_dir(out_dir);
    const auto probs = predict(model, samples, config.batch_size);
    const EvalSummary s = evaluate_predictions(samples, probs, config.threshold, config.mm_per_px);
    write_eval_csv(out_dir / "eval.csv", s);
    json failed = json::array();
    for (const auto& r : s.rows) {
      if (r.failed) failed.push_back({{"sample_id", r.sample_id}, {"reason", r.failure}});
    }
    const json summary{{"split", split},
                       {"samples", s.rows.size()},
                       {"failures", failed},
                       {"mean",
                        {{"soft_iou", s.mean.soft_iou}, {"iou_at_tau", s.mean.iou_at_tau},
                         {"msd_px", s.mean.msd_px}, {"msd_mm", s.mean.msd_mm}}},
                       {"std",
                        {{"soft_iou", s.stddev.soft_iou}, {"iou_at_tau", s.stddev.iou_at_tau},
                         {"msd_px", s.stddev.msd_px}, {"msd_mm", s.stddev.msd_mm}}},
                       {"threshold", config.threshold},
                       {"mm_per_px", config.mm_per_px}};
    write_text(out_dir / "eval_summary.json", summary.dump(2) + "\n");
    for (const auto& r : s.rows) {
      if (r.failed) err << "eval: sample " << r.sample_id << " failed: " << r.failure << '\n';
    }
    log << "eval: " << split << " n=" << s.rows.size() << " failures=" << s.failures << "  soft IOU "
        << s.mean.soft_iou << " +/- " << s.stddev.soft_iou << "  tIOU " << s.mean.iou_at_tau << " +/- "
        << s.stddev.iou_at_tau << "  MSD " << s.mean.msd_px << " +/- " << s.stddev.msd_px << " px\n";
    if (s.failures == s.rows.size()) throw std::runtime_error("every sample failed contour extraction");
    return 0;
  });
}

int cmd_bench(const TrainConfig& config, int runs, const fs::path& out_dir, std::ostream& log, std::ostream& err) {
  return guarded("bench", err, [&] {
    const BenchReport r = run_bench(config, runs);
    ensure_dir(out_dir);
    write_text(out_dir / "bench.json", bench_to_json(r));
    log << "bench: fused " << r.fused_mean << " +/- " << r.fused_std << " fps, two-pass " << r.reference_mean
        << " +/- " << r.reference_std << " fps, " << r.params << " parameters\n";
    return 0;
  });
}

}  // namespace irisnet::cli

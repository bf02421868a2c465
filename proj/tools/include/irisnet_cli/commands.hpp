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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <irisnet/adam.hpp>
#include <irisnet/eval.hpp>
#include <irisnet/losses.hpp>
#include <irisnet/model.hpp>
#include <irisnet/synth.hpp>

namespace irisnet::cli {

/// Every knob of a run. The JSON form lists all fields explicitly.
struct TrainConfig {
  ArchConfig arch;
  int epochs = 50;
  std::size_t batch_size = 20;
  AdamConfig adam;
  LossMode loss = LossMode::dice_bce;
  AugmentRanges augmentation;
  SplitRatios split;
  double threshold = 0.1;
  double mm_per_px = 0.15;
  std::uint64_t seed = 0;
  PhantomParams phantom;  ///< rows, cols and seed are taken from arch and the master seed
  bool history_wall_time = false;
  int bench_frames = 5;  ///< forward passes per timed bench run

  void validate() const;
};

bool operator==(const TrainConfig& a, const TrainConfig& b);

std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const std::string& text);
TrainConfig load_config(const std::filesystem::path& path);
void save_config(const TrainConfig& config, const std::filesystem::path& path);

/// Manifest written by gen-data.
struct Manifest {
  std::vector<std::string> ids;
  std::vector<std::string> train, validation, test;

  const std::vector<std::string>& split(const std::string& name) const;
};

Manifest read_manifest(const std::filesystem::path& data_dir);
std::vector<SegmentationSample> load_split(const std::filesystem::path& data_dir, const Manifest& manifest,
                                           const std::string& split);

/// Per-sample evaluation row; `failed` rows carry no distance.
struct EvalRow {
  std::string sample_id;
  double soft_iou = 0.0;
  double iou_at_tau = 0.0;
  double msd_px = 0.0;
  double msd_mm = 0.0;
  bool failed = false;
  std::string failure;
};

struct EvalSummary {
  std::vector<EvalRow> rows;
  EvalRow mean, stddev;  ///< over successful rows; sample standard deviation
  std::size_t failures = 0;
};

/// Scores foreground probability maps against ground truth masks and
/// centerlines.
EvalSummary evaluate_predictions(const std::vector<SegmentationSample>& samples, const std::vector<Tensor>& probs,
                                 double tau, double mm_per_px);
void write_eval_csv(const std::filesystem::path& path, const EvalSummary& summary);

struct BenchReport {
  std::vector<double> fused_fps, reference_fps;
  double fused_mean = 0.0, fused_std = 0.0;
  double reference_mean = 0.0, reference_std = 0.0;
  std::size_t params = 0;
  int frames_per_run = 0;
  int input_size = 0;
};

BenchReport run_bench(const TrainConfig& config, int runs);
std::string bench_to_json(const BenchReport& report);

// Commands return a process exit status and report failures on `err`.

int cmd_gen_data(const TrainConfig& config, std::size_t count, const std::filesystem::path& out_dir,
                 std::ostream& log, std::ostream& err);
int cmd_train(const TrainConfig& config, const std::filesystem::path& data_dir,
              const std::filesystem::path& out_dir, std::ostream& log, std::ostream& err);
int cmd_infer(const TrainConfig& config, const std::filesystem::path& checkpoint, const std::filesystem::path& input,
              const std::filesystem::path& out_dir, std::ostream& log, std::ostream& err);
int cmd_eval(const TrainConfig& config, const std::filesystem::path& checkpoint, const std::filesystem::path& data_dir,
             const std::string& split, const std::filesystem::path& out_dir, std::ostream& log, std::ostream& err);
int cmd_bench(const TrainConfig& config, int runs, const std::filesystem::path& out_dir, std::ostream& log,
              std::ostream& err);

}  // namespace irisnet::cli

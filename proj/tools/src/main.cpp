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

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "irisnet_cli/commands.hpp"

namespace fs = std::filesystem;
using namespace irisnet::cli;

int main(int argc, char** argv) {
  CLI::App app{"irisnet: RetinaConv segmentation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the configuration)");
    sub->add_option("--out", out, "output directory");
  };

  std::size_t count = 200;
  auto* gen = app.add_subcommand("gen-data", "generate synthetic phantoms with a split manifest");
  common(gen);
  gen->add_option("--count", count, "number of samples")->check(CLI::PositiveNumber);

  std::string data_dir;
  auto* trn = app.add_subcommand("train", "train a model on a generated dataset");
  common(trn);
  trn->add_option("--data", data_dir, "dataset directory")->required();

  std::string checkpoint, input;
  auto* inf = app.add_subcommand("infer", "predict masks, skeletons and contours");
  common(inf);
  inf->add_option("--checkpoint", checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);
  inf->add_option("--input", input, "PGM image or directory of images")->required();

  std::string split = "test";
  auto* evl = app.add_subcommand("eval", "score a checkpoint on a dataset split");
  common(evl);
  evl->add_option("--checkpoint", checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);
  evl->add_option("--data", data_dir, "dataset directory")->required();
  evl->add_option("--split", split, "train, validation or test");

  int runs = 10;
  auto* bch = app.add_subcommand("bench", "time fused and two-pass forward passes");
  common(bch);
  bch->add_option("--runs", runs, "timed runs per path")->check(CLI::PositiveNumber);

  auto* cfg = app.add_subcommand("config", "write the resolved configuration as JSON");
  common(cfg);

  CLI11_PARSE(app, argc, argv);

  TrainConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    if (seed) config.seed = *seed;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (gen->parsed()) return cmd_gen_data(config, count, out, std::cout, std::cerr);
  if (trn->parsed()) return cmd_train(config, data_dir, out, std::cout, std::cerr);
  if (inf->parsed()) return cmd_infer(config, checkpoint, input, out, std::cout, std::cerr);
  if (evl->parsed()) return cmd_eval(config, checkpoint, data_dir, split, out, std::cout, std::cerr);
  if (bch->parsed()) return cmd_bench(config, runs, out, std::cout, std::cerr);
  if (cfg->parsed()) {
    try {
      fs::create_directories(out);
      save_config(config, fs::path(out) / "config.json");
      std::cout << "config: wrote " << (fs::path(out) / "config.json").string() << '\n';
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "config: error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}

// Copyright 2026 The handrl Authors
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

// handrl: train and summarise curriculum experiments.
//
//   handrl run [--config FILE] [--curriculum C3] [--tactile none|force3d]
//              [--object O1] [--trials N] [--episodes N] [--base-seed S]
//              [--scheduler constant|linear|piecewise] [--phi X] [--eta X]
//              [--workers N] [--out DIR]
//   handrl summarize DIR
//   handrl print-config [--config FILE] [run flags...]
//
// Exit status: 0 when every trial completed, 1 when a trial failed, 2 on
// configuration or I/O errors.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "handrl/errors.hpp"
#include "handrl/harness/config.hpp"
#include "handrl/harness/experiment.hpp"

namespace {

using handrl::harness::CliOverrides;

void add_run_flags(CLI::App* cmd, std::string& config_path, CliOverrides& o) {
  cmd->add_option("--config", config_path, "JSON config file");
  cmd->add_option("--curriculum", o.curriculum, "C1..C5");
  cmd->add_option("--tactile", o.tactile, "none | force3d");
  cmd->add_option("--object", o.object, "O1..O4");
  cmd->add_option("--trials", o.trials, "number of trials");
  cmd->add_option("--episodes", o.episodes, "episodes per trial");
  cmd->add_option("--base-seed", o.base_seed, "trial i uses base seed + i");
  cmd->add_option("--scheduler", o.scheduler, "constant | linear | piecewise");
  cmd->add_option("--phi", o.phi, "phase-1 learning rate");
  cmd->add_option("--eta", o.eta, "phase-2 learning-rate parameter");
  cmd->add_option("--workers", o.workers, "concurrent trials");
  cmd->add_option("--out", o.out, "output directory");
}

handrl::harness::ExperimentConfig resolve(const std::string& config_path, const CliOverrides& o) {
  const nlohmann::json file =
      config_path.empty() ? nlohmann::json::object() : handrl::harness::load_config_file(config_path);
  return handrl::harness::parse_config(file, o);
}

void print_summary(const handrl::harness::ExperimentSummary& s) {
  std::printf("trials completed: %d, failed: %d\n", s.completed, s.failed);
  for (const auto& r : s.records) {
    if (r.status == handrl::harness::TrialStatus::kFailed) {
      std::printf("  trial %d (seed %llu): %s\n", r.trial, static_cast<unsigned long long>(r.seed),
                  r.error.c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum PPO training for a simulated three-fingered hand"};
  app.require_subcommand(1);

  std::string run_config;
  CliOverrides run_flags;
  auto* run = app.add_subcommand("run", "train all trials and write the outputs");
  add_run_flags(run, run_config, run_flags);

  std::string summary_dir;
  auto* summarize = app.add_subcommand("summarize", "rebuild summary files from a run directory");
  summarize->add_option("dir", summary_dir, "run output directory")->required();

  std::string print_config;
  CliOverrides print_flags;
  auto* print = app.add_subcommand("print-config", "print the resolved configuration");
  add_run_flags(print, print_config, print_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = resolve(run_config, run_flags);
      const auto summary = handrl::harness::run_experiment(config, [](const auto& record) {
        std::printf("trial %d %s (%.1f s)\n", record.trial,
                    handrl::harness::to_string(record.status).c_str(), record.duration_s);
        std::fflush(stdout);
      });
      print_summary(summary);
      std::printf("outputs in %s\n", config.out.string().c_str());
      return summary.failed == 0 ? 0 : 1;
    }
    if (*summarize) {
      const auto summary = handrl::harness::summarize(summary_dir);
      print_summary(summary);
      return summary.failed == 0 ? 0 : 1;
    }
    if (*print) {
      std::cout << handrl::harness::to_json(resolve(print_config, print_flags)).dump(2) << "\n";
      return 0;
    }
  } catch (const handrl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const handrl::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 2;
  }
  return 2;
}

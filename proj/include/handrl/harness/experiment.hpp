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

// Output directory layout written by run_experiment:
//
//   config.json          resolved configuration
//   manifest.json        one record per trial (seed, status, checkpoint,
//                        wall-clock duration)
//   trials/trial_NNNN.csv  per-trial metric rows, appended while training
//   checkpoints/trial_NNNN.ckpt
//   rows.csv             merged rows of completed trials, by trial then episode
//   summary.json         per-episode statistics over completed trials
//   plot_points.csv      trial-averaged (lift success, rotations) per episode
//
// rows.csv, summary.json and plot_points.csv depend only on the trial files,
// config.json and the trial statuses in manifest.json.

#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "handrl/harness/config.hpp"
#include "handrl/harness/trial.hpp"
#include "handrl/metrics/metrics.hpp"

namespace handrl::harness {

struct ExperimentSummary {
  std::vector<TrialRecord> records;  // by trial index
  std::vector<metrics::EpisodeMetrics> rows;  // completed trials only
  int completed = 0;
  int failed = 0;
};

using TrialCallback = std::function<void(const TrialRecord&)>;

// Runs every trial on up to config.workers threads, then writes the merged
// outputs. The callback is invoked once per finished trial, serialised.
ExperimentSummary run_experiment(const ExperimentConfig& config, const TrialCallback& on_trial = {});

// Rebuilds rows.csv, summary.json and plot_points.csv from a run directory.
// Throws IoError listing every completed trial whose rows are missing or
// corrupt.
ExperimentSummary summarize(const std::filesystem::path& dir);

std::string to_string(TrialStatus status);

}  // namespace handrl::harness

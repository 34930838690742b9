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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "handrl/harness/config.hpp"
#include "handrl/metrics/metrics.hpp"
#include "handrl/ppo/policy.hpp"

namespace handrl::harness {

enum class TrialStatus : int { kCompleted, kFailed };

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string checkpoint;  // relative to the output directory; empty if none
  TrialStatus status = TrialStatus::kCompleted;
  std::string error;
  int episodes_completed = 0;
  double duration_s = 0.0;
};

struct TrialResult {
  TrialRecord record;
  std::vector<metrics::EpisodeMetrics> rows;
  ppo::PolicyParams policy;
};

struct TrialOptions {
  // Write trials/trial_NNNN.csv and checkpoints/trial_NNNN.ckpt under
  // config.out. Off for in-memory runs.
  bool write_files = true;
};

std::string trial_file_stem(int trial_index);

// Trains one policy for config.episodes episodes. Simulation and numeric
// failures end the trial and are reported in the record; I/O failures throw.
TrialResult run_trial(const ExperimentConfig& config, int trial_index, const TrialOptions& options = {});

}  // namespace handrl::harness

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

// Experiment configuration. A JSON config file may contain:
//
//   curriculum            "C1".."C5"
//   tactile               "none" | "no_tactile" | "force3d"
//   object                "O1".."O4" (selects the object preset)
//   trials, episodes      integers >= 1
//   base_seed             unsigned integer; trial i uses base_seed + i
//   phase_switch_episode  first phase-2 episode; -1 means halfway
//   scheduler             "constant" | "linear" | "piecewise"
//   phi, eta              learning-rate parameters
//   lift_scale_per_m      reward scale of the lift error (100 = per cm)
//   observation_normalization  bool
//   workers               concurrent trials
//   out                   output directory
//   hand, object_params, sim   see sim/config_io.hpp
//   ppo                   epochs, gamma, entropy_coef, gae_lambda,
//                         minibatch_size, clip_epsilon, value_coef,
//                         hidden_layers, activation, kernel_threads,
//                         adam_stepsize_base
//
// Command-line flags override the file, which overrides the defaults.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "handrl/curriculum/curriculum.hpp"
#include "handrl/ppo/policy.hpp"
#include "handrl/sim/types.hpp"

namespace handrl::harness {

inline constexpr int kEpisodeSteps = 1000;

struct ExperimentConfig {
  curriculum::CurriculumId curriculum = curriculum::CurriculumId::kC3;
  sim::TactileMode tactile = sim::TactileMode::kNone;
  sim::ObjectId object = sim::ObjectId::kO1;
  int trials = 60;
  int episodes = 2000;
  std::uint64_t base_seed = 0;
  int phase_switch_episode = -1;
  curriculum::ScheduleKind scheduler = curriculum::ScheduleKind::kPiecewise;
  double phi = 1e-5;
  double eta = 1e-5;
  double lift_scale_per_m = curriculum::kLiftScalePerCm;
  bool observation_normalization = false;
  sim::HandParams hand;
  sim::ObjectParams object_params = sim::ObjectParams::preset(sim::ObjectId::kO1);
  sim::SimConfig sim;
  ppo::PpoHyperparams ppo;
  int workers = 1;
  std::filesystem::path out = "runs/latest";

  // Throws ConfigError naming the offending key.
  void validate() const;

  sim::Model model() const { return {hand, object_params, sim}; }
  int switch_episode() const {
    return phase_switch_episode >= 0 ? phase_switch_episode : (episodes + 1) / 2;
  }
  curriculum::CurriculumSpec curriculum_spec() const {
    return curriculum::CurriculumSpec::make(curriculum, episodes, switch_episode());
  }
  // Samples are environment steps; the phase-1 ramp ends at the switch.
  curriculum::LrSchedule lr_schedule() const;
  std::uint64_t trial_seed(int trial_index) const {
    return base_seed + static_cast<std::uint64_t>(trial_index);
  }
};

struct CliOverrides {
  std::optional<std::string> curriculum;
  std::optional<std::string> tactile;
  std::optional<std::string> object;
  std::optional<int> trials;
  std::optional<int> episodes;
  std::optional<std::uint64_t> base_seed;
  std::optional<std::string> scheduler;
  std::optional<double> phi;
  std::optional<double> eta;
  std::optional<int> workers;
  std::optional<std::string> out;
};

// Throws IoError if unreadable and ConfigError if not a JSON object.
nlohmann::json load_config_file(const std::filesystem::path& path);

ExperimentConfig parse_config(const nlohmann::json& file, const CliOverrides& flags = {});

// Fully resolved configuration, readable by parse_config.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

}  // namespace handrl::harness

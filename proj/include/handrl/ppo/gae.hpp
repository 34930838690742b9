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
#include <span>
#include <vector>

namespace handrl::ppo {

// One episode of transitions. Observations and actions are stored row-major.
struct RolloutBuffer {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<double> observations;
  std::vector<double> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;
  // Value of the state after the last transition; ignored if it is terminal.
  double bootstrap_value = 0.0;

  RolloutBuffer() = default;
  RolloutBuffer(int obs_dim, int act_dim) : obs_dim(obs_dim), act_dim(act_dim) {}

  std::size_t size() const { return rewards.size(); }
  void clear();
  void reserve(std::size_t steps);
  void add(std::span<const double> observation, std::span<const double> action, double log_prob,
           double reward, double value, bool done);

  std::span<const double> observation(std::size_t t) const {
    return std::span<const double>(observations).subspan(t * obs_dim, static_cast<std::size_t>(obs_dim));
  }
  std::span<const double> action(std::size_t t) const {
    return std::span<const double>(actions).subspan(t * act_dim, static_cast<std::size_t>(act_dim));
  }

  // Throws ContractError when the arrays disagree in length or a reward is
  // not finite.
  void validate() const;
};

struct AdvantageEstimate {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantage + value
};

// delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
// A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
AdvantageEstimate compute_gae(const RolloutBuffer& buffer, double gamma, double lambda);

// Shift to zero mean and scale to unit (population) standard deviation; the
// divisor is never below 1e-8.
void normalize_advantages(std::span<double> advantages);

}  // namespace handrl::ppo

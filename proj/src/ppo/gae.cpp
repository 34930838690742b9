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

#include "handrl/ppo/gae.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "handrl/errors.hpp"

namespace handrl::ppo {

void RolloutBuffer::clear() {
  observations.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  dones.clear();
  bootstrap_value = 0.0;
}

void RolloutBuffer::reserve(std::size_t steps) {
  observations.reserve(steps * static_cast<std::size_t>(obs_dim));
  actions.reserve(steps * static_cast<std::size_t>(act_dim));
  log_probs.reserve(steps);
  rewards.reserve(steps);
  values.reserve(steps);
  dones.reserve(steps);
}

void RolloutBuffer::add(std::span<const double> observation, std::span<const double> action,
                        double log_prob, double reward, double value, bool done) {
  if (observation.size() != static_cast<std::size_t>(obs_dim) ||
      action.size() != static_cast<std::size_t>(act_dim)) {
    throw ContractError("rollout transition has the wrong observation or action size");
  }
  observations.insert(observations.end(), observation.begin(), observation.end());
  actions.insert(actions.end(), action.begin(), action.end());
  log_probs.push_back(log_prob);
  rewards.push_back(reward);
  values.push_back(value);
  dones.push_back(done ? 1 : 0);
}

void RolloutBuffer::validate() const {
  const std::size_t n = rewards.size();
  if (observations.size() != n * static_cast<std::size_t>(obs_dim) ||
      actions.size() != n * static_cast<std::size_t>(act_dim) || log_probs.size() != n ||
      values.size() != n || dones.size() != n) {
    throw ContractError("rollout buffer arrays have mismatched lengths");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(rewards[t])) {
      throw ContractError("rollout reward at step " + std::to_string(t) + " is not finite");
    }
  }
}

AdvantageEstimate compute_gae(const RolloutBuffer& buffer, double gamma, double lambda) {
  buffer.validate();
  const std::size_t n = buffer.size();
  AdvantageEstimate est;
  est.advantages.resize(n);
  est.returns.resize(n);
  double next_value = buffer.bootstrap_value;
  double next_advantage = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double live = buffer.dones[t] ? 0.0 : 1.0;
    const double delta = buffer.rewards[t] + gamma * next_value * live - buffer.values[t];
    const double adv = delta + gamma * lambda * live * next_advantage;
    est.advantages[t] = adv;
    est.returns[t] = adv + buffer.values[t];
    next_value = buffer.values[t];
    next_advantage = adv;
  }
  return est;
}

void normalize_advantages(std::span<double> advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double scale = std::max(std::sqrt(var / n), 1e-8);
  for (double& a : advantages) a = (a - mean) / scale;
}

}  // namespace handrl::ppo

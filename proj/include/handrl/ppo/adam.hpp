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

#include <span>

#include "handrl/ppo/policy.hpp"

namespace handrl::ppo {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. The step counter is incremented before the update.
// Throws ContractError when the spans and moment vectors differ in size.
void adam_step(std::span<double> params, std::span<const double> gradient, AdamState& state,
               double learning_rate, const AdamConfig& config = {});

inline void adam_step(PolicyParams& policy, std::span<const double> gradient,
                      double learning_rate, const AdamConfig& config = {}) {
  adam_step(policy.values, gradient, policy.adam, learning_rate, config);
}

}  // namespace handrl::ppo

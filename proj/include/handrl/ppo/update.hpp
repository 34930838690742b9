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
#include <vector>

#include "handrl/ppo/adam.hpp"
#include "handrl/ppo/gae.hpp"
#include "handrl/ppo/loss.hpp"
#include "handrl/ppo/policy.hpp"
#include "handrl/rng.hpp"

namespace handrl::ppo {

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total_loss = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  // max |rho - 1| over the first minibatch, evaluated before any step.
  double first_minibatch_ratio_deviation = 0.0;
  int minibatches = 0;
};

// One PPO update: GAE from the stored values, advantage normalisation over
// the whole rollout, then `epochs` passes over shuffled minibatches (the last,
// shorter minibatch is kept). Loss statistics are minibatch means.
UpdateStats update(PolicyParams& params, const RolloutBuffer& buffer, const PpoHyperparams& hyper,
                   double learning_rate, Rng& shuffle_rng);

// Running mean / variance of observations (Welford). Optional; the default
// pipeline feeds raw observations to the policy.
class ObservationNormalizer {
 public:
  explicit ObservationNormalizer(int dim = 0, double clip = 10.0);

  void observe(std::span<const double> observation);
  std::vector<double> normalize(std::span<const double> observation) const;
  std::size_t count() const { return count_; }

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::size_t count_ = 0;
  double clip_;
};

}  // namespace handrl::ppo

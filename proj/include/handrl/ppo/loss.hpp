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

#include "handrl/ppo/policy.hpp"

namespace handrl::ppo {

// Rows of a rollout selected for one gradient step. The spans index the
// whole-rollout arrays; `indices` picks the rows.
struct MinibatchView {
  std::span<const double> observations;   // [T][obs_dim]
  std::span<const double> actions;        // [T][act_dim]
  std::span<const double> old_log_probs;  // [T]
  std::span<const double> advantages;     // [T], already normalised
  std::span<const double> returns;        // [T]
  std::span<const std::size_t> indices;
};

// Switches for checking each loss term in isolation.
struct LossTerms {
  bool clip = true;
  bool value = true;
  bool entropy = true;
};

struct LossResult {
  double total = 0.0;
  double policy = 0.0;   // -mean(min(rho A, clip(rho) A))
  double value = 0.0;    // mean((V - R)^2), before value_coef
  double entropy = 0.0;  // Gaussian entropy, before entropy_coef
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double max_ratio_deviation = 0.0;  // max |rho - 1|
  std::vector<double> gradient;
};

// total = policy + c1 * value - c2 * entropy, with its gradient with respect
// to every entry of `params.values`. Samples are accumulated in fixed
// chunks whose partial sums are added in order, so the result is identical
// for every thread count. Throws NumericError if the loss is not finite.
LossResult ppo_loss(const PolicyParams& params, const MinibatchView& batch,
                    const PpoHyperparams& hyper, LossTerms terms = {}, int threads = 1,
                    std::int64_t minibatch_index = -1);

// Single-threaded reference evaluation of the same chunked sums.
LossResult ppo_loss_serial(const PolicyParams& params, const MinibatchView& batch,
                           const PpoHyperparams& hyper, LossTerms terms = {},
                           std::int64_t minibatch_index = -1);

inline constexpr int kLossChunks = 8;

}  // namespace handrl::ppo

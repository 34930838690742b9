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
#include <string>
#include <vector>

#include "handrl/rng.hpp"

namespace handrl::ppo {

struct PpoHyperparams {
  double adam_stepsize_base = 1e-5;
  int epochs = 8;
  double gamma = 0.99;
  double entropy_coef = 0.02;
  double gae_lambda = 0.85;
  int minibatch_size = 64;
  double clip_epsilon = 0.2;
  double value_coef = 0.5;
  std::vector<int> hidden_layers{64, 64};
  std::string activation = "tanh";
  // Threads for the minibatch gradient kernel; results do not depend on it.
  int kernel_threads = 1;

  void validate() const;
};

// One dense layer inside the flat parameter vector. Weights are row-major
// [out][in], followed by `out` biases.
struct LayerSlot {
  int in = 0;
  int out = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  bool operator==(const LayerSlot&) const = default;
};

// Flat parameter order: actor layers, critic layers, log_std.
struct ParamLayout {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<int> hidden;
  std::vector<LayerSlot> actor;
  std::vector<LayerSlot> critic;
  std::size_t log_std_offset = 0;
  std::size_t size = 0;

  static ParamLayout make(int obs_dim, int act_dim, const std::vector<int>& hidden);
  bool operator==(const ParamLayout&) const = default;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  bool operator==(const AdamState&) const = default;
};

struct PolicyParams {
  ParamLayout layout;
  std::vector<double> values;
  AdamState adam;

  std::span<const double> log_std() const {
    return std::span<const double>(values).subspan(layout.log_std_offset,
                                                   static_cast<std::size_t>(layout.act_dim));
  }
  std::span<double> log_std() {
    return std::span<double>(values).subspan(layout.log_std_offset,
                                             static_cast<std::size_t>(layout.act_dim));
  }
  bool all_finite() const;
  bool operator==(const PolicyParams&) const = default;
};

// Orthogonal weights (gain sqrt(2) hidden, 0.01 actor output, 1 critic
// output), zero biases, log_std = 0, zeroed Adam moments.
PolicyParams init_policy(int obs_dim, int act_dim, const PpoHyperparams& hyper, std::uint64_t seed);

// Activations of one forward pass, kept for backpropagation.
struct MlpTrace {
  std::vector<std::vector<double>> activations;  // input, hidden..., output
};

void mlp_forward(std::span<const double> params, std::span<const LayerSlot> layers,
                 std::span<const double> input, MlpTrace& trace);

// Accumulates d(output . output_grad)/d(params) into `grad`.
void mlp_backward(std::span<const double> params, std::span<const LayerSlot> layers,
                  const MlpTrace& trace, std::span<const double> output_grad,
                  std::span<double> grad);

std::vector<double> actor_mean(const PolicyParams& params, std::span<const double> observation);
double critic_value(const PolicyParams& params, std::span<const double> observation);

double gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> action);
double gaussian_entropy(std::span<const double> log_std);

struct ActResult {
  std::vector<double> action;
  std::vector<double> mean;
  double log_prob = 0.0;
  double value = 0.0;
};

// Samples from the diagonal Gaussian policy. Throws NumericError on
// non-finite network output and ContractError on a wrong observation size.
ActResult act(const PolicyParams& params, std::span<const double> observation, Rng& rng);

}  // namespace handrl::ppo

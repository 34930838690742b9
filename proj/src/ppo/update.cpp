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

#include "handrl/ppo/update.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "handrl/errors.hpp"

namespace handrl::ppo {

UpdateStats update(PolicyParams& params, const RolloutBuffer& buffer, const PpoHyperparams& hyper,
                   double learning_rate, Rng& shuffle_rng) {
  hyper.validate();
  if (buffer.obs_dim != params.layout.obs_dim || buffer.act_dim != params.layout.act_dim) {
    throw ContractError("rollout dimensions do not match the policy");
  }
  if (buffer.size() == 0) throw ContractError("cannot update from an empty rollout");

  AdvantageEstimate est = compute_gae(buffer, hyper.gamma, hyper.gae_lambda);
  normalize_advantages(est.advantages);

  const std::size_t n = buffer.size();
  const auto batch_size = static_cast<std::size_t>(hyper.minibatch_size);
  std::vector<std::size_t> order(n);
  UpdateStats stats;
  std::int64_t minibatch_index = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min(batch_size, n - start);
      MinibatchView view{buffer.observations,
                         buffer.actions,
                         buffer.log_probs,
                         est.advantages,
                         est.returns,
                         std::span<const std::size_t>(order).subspan(start, count)};
      LossResult loss = ppo_loss(params, view, hyper, {}, hyper.kernel_threads, minibatch_index);
      for (double g : loss.gradient) {
        if (!std::isfinite(g)) throw NumericError("PPO gradient is not finite", minibatch_index);
      }
      if (minibatch_index == 0) {
        stats.first_minibatch_ratio_deviation = loss.max_ratio_deviation;
      }
      adam_step(params, loss.gradient, learning_rate);

      stats.policy_loss += loss.policy;
      stats.value_loss += loss.value;
      stats.entropy += loss.entropy;
      stats.total_loss += loss.total;
      stats.mean_ratio += loss.mean_ratio;
      stats.clip_fraction += loss.clip_fraction;
      ++stats.minibatches;
      ++minibatch_index;
    }
  }
  if (!params.all_finite()) throw NumericError("policy parameters became non-finite");

  const double inv = 1.0 / stats.minibatches;
  stats.policy_loss *= inv;
  stats.value_loss *= inv;
  stats.entropy *= inv;
  stats.total_loss *= inv;
  stats.mean_ratio *= inv;
  stats.clip_fraction *= inv;
  return stats;
}

ObservationNormalizer::ObservationNormalizer(int dim, double clip)
    : mean_(static_cast<std::size_t>(dim), 0.0), m2_(static_cast<std::size_t>(dim), 0.0), clip_(clip) {}

void ObservationNormalizer::observe(std::span<const double> observation) {
  if (observation.size() != mean_.size()) throw ContractError("observation size mismatch");
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = observation[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (observation[i] - mean_[i]);
  }
}

std::vector<double> ObservationNormalizer::normalize(std::span<const double> observation) const {
  if (observation.size() != mean_.size()) throw ContractError("observation size mismatch");
  std::vector<double> out(observation.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double var = count_ > 1 ? m2_[i] / static_cast<double>(count_) : 1.0;
    const double z = (observation[i] - mean_[i]) / std::sqrt(var + 1e-8);
    out[i] = std::clamp(z, -clip_, clip_);
  }
  return out;
}

}  // namespace handrl::ppo

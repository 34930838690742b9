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

#include "handrl/ppo/loss.hpp"

#include <algorithm>
#include <cmath>

#include "handrl/errors.hpp"

namespace handrl::ppo {
namespace {

struct ChunkSums {
  std::vector<double> gradient;
  double policy = 0.0;
  double value = 0.0;
  double ratio = 0.0;
  double max_deviation = 0.0;
  std::size_t clipped = 0;
};

void validate_batch(const PolicyParams& params, const MinibatchView& batch) {
  if (batch.indices.empty()) throw ContractError("minibatch is empty");
  const std::size_t rows = batch.old_log_probs.size();
  if (batch.advantages.size() != rows || batch.returns.size() != rows ||
      batch.observations.size() != rows * static_cast<std::size_t>(params.layout.obs_dim) ||
      batch.actions.size() != rows * static_cast<std::size_t>(params.layout.act_dim)) {
    throw ContractError("minibatch arrays have mismatched lengths");
  }
  for (std::size_t idx : batch.indices) {
    if (idx >= rows) throw ContractError("minibatch index out of range");
  }
}

void accumulate_chunk(const PolicyParams& params, const MinibatchView& batch,
                      const PpoHyperparams& hyper, LossTerms terms, std::size_t begin,
                      std::size_t end, double inv_batch, ChunkSums& sums) {
  const ParamLayout& layout = params.layout;
  const auto obs_dim = static_cast<std::size_t>(layout.obs_dim);
  const auto act_dim = static_cast<std::size_t>(layout.act_dim);
  const auto log_std = params.log_std();
  const double eps = hyper.clip_epsilon;

  sums.gradient.assign(layout.size, 0.0);
  MlpTrace actor, critic;
  std::vector<double> mean_grad(act_dim);
  std::vector<double> value_grad(1);

  for (std::size_t i = begin; i < end; ++i) {
    const std::size_t row = batch.indices[i];
    const auto obs = batch.observations.subspan(row * obs_dim, obs_dim);
    const auto action = batch.actions.subspan(row * act_dim, act_dim);

    mlp_forward(params.values, layout.actor, obs, actor);
    const std::vector<double>& mean = actor.activations.back();
    const double log_prob = gaussian_log_prob(mean, log_std, action);
    const double ratio = std::exp(log_prob - batch.old_log_probs[row]);
    const double adv = batch.advantages[row];
    const double surr1 = ratio * adv;
    const double surr2 = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
    sums.ratio += ratio;
    sums.max_deviation = std::max(sums.max_deviation, std::abs(ratio - 1.0));
    if (std::abs(ratio - 1.0) > eps) ++sums.clipped;

    if (terms.clip) {
      sums.policy -= std::min(surr1, surr2);
      // The clipped branch is flat in rho; gradient flows only through surr1.
      if (surr1 <= surr2) {
        const double dlogp = -adv * ratio * inv_batch;
        for (std::size_t k = 0; k < act_dim; ++k) {
          const double inv_var = std::exp(-2.0 * log_std[k]);
          const double diff = action[k] - mean[k];
          mean_grad[k] = dlogp * diff * inv_var;
          sums.gradient[layout.log_std_offset + k] += dlogp * (diff * diff * inv_var - 1.0);
        }
        mlp_backward(params.values, layout.actor, actor, mean_grad, sums.gradient);
      }
    }

    if (terms.value) {
      mlp_forward(params.values, layout.critic, obs, critic);
      const double diff = critic.activations.back()[0] - batch.returns[row];
      sums.value += diff * diff;
      value_grad[0] = hyper.value_coef * 2.0 * diff * inv_batch;
      mlp_backward(params.values, layout.critic, critic, value_grad, sums.gradient);
    }
  }
}

std::pair<std::size_t, std::size_t> chunk_bounds(std::size_t n, int chunk) {
  const auto c = static_cast<std::size_t>(chunk);
  return {c * n / kLossChunks, (c + 1) * n / kLossChunks};
}

LossResult combine(const PolicyParams& params, const PpoHyperparams& hyper, LossTerms terms,
                   std::vector<ChunkSums>& chunks, std::size_t n, std::int64_t minibatch_index) {
  LossResult out;
  out.gradient.assign(params.layout.size, 0.0);
  double policy = 0.0, value = 0.0, ratio = 0.0;
  std::size_t clipped = 0;
  for (const ChunkSums& c : chunks) {
    for (std::size_t p = 0; p < out.gradient.size(); ++p) out.gradient[p] += c.gradient[p];
    policy += c.policy;
    value += c.value;
    ratio += c.ratio;
    clipped += c.clipped;
    out.max_ratio_deviation = std::max(out.max_ratio_deviation, c.max_deviation);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  out.policy = policy * inv_n;
  out.value = value * inv_n;
  out.entropy = gaussian_entropy(params.log_std());
  out.mean_ratio = ratio * inv_n;
  out.clip_fraction = static_cast<double>(clipped) * inv_n;

  out.total = 0.0;
  if (terms.clip) out.total += out.policy;
  if (terms.value) out.total += hyper.value_coef * out.value;
  if (terms.entropy) {
    out.total -= hyper.entropy_coef * out.entropy;
    for (int k = 0; k < params.layout.act_dim; ++k) {
      out.gradient[params.layout.log_std_offset + static_cast<std::size_t>(k)] -= hyper.entropy_coef;
    }
  }
  if (!std::isfinite(out.total)) throw NumericError("PPO loss is not finite", minibatch_index);
  return out;
}

}  // namespace

LossResult ppo_loss(const PolicyParams& params, const MinibatchView& batch,
                    const PpoHyperparams& hyper, LossTerms terms, int threads,
                    std::int64_t minibatch_index) {
  validate_batch(params, batch);
  const std::size_t n = batch.indices.size();
  const double inv_batch = 1.0 / static_cast<double>(n);
  std::vector<ChunkSums> chunks(kLossChunks);
#pragma omp parallel for num_threads(std::max(threads, 1)) schedule(static) if (threads > 1)
  for (int c = 0; c < kLossChunks; ++c) {
    const auto [begin, end] = chunk_bounds(n, c);
    accumulate_chunk(params, batch, hyper, terms, begin, end, inv_batch, chunks[c]);
  }
  return combine(params, hyper, terms, chunks, n, minibatch_index);
}

LossResult ppo_loss_serial(const PolicyParams& params, const MinibatchView& batch,
                           const PpoHyperparams& hyper, LossTerms terms,
                           std::int64_t minibatch_index) {
  validate_batch(params, batch);
  const std::size_t n = batch.indices.size();
  const double inv_batch = 1.0 / static_cast<double>(n);
  std::vector<ChunkSums> chunks(kLossChunks);
  for (int c = 0; c < kLossChunks; ++c) {
    const auto [begin, end] = chunk_bounds(n, c);
    accumulate_chunk(params, batch, hyper, terms, begin, end, inv_batch, chunks[c]);
  }
  return combine(params, hyper, terms, chunks, n, minibatch_index);
}

}  // namespace handrl::ppo

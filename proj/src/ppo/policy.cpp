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

#include "handrl/ppo/policy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "handrl/errors.hpp"

namespace handrl::ppo {
namespace {

constexpr double kHalfLog2Pi = 0.918938533204672741780;  // 0.5 * ln(2 pi)

std::vector<LayerSlot> chain_layers(int in, const std::vector<int>& hidden, int out,
                                    std::size_t& offset) {
  std::vector<LayerSlot> layers;
  int width = in;
  auto add = [&](int next) {
    LayerSlot slot{width, next, offset, offset + static_cast<std::size_t>(width) * next};
    offset = slot.bias_offset + static_cast<std::size_t>(next);
    layers.push_back(slot);
    width = next;
  };
  for (int h : hidden) add(h);
  add(out);
  return layers;
}

void orthogonal_fill(std::span<double> weights, int out, int in, double gain, Rng& rng) {
  const int rows = std::max(out, in);
  const int cols = std::min(out, in);
  Eigen::MatrixXd a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) a(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
  for (int c = 0; c < cols; ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  for (int o = 0; o < out; ++o) {
    for (int i = 0; i < in; ++i) {
      const double w = out >= in ? q(o, i) : q(i, o);
      weights[static_cast<std::size_t>(o) * in + i] = gain * w;
    }
  }
}

void require_obs(const PolicyParams& params, std::span<const double> observation) {
  if (observation.size() != static_cast<std::size_t>(params.layout.obs_dim)) {
    throw ContractError("observation has " + std::to_string(observation.size()) +
                        " elements, policy expects " + std::to_string(params.layout.obs_dim));
  }
}

}  // namespace

void PpoHyperparams::validate() const {
  const auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError("ppo." + key + " " + what, key);
  };
  if (!(adam_stepsize_base > 0.0)) fail("adam_stepsize", "must be positive");
  if (epochs < 1) fail("epochs", "must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", "must lie in [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) fail("gae_lambda", "must lie in [0, 1]");
  if (!(clip_epsilon > 0.0)) fail("clip_epsilon", "must be positive");
  if (!(value_coef >= 0.0)) fail("value_coef", "must be non-negative");
  if (!(entropy_coef >= 0.0)) fail("entropy_coef", "must be non-negative");
  if (minibatch_size < 1) fail("minibatch_size", "must be >= 1");
  if (hidden_layers.empty()) fail("hidden_layers", "must list at least one layer");
  for (int h : hidden_layers) {
    if (h < 1) fail("hidden_layers", "entries must be >= 1");
  }
  if (activation != "tanh") fail("activation", "must be \"tanh\"");
  if (kernel_threads < 1) fail("kernel_threads", "must be >= 1");
}

ParamLayout ParamLayout::make(int obs_dim, int act_dim, const std::vector<int>& hidden) {
  if (obs_dim < 1 || act_dim < 1) throw ContractError("policy dimensions must be >= 1");
  ParamLayout layout;
  layout.obs_dim = obs_dim;
  layout.act_dim = act_dim;
  layout.hidden = hidden;
  std::size_t offset = 0;
  layout.actor = chain_layers(obs_dim, hidden, act_dim, offset);
  layout.critic = chain_layers(obs_dim, hidden, 1, offset);
  layout.log_std_offset = offset;
  layout.size = offset + static_cast<std::size_t>(act_dim);
  return layout;
}

bool PolicyParams::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

PolicyParams init_policy(int obs_dim, int act_dim, const PpoHyperparams& hyper, std::uint64_t seed) {
  PolicyParams p;
  p.layout = ParamLayout::make(obs_dim, act_dim, hyper.hidden_layers);
  p.values.assign(p.layout.size, 0.0);
  p.adam.m.assign(p.layout.size, 0.0);
  p.adam.v.assign(p.layout.size, 0.0);

  Rng rng(seed, Stream::kPolicyInit);
  const auto init_net = [&](const std::vector<LayerSlot>& layers, double output_gain) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const LayerSlot& s = layers[l];
      const double gain = l + 1 == layers.size() ? output_gain : std::numbers::sqrt2;
      orthogonal_fill(std::span<double>(p.values).subspan(s.weight_offset,
                                                          static_cast<std::size_t>(s.in) * s.out),
                      s.out, s.in, gain, rng);
    }
  };
  init_net(p.layout.actor, 0.01);
  init_net(p.layout.critic, 1.0);
  return p;
}

void mlp_forward(std::span<const double> params, std::span<const LayerSlot> layers,
                 std::span<const double> input, MlpTrace& trace) {
  trace.activations.resize(layers.size() + 1);
  trace.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerSlot& s = layers[l];
    const std::vector<double>& x = trace.activations[l];
    std::vector<double>& y = trace.activations[l + 1];
    y.resize(static_cast<std::size_t>(s.out));
    const bool hidden = l + 1 < layers.size();
    for (int o = 0; o < s.out; ++o) {
      const double* w = params.data() + s.weight_offset + static_cast<std::size_t>(o) * s.in;
      double acc = params[s.bias_offset + o];
      for (int i = 0; i < s.in; ++i) acc += w[i] * x[i];
      y[o] = hidden ? std::tanh(acc) : acc;
    }
  }
}

void mlp_backward(std::span<const double> params, std::span<const LayerSlot> layers,
                  const MlpTrace& trace, std::span<const double> output_grad,
                  std::span<double> grad) {
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> upstream;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerSlot& s = layers[l];
    const std::vector<double>& x = trace.activations[l];
    if (l + 1 < layers.size()) {
      // tanh'(a) = 1 - y^2 with y the stored activation
      const std::vector<double>& y = trace.activations[l + 1];
      for (int o = 0; o < s.out; ++o) delta[o] *= 1.0 - y[o] * y[o];
    }
    upstream.assign(static_cast<std::size_t>(s.in), 0.0);
    for (int o = 0; o < s.out; ++o) {
      const double d = delta[o];
      grad[s.bias_offset + o] += d;
      if (d == 0.0) continue;
      const std::size_t row = s.weight_offset + static_cast<std::size_t>(o) * s.in;
      for (int i = 0; i < s.in; ++i) {
        grad[row + i] += d * x[i];
        upstream[i] += d * params[row + i];
      }
    }
    delta.swap(upstream);
  }
}

std::vector<double> actor_mean(const PolicyParams& params, std::span<const double> observation) {
  require_obs(params, observation);
  MlpTrace trace;
  mlp_forward(params.values, params.layout.actor, observation, trace);
  return trace.activations.back();
}

double critic_value(const PolicyParams& params, std::span<const double> observation) {
  require_obs(params, observation);
  MlpTrace trace;
  mlp_forward(params.values, params.layout.critic, observation, trace);
  return trace.activations.back()[0];
}

double gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> action) {
  double lp = 0.0;
  for (std::size_t k = 0; k < mean.size(); ++k) {
    const double z = (action[k] - mean[k]) * std::exp(-log_std[k]);
    lp += -0.5 * z * z - log_std[k] - kHalfLog2Pi;
  }
  return lp;
}

double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double ls : log_std) h += ls + 0.5 + kHalfLog2Pi;
  return h;
}

ActResult act(const PolicyParams& params, std::span<const double> observation, Rng& rng) {
  ActResult out;
  out.mean = actor_mean(params, observation);
  out.value = critic_value(params, observation);
  const auto log_std = params.log_std();
  out.action.resize(out.mean.size());
  for (std::size_t k = 0; k < out.mean.size(); ++k) {
    out.action[k] = out.mean[k] + std::exp(log_std[k]) * rng.normal();
  }
  out.log_prob = gaussian_log_prob(out.mean, log_std, out.action);
  if (!std::isfinite(out.log_prob) || !std::isfinite(out.value)) {
    throw NumericError("policy produced a non-finite output");
  }
  return out;
}

}  // namespace handrl::ppo

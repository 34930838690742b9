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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "handrl/errors.hpp"
#include "handrl/ppo/adam.hpp"
#include "handrl/ppo/checkpoint.hpp"
#include "handrl/ppo/gae.hpp"
#include "handrl/ppo/loss.hpp"
#include "handrl/ppo/policy.hpp"
#include "handrl/ppo/update.hpp"
#include "test_util.hpp"

using namespace handrl;
using namespace handrl::ppo;
using handrl::testing::rel_err;

namespace {

PpoHyperparams tiny_hyper() {
  PpoHyperparams h;
  h.hidden_layers = {8, 8};
  return h;
}

// A rollout of `steps` random transitions generated by the policy itself.
RolloutBuffer random_rollout(const PolicyParams& policy, std::size_t steps, std::uint64_t seed) {
  Rng rng(seed, Stream::kActionSampling);
  RolloutBuffer buf(policy.layout.obs_dim, policy.layout.act_dim);
  std::vector<double> obs(static_cast<std::size_t>(policy.layout.obs_dim));
  for (std::size_t t = 0; t < steps; ++t) {
    for (double& o : obs) o = rng.normal();
    const ActResult a = act(policy, obs, rng);
    buf.add(obs, a.action, a.log_prob, rng.normal(), a.value, false);
  }
  buf.bootstrap_value = rng.normal();
  return buf;
}

// Sum over k of (gamma lambda)^k delta_{t+k}, cut at the first terminal.
std::vector<double> brute_force_gae(const RolloutBuffer& b, double gamma, double lambda) {
  const std::size_t n = b.size();
  std::vector<double> delta(n), adv(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? b.values[t + 1] : b.bootstrap_value;
    delta[t] = b.rewards[t] + gamma * next * (b.dones[t] ? 0.0 : 1.0) - b.values[t];
  }
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    double weight = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      sum += weight * delta[k];
      if (b.dones[k]) break;
      weight *= gamma * lambda;
    }
    adv[t] = sum;
  }
  return adv;
}

struct LossFixture {
  PolicyParams policy;
  RolloutBuffer buffer;
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<std::size_t> indices;

  MinibatchView view() const {
    return {buffer.observations, buffer.actions, buffer.log_probs, advantages, returns, indices};
  }
};

// Five-step buffer on a 2 x 8 network, with the policy moved away from the
// behaviour policy so that some ratios leave the clip range.
LossFixture gradient_fixture(std::uint64_t seed, const PpoHyperparams& hyper) {
  LossFixture f;
  f.policy = init_policy(3, 2, hyper, seed);
  f.buffer = random_rollout(f.policy, 5, seed);
  Rng rng(seed, Stream::kMinibatchShuffle);
  for (double& v : f.policy.values) v += 0.3 * rng.normal();
  f.advantages.resize(5);
  f.returns.resize(5);
  for (auto& a : f.advantages) a = rng.normal();
  for (auto& r : f.returns) r = rng.normal();
  f.indices = {0, 1, 2, 3, 4};
  return f;
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-7) over all
// parameters, with central differences of step h.
double max_gradient_error(const LossFixture& f, const PpoHyperparams& hyper, LossTerms terms, double h) {
  const LossResult analytic = ppo_loss(f.policy, f.view(), hyper, terms);
  double worst = 0.0;
  PolicyParams probe = f.policy;
  for (std::size_t p = 0; p < probe.values.size(); ++p) {
    const double x = f.policy.values[p];
    probe.values[p] = x + h;
    const double up = ppo_loss(probe, f.view(), hyper, terms).total;
    probe.values[p] = x - h;
    const double down = ppo_loss(probe, f.view(), hyper, terms).total;
    probe.values[p] = x;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic.gradient[p];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-7});
    worst = std::max(worst, err);
  }
  return worst;
}

// True when every ratio is at least `margin` away from a clip edge, so the
// loss is smooth within the finite-difference stencil.
bool ratios_clear_of_edges(const LossFixture& f, double eps, double margin) {
  for (std::size_t row : f.indices) {
    const auto obs = f.buffer.observation(row);
    const auto mean = actor_mean(f.policy, obs);
    const double lp = gaussian_log_prob(mean, f.policy.log_std(), f.buffer.action(row));
    const double ratio = std::exp(lp - f.buffer.log_probs[row]);
    if (std::abs(ratio - (1.0 - eps)) < margin || std::abs(ratio - (1.0 + eps)) < margin) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("policy initialisation") {
  const PpoHyperparams hyper;
  const PolicyParams a = init_policy(14, 7, hyper, 3);
  const PolicyParams b = init_policy(14, 7, hyper, 3);
  CHECK(a == b);
  CHECK(!(a == init_policy(14, 7, hyper, 4)));
  CHECK(a.layout.actor.front().in == 14);
  CHECK(init_policy(23, 7, hyper, 3).layout.actor.front().in == 23);
  CHECK(a.layout.actor.back().out == 7);
  CHECK(a.layout.critic.back().out == 1);
  for (double ls : a.log_std()) CHECK(ls == 0.0);
  for (const auto& slot : a.layout.actor) {
    for (int o = 0; o < slot.out; ++o) CHECK(a.values[slot.bias_offset + o] == 0.0);
  }
  CHECK(a.adam.step == 0);

  SUBCASE("weights are orthogonal with the requested gains") {
    const auto check_layer = [&](const LayerSlot& slot, double gain) {
      // Gram matrix over the smaller dimension equals gain^2 I.
      const bool by_columns = slot.out >= slot.in;
      const int k = by_columns ? slot.in : slot.out;
      const int len = by_columns ? slot.out : slot.in;
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          double dot = 0.0;
          for (int l = 0; l < len; ++l) {
            const int r1 = by_columns ? l : i, c1 = by_columns ? i : l;
            const int r2 = by_columns ? l : j, c2 = by_columns ? j : l;
            dot += a.values[slot.weight_offset + r1 * slot.in + c1] *
                   a.values[slot.weight_offset + r2 * slot.in + c2];
          }
          CHECK(dot == doctest::Approx(i == j ? gain * gain : 0.0).epsilon(1e-9).scale(1.0));
        }
      }
    };
    check_layer(a.layout.actor[0], std::sqrt(2.0));
    check_layer(a.layout.actor[1], std::sqrt(2.0));
    check_layer(a.layout.actor[2], 0.01);
    check_layer(a.layout.critic[2], 1.0);
  }
}

TEST_CASE("Gaussian policy densities") {
  const std::vector<double> zero(7, 0.0);
  CHECK(gaussian_log_prob(zero, zero, zero) == doctest::Approx(-3.5 * std::log(2.0 * std::numbers::pi)));
  CHECK(gaussian_entropy(zero) == doctest::Approx(3.5 * std::log(2.0 * std::numbers::pi * std::numbers::e)));
  CHECK(gaussian_entropy(zero) == doctest::Approx(9.9326).epsilon(1e-5));

  SUBCASE("a zero-weight actor puts the mean at zero") {
    PolicyParams p = init_policy(14, 7, PpoHyperparams{}, 1);
    for (const auto& slot : p.layout.actor) {
      for (std::size_t i = slot.weight_offset; i < slot.bias_offset + slot.out; ++i) p.values[i] = 0.0;
    }
    const std::vector<double> obs(14, 0.3);
    const auto mean = actor_mean(p, obs);
    for (double m : mean) CHECK(m == 0.0);
    CHECK(gaussian_log_prob(mean, p.log_std(), mean) == doctest::Approx(-3.5 * std::log(2.0 * std::numbers::pi)));
  }
  SUBCASE("the one-dimensional density integrates to one") {
    const std::vector<double> mean{0.3}, log_std{-0.2};
    const double lo = -10.0, hi = 10.0;
    const int n = 20000;  // composite Simpson
    const double step = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const std::vector<double> a{lo + i * step};
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * std::exp(gaussian_log_prob(mean, log_std, a));
    }
    CHECK(sum * step / 3.0 == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("act is deterministic in the generator state and validates input") {
    const PolicyParams p = init_policy(14, 7, PpoHyperparams{}, 2);
    const std::vector<double> obs(14, 0.1);
    Rng r1(9, Stream::kActionSampling), r2(9, Stream::kActionSampling);
    const auto a1 = act(p, obs, r1);
    const auto a2 = act(p, obs, r2);
    CHECK(a1.action == a2.action);
    CHECK(a1.log_prob == a2.log_prob);
    CHECK(a1.log_prob == gaussian_log_prob(a1.mean, p.log_std(), a1.action));
    CHECK_THROWS_AS(act(p, std::vector<double>(13, 0.0), r1), ContractError);
    PolicyParams broken = p;
    broken.values[0] = std::nan("");
    CHECK_THROWS_AS(act(broken, obs, r1), NumericError);
  }
}

TEST_CASE("GAE worked examples") {
  RolloutBuffer one(1, 1);
  one.add(std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, 1.0, 0.0, false);
  const auto e1 = compute_gae(one, 0.99, 0.85);
  CHECK(e1.advantages[0] == 1.0);

  RolloutBuffer two(1, 1);
  two.add(std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, 0.0, 0.0, false);
  two.add(std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, 1.0, 0.0, false);
  const auto e2 = compute_gae(two, 0.99, 0.85);
  CHECK(e2.advantages[0] == doctest::Approx(0.8415).epsilon(1e-12));
  CHECK(e2.advantages[1] == 1.0);
  CHECK(e2.returns[0] == e2.advantages[0]);

  RolloutBuffer bad = two;
  bad.values.pop_back();
  CHECK_THROWS_AS(compute_gae(bad, 0.99, 0.85), ContractError);
}

TEST_CASE("GAE matches the brute-force discounted sum") {
  Rng rng(42, Stream::kPolicyInit);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(1 + rng.below(100));
    RolloutBuffer b(1, 1);
    for (std::size_t t = 0; t < n; ++t) {
      b.add(std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, rng.normal(), rng.normal(),
            rng.uniform() < 0.05);
    }
    b.bootstrap_value = rng.normal();
    const double lambda = rng.uniform();
    const auto est = compute_gae(b, 0.99, lambda);
    const auto oracle = brute_force_gae(b, 0.99, lambda);
    for (std::size_t t = 0; t < n; ++t) {
      worst = std::max(worst, rel_err(est.advantages[t], oracle[t]));
      CHECK(est.returns[t] == est.advantages[t] + b.values[t]);
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("GAE with lambda zero is the one-step TD residual") {
  Rng rng(8, Stream::kPolicyInit);
  RolloutBuffer b(1, 1);
  for (int t = 0; t < 20; ++t) {
    b.add(std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, rng.normal(), rng.normal(), false);
  }
  b.bootstrap_value = rng.normal();
  const auto est = compute_gae(b, 0.99, 0.0);
  for (std::size_t t = 0; t < b.size(); ++t) {
    const double next = t + 1 < b.size() ? b.values[t + 1] : b.bootstrap_value;
    CHECK(est.advantages[t] == b.rewards[t] + 0.99 * next - b.values[t]);
  }
}

TEST_CASE("advantage normalisation") {
  Rng rng(3, Stream::kPolicyInit);
  std::vector<double> adv(1000);
  for (double& a : adv) a = 5.0 + 3.0 * rng.normal();
  normalize_advantages(adv);
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(var / adv.size()) - 1.0) < 1e-9);

  std::vector<double> flat(10, 2.5);
  normalize_advantages(flat);
  for (double a : flat) CHECK(a == 0.0);
}

TEST_CASE("PPO loss values") {
  const PpoHyperparams hyper = tiny_hyper();
  LossFixture f;
  f.policy = init_policy(3, 7, hyper, 5);
  f.buffer = random_rollout(f.policy, 12, 5);
  f.indices.resize(12);
  std::iota(f.indices.begin(), f.indices.end(), std::size_t{0});

  SUBCASE("at the behaviour policy every ratio is exactly one") {
    f.advantages.assign(12, 1.0);
    f.returns.assign(12, 0.0);
    const auto loss = ppo_loss(f.policy, f.view(), hyper);
    CHECK(loss.max_ratio_deviation == 0.0);
    CHECK(loss.mean_ratio == 1.0);
    CHECK(loss.clip_fraction == 0.0);
    CHECK(loss.entropy == doctest::Approx(9.9326).epsilon(1e-5));
  }
  SUBCASE("zero advantages, exact values and no entropy bonus form a stationary point") {
    PpoHyperparams h = hyper;
    h.entropy_coef = 0.0;
    f.advantages.assign(12, 0.0);
    f.returns.resize(12);
    for (std::size_t t = 0; t < 12; ++t) f.returns[t] = critic_value(f.policy, f.buffer.observation(t));
    const auto loss = ppo_loss(f.policy, f.view(), h);
    CHECK(loss.total == 0.0);
    for (double g : loss.gradient) CHECK(g == 0.0);
  }
  SUBCASE("malformed minibatches are rejected") {
    f.advantages.assign(12, 0.0);
    f.returns.assign(11, 0.0);
    CHECK_THROWS_AS(ppo_loss(f.policy, f.view(), hyper), ContractError);
    f.returns.assign(12, 0.0);
    f.indices = {12};
    CHECK_THROWS_AS(ppo_loss(f.policy, f.view(), hyper), ContractError);
  }
  SUBCASE("a non-finite loss names the minibatch") {
    f.advantages.assign(12, 0.0);
    f.returns.assign(12, std::numeric_limits<double>::infinity());
    try {
      ppo_loss(f.policy, f.view(), hyper, {}, 1, 17);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(e.index() == 17);
    }
  }
}

TEST_CASE("PPO loss gradients match central differences") {
  const PpoHyperparams hyper = tiny_hyper();
  int fixtures = 0;
  for (std::uint64_t seed = 1; fixtures < 5 && seed < 100; ++seed) {
    const LossFixture f = gradient_fixture(seed, hyper);
    if (!ratios_clear_of_edges(f, hyper.clip_epsilon, 1e-4)) continue;
    ++fixtures;
    CAPTURE(seed);
    CHECK(max_gradient_error(f, hyper, {true, true, true}, 1e-6) < 1e-4);
    CHECK(max_gradient_error(f, hyper, {true, false, false}, 1e-6) < 1e-4);
    CHECK(max_gradient_error(f, hyper, {false, true, false}, 1e-6) < 1e-4);
    CHECK(max_gradient_error(f, hyper, {false, false, true}, 1e-6) < 1e-4);
  }
  CHECK(fixtures == 5);
}

TEST_CASE("parallel and serial loss kernels agree bit for bit") {
  const PpoHyperparams hyper;
  PolicyParams policy = init_policy(23, 7, hyper, 12);
  RolloutBuffer buf = random_rollout(policy, 200, 12);
  Rng rng(12, Stream::kMinibatchShuffle);
  for (double& v : policy.values) v += 0.05 * rng.normal();
  std::vector<double> adv(200), ret(200);
  for (auto& a : adv) a = rng.normal();
  for (auto& r : ret) r = rng.normal();
  for (std::size_t count : {1u, 7u, 64u, 200u}) {
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = (i * 37) % 200;
    const MinibatchView view{buf.observations, buf.actions, buf.log_probs, adv, ret, idx};
    const LossResult serial = ppo_loss_serial(policy, view, hyper);
    for (int threads : {1, 2, 4}) {
      const LossResult parallel = ppo_loss(policy, view, hyper, {}, threads);
      CHECK(parallel.total == serial.total);
      CHECK(parallel.gradient == serial.gradient);
    }
  }
}

TEST_CASE("Adam") {
  SUBCASE("the first step moves by the learning rate against the gradient sign") {
    std::vector<double> x{1.0, -2.0}, g{0.5, -3.0};
    AdamState st{{0.0, 0.0}, {0.0, 0.0}, 0};
    adam_step(x, g, st, 1e-3);
    CHECK(st.step == 1);
    CHECK(x[0] == doctest::Approx(1.0 - 1e-3 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(-2.0 + 1e-3 * 3.0 / (3.0 + 1e-8)).epsilon(1e-14));
  }
  SUBCASE("a zero gradient leaves parameters and decays the moments") {
    std::vector<double> x{1.0}, g{0.0};
    AdamState st{{0.2}, {0.04}, 3};
    adam_step(x, g, st, 0.0);
    CHECK(x[0] == 1.0);
    CHECK(st.m[0] == doctest::Approx(0.18));
    CHECK(st.v[0] == doctest::Approx(0.04 * 0.999));
    adam_step(x, g, st, 1e-3);
    CHECK(st.step == 5);
  }
  SUBCASE("identical calls give identical results") {
    std::vector<double> x1{0.3, 0.4}, x2{0.3, 0.4}, g{0.1, -0.2};
    AdamState s1{{0.0, 0.0}, {0.0, 0.0}, 0}, s2 = s1;
    for (int i = 0; i < 3; ++i) {
      adam_step(x1, g, s1, 1e-2);
      adam_step(x2, g, s2, 1e-2);
    }
    CHECK(x1 == x2);
    CHECK(s1 == s2);
  }
  SUBCASE("shape mismatches are rejected") {
    std::vector<double> x{1.0, 2.0}, g{0.1};
    AdamState st{{0.0, 0.0}, {0.0, 0.0}, 0};
    CHECK_THROWS_AS(adam_step(x, g, st, 1e-3), ContractError);
  }
}

TEST_CASE("PPO update") {
  PpoHyperparams hyper = tiny_hyper();
  hyper.minibatch_size = 16;
  const PolicyParams start = init_policy(4, 2, hyper, 21);
  const RolloutBuffer buffer = random_rollout(start, 100, 21);

  SUBCASE("a zero learning rate leaves the parameters unchanged") {
    PolicyParams p = start;
    Rng rng(21, Stream::kMinibatchShuffle);
    const auto stats = update(p, buffer, hyper, 0.0, rng);
    CHECK(p.values == start.values);
    CHECK(stats.minibatches == 8 * 7);  // six full minibatches and a short one per epoch
    CHECK(stats.mean_ratio == 1.0);
  }
  SUBCASE("the first minibatch sees unit ratios and the update is reproducible") {
    PolicyParams p1 = start, p2 = start;
    Rng r1(21, Stream::kMinibatchShuffle), r2(21, Stream::kMinibatchShuffle);
    const auto s1 = update(p1, buffer, hyper, 1e-3, r1);
    update(p2, buffer, hyper, 1e-3, r2);
    CHECK(s1.first_minibatch_ratio_deviation == 0.0);
    CHECK(p1 == p2);
    CHECK(!(p1.values == start.values));
    CHECK(p1.adam.step == 56);
  }
  SUBCASE("a larger entropy bonus never lowers the learned log std") {
    std::vector<double> previous;
    for (double c2 : {0.0, 0.02, 0.1, 0.5}) {
      PpoHyperparams h = hyper;
      h.entropy_coef = c2;
      PolicyParams p = start;
      Rng rng(21, Stream::kMinibatchShuffle);
      update(p, buffer, h, 1e-3, rng);
      const std::vector<double> log_std(p.log_std().begin(), p.log_std().end());
      if (!previous.empty()) {
        for (std::size_t k = 0; k < log_std.size(); ++k) CHECK(log_std[k] >= previous[k]);
      }
      previous = log_std;
    }
  }
  SUBCASE("mismatched rollouts are rejected") {
    PolicyParams p = init_policy(5, 2, hyper, 1);
    Rng rng(1, Stream::kMinibatchShuffle);
    CHECK_THROWS_AS(update(p, buffer, hyper, 1e-3, rng), ContractError);
  }
}

TEST_CASE("observation normaliser") {
  ObservationNormalizer norm(2);
  for (int i = 0; i < 100; ++i) norm.observe(std::vector<double>{1.0 + (i % 2), 5.0});
  const auto z = norm.normalize(std::vector<double>{2.0, 5.0});
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(z[1] == 0.0);
  CHECK(norm.count() == 100);
  CHECK_THROWS_AS(norm.observe(std::vector<double>{1.0}), ContractError);
}

TEST_CASE("checkpoints round-trip bit for bit") {
  PolicyParams p = init_policy(23, 7, PpoHyperparams{}, 77);
  const RolloutBuffer buffer = random_rollout(p, 64, 77);
  Rng rng(77, Stream::kMinibatchShuffle);
  update(p, buffer, PpoHyperparams{}, 1e-4, rng);

  const auto bytes = encode_checkpoint(p);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "HANDRLCK");
  CHECK(decode_checkpoint(bytes) == p);

  const auto path = std::filesystem::temp_directory_path() / "handrl_unit_checkpoint.ckpt";
  save_checkpoint(p, path);
  CHECK(load_checkpoint(path) == p);
  std::filesystem::remove(path);

  auto corrupt = bytes;
  corrupt[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(corrupt), ContractError);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  CHECK_THROWS_AS(decode_checkpoint(truncated), ContractError);
  CHECK_THROWS_AS(load_checkpoint(path), IoError);
}

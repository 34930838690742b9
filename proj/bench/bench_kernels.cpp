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

// Serial reference vs OpenMP kernels: the minibatch loss/gradient, the
// simulator step and the trial worker pool.

#include <benchmark/benchmark.h>

#include <filesystem>

#include "handrl/harness/config.hpp"
#include "handrl/harness/experiment.hpp"
#include "handrl/ppo/gae.hpp"
#include "handrl/ppo/loss.hpp"
#include "handrl/ppo/policy.hpp"
#include "handrl/rng.hpp"
#include "handrl/sim/simulator.hpp"

using namespace handrl;

namespace {

struct LossData {
  ppo::PpoHyperparams hyper;
  ppo::PolicyParams policy;
  ppo::RolloutBuffer buffer{23, 7};
  std::vector<double> adv, ret;
  std::vector<std::size_t> idx;

  explicit LossData(std::size_t batch) {
    policy = ppo::init_policy(23, 7, hyper, 1);
    Rng rng(1, Stream::kActionSampling);
    std::vector<double> obs(23);
    for (std::size_t t = 0; t < batch; ++t) {
      for (double& o : obs) o = rng.normal();
      const auto a = ppo::act(policy, obs, rng);
      buffer.add(obs, a.action, a.log_prob, rng.normal(), a.value, false);
      adv.push_back(rng.normal());
      ret.push_back(rng.normal());
      idx.push_back(t);
    }
  }
  ppo::MinibatchView view() const {
    return {buffer.observations, buffer.actions, buffer.log_probs, adv, ret, idx};
  }
};

void BM_LossSerial(benchmark::State& state) {
  const LossData d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ppo::ppo_loss_serial(d.policy, d.view(), d.hyper));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossSerial)->Arg(64)->Arg(1000);

void BM_LossParallel(benchmark::State& state) {
  const LossData d(static_cast<std::size_t>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ppo::ppo_loss(d.policy, d.view(), d.hyper, {}, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossParallel)->ArgsProduct({{64, 1000}, {1, 2, 4}});

void BM_SimStep(benchmark::State& state) {
  sim::Model m;
  sim::SimState s = sim::reset(m);
  sim::ActionCommand a;
  a.values = {0.3, -0.5, 0.3, -0.5, 0.3, -0.5, -0.8};
  for (auto _ : state) {
    s = sim::step(m, s, a).state;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SimStep);

void BM_TrialPool(benchmark::State& state) {
  harness::CliOverrides flags;
  flags.trials = 4;
  flags.episodes = 1;
  flags.workers = static_cast<int>(state.range(0));
  flags.out = (std::filesystem::temp_directory_path() / "handrl_bench_pool").string();
  const auto cfg = harness::parse_config(nlohmann::json::object(), flags);
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_experiment(cfg));
}
BENCHMARK(BM_TrialPool)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();

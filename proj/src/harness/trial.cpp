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

#include "handrl/harness/trial.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <optional>

#include "handrl/curriculum/curriculum.hpp"
#include "handrl/errors.hpp"
#include "handrl/metrics/export.hpp"
#include "handrl/ppo/checkpoint.hpp"
#include "handrl/ppo/update.hpp"
#include "handrl/rng.hpp"
#include "handrl/sim/simulator.hpp"

namespace handrl::harness {

std::string trial_file_stem(int trial_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trial_%04d", trial_index);
  return buf;
}

TrialResult run_trial(const ExperimentConfig& config, int trial_index, const TrialOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();

  TrialResult result;
  TrialRecord& record = result.record;
  record.trial = trial_index;
  record.seed = config.trial_seed(trial_index);

  const sim::Model model = config.model();
  const auto spec = config.curriculum_spec();
  const auto schedule = config.lr_schedule();
  const auto target = curriculum::TaskTarget::for_object(model.object);
  const int obs_dim = sim::observation_dim(config.tactile);

  std::unique_ptr<metrics::RowAppender> rows_out;
  const std::string stem = trial_file_stem(trial_index);
  if (options.write_files) {
    const auto path = config.out / "trials" / (stem + ".csv");
    std::error_code ec;
    std::filesystem::remove(path, ec);
    rows_out = std::make_unique<metrics::RowAppender>(path);
  }

  Rng action_rng(record.seed, Stream::kActionSampling);
  Rng shuffle_rng(record.seed, Stream::kMinibatchShuffle);
  std::optional<ppo::ObservationNormalizer> normalizer;
  if (config.observation_normalization) normalizer.emplace(obs_dim);

  ppo::RolloutBuffer buffer(obs_dim, sim::kActionDim);
  buffer.reserve(kEpisodeSteps);
  metrics::EpisodeTrace trace;
  trace.states.reserve(kEpisodeSteps);
  trace.rewards.reserve(kEpisodeSteps);

  const auto policy_input = [&](const std::vector<double>& obs) {
    if (!normalizer) return obs;
    normalizer->observe(obs);
    return normalizer->normalize(obs);
  };

  try {
    result.policy = ppo::init_policy(obs_dim, sim::kActionDim, config.ppo, record.seed);
    ppo::PolicyParams& policy = result.policy;

    for (int episode = 0; episode < config.episodes; ++episode) {
      const auto coeffs = curriculum::coefficients_at(spec, episode);
      buffer.clear();
      trace.states.clear();
      trace.rewards.clear();

      sim::SimState state = sim::reset(model);
      trace.initial = state;
      std::vector<double> obs = policy_input(sim::observe(state, sim::TactileFrame{}, config.tactile));
      for (int t = 0; t < kEpisodeSteps; ++t) {
        const ppo::ActResult a = ppo::act(policy, obs, action_rng);
        sim::ActionCommand command;
        for (int i = 0; i < sim::kActionDim; ++i) command.values[i] = a.action[i];
        const sim::StepResult next = sim::step(model, state, command);
        const double lift = next.state.ball_z - model.object.radius;
        const double reward = curriculum::step_reward(next.state.ball_theta_dot, lift, target, coeffs,
                                                      config.lift_scale_per_m);
        // Episodes end on the time limit only, so the last step bootstraps.
        buffer.add(obs, a.action, a.log_prob, reward, a.value, false);
        trace.states.push_back(next.state);
        trace.rewards.push_back(reward);
        state = next.state;
        obs = policy_input(sim::observe(state, next.tactile, config.tactile));
      }
      buffer.bootstrap_value = ppo::critic_value(policy, obs);

      const std::int64_t samples = static_cast<std::int64_t>(episode + 1) * kEpisodeSteps;
      const double lr = curriculum::learning_rate(schedule, samples);
      ppo::update(policy, buffer, config.ppo, lr, shuffle_rng);

      const auto row = metrics::episode_metrics(
          trace, model.object.radius, target,
          {trial_index, episode, curriculum::phase_at(spec, episode), lr},
          static_cast<std::size_t>(kEpisodeSteps));
      result.rows.push_back(row);
      if (rows_out) rows_out->append(row);
      record.episodes_completed = episode + 1;
    }
    record.status = TrialStatus::kCompleted;
  } catch (const SimulationDiverged& e) {
    record.status = TrialStatus::kFailed;
    record.error = std::string("simulation diverged: ") + e.what();
  } catch (const NumericError& e) {
    record.status = TrialStatus::kFailed;
    record.error = std::string("numeric error: ") + e.what();
  } catch (const ContractError& e) {
    record.status = TrialStatus::kFailed;
    record.error = std::string("contract violation: ") + e.what();
  }

  if (options.write_files && record.status == TrialStatus::kCompleted) {
    record.checkpoint = "checkpoints/" + stem + ".ckpt";
    std::error_code ec;
    std::filesystem::create_directories(config.out / "checkpoints", ec);
    ppo::save_checkpoint(result.policy, config.out / record.checkpoint);
  }
  record.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace handrl::harness

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

#include "handrl/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "handrl/errors.hpp"

namespace handrl::metrics {

double completed_rotations(double net_rotation_rad) {
  return std::max(0.0, net_rotation_rad) / (2.0 * std::numbers::pi);
}

EpisodeMetrics episode_metrics(const EpisodeTrace& trace, double ball_radius,
                               const curriculum::TaskTarget& target, const EpisodeMeta& meta,
                               std::size_t expected_steps) {
  if (trace.states.size() != expected_steps || trace.rewards.size() != expected_steps) {
    throw ContractError("episode trace has " + std::to_string(trace.states.size()) + " states and " +
                        std::to_string(trace.rewards.size()) + " rewards, expected " +
                        std::to_string(expected_steps));
  }
  EpisodeMetrics m;
  m.trial = meta.trial;
  m.episode = meta.episode;
  m.phase = meta.phase;
  m.lr = meta.lr;
  if (expected_steps == 0) return m;

  double reward_sum = 0.0;
  for (double r : trace.rewards) reward_sum += r;
  double lift_sum = 0.0;
  std::size_t in_band = 0;
  for (const auto& s : trace.states) {
    const double lift = s.ball_z - ball_radius;
    lift_sum += lift;
    if (curriculum::in_target_band(lift, target)) ++in_band;
  }
  const double n = static_cast<double>(expected_steps);
  m.cum_reward = reward_sum;
  m.mean_lift_mm = 1000.0 * lift_sum / n;
  m.lift_success_pct = 100.0 * static_cast<double>(in_band) / n;
  m.completed_rotations = completed_rotations(trace.states.back().ball_theta - trace.initial.ball_theta);
  return m;
}

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return v[lo];
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

Summary summarize_values(std::vector<double> values) {
  if (values.empty()) throw ContractError("cannot summarise an empty set");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // Shifting by the smallest value makes identical inputs give their exact
  // value and zero spread.
  const double origin = values.front();
  double shifted_sum = 0.0;
  for (double v : values) shifted_sum += v - origin;
  const double shift = shifted_sum / n;
  Summary s;
  s.mean = origin + shift;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double d = (v - origin) - shift;
      ss += d * d;
    }
    s.std = std::sqrt(ss / (n - 1.0));
  }
  s.median = quantile_sorted(values, 0.5);
  s.q25 = quantile_sorted(values, 0.25);
  s.q75 = quantile_sorted(values, 0.75);
  return s;
}

AggregateStats aggregate(std::span<const EpisodeMetrics> rows) {
  if (rows.empty()) throw ContractError("cannot aggregate an empty row set");
  std::map<int, std::map<int, const EpisodeMetrics*>> by_episode;
  std::map<int, bool> trials;
  for (const auto& row : rows) {
    auto [it, inserted] = by_episode[row.episode].emplace(row.trial, &row);
    if (!inserted) {
      throw ContractError("duplicate row for trial " + std::to_string(row.trial) + ", episode " +
                          std::to_string(row.episode));
    }
    trials[row.trial] = true;
  }
  AggregateStats stats;
  for (const auto& [trial, unused] : trials) stats.trials.push_back(trial);
  for (const auto& [episode, per_trial] : by_episode) {
    EpisodeAggregate agg;
    agg.episode = episode;
    agg.trials = static_cast<int>(per_trial.size());
    agg.phase = per_trial.begin()->second->phase;
    auto collect = [&](double EpisodeMetrics::*field) {
      std::vector<double> v;
      v.reserve(per_trial.size());
      for (const auto& [trial, row] : per_trial) v.push_back(row->*field);
      return summarize_values(std::move(v));
    };
    agg.lr = collect(&EpisodeMetrics::lr);
    agg.cum_reward = collect(&EpisodeMetrics::cum_reward);
    agg.mean_lift_mm = collect(&EpisodeMetrics::mean_lift_mm);
    agg.lift_success_pct = collect(&EpisodeMetrics::lift_success_pct);
    agg.completed_rotations = collect(&EpisodeMetrics::completed_rotations);
    stats.episodes.push_back(agg);
  }
  return stats;
}

std::vector<PlotPoint> plot_points(const AggregateStats& stats) {
  std::vector<PlotPoint> points;
  points.reserve(stats.episodes.size());
  for (const auto& e : stats.episodes) {
    points.push_back({e.episode, e.phase, e.lift_success_pct.mean, e.completed_rotations.mean});
  }
  return points;
}

}  // namespace handrl::metrics

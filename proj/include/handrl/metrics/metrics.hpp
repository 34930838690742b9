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

#include <cstddef>
#include <span>
#include <vector>

#include "handrl/curriculum/curriculum.hpp"
#include "handrl/sim/types.hpp"

namespace handrl::metrics {

inline constexpr std::size_t kEpisodeSteps = 1000;

// One row of the per-episode metric table.
struct EpisodeMetrics {
  int trial = 0;
  int episode = 0;
  int phase = 1;
  double lr = 0.0;
  double cum_reward = 0.0;
  double mean_lift_mm = 0.0;
  double lift_success_pct = 0.0;
  double completed_rotations = 0.0;

  bool operator==(const EpisodeMetrics&) const = default;
};

// The state before the first action and the state after every step, with the
// reward earned on each step.
struct EpisodeTrace {
  sim::SimState initial;
  std::vector<sim::SimState> states;
  std::vector<double> rewards;
};

struct EpisodeMeta {
  int trial = 0;
  int episode = 0;
  int phase = 1;
  double lr = 0.0;
};

// Lift is ball centre height minus radius. Rewards are summed in step order.
// Throws ContractError unless the trace holds exactly `expected_steps` states
// and rewards.
EpisodeMetrics episode_metrics(const EpisodeTrace& trace, double ball_radius,
                               const curriculum::TaskTarget& target, const EpisodeMeta& meta,
                               std::size_t expected_steps = kEpisodeSteps);

// max(0, net rotation) in turns.
double completed_rotations(double net_rotation_rad);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;

  bool operator==(const Summary&) const = default;
};

// Order-independent: values are sorted first. Quartiles interpolate linearly
// between order statistics, so the median of an even count is the midpoint of
// the two central values. Throws ContractError on an empty input.
Summary summarize_values(std::vector<double> values);

struct EpisodeAggregate {
  int episode = 0;
  int phase = 1;
  int trials = 0;
  Summary lr;
  Summary cum_reward;
  Summary mean_lift_mm;
  Summary lift_success_pct;
  Summary completed_rotations;
};

struct AggregateStats {
  std::vector<int> trials;  // sorted trial ids that contributed rows
  std::vector<EpisodeAggregate> episodes;  // ascending episode order
};

// Statistics per episode across trials. Throws ContractError on an empty row
// set or when a (trial, episode) pair appears twice.
AggregateStats aggregate(std::span<const EpisodeMetrics> rows);

struct PlotPoint {
  int episode = 0;
  int phase = 1;
  double lift_success_pct = 0.0;
  double completed_rotations = 0.0;
};

// Trial-averaged (lift success, rotations) for every episode, in order.
std::vector<PlotPoint> plot_points(const AggregateStats& stats);

}  // namespace handrl::metrics

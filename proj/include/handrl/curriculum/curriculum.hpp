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

#include <array>
#include <cstdint>
#include <string_view>

#include "handrl/sim/types.hpp"

namespace handrl::curriculum {

struct RewardCoefficients {
  double rotation = 0.0;  // c_R
  double lift = 0.0;      // c_L
  bool operator==(const RewardCoefficients&) const = default;
};

inline constexpr RewardCoefficients kRotationAndLift{0.51, 0.49};
inline constexpr RewardCoefficients kLiftOnly{0.0, 0.49};
inline constexpr RewardCoefficients kRotationOnly{0.51, 0.0};

enum class CurriculumId : int { kC1 = 1, kC2, kC3, kC4, kC5 };

inline constexpr std::array<CurriculumId, 5> kAllCurricula{
    CurriculumId::kC1, CurriculumId::kC2, CurriculumId::kC3, CurriculumId::kC4, CurriculumId::kC5};

std::string_view to_string(CurriculumId id);
// Throws ConfigError for anything other than "C1".."C5".
CurriculumId parse_curriculum_id(std::string_view text);

// Two reward phases of a training trial.
//   C1 [L | L+R]   C2 [R | L+R]   C3 [L+R | L+R]   C4 [L+R | R]   C5 [L+R | L]
struct CurriculumSpec {
  CurriculumId id = CurriculumId::kC3;
  RewardCoefficients phase1;
  RewardCoefficients phase2;
  int phase_switch_episode = 1000;
  int episodes_total = 2000;

  // Phase 2 starts at `switch_episode`, or at the halfway point
  // ((episodes_total + 1) / 2) when it is negative.
  static CurriculumSpec make(CurriculumId id, int episodes_total = 2000, int switch_episode = -1);
};

// Throws ContractError unless 0 <= episode < episodes_total.
RewardCoefficients coefficients_at(const CurriculumSpec& spec, int episode);
int phase_at(const CurriculumSpec& spec, int episode);

// Desired ball lift above its resting height and the accepted band.
struct TaskTarget {
  double desired_lift = 0.025;
  double band_halfwidth = 0.004;

  static TaskTarget for_object(const sim::ObjectParams& object);
};

// Default scale of the lift error: metres to centimetres.
inline constexpr double kLiftScalePerCm = 100.0;

// r = c_R * theta_dot - c_L * lift_scale * |lift - desired_lift|
double step_reward(double theta_dot, double lift, const TaskTarget& target,
                   const RewardCoefficients& coeffs, double lift_scale = kLiftScalePerCm);

// |lift - desired_lift| <= band_halfwidth (with 1e-12 m slack for rounding).
bool in_target_band(double lift, const TaskTarget& target);

enum class ScheduleKind : int { kConstant, kLinear, kPiecewise };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view text);

struct LrSchedule {
  ScheduleKind kind = ScheduleKind::kPiecewise;
  double phi = 1e-5;
  double eta = 1e-5;
  std::int64_t phase1_samples = 1'000'000;
  std::int64_t total_samples = 2'000'000;

  void validate() const;
};

// constant:  phi
// linear:    phi * (1 - n / total)
// piecewise: phi * (1 - n / phase1)  for n <= phase1
//            eta * (1 - n / total)   for n >  phase1
// Throws ContractError unless 0 <= n <= total_samples.
double learning_rate(const LrSchedule& schedule, std::int64_t sample_number);

}  // namespace handrl::curriculum

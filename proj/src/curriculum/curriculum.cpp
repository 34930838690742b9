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

#include "handrl/curriculum/curriculum.hpp"

#include <cmath>
#include <string>

#include "handrl/errors.hpp"

namespace handrl::curriculum {

std::string_view to_string(CurriculumId id) {
  switch (id) {
    case CurriculumId::kC1: return "C1";
    case CurriculumId::kC2: return "C2";
    case CurriculumId::kC3: return "C3";
    case CurriculumId::kC4: return "C4";
    case CurriculumId::kC5: return "C5";
  }
  return "?";
}

CurriculumId parse_curriculum_id(std::string_view text) {
  for (CurriculumId id : kAllCurricula) {
    if (text == to_string(id)) return id;
  }
  throw ConfigError("unknown curriculum '" + std::string(text) + "' (expected C1..C5)", "curriculum");
}

CurriculumSpec CurriculumSpec::make(CurriculumId id, int episodes_total, int switch_episode) {
  if (episodes_total < 1) throw ConfigError("episodes must be >= 1", "episodes");
  CurriculumSpec spec;
  spec.id = id;
  spec.episodes_total = episodes_total;
  spec.phase_switch_episode = switch_episode >= 0 ? switch_episode : (episodes_total + 1) / 2;
  switch (id) {
    case CurriculumId::kC1: spec.phase1 = kLiftOnly; spec.phase2 = kRotationAndLift; break;
    case CurriculumId::kC2: spec.phase1 = kRotationOnly; spec.phase2 = kRotationAndLift; break;
    case CurriculumId::kC3: spec.phase1 = kRotationAndLift; spec.phase2 = kRotationAndLift; break;
    case CurriculumId::kC4: spec.phase1 = kRotationAndLift; spec.phase2 = kRotationOnly; break;
    case CurriculumId::kC5: spec.phase1 = kRotationAndLift; spec.phase2 = kLiftOnly; break;
  }
  return spec;
}

int phase_at(const CurriculumSpec& spec, int episode) {
  if (episode < 0 || episode >= spec.episodes_total) {
    throw ContractError("episode " + std::to_string(episode) + " outside [0, " +
                        std::to_string(spec.episodes_total) + ")");
  }
  return episode < spec.phase_switch_episode ? 1 : 2;
}

RewardCoefficients coefficients_at(const CurriculumSpec& spec, int episode) {
  return phase_at(spec, episode) == 1 ? spec.phase1 : spec.phase2;
}

TaskTarget TaskTarget::for_object(const sim::ObjectParams& object) {
  return {object.desired_center_height - object.radius, 0.004};
}

double step_reward(double theta_dot, double lift, const TaskTarget& target,
                   const RewardCoefficients& coeffs, double lift_scale) {
  return coeffs.rotation * theta_dot - coeffs.lift * lift_scale * std::abs(lift - target.desired_lift);
}

bool in_target_band(double lift, const TaskTarget& target) {
  return std::abs(lift - target.desired_lift) <= target.band_halfwidth + 1e-12;
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kConstant: return "constant";
    case ScheduleKind::kLinear: return "linear";
    case ScheduleKind::kPiecewise: return "piecewise";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
  if (text == "constant") return ScheduleKind::kConstant;
  if (text == "linear") return ScheduleKind::kLinear;
  if (text == "piecewise") return ScheduleKind::kPiecewise;
  throw ConfigError("unknown scheduler '" + std::string(text) +
                        "' (expected constant|linear|piecewise)",
                    "scheduler");
}

void LrSchedule::validate() const {
  if (!(phi > 0.0) || !std::isfinite(phi)) throw ConfigError("phi must be positive", "phi");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive", "eta");
  if (total_samples < 1) throw ConfigError("total_samples must be >= 1", "total_samples");
  if (phase1_samples < 1 || phase1_samples > total_samples) {
    throw ConfigError("phase1_samples must lie in [1, total_samples]", "phase1_samples");
  }
}

double learning_rate(const LrSchedule& schedule, std::int64_t n) {
  if (n < 0 || n > schedule.total_samples) {
    throw ContractError("sample number " + std::to_string(n) + " outside [0, " +
                        std::to_string(schedule.total_samples) + "]");
  }
  const double samples = static_cast<double>(n);
  const double total = static_cast<double>(schedule.total_samples);
  switch (schedule.kind) {
    case ScheduleKind::kConstant:
      return schedule.phi;
    case ScheduleKind::kLinear:
      return schedule.phi * (1.0 - samples / total);
    case ScheduleKind::kPiecewise:
      if (n <= schedule.phase1_samples) {
        return schedule.phi * (1.0 - samples / static_cast<double>(schedule.phase1_samples));
      }
      return schedule.eta * (1.0 - samples / total);
  }
  return 0.0;
}

}  // namespace handrl::curriculum

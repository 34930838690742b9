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

#include "handrl/sim/types.hpp"

#include <cmath>
#include <string>

#include "handrl/errors.hpp"

namespace handrl::sim {
namespace {

void require_positive(double value, const char* key) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(key) + " must be positive and finite", key);
  }
}

void require_non_negative(double value, const char* key) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(key) + " must be non-negative and finite", key);
  }
}

}  // namespace

std::string_view to_string(Finger finger) {
  switch (finger) {
    case Finger::kThumb: return "thumb";
    case Finger::kIndex: return "index";
    case Finger::kMiddle: return "middle";
  }
  return "?";
}

std::string_view to_string(ContactBody body) {
  switch (body) {
    case ContactBody::kThumb: return "thumb";
    case ContactBody::kIndex: return "index";
    case ContactBody::kMiddle: return "middle";
    case ContactBody::kGround: return "ground";
    case ContactBody::kPalm: return "palm";
  }
  return "?";
}

std::string_view to_string(ObjectId id) {
  switch (id) {
    case ObjectId::kO1: return "O1";
    case ObjectId::kO2: return "O2";
    case ObjectId::kO3: return "O3";
    case ObjectId::kO4: return "O4";
  }
  return "?";
}

ObjectId parse_object_id(std::string_view text) {
  if (text == "O1") return ObjectId::kO1;
  if (text == "O2") return ObjectId::kO2;
  if (text == "O3") return ObjectId::kO3;
  if (text == "O4") return ObjectId::kO4;
  throw ConfigError("unknown object id '" + std::string(text) + "' (expected O1..O4)", "object");
}

std::string_view to_string(TactileMode mode) {
  return mode == TactileMode::kForce3d ? "force3d" : "none";
}

TactileMode parse_tactile_mode(std::string_view text) {
  if (text == "none" || text == "no_tactile") return TactileMode::kNone;
  if (text == "force3d") return TactileMode::kForce3d;
  throw ConfigError("unknown tactile mode '" + std::string(text) + "' (expected none|force3d)",
                    "tactile");
}

void HandParams::validate() const {
  require_positive(palm_mass, "palm_mass");
  require_positive(finger_mass, "finger_mass");
  require_positive(link_length, "link_length");
  require_positive(phalanx_radius, "phalanx_radius");
  require_positive(palm_diameter, "palm_diameter");
  require_positive(palm_width, "palm_width");
  require_positive(initial_palm_height, "initial_palm_height");
  require_positive(max_palm_translation, "max_palm_translation");
  require_non_negative(joint_damping, "joint_damping");
  require_non_negative(servo_kp, "servo_kp");
  require_non_negative(servo_kd, "servo_kd");
  require_non_negative(palm_kp, "palm_kp");
  require_non_negative(palm_kd, "palm_kd");
  require_non_negative(palm_force_limit, "palm_force_limit");
  if (!(q1_limits.lo < q1_limits.hi)) throw ConfigError("q1 limits must satisfy lo < hi", "q1_limits");
  if (!(q2_limits.lo < q2_limits.hi)) throw ConfigError("q2 limits must satisfy lo < hi", "q2_limits");
  if (max_palm_translation > initial_palm_height) {
    throw ConfigError("max_palm_translation must not exceed initial_palm_height",
                      "max_palm_translation");
  }
  for (const auto& mount : finger_mounts) {
    if (!mount.allFinite()) throw ConfigError("finger mount must be finite", "finger_mounts");
    if (mount.x() == 0.0) {
      throw ConfigError("finger mounts must be off the palm's x = 0 axis", "finger_mounts");
    }
  }
}

void ObjectParams::validate() const {
  require_positive(mass, "mass");
  require_positive(radius, "radius");
  require_positive(desired_center_height, "desired_height");
  require_non_negative(stiffness_x, "stiffness_x");
  require_non_negative(damping_x, "damping_x");
  require_non_negative(damping_z, "damping_z");
  require_non_negative(damping_rot, "damping_rot");
  if (!(radius < desired_center_height)) {
    throw ConfigError("ball radius must be below the desired centre height", "radius");
  }
}

ObjectParams ObjectParams::preset(ObjectId id) {
  ObjectParams p;
  switch (id) {
    case ObjectId::kO1:
      p = {.mass = 0.050, .radius = 0.035, .desired_center_height = 0.060,
           .stiffness_x = 5.0, .damping_x = 0.35, .damping_z = 0.5, .damping_rot = 5e-3};
      break;
    case ObjectId::kO2:
      p = {.mass = 0.050, .radius = 0.030, .desired_center_height = 0.060,
           .stiffness_x = 5.0, .damping_x = 0.35, .damping_z = 0.2, .damping_rot = 5e-3};
      break;
    case ObjectId::kO3:
      p = {.mass = 0.005, .radius = 0.035, .desired_center_height = 0.060,
           .stiffness_x = 1.0, .damping_x = 0.07, .damping_z = 0.2, .damping_rot = 1e-3};
      break;
    case ObjectId::kO4:
      p = {.mass = 0.005, .radius = 0.030, .desired_center_height = 0.060,
           .stiffness_x = 1.0, .damping_x = 0.07, .damping_z = 0.2, .damping_rot = 1e-3};
      break;
  }
  return p;
}

void SimConfig::validate() const {
  require_positive(control_dt, "control_dt");
  if (physics_substeps < 1) throw ConfigError("physics_substeps must be >= 1", "physics_substeps");
  require_non_negative(gravity, "gravity");
  require_positive(contact_stiffness, "contact_stiffness");
  require_positive(contact_damping, "contact_damping");
  require_positive(friction, "friction");
  require_positive(slip_velocity, "slip_velocity");
}

bool SimState::all_finite() const {
  for (int j = 0; j < kNumJoints; ++j) {
    if (!std::isfinite(q[j]) || !std::isfinite(q_dot[j])) return false;
  }
  return std::isfinite(palm_z) && std::isfinite(palm_z_dot) && std::isfinite(ball_x) &&
         std::isfinite(ball_z) && std::isfinite(ball_x_dot) && std::isfinite(ball_z_dot) &&
         std::isfinite(ball_theta) && std::isfinite(ball_theta_dot) && std::isfinite(time);
}

}  // namespace handrl::sim

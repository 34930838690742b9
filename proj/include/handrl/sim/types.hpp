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

// Planar three-fingered hand and ball model. All quantities are SI
// (m, kg, s, N, rad); the config readers in config_io.hpp convert from the
// millimetre/gram units used by the parameter tables.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace handrl::sim {

inline constexpr int kNumFingers = 3;
inline constexpr int kNumJoints = 6;
inline constexpr int kActionDim = 7;
inline constexpr int kHandObsDim = 14;
inline constexpr int kTactileObsDim = 9;

enum class Finger : int { kThumb = 0, kIndex = 1, kMiddle = 2 };

// Anything the ball can touch.
enum class ContactBody : int { kThumb = 0, kIndex = 1, kMiddle = 2, kGround = 3, kPalm = 4 };

inline bool is_finger(ContactBody body) { return static_cast<int>(body) < kNumFingers; }

std::string_view to_string(Finger finger);
std::string_view to_string(ContactBody body);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double span() const { return hi - lo; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

struct HandParams {
  double palm_mass = 0.100;
  double finger_mass = 0.068;
  double link_length = 0.050;
  double phalanx_radius = 0.005;
  double palm_diameter = 0.120;
  double palm_width = 0.020;
  double initial_palm_height = 0.200;
  double max_palm_translation = 0.130;
  // N*m*s/rad, applied at every finger joint.
  double joint_damping = 5.5e-3;
  Range q1_limits{-0.785398163397448309616, 0.785398163397448309616};
  Range q2_limits{-1.57079632679489661923, 0.0};
  // Planar (x, y) mount offsets on the palm underside, thumb/index/middle.
  std::array<Eigen::Vector2d, kNumFingers> finger_mounts{
      Eigen::Vector2d{-0.060, 0.0}, Eigen::Vector2d{0.060, 0.030},
      Eigen::Vector2d{0.060, -0.030}};
  double servo_kp = 2.0;    // N*m/rad
  double servo_kd = 0.05;   // N*m*s/rad
  double palm_kp = 400.0;   // N/m
  double palm_kd = 20.0;    // N*s/m
  double palm_force_limit = 5.0;  // N, on top of gravity compensation

  double total_mass() const { return palm_mass + kNumFingers * finger_mass; }
  double min_palm_height() const { return initial_palm_height - max_palm_translation; }
  Range palm_range() const { return {min_palm_height(), initial_palm_height}; }
  const Range& joint_limits(int joint) const { return joint % 2 == 0 ? q1_limits : q2_limits; }

  // Throws ConfigError naming the first violated invariant.
  void validate() const;
};

enum class ObjectId : int { kO1 = 0, kO2 = 1, kO3 = 2, kO4 = 3 };

std::string_view to_string(ObjectId id);
// Throws ConfigError for anything other than "O1".."O4".
ObjectId parse_object_id(std::string_view text);

struct ObjectParams {
  double mass = 0.050;
  double radius = 0.035;
  double desired_center_height = 0.060;
  double stiffness_x = 5.0;     // N/m
  double damping_x = 0.35;      // N*s/m
  double damping_z = 0.5;       // N*s/m
  double damping_rot = 5e-3;    // N*m*s/rad

  // Solid sphere.
  double inertia() const { return 0.4 * mass * radius * radius; }
  void validate() const;

  static ObjectParams preset(ObjectId id);
};

struct SimConfig {
  double control_dt = 0.010;
  int physics_substeps = 10;
  double gravity = 9.81;
  double contact_stiffness = 1000.0;  // N/m
  double contact_damping = 10.0;      // N*s/m
  double friction = 0.8;
  double slip_velocity = 1e-3;        // m/s, tanh regularisation width

  double substep_dt() const { return control_dt / physics_substeps; }
  void validate() const;
};

// Joint order: thumb q1,q2; index q1,q2; middle q1,q2.
struct SimState {
  std::array<double, kNumJoints> q{};
  std::array<double, kNumJoints> q_dot{};
  double palm_z = 0.0;
  double palm_z_dot = 0.0;
  double ball_x = 0.0;
  double ball_z = 0.0;
  double ball_x_dot = 0.0;
  double ball_z_dot = 0.0;
  double ball_theta = 0.0;
  double ball_theta_dot = 0.0;
  double time = 0.0;
  std::int64_t steps = 0;

  bool operator==(const SimState&) const = default;
  bool all_finite() const;
};

// Seven values in [-1, 1]: six joint targets then the palm height target.
// Out-of-range values are clamped when the command is mapped.
struct ActionCommand {
  std::array<double, kActionDim> values{};
};

struct ContactPoint {
  ContactBody body = ContactBody::kGround;
  double penetration = 0.0;
  // Unit vector from the touching body toward the ball centre.
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  // Application point, midway through the overlap.
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  // Ball-surface velocity minus body velocity at `position`, normal part removed.
  Eigen::Vector3d slip_velocity = Eigen::Vector3d::Zero();
  double penetration_rate = 0.0;
  // Filled by contact_forces; the force acts on the ball.
  double normal_force = 0.0;
  Eigen::Vector3d tangential_force = Eigen::Vector3d::Zero();
};

enum class TactileMode : int { kNone = 0, kForce3d = 1 };

std::string_view to_string(TactileMode mode);
// Accepts "none" / "no_tactile" and "force3d".
TactileMode parse_tactile_mode(std::string_view text);

struct TactileReading {
  double f_t1 = 0.0;
  double f_t2 = 0.0;
  double f_n = 0.0;

  bool is_zero() const { return f_t1 == 0.0 && f_t2 == 0.0 && f_n == 0.0; }
  bool operator==(const TactileReading&) const = default;
};

struct TactileFrame {
  std::array<TactileReading, kNumFingers> fingers{};
  bool operator==(const TactileFrame&) const = default;
};

inline int observation_dim(TactileMode mode) {
  return mode == TactileMode::kForce3d ? kHandObsDim + kTactileObsDim : kHandObsDim;
}

struct Model {
  HandParams hand;
  ObjectParams object;
  SimConfig config;

  void validate() const {
    hand.validate();
    object.validate();
    config.validate();
  }
};

}  // namespace handrl::sim

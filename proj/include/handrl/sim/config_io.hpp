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

// JSON sections for the hand, ball and integrator, in the units of the
// physical parameter tables (mm, g, N/mm, N*s/mm, degrees).
//
// hand:   palm_mass_g, finger_mass_g, link_length_mm, phalanx_diameter_mm,
//         palm_width_mm, palm_diameter_mm, initial_hand_height_mm,
//         max_translation_mm, joint_damping_Ns_per_mm, q1_limits_deg,
//         q2_limits_deg, finger_mounts_mm, servo_kp_Nm_per_rad,
//         servo_kd_Nms_per_rad, palm_kp_N_per_mm, palm_kd_Ns_per_mm,
//         palm_force_limit_N
// object: mass_g, radius_mm, desired_height_mm, stiffness_x_N_per_mm,
//         damping_x_Ns_per_mm, damping_z_Ns_per_mm, damping_rot_Ns_per_rad
// sim:    control_dt_ms, physics_substeps, gravity_m_per_s2,
//         contact_stiffness_N_per_mm, contact_damping_Ns_per_mm, friction,
//         slip_velocity_mm_per_s
//
// Readers start from `base` and override only the keys present. Unknown
// keys throw ConfigError naming the key.

#pragma once

#include <nlohmann/json.hpp>

#include "handrl/sim/types.hpp"

namespace handrl::sim {

HandParams hand_from_json(const nlohmann::json& section, HandParams base = {});
ObjectParams object_from_json(const nlohmann::json& section, ObjectParams base);
SimConfig sim_config_from_json(const nlohmann::json& section, SimConfig base = {});

nlohmann::ordered_json to_json(const HandParams& hand);
nlohmann::ordered_json to_json(const ObjectParams& object);
nlohmann::ordered_json to_json(const SimConfig& config);

}  // namespace handrl::sim

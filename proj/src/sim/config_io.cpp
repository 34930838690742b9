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

#include "handrl/sim/config_io.hpp"

#include <functional>
#include <map>
#include <numbers>
#include <string>

#include "handrl/errors.hpp"

namespace handrl::sim {
namespace {

using nlohmann::json;
using Handlers = std::map<std::string, std::function<void(const json&)>>;

constexpr double kMm = 1e-3;
constexpr double kGram = 1e-3;
constexpr double kDeg = std::numbers::pi / 180.0;

double number(const json& value, const std::string& key) {
  if (!value.is_number()) throw ConfigError("'" + key + "' must be a number", key);
  return value.get<double>();
}

Range degree_range(const json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
    throw ConfigError("'" + key + "' must be a [lo, hi] pair of numbers", key);
  }
  return {value[0].get<double>() * kDeg, value[1].get<double>() * kDeg};
}

void apply(const json& section, const std::string& section_name, const Handlers& handlers) {
  if (section.is_null()) return;
  if (!section.is_object()) {
    throw ConfigError("section '" + section_name + "' must be an object", section_name);
  }
  for (const auto& [key, value] : section.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      throw ConfigError("unknown key '" + section_name + "." + key + "'", section_name + "." + key);
    }
    it->second(value);
  }
}

}  // namespace

HandParams hand_from_json(const json& section, HandParams base) {
  HandParams& h = base;
  const auto scaled = [](double& field, double scale, const char* key) {
    return [&field, scale, key](const json& v) { field = number(v, key) * scale; };
  };
  Handlers handlers{
      {"palm_mass_g", scaled(h.palm_mass, kGram, "palm_mass_g")},
      {"finger_mass_g", scaled(h.finger_mass, kGram, "finger_mass_g")},
      {"link_length_mm", scaled(h.link_length, kMm, "link_length_mm")},
      {"phalanx_diameter_mm", scaled(h.phalanx_radius, 0.5 * kMm, "phalanx_diameter_mm")},
      {"palm_width_mm", scaled(h.palm_width, kMm, "palm_width_mm")},
      {"palm_diameter_mm", scaled(h.palm_diameter, kMm, "palm_diameter_mm")},
      {"initial_hand_height_mm", scaled(h.initial_palm_height, kMm, "initial_hand_height_mm")},
      {"max_translation_mm", scaled(h.max_palm_translation, kMm, "max_translation_mm")},
      // N*s/mm in the table; applied as N*m*s/rad after the mm -> m scaling.
      {"joint_damping_Ns_per_mm", scaled(h.joint_damping, 1e3, "joint_damping_Ns_per_mm")},
      {"q1_limits_deg", [&](const json& v) { h.q1_limits = degree_range(v, "q1_limits_deg"); }},
      {"q2_limits_deg", [&](const json& v) { h.q2_limits = degree_range(v, "q2_limits_deg"); }},
      {"finger_mounts_mm",
       [&](const json& v) {
         if (!v.is_array() || v.size() != kNumFingers) {
           throw ConfigError("'finger_mounts_mm' must list three [x, y] pairs", "finger_mounts_mm");
         }
         for (int i = 0; i < kNumFingers; ++i) {
           const json& p = v[static_cast<std::size_t>(i)];
           if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
             throw ConfigError("'finger_mounts_mm' entries must be [x, y]", "finger_mounts_mm");
           }
           h.finger_mounts[i] = {p[0].get<double>() * kMm, p[1].get<double>() * kMm};
         }
       }},
      {"servo_kp_Nm_per_rad", scaled(h.servo_kp, 1.0, "servo_kp_Nm_per_rad")},
      {"servo_kd_Nms_per_rad", scaled(h.servo_kd, 1.0, "servo_kd_Nms_per_rad")},
      {"palm_kp_N_per_mm", scaled(h.palm_kp, 1e3, "palm_kp_N_per_mm")},
      {"palm_kd_Ns_per_mm", scaled(h.palm_kd, 1e3, "palm_kd_Ns_per_mm")},
      {"palm_force_limit_N", scaled(h.palm_force_limit, 1.0, "palm_force_limit_N")},
  };
  apply(section, "hand", handlers);
  h.validate();
  return h;
}

ObjectParams object_from_json(const json& section, ObjectParams base) {
  ObjectParams& o = base;
  const auto scaled = [](double& field, double scale, const char* key) {
    return [&field, scale, key](const json& v) { field = number(v, key) * scale; };
  };
  Handlers handlers{
      {"mass_g", scaled(o.mass, kGram, "mass_g")},
      {"radius_mm", scaled(o.radius, kMm, "radius_mm")},
      {"desired_height_mm", scaled(o.desired_center_height, kMm, "desired_height_mm")},
      {"stiffness_x_N_per_mm", scaled(o.stiffness_x, 1e3, "stiffness_x_N_per_mm")},
      {"damping_x_Ns_per_mm", scaled(o.damping_x, 1e3, "damping_x_Ns_per_mm")},
      {"damping_z_Ns_per_mm", scaled(o.damping_z, 1e3, "damping_z_Ns_per_mm")},
      {"damping_rot_Ns_per_rad", scaled(o.damping_rot, 1.0, "damping_rot_Ns_per_rad")},
  };
  apply(section, "object", handlers);
  o.validate();
  return o;
}

SimConfig sim_config_from_json(const json& section, SimConfig base) {
  SimConfig& c = base;
  const auto scaled = [](double& field, double scale, const char* key) {
    return [&field, scale, key](const json& v) { field = number(v, key) * scale; };
  };
  Handlers handlers{
      {"control_dt_ms", scaled(c.control_dt, 1e-3, "control_dt_ms")},
      {"physics_substeps",
       [&](const json& v) {
         if (!v.is_number_integer()) {
           throw ConfigError("'physics_substeps' must be an integer", "physics_substeps");
         }
         c.physics_substeps = v.get<int>();
       }},
      {"gravity_m_per_s2", scaled(c.gravity, 1.0, "gravity_m_per_s2")},
      {"contact_stiffness_N_per_mm", scaled(c.contact_stiffness, 1e3, "contact_stiffness_N_per_mm")},
      {"contact_damping_Ns_per_mm", scaled(c.contact_damping, 1e3, "contact_damping_Ns_per_mm")},
      {"friction", scaled(c.friction, 1.0, "friction")},
      {"slip_velocity_mm_per_s", scaled(c.slip_velocity, kMm, "slip_velocity_mm_per_s")},
  };
  apply(section, "sim", handlers);
  c.validate();
  return c;
}

nlohmann::ordered_json to_json(const HandParams& h) {
  nlohmann::ordered_json j;
  j["palm_mass_g"] = h.palm_mass / kGram;
  j["finger_mass_g"] = h.finger_mass / kGram;
  j["link_length_mm"] = h.link_length / kMm;
  j["phalanx_diameter_mm"] = 2.0 * h.phalanx_radius / kMm;
  j["palm_width_mm"] = h.palm_width / kMm;
  j["palm_diameter_mm"] = h.palm_diameter / kMm;
  j["initial_hand_height_mm"] = h.initial_palm_height / kMm;
  j["max_translation_mm"] = h.max_palm_translation / kMm;
  j["joint_damping_Ns_per_mm"] = h.joint_damping / 1e3;
  j["q1_limits_deg"] = {h.q1_limits.lo / kDeg, h.q1_limits.hi / kDeg};
  j["q2_limits_deg"] = {h.q2_limits.lo / kDeg, h.q2_limits.hi / kDeg};
  auto mounts = nlohmann::ordered_json::array();
  for (const auto& m : h.finger_mounts) mounts.push_back({m.x() / kMm, m.y() / kMm});
  j["finger_mounts_mm"] = mounts;
  j["servo_kp_Nm_per_rad"] = h.servo_kp;
  j["servo_kd_Nms_per_rad"] = h.servo_kd;
  j["palm_kp_N_per_mm"] = h.palm_kp / 1e3;
  j["palm_kd_Ns_per_mm"] = h.palm_kd / 1e3;
  j["palm_force_limit_N"] = h.palm_force_limit;
  return j;
}

nlohmann::ordered_json to_json(const ObjectParams& o) {
  nlohmann::ordered_json j;
  j["mass_g"] = o.mass / kGram;
  j["radius_mm"] = o.radius / kMm;
  j["desired_height_mm"] = o.desired_center_height / kMm;
  j["stiffness_x_N_per_mm"] = o.stiffness_x / 1e3;
  j["damping_x_Ns_per_mm"] = o.damping_x / 1e3;
  j["damping_z_Ns_per_mm"] = o.damping_z / 1e3;
  j["damping_rot_Ns_per_rad"] = o.damping_rot;
  return j;
}

nlohmann::ordered_json to_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["control_dt_ms"] = c.control_dt / 1e-3;
  j["physics_substeps"] = c.physics_substeps;
  j["gravity_m_per_s2"] = c.gravity;
  j["contact_stiffness_N_per_mm"] = c.contact_stiffness / 1e3;
  j["contact_damping_Ns_per_mm"] = c.contact_damping / 1e3;
  j["friction"] = c.friction;
  j["slip_velocity_mm_per_s"] = c.slip_velocity / kMm;
  return j;
}

}  // namespace handrl::sim

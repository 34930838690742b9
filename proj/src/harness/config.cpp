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

#include "handrl/harness/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "handrl/errors.hpp"
#include "handrl/sim/config_io.hpp"

namespace handrl::harness {
namespace {

using nlohmann::json;

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer", key);
  return v.get<int>();
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number", key);
  return v.get<double>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string", key);
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false", key);
  return v.get<bool>();
}

void apply_ppo(const json& section, ppo::PpoHyperparams& p) {
  if (!section.is_object()) throw ConfigError("section 'ppo' must be an object", "ppo");
  for (const auto& [key, v] : section.items()) {
    const std::string k = "ppo." + key;
    if (key == "epochs") p.epochs = integer(v, k);
    else if (key == "gamma") p.gamma = number(v, k);
    else if (key == "entropy_coef") p.entropy_coef = number(v, k);
    else if (key == "gae_lambda") p.gae_lambda = number(v, k);
    else if (key == "minibatch_size") p.minibatch_size = integer(v, k);
    else if (key == "clip_epsilon") p.clip_epsilon = number(v, k);
    else if (key == "value_coef") p.value_coef = number(v, k);
    else if (key == "activation") p.activation = text(v, k);
    else if (key == "kernel_threads") p.kernel_threads = integer(v, k);
    else if (key == "adam_stepsize_base") p.adam_stepsize_base = number(v, k);
    else if (key == "hidden_layers") {
      if (!v.is_array()) throw ConfigError("'" + k + "' must be an array of integers", k);
      p.hidden_layers.clear();
      for (const auto& w : v) p.hidden_layers.push_back(integer(w, k));
    } else {
      throw ConfigError("unknown key '" + k + "'", k);
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1", "trials");
  if (episodes < 1) throw ConfigError("episodes must be >= 1", "episodes");
  if (workers < 1) throw ConfigError("workers must be >= 1", "workers");
  if (phase_switch_episode > episodes) {
    throw ConfigError("phase_switch_episode must not exceed episodes", "phase_switch_episode");
  }
  if (!(lift_scale_per_m >= 0.0)) throw ConfigError("lift_scale_per_m must be >= 0", "lift_scale_per_m");
  if (out.empty()) throw ConfigError("output directory must not be empty", "out");
  lr_schedule().validate();
  model().validate();
  ppo.validate();
  if (ppo.minibatch_size > kEpisodeSteps) {
    throw ConfigError("ppo.minibatch_size must not exceed the rollout length", "ppo.minibatch_size");
  }
}

curriculum::LrSchedule ExperimentConfig::lr_schedule() const {
  curriculum::LrSchedule s;
  s.kind = scheduler;
  s.phi = phi;
  s.eta = eta;
  s.total_samples = static_cast<std::int64_t>(episodes) * kEpisodeSteps;
  s.phase1_samples = static_cast<std::int64_t>(switch_episode()) * kEpisodeSteps;
  // A phase 1 of zero episodes leaves only the second branch in use.
  if (s.phase1_samples == 0) s.phase1_samples = 1;
  return s;
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file", path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object: " + path.string());
  return j;
}

ExperimentConfig parse_config(const json& file, const CliOverrides& flags) {
  if (!file.is_null() && !file.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  const json empty = json::object();
  const json& f = file.is_null() ? empty : file;

  // The object id decides the preset that object_params then refines.
  std::string object_name = f.contains("object") ? text(f["object"], "object") : "O1";
  if (flags.object) object_name = *flags.object;
  c.object = sim::parse_object_id(object_name);
  c.object_params = sim::ObjectParams::preset(c.object);

  const std::map<std::string, std::function<void(const json&)>> handlers{
      {"curriculum", [&](const json& v) { c.curriculum = curriculum::parse_curriculum_id(text(v, "curriculum")); }},
      {"tactile", [&](const json& v) { c.tactile = sim::parse_tactile_mode(text(v, "tactile")); }},
      {"object", [](const json&) {}},
      {"trials", [&](const json& v) { c.trials = integer(v, "trials"); }},
      {"episodes", [&](const json& v) { c.episodes = integer(v, "episodes"); }},
      {"base_seed",
       [&](const json& v) {
         if (!v.is_number_unsigned()) throw ConfigError("'base_seed' must be a non-negative integer", "base_seed");
         c.base_seed = v.get<std::uint64_t>();
       }},
      {"phase_switch_episode", [&](const json& v) { c.phase_switch_episode = integer(v, "phase_switch_episode"); }},
      {"scheduler", [&](const json& v) { c.scheduler = curriculum::parse_schedule_kind(text(v, "scheduler")); }},
      {"phi", [&](const json& v) { c.phi = number(v, "phi"); }},
      {"eta", [&](const json& v) { c.eta = number(v, "eta"); }},
      {"lift_scale_per_m", [&](const json& v) { c.lift_scale_per_m = number(v, "lift_scale_per_m"); }},
      {"observation_normalization",
       [&](const json& v) { c.observation_normalization = boolean(v, "observation_normalization"); }},
      {"workers", [&](const json& v) { c.workers = integer(v, "workers"); }},
      {"out", [&](const json& v) { c.out = text(v, "out"); }},
      {"hand", [&](const json& v) { c.hand = sim::hand_from_json(v, c.hand); }},
      {"object_params", [&](const json& v) { c.object_params = sim::object_from_json(v, c.object_params); }},
      {"sim", [&](const json& v) { c.sim = sim::sim_config_from_json(v, c.sim); }},
      {"ppo", [&](const json& v) { apply_ppo(v, c.ppo); }},
  };
  for (const auto& [key, value] : f.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError("unknown key '" + key + "'", key);
    it->second(value);
  }

  if (flags.curriculum) c.curriculum = curriculum::parse_curriculum_id(*flags.curriculum);
  if (flags.tactile) c.tactile = sim::parse_tactile_mode(*flags.tactile);
  if (flags.trials) c.trials = *flags.trials;
  if (flags.episodes) c.episodes = *flags.episodes;
  if (flags.base_seed) c.base_seed = *flags.base_seed;
  if (flags.scheduler) c.scheduler = curriculum::parse_schedule_kind(*flags.scheduler);
  if (flags.phi) c.phi = *flags.phi;
  if (flags.eta) c.eta = *flags.eta;
  if (flags.workers) c.workers = *flags.workers;
  if (flags.out) c.out = *flags.out;

  c.validate();
  return c;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["curriculum"] = curriculum::to_string(c.curriculum);
  j["tactile"] = sim::to_string(c.tactile);
  j["object"] = sim::to_string(c.object);
  j["trials"] = c.trials;
  j["episodes"] = c.episodes;
  j["base_seed"] = c.base_seed;
  j["phase_switch_episode"] = c.phase_switch_episode;
  j["scheduler"] = curriculum::to_string(c.scheduler);
  j["phi"] = c.phi;
  j["eta"] = c.eta;
  j["lift_scale_per_m"] = c.lift_scale_per_m;
  j["observation_normalization"] = c.observation_normalization;
  j["workers"] = c.workers;
  j["out"] = c.out.generic_string();
  j["hand"] = sim::to_json(c.hand);
  j["object_params"] = sim::to_json(c.object_params);
  j["sim"] = sim::to_json(c.sim);
  nlohmann::ordered_json p;
  p["adam_stepsize_base"] = c.ppo.adam_stepsize_base;
  p["epochs"] = c.ppo.epochs;
  p["gamma"] = c.ppo.gamma;
  p["entropy_coef"] = c.ppo.entropy_coef;
  p["gae_lambda"] = c.ppo.gae_lambda;
  p["minibatch_size"] = c.ppo.minibatch_size;
  p["clip_epsilon"] = c.ppo.clip_epsilon;
  p["value_coef"] = c.ppo.value_coef;
  p["hidden_layers"] = c.ppo.hidden_layers;
  p["activation"] = c.ppo.activation;
  p["kernel_threads"] = c.ppo.kernel_threads;
  j["ppo"] = p;
  return j;
}

}  // namespace handrl::harness

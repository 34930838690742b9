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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "handrl/errors.hpp"
#include "handrl/harness/config.hpp"
#include "handrl/harness/experiment.hpp"
#include "handrl/harness/trial.hpp"
#include "handrl/metrics/export.hpp"

using namespace handrl;
using namespace handrl::harness;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "handrl_unit_harness" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(const std::string& out, int trials, int episodes) {
  CliOverrides flags;
  flags.trials = trials;
  flags.episodes = episodes;
  flags.out = fresh_dir(out).string();
  return parse_config(nlohmann::json::object(), flags);
}

}  // namespace

TEST_CASE("an empty config resolves to the table defaults") {
  const ExperimentConfig c = parse_config(nlohmann::json::object());
  CHECK(c.curriculum == curriculum::CurriculumId::kC3);
  CHECK(c.tactile == sim::TactileMode::kNone);
  CHECK(c.object == sim::ObjectId::kO1);
  CHECK(c.trials == 60);
  CHECK(c.episodes == 2000);
  CHECK(c.scheduler == curriculum::ScheduleKind::kPiecewise);
  CHECK(c.switch_episode() == 1000);
  CHECK(c.object_params.mass == doctest::Approx(0.050));
  CHECK(c.hand.total_mass() == doctest::Approx(0.304));
  CHECK(c.ppo.epochs == 8);
  CHECK(c.ppo.gamma == 0.99);
  CHECK(c.ppo.entropy_coef == 0.02);
  CHECK(c.ppo.gae_lambda == 0.85);
  CHECK(c.ppo.minibatch_size == 64);
  CHECK(c.ppo.adam_stepsize_base == 1e-5);
  const auto sched = c.lr_schedule();
  CHECK(sched.phase1_samples == 1'000'000);
  CHECK(sched.total_samples == 2'000'000);
}

TEST_CASE("flags override the file, which overrides the defaults") {
  const nlohmann::json file = {{"object", "O2"}, {"trials", 5}, {"curriculum", "C1"}, {"phi", 2e-5},
                               {"object_params", {{"damping_z_Ns_per_mm", 1e-4}}},
                               {"ppo", {{"epochs", 4}}}};
  const ExperimentConfig from_file = parse_config(file);
  CHECK(from_file.object == sim::ObjectId::kO2);
  CHECK(from_file.object_params.radius == doctest::Approx(0.030));
  CHECK(from_file.object_params.damping_z == doctest::Approx(0.1));
  CHECK(from_file.trials == 5);
  CHECK(from_file.curriculum == curriculum::CurriculumId::kC1);
  CHECK(from_file.phi == 2e-5);
  CHECK(from_file.ppo.epochs == 4);

  CliOverrides flags;
  flags.object = "O3";
  flags.trials = 2;
  const ExperimentConfig merged = parse_config(file, flags);
  CHECK(merged.object == sim::ObjectId::kO3);
  CHECK(merged.object_params.mass == doctest::Approx(0.005));
  CHECK(merged.object_params.radius == doctest::Approx(0.035));
  CHECK(merged.trials == 2);
  CHECK(merged.curriculum == curriculum::CurriculumId::kC1);
}

TEST_CASE("bad configurations name the offending key") {
  const auto key_of = [](const nlohmann::json& file, const CliOverrides& flags = {}) {
    try {
      parse_config(file, flags);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<accepted>");
  };
  CliOverrides c9;
  c9.curriculum = "C9";
  CHECK(key_of(nlohmann::json::object(), c9) == "curriculum");
  CHECK(key_of({{"trails", 3}}) == "trails");
  CHECK(key_of({{"trials", 0}}) == "trials");
  CHECK(key_of({{"episodes", "many"}}) == "episodes");
  CHECK(key_of({{"ppo", {{"learning_rate", 1}}}}) == "ppo.learning_rate");
  CHECK(key_of({{"hand", {{"palm_mass_g", -3}}}}) == "palm_mass");
  CHECK(key_of({{"scheduler", "cosine"}}) == "scheduler");
  CHECK(key_of({{"tactile", "force6d"}}) == "tactile");
  CHECK_THROWS_AS(parse_config(nlohmann::json::array()), ConfigError);
}

TEST_CASE("the echoed configuration parses back to the same settings") {
  CliOverrides flags;
  flags.curriculum = "C4";
  flags.tactile = "force3d";
  flags.object = "O4";
  flags.base_seed = 1234;
  const ExperimentConfig c = parse_config({{"ppo", {{"hidden_layers", {32, 16}}}}}, flags);
  const ExperimentConfig again = parse_config(nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(again).dump() == to_json(c).dump());
  CHECK(again.ppo.hidden_layers == std::vector<int>{32, 16});
  CHECK(again.base_seed == 1234);
}

TEST_CASE("trial seeds depend only on the base seed and trial index") {
  std::set<std::uint64_t> seeds;
  CliOverrides flags;
  flags.base_seed = 500;
  for (auto id : curriculum::kAllCurricula) {
    for (auto mode : {"none", "force3d"}) {
      flags.curriculum = std::string(curriculum::to_string(id));
      flags.tactile = mode;
      const ExperimentConfig c = parse_config(nlohmann::json::object(), flags);
      for (int i = 0; i < c.trials; ++i) {
        CHECK(c.trial_seed(i) == 500u + static_cast<unsigned>(i));
        seeds.insert(c.trial_seed(i));
      }
    }
  }
  CHECK(seeds.size() == 60);
}

TEST_CASE("the learning-rate breakpoint coincides with the reward switch") {
  CliOverrides flags;
  flags.curriculum = "C1";
  flags.episodes = 2000;
  const ExperimentConfig c = parse_config(nlohmann::json::object(), flags);
  const auto sched = c.lr_schedule();
  const auto spec = c.curriculum_spec();
  // Episode e is followed by an update at 1000 (e + 1) samples.
  const auto lr_after = [&](int e) { return curriculum::learning_rate(sched, 1000LL * (e + 1)); };
  CHECK(curriculum::phase_at(spec, 999) == 1);
  CHECK(curriculum::coefficients_at(spec, 999).rotation == 0.0);
  CHECK(lr_after(999) == 0.0);
  CHECK(curriculum::phase_at(spec, 1000) == 2);
  CHECK(lr_after(1000) == doctest::Approx(0.5 * c.eta).epsilon(1e-3));
  CHECK(lr_after(1999) == 0.0);
  CHECK(lr_after(0) == doctest::Approx(c.phi * 0.999));
}

TEST_CASE("a single trial") {
  ExperimentConfig c = small_config("single", 1, 1);
  SUBCASE("one episode yields one row after one thousand samples") {
    const TrialResult r = run_trial(c, 0, {false});
    CHECK(r.record.status == TrialStatus::kCompleted);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].lr == doctest::Approx(curriculum::learning_rate(c.lr_schedule(), 1000)));
    CHECK(r.record.episodes_completed == 1);
    CHECK(r.policy.adam.step == 8 * 16);
  }
  SUBCASE("reruns are bit-identical") {
    c.episodes = 3;
    const TrialResult a = run_trial(c, 0, {false});
    const TrialResult b = run_trial(c, 0, {false});
    CHECK(a.rows == b.rows);
    CHECK(a.policy == b.policy);
    const TrialResult other = run_trial(c, 1, {false});
    CHECK(!(other.rows == a.rows));
  }
  SUBCASE("phase tags and coefficients switch at the configured episode") {
    c.curriculum = curriculum::CurriculumId::kC1;
    c.episodes = 4;
    const TrialResult r = run_trial(c, 0, {false});
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows[0].phase == 1);
    CHECK(r.rows[1].phase == 1);
    CHECK(r.rows[2].phase == 2);
    CHECK(r.rows[3].phase == 2);
    // Lift-only phase: every step reward is a non-positive penalty.
    CHECK(r.rows[0].cum_reward <= 0.0);
    CHECK(r.rows[1].cum_reward <= 0.0);
    CHECK(r.rows[1].lr == 0.0);
    CHECK(r.rows[3].lr == 0.0);
  }
  SUBCASE("numeric blow-ups fail the trial without throwing") {
    c.phi = 1e300;
    c.episodes = 3;
    const TrialResult r = run_trial(c, 0, {false});
    CHECK(r.record.status == TrialStatus::kFailed);
    CHECK(!r.record.error.empty());
  }
}

TEST_CASE("experiments") {
  SUBCASE("worker count does not change the merged rows") {
    ExperimentConfig serial = small_config("workers1", 3, 2);
    ExperimentConfig parallel = serial;
    parallel.out = fresh_dir("workers3");
    parallel.workers = 3;
    const auto a = run_experiment(serial);
    const auto b = run_experiment(parallel);
    CHECK(a.completed == 3);
    CHECK(a.rows == b.rows);
    CHECK(slurp(serial.out / "rows.csv") == slurp(parallel.out / "rows.csv"));
    CHECK(slurp(serial.out / "summary.json") == slurp(parallel.out / "summary.json"));
    CHECK(std::filesystem::exists(serial.out / "checkpoints" / "trial_0002.ckpt"));
    CHECK(a.records[2].seed == serial.base_seed + 2);
  }
  SUBCASE("summarize is repeatable and rebuilds the same outputs") {
    ExperimentConfig c = small_config("summarize", 2, 2);
    run_experiment(c);
    const std::string rows = slurp(c.out / "rows.csv");
    const std::string summary = slurp(c.out / "summary.json");
    const std::string points = slurp(c.out / "plot_points.csv");
    summarize(c.out);
    summarize(c.out);
    CHECK(slurp(c.out / "rows.csv") == rows);
    CHECK(slurp(c.out / "summary.json") == summary);
    CHECK(slurp(c.out / "plot_points.csv") == points);
    CHECK(std::count(points.begin(), points.end(), '\n') == 3);
  }
  SUBCASE("one trial gives zero spread") {
    ExperimentConfig c = small_config("one_trial", 1, 2);
    run_experiment(c);
    const auto summary = nlohmann::json::parse(slurp(c.out / "summary.json"));
    for (const auto& e : summary["episodes"]) CHECK(e["cum_reward"]["std"] == 0.0);
  }
  SUBCASE("failed trials are listed and left out of the aggregates") {
    ExperimentConfig c = small_config("failed", 2, 2);
    run_experiment(c);
    // Mark trial 1 failed in the manifest and rebuild.
    auto manifest = nlohmann::json::parse(slurp(c.out / "manifest.json"));
    manifest["trials"][1]["status"] = "failed";
    manifest["trials"][1]["error"] = "simulation diverged";
    std::ofstream(c.out / "manifest.json") << manifest.dump(2);
    const auto s = summarize(c.out);
    CHECK(s.completed == 1);
    CHECK(s.failed == 1);
    for (const auto& row : s.rows) CHECK(row.trial == 0);
    const auto summary = nlohmann::json::parse(slurp(c.out / "summary.json"));
    CHECK(summary["trials"] == nlohmann::json::array({0}));
    CHECK(summary["meta"]["failed_trials"][0]["trial"] == 1);

    ExperimentConfig blowup = small_config("blowup", 2, 3);
    blowup.phi = 1e300;
    const auto r = run_experiment(blowup);
    CHECK(r.failed == 2);
    CHECK(slurp(blowup.out / "rows.csv") == std::string(metrics::kRowHeader) + "\n");
  }
  SUBCASE("missing trial rows are reported by trial") {
    ExperimentConfig c = small_config("missing", 2, 2);
    run_experiment(c);
    std::filesystem::remove(c.out / "trials" / "trial_0001.csv");
    try {
      summarize(c.out);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("trial 1") != std::string::npos);
    }
    CHECK_THROWS_AS(summarize(fresh_dir("nothing_here")), IoError);
  }
}

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

#include "handrl/harness/experiment.hpp"

#include <exception>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "handrl/errors.hpp"
#include "handrl/metrics/export.hpp"

namespace handrl::harness {
namespace {

using nlohmann::ordered_json;

constexpr int kManifestSchemaVersion = 1;

ordered_json manifest_json(const std::vector<TrialRecord>& records) {
  ordered_json j;
  j["schema_version"] = kManifestSchemaVersion;
  auto trials = ordered_json::array();
  for (const auto& r : records) {
    ordered_json t;
    t["trial"] = r.trial;
    t["seed"] = r.seed;
    t["status"] = to_string(r.status);
    t["episodes_completed"] = r.episodes_completed;
    t["checkpoint"] = r.checkpoint;
    t["error"] = r.error;
    t["duration_s"] = r.duration_s;
    trials.push_back(std::move(t));
  }
  j["trials"] = std::move(trials);
  return j;
}

std::vector<TrialRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest", path);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("trials") || !j["trials"].is_array()) {
    throw IoError("malformed manifest", path);
  }
  std::vector<TrialRecord> records;
  try {
    for (const auto& t : j["trials"]) {
      TrialRecord r;
      r.trial = t.at("trial").get<int>();
      r.seed = t.at("seed").get<std::uint64_t>();
      const auto status = t.at("status").get<std::string>();
      if (status != "completed" && status != "failed") throw IoError("unknown trial status", path);
      r.status = status == "completed" ? TrialStatus::kCompleted : TrialStatus::kFailed;
      r.episodes_completed = t.at("episodes_completed").get<int>();
      r.checkpoint = t.at("checkpoint").get<std::string>();
      r.error = t.at("error").get<std::string>();
      r.duration_s = t.at("duration_s").get<double>();
      records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed manifest entry (") + e.what() + ")", path);
  }
  return records;
}

ordered_json summary_meta(const ExperimentConfig& c, const std::vector<TrialRecord>& records) {
  ordered_json meta;
  meta["curriculum"] = curriculum::to_string(c.curriculum);
  meta["tactile"] = sim::to_string(c.tactile);
  meta["object"] = sim::to_string(c.object);
  meta["scheduler"] = curriculum::to_string(c.scheduler);
  meta["phi"] = c.phi;
  meta["eta"] = c.eta;
  meta["base_seed"] = c.base_seed;
  meta["episodes"] = c.episodes;
  meta["phase_switch_episode"] = c.switch_episode();
  meta["trials_requested"] = c.trials;
  auto failed = ordered_json::array();
  for (const auto& r : records) {
    if (r.status != TrialStatus::kFailed) continue;
    ordered_json f;
    f["trial"] = r.trial;
    f["seed"] = r.seed;
    f["episodes_completed"] = r.episodes_completed;
    f["error"] = r.error;
    failed.push_back(std::move(f));
  }
  meta["failed_trials"] = std::move(failed);
  return meta;
}

}  // namespace

std::string to_string(TrialStatus status) {
  return status == TrialStatus::kCompleted ? "completed" : "failed";
}

ExperimentSummary summarize(const std::filesystem::path& dir) {
  const ExperimentConfig config = parse_config(load_config_file(dir / "config.json"));
  ExperimentSummary summary;
  summary.records = read_manifest(dir / "manifest.json");

  std::string problems;
  for (const auto& r : summary.records) {
    if (r.status == TrialStatus::kFailed) {
      ++summary.failed;
      continue;
    }
    ++summary.completed;
    const auto path = dir / "trials" / (trial_file_stem(r.trial) + ".csv");
    std::vector<metrics::EpisodeMetrics> rows;
    try {
      rows = metrics::read_rows(path);
    } catch (const IoError& e) {
      problems += "\n  trial " + std::to_string(r.trial) + ": " + e.what();
      continue;
    }
    bool consistent = rows.size() == static_cast<std::size_t>(config.episodes);
    for (std::size_t i = 0; consistent && i < rows.size(); ++i) {
      consistent = rows[i].trial == r.trial && rows[i].episode == static_cast<int>(i);
    }
    if (!consistent) {
      problems += "\n  trial " + std::to_string(r.trial) + ": expected episodes 0.." +
                  std::to_string(config.episodes - 1) + ", found " + std::to_string(rows.size()) +
                  " rows in " + path.string();
      continue;
    }
    summary.rows.insert(summary.rows.end(), rows.begin(), rows.end());
  }
  if (!problems.empty()) throw IoError("missing or corrupt trial rows:" + problems, dir);

  metrics::AggregateStats stats;
  if (!summary.rows.empty()) stats = metrics::aggregate(summary.rows);
  metrics::export_rows(summary.rows, dir / "rows.csv");
  metrics::export_summary(stats, summary_meta(config, summary.records), dir / "summary.json");
  const auto points = metrics::plot_points(stats);
  metrics::export_plot_points(points, dir / "plot_points.csv");
  return summary;
}

ExperimentSummary run_experiment(const ExperimentConfig& config, const TrialCallback& on_trial) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create output directory (" + ec.message() + ")", config.out);
  metrics::write_text_file(config.out / "config.json", to_json(config).dump(2) + "\n");

  std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
  std::vector<std::exception_ptr> io_errors(records.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers)
  for (int i = 0; i < config.trials; ++i) {
    try {
      TrialResult result = run_trial(config, i);
      records[static_cast<std::size_t>(i)] = std::move(result.record);
    } catch (...) {
      io_errors[static_cast<std::size_t>(i)] = std::current_exception();
      records[static_cast<std::size_t>(i)].trial = i;
      records[static_cast<std::size_t>(i)].seed = config.trial_seed(i);
      records[static_cast<std::size_t>(i)].status = TrialStatus::kFailed;
      records[static_cast<std::size_t>(i)].error = "aborted by an I/O error";
    }
    if (on_trial) {
#pragma omp critical(handrl_trial_callback)
      on_trial(records[static_cast<std::size_t>(i)]);
    }
  }

  metrics::write_text_file(config.out / "manifest.json", manifest_json(records).dump(2) + "\n");
  for (const auto& err : io_errors) {
    if (err) std::rethrow_exception(err);
  }
  return summarize(config.out);
}

}  // namespace handrl::harness

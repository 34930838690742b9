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

// Metric files.
//
// Row file (UTF-8 CSV, one line per episode, '\n' line endings):
//   trial,episode,phase,lr,cum_reward,mean_lift_mm,lift_success_pct,completed_rotations
// Real numbers use the shortest text that parses back to the same double.
//
// Plot-point file: episode,lift_success_pct,completed_rotations
//
// Summary file: JSON object with "schema_version", caller-supplied metadata,
// the contributing trial ids and per-episode statistics.

#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "handrl/metrics/metrics.hpp"

namespace handrl::metrics {

inline constexpr std::string_view kRowHeader =
    "trial,episode,phase,lr,cum_reward,mean_lift_mm,lift_success_pct,completed_rotations";
inline constexpr std::string_view kPlotHeader = "episode,lift_success_pct,completed_rotations";
inline constexpr int kSummarySchemaVersion = 1;

std::string format_double(double value);
std::string format_row(const EpisodeMetrics& row);

// All writers throw IoError naming the path.
void export_rows(std::span<const EpisodeMetrics> rows, const std::filesystem::path& path);
// Throws IoError on a missing file, a wrong header or a malformed line.
std::vector<EpisodeMetrics> read_rows(const std::filesystem::path& path);

nlohmann::ordered_json summary_json(const AggregateStats& stats, const nlohmann::ordered_json& meta);
void export_summary(const AggregateStats& stats, const nlohmann::ordered_json& meta,
                    const std::filesystem::path& path);
void export_plot_points(std::span<const PlotPoint> points, const std::filesystem::path& path);

// Appends rows to a trial file and flushes after each one. A new or empty
// file gets the header first.
class RowAppender {
 public:
  explicit RowAppender(const std::filesystem::path& path);
  void append(const EpisodeMetrics& row);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Writes `text` to `path` through a temporary file and a rename.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace handrl::metrics

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

#include "handrl/metrics/export.hpp"

#include <charconv>
#include <sstream>
#include <system_error>

#include "handrl/errors.hpp"

namespace handrl::metrics {

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string format_row(const EpisodeMetrics& r) {
  std::string line;
  line.reserve(128);
  line += std::to_string(r.trial);
  line += ',';
  line += std::to_string(r.episode);
  line += ',';
  line += std::to_string(r.phase);
  for (double v : {r.lr, r.cum_reward, r.mean_lift_mm, r.lift_success_pct, r.completed_rotations}) {
    line += ',';
    line += format_double(v);
  }
  return line;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", tmp);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("write failed", tmp);
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " (" + ec.message() + ")", path);
}

void export_rows(std::span<const EpisodeMetrics> rows, const std::filesystem::path& path) {
  std::string text(kRowHeader);
  text += '\n';
  for (const auto& row : rows) {
    text += format_row(row);
    text += '\n';
  }
  write_text_file(path, text);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

std::vector<EpisodeMetrics> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open row file", path);
  std::string line;
  if (!std::getline(in, line) || line != kRowHeader) throw IoError("missing or wrong header", path);
  std::vector<EpisodeMetrics> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    EpisodeMetrics r;
    const bool ok = f.size() == 8 && parse_number(f[0], r.trial) && parse_number(f[1], r.episode) &&
                    parse_number(f[2], r.phase) && parse_number(f[3], r.lr) &&
                    parse_number(f[4], r.cum_reward) && parse_number(f[5], r.mean_lift_mm) &&
                    parse_number(f[6], r.lift_success_pct) &&
                    parse_number(f[7], r.completed_rotations);
    if (!ok) throw IoError("malformed row at line " + std::to_string(line_no), path);
    rows.push_back(r);
  }
  return rows;
}

namespace {

nlohmann::ordered_json to_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["median"] = s.median;
  j["q25"] = s.q25;
  j["q75"] = s.q75;
  return j;
}

}  // namespace

nlohmann::ordered_json summary_json(const AggregateStats& stats, const nlohmann::ordered_json& meta) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["meta"] = meta;
  j["trials"] = stats.trials;
  auto episodes = nlohmann::ordered_json::array();
  for (const auto& e : stats.episodes) {
    nlohmann::ordered_json row;
    row["episode"] = e.episode;
    row["phase"] = e.phase;
    row["trials"] = e.trials;
    row["lr"] = to_json(e.lr);
    row["cum_reward"] = to_json(e.cum_reward);
    row["mean_lift_mm"] = to_json(e.mean_lift_mm);
    row["lift_success_pct"] = to_json(e.lift_success_pct);
    row["completed_rotations"] = to_json(e.completed_rotations);
    episodes.push_back(std::move(row));
  }
  j["episodes"] = std::move(episodes);
  return j;
}

void export_summary(const AggregateStats& stats, const nlohmann::ordered_json& meta,
                    const std::filesystem::path& path) {
  write_text_file(path, summary_json(stats, meta).dump(2) + "\n");
}

void export_plot_points(std::span<const PlotPoint> points, const std::filesystem::path& path) {
  std::string text(kPlotHeader);
  text += '\n';
  for (const auto& p : points) {
    text += std::to_string(p.episode);
    text += ',';
    text += format_double(p.lift_success_pct);
    text += ',';
    text += format_double(p.completed_rotations);
    text += '\n';
  }
  write_text_file(path, text);
}

RowAppender::RowAppender(const std::filesystem::path& path) : path_(path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw IoError("cannot open row file for appending", path);
  if (fresh) {
    out_ << kRowHeader << '\n';
    out_.flush();
    if (!out_) throw IoError("write failed", path);
  }
}

void RowAppender::append(const EpisodeMetrics& row) {
  out_ << format_row(row) << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed", path_);
}

}  // namespace handrl::metrics

// Copyright 2026 The hent Authors
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

#include "hent/table.hpp"

#include "text_util.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hent {

namespace {

using detail::format_double;

const char* const kShared[] = {"index",   "axis_value", "pump_power", "n_p",
                               "g",       "coupling_ratio", "r0",     "delta_t",
                               "r_e",     "heating",    "channels",   "validity_violation",
                               "target_reached"};
const char* const kAnalytic[] = {"delivered_rate", "success_probability", "fidelity", "ebit_rate"};
const char* const kTrajectory[] = {"traj_fidelity", "traj_fidelity_se", "traj_rate", "traj_rate_se",
                                   "traj_heralds"};

bool analytic_columns(const Scenario& s) { return s.engine != Engine::Trajectory; }
bool trajectory_columns(const Scenario& s) { return s.engine != Engine::Analytic; }

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::vector<std::string> table_schema(const Scenario& s) {
  std::vector<std::string> cols(std::begin(kShared), std::end(kShared));
  for (const auto& v : s.variants) {
    const std::string prefix = v.name() + ".";
    if (analytic_columns(s))
      for (const char* c : kAnalytic) cols.push_back(prefix + c);
    if (trajectory_columns(s))
      for (const char* c : kTrajectory) cols.push_back(prefix + c);
  }
  return cols;
}

std::vector<std::string> table_row(const RateFidelityPoint& p, const Scenario& s) {
  if (p.variants.size() != s.variants.size())
    throw std::invalid_argument("point does not match the scenario's variant list");
  std::vector<std::string> row = {
      std::to_string(p.index),      format_double(p.axis_value), format_double(p.pump_power),
      format_double(p.n_p),         format_double(p.g),          format_double(p.coupling_ratio),
      format_double(p.r0),          format_double(p.delta_t),    format_double(p.r_e),
      format_double(p.heating),     std::to_string(p.channels),  flag(p.validity_violation),
      flag(p.target_reached)};
  const std::string nan = format_double(std::numeric_limits<double>::quiet_NaN());
  for (const auto& v : p.variants) {
    if (analytic_columns(s)) {
      row.push_back(format_double(v.op.delivered_rate));
      row.push_back(format_double(v.op.success_probability));
      row.push_back(format_double(v.op.fidelity));
      row.push_back(format_double(v.op.ebit_rate));
    }
    if (trajectory_columns(s)) {
      if (v.trajectory) {
        row.push_back(format_double(v.trajectory->fidelity));
        row.push_back(format_double(v.trajectory->fidelity_se));
        row.push_back(format_double(v.trajectory->rate));
        row.push_back(format_double(v.trajectory->rate_se));
        row.push_back(std::to_string(v.trajectory->heralds));
      } else {
        for (int i = 0; i < 4; ++i) row.push_back(nan);
        row.push_back("0");
      }
    }
  }
  return row;
}

void write_table(const std::vector<RateFidelityPoint>& points, const Scenario& s, std::ostream& out) {
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table_schema(s));
  for (const auto& p : points) line(table_row(p, s));
}

void emit_table(const std::vector<RateFidelityPoint>& points, const Scenario& s,
                const std::string& path) {
  if (points.empty()) throw std::invalid_argument("no sweep points to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_table(points, s, out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ParsedTable parse_table(std::string_view text) {
  ParsedTable t;
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw std::invalid_argument("empty table");
  const auto cells = [](std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      out.push_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  };
  for (auto c : cells(lines[0])) t.header.emplace_back(c);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto cs = cells(lines[i]);
    const int line_no = static_cast<int>(i) + 1;
    if (cs.size() != t.header.size())
      throw std::invalid_argument(detail::at_line(line_no) + "expected " +
                                  std::to_string(t.header.size()) + " columns, got " +
                                  std::to_string(cs.size()));
    std::vector<double> row;
    for (std::size_t j = 0; j < cs.size(); ++j)
      row.push_back(detail::parse_double(cs[j], line_no, t.header[j]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace hent

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

#include "hent/scenario.hpp"

#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hent {

using detail::at_line;
using detail::format_double;

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::Trajectory: return "trajectory";
    case Engine::Both: return "both";
  }
  return "?";
}

std::string_view to_string(SweepAxis a) {
  return a == SweepAxis::PumpPower ? "pump_power" : "target_rate";
}

Engine parse_engine(std::string_view text) {
  if (text == "analytic") return Engine::Analytic;
  if (text == "trajectory") return Engine::Trajectory;
  if (text == "both") return Engine::Both;
  throw std::invalid_argument("unknown engine '" + std::string(text) +
                              "' (expected analytic, trajectory or both)");
}

SweepAxis parse_axis(std::string_view text) {
  if (text == "pump_power") return SweepAxis::PumpPower;
  if (text == "target_rate") return SweepAxis::TargetRate;
  throw std::invalid_argument("unknown sweep axis '" + std::string(text) +
                              "' (expected pump_power or target_rate)");
}

std::string VariantOption::name() const {
  std::string s(to_string(detuning));
  if (purification) s += "+purify";
  if (storage == Storage::OnDemandWorstCase) s += "+storage";
  return s;
}

VariantOption VariantOption::parse(std::string_view text) {
  VariantOption v;
  std::size_t pos = 0;
  bool first = true;
  std::set<std::string> seen;
  while (pos <= text.size()) {
    const auto plus = text.find('+', pos);
    const std::string tok(detail::trim(text.substr(pos, plus == std::string_view::npos ? text.npos : plus - pos)));
    if (first) {
      v.detuning = parse_detuning(tok);
      first = false;
    } else if (!seen.insert(tok).second) {
      throw std::invalid_argument("option '" + tok + "' repeated in variant '" + std::string(text) + "'");
    } else if (tok == "purify") {
      v.purification = true;
    } else if (tok == "storage") {
      v.storage = Storage::OnDemandWorstCase;
    } else {
      throw std::invalid_argument("unknown variant option '" + tok + "' in '" + std::string(text) + "'");
    }
    if (plus == std::string_view::npos) break;
    pos = plus + 1;
  }
  return v;
}

std::vector<VariantOption> default_variants() {
  return {VariantOption::parse("blue"), VariantOption::parse("red"),
          VariantOption::parse("red+purify"), VariantOption::parse("red+storage"),
          VariantOption::parse("red+purify+storage")};
}

void Scenario::validate() const {
  auto node = [](const TransducerParams& p, const char* which) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(which) + ": " + e.what());
    }
  };
  node(left, "node.left");
  node(right, "node.right");
  ProtocolConfig probe = protocol;
  probe.pump_power = 0;
  probe.validate();
  if (variants.empty()) throw std::invalid_argument("variants: at least one variant required");
  for (std::size_t i = 0; i < variants.size(); ++i)
    for (std::size_t j = i + 1; j < variants.size(); ++j)
      if (variants[i] == variants[j])
        throw std::invalid_argument("variants: '" + variants[i].name() + "' listed twice");
  // A pump-power sweep may also be pinned to one value (zero included).
  const bool pinned = axis == SweepAxis::PumpPower && sweep_min == sweep_max && sweep_min >= 0;
  if (!pinned && (!(sweep_min > 0) || !std::isfinite(sweep_max) || !(sweep_min < sweep_max)))
    throw std::invalid_argument("sweep: need 0 < min < max");
  if (points < 2) throw std::invalid_argument("sweep.points must be >= 2");
  if (trials < 1) throw std::invalid_argument("run.trials must be >= 1");
}

std::vector<double> Scenario::axis_values() const {
  std::vector<double> v(points, sweep_min);
  if (sweep_min == sweep_max) return v;
  const double a = std::log(sweep_min), b = std::log(sweep_max);
  for (int i = 0; i < points; ++i) v[i] = std::exp(a + (b - a) * i / (points - 1));
  v.front() = sweep_min;
  v.back() = sweep_max;
  return v;
}

namespace {

using NodeField = double TransducerParams::*;
const std::map<std::string, NodeField, std::less<>>& node_fields() {
  static const std::map<std::string, NodeField, std::less<>> f = {
      {"g0", &TransducerParams::g0},
      {"gamma_e_sig", &TransducerParams::gamma_e_sig},
      {"gamma_i_sig", &TransducerParams::gamma_i_sig},
      {"gamma_e_pump", &TransducerParams::gamma_e_pump},
      {"gamma_i_pump", &TransducerParams::gamma_i_pump},
      {"gamma_mw", &TransducerParams::gamma_mw},
      {"lambda_pump", &TransducerParams::lambda_pump},
      {"t_reset", &TransducerParams::t_reset},
      {"detector_efficiency", &TransducerParams::detector_efficiency},
      {"dark_count_rate", &TransducerParams::dark_count_rate},
  };
  return f;
}

// Fixed key order for serialization.
const char* const kNodeKeys[] = {"g0",          "gamma_e_sig", "gamma_i_sig",
                                 "gamma_e_pump", "gamma_i_pump", "gamma_mw",
                                 "lambda_pump", "t_reset",     "detector_efficiency",
                                 "dark_count_rate"};

void write_node(std::ostringstream& out, const TransducerParams& p) {
  for (const char* k : kNodeKeys) out << k << " = " << format_double(p.*node_fields().at(k)) << '\n';
}

}  // namespace

std::string Scenario::serialize() const {
  std::ostringstream out;
  out << "[protocol]\n"
      << "gate_fidelity = " << format_double(protocol.gate_fidelity) << '\n'
      << "pulse_duration = "
      << (protocol.pulse_duration ? format_double(*protocol.pulse_duration) : std::string("auto"))
      << '\n'
      << "channels = " << protocol.channels << '\n'
      << "variants = ";
  for (std::size_t i = 0; i < variants.size(); ++i) out << (i ? ", " : "") << variants[i].name();
  out << "\n\n";
  if (left == right) {
    out << "[node]\n";
    write_node(out, left);
  } else {
    out << "[node.left]\n";
    write_node(out, left);
    out << "\n[node.right]\n";
    write_node(out, right);
  }
  out << "\n[sweep]\n"
      << "axis = " << to_string(axis) << '\n'
      << "min = " << format_double(sweep_min) << '\n'
      << "max = " << format_double(sweep_max) << '\n'
      << "points = " << points << '\n'
      << "\n[run]\n"
      << "engine = " << to_string(engine) << '\n'
      << "trials = " << trials << '\n'
      << "seed = " << seed << '\n';
  if (!output.empty()) out << "output = " << output << '\n';
  if (!calibration.empty()) out << "calibration = " << calibration << '\n';
  return out.str();
}

Scenario Scenario::parse(std::string_view text) {
  Scenario s;
  std::string section;
  std::set<std::string> seen;  // "section.key" pairs already assigned
  const auto lines = detail::split_lines(text);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::string_view line = detail::strip_comment(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument(at_line(line_no) + "unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known = {"protocol", "node", "node.left", "node.right",
                                                  "sweep", "run"};
      if (!known.count(section))
        throw std::invalid_argument(at_line(line_no) + "unknown section [" + section + "]");
      continue;
    }
    // "calibration =" and "output =" may be left empty.
    const auto eq = line.find('=');
    if (eq != std::string_view::npos && detail::trim(line.substr(eq + 1)).empty() &&
        section == "run") {
      const std::string key(detail::trim(line.substr(0, eq)));
      if (key == "calibration") { s.calibration.clear(); continue; }
      if (key == "output") { s.output.clear(); continue; }
    }
    const auto kv = detail::split_key_value(line, line_no);
    if (section.empty())
      throw std::invalid_argument(at_line(line_no) + "key '" + kv.key + "' outside any section");
    if (!seen.insert(section + "." + kv.key).second)
      throw std::invalid_argument(at_line(line_no) + "duplicate key '" + kv.key + "' in [" + section + "]");

    const auto num = [&] { return detail::parse_double(kv.value, line_no, kv.key); };
    const auto integer = [&] { return detail::parse_int(kv.value, line_no, kv.key); };
    // Single-field ranges are checked here so the diagnostic carries the
    // line; cross-field checks run in validate() once the text is read.
    const auto require = [&](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(at_line(line_no) + kv.key + " " + what);
    };
    const auto unknown = [&] {
      return std::invalid_argument(at_line(line_no) + "unknown key '" + kv.key + "' in [" + section + "]");
    };
    try {
      if (section == "protocol") {
        if (kv.key == "gate_fidelity") {
          s.protocol.gate_fidelity = num();
          require(s.protocol.gate_fidelity >= 0 && s.protocol.gate_fidelity <= 1, "must lie in [0, 1]");
        } else if (kv.key == "pulse_duration") {
          if (kv.value == "auto") s.protocol.pulse_duration.reset();
          else s.protocol.pulse_duration = num();
          require(!s.protocol.pulse_duration || *s.protocol.pulse_duration > 0, "must be > 0 or auto");
        } else if (kv.key == "channels") {
          const auto v = integer();
          require(v >= 1 && v <= 1000000, "must lie in [1, 1000000]");
          s.protocol.channels = static_cast<int>(v);
        }
        else if (kv.key == "variants") {
          s.variants.clear();
          std::string_view rest = kv.value;
          while (true) {
            const auto comma = rest.find(',');
            s.variants.push_back(VariantOption::parse(detail::trim(rest.substr(0, comma))));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
          }
        } else throw unknown();
      } else if (section.rfind("node", 0) == 0) {
        const auto it = node_fields().find(kv.key);
        if (it == node_fields().end()) throw unknown();
        const double v = num();
        require(v >= 0, "must be >= 0");
        if (section != "node.right") s.left.*(it->second) = v;
        if (section != "node.left") s.right.*(it->second) = v;
      } else if (section == "sweep") {
        if (kv.key == "axis") s.axis = parse_axis(kv.value);
        else if (kv.key == "min") s.sweep_min = num();
        else if (kv.key == "max") s.sweep_max = num();
        else if (kv.key == "points") {
          const auto v = integer();
          require(v >= 2 && v <= 10000000, "must lie in [2, 10000000]");
          s.points = static_cast<int>(v);
        }
        else throw unknown();
      } else if (section == "run") {
        if (kv.key == "engine") s.engine = parse_engine(kv.value);
        else if (kv.key == "trials") {
          s.trials = integer();
          require(s.trials >= 1, "must be >= 1");
        }
        else if (kv.key == "seed") s.seed = detail::parse_uint(kv.value, line_no, kv.key);
        else if (kv.key == "output") s.output = kv.value;
        else if (kv.key == "calibration") s.calibration = kv.value;
        else throw unknown();
      }
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      throw std::invalid_argument(at_line(line_no) + kv.key + ": " + msg);
    }
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace hent

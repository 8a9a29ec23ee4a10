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

#include "hent/calibration.hpp"

#include "text_util.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hent {

double VariantCalibration::infidelity(double coupling_ratio) const {
  if (coupling_ratio <= 0) return 0.0;
  return prefactor * std::pow(coupling_ratio, exponent);
}

const CalibrationRecord& CalibrationRecord::builtin() {
  // Output of `hent calibrate --trials 4000 --seed 20260101`, data/calibration.txt.
  static const CalibrationRecord record{
      VariantCalibration{9.978632075429559, 1.9997324724736445, 0.0003843474463409084},
      VariantCalibration{3.9994812836206606, 1.9999838787346578, 2.091905552772166e-05},
  };
  return record;
}

std::string CalibrationRecord::serialize() const {
  std::ostringstream out;
  out << "# heralded-pair infidelity = prefactor * (g/gamma)^exponent\n";
  for (auto [name, cal] : {std::pair{"blue", &blue}, std::pair{"red", &red}}) {
    out << name << ".prefactor = " << detail::format_double(cal->prefactor) << '\n';
    out << name << ".exponent = " << detail::format_double(cal->exponent) << '\n';
    out << name << ".residual = " << detail::format_double(cal->residual) << '\n';
  }
  return out.str();
}

CalibrationRecord CalibrationRecord::parse(std::string_view text) {
  CalibrationRecord rec;
  std::map<std::string, double*> fields{
      {"blue.prefactor", &rec.blue.prefactor}, {"blue.exponent", &rec.blue.exponent},
      {"blue.residual", &rec.blue.residual},   {"red.prefactor", &rec.red.prefactor},
      {"red.exponent", &rec.red.exponent},     {"red.residual", &rec.red.residual},
  };
  std::map<std::string, bool> seen;
  int line_no = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++line_no;
    const auto line = detail::strip_comment(raw);
    if (line.empty()) continue;
    const auto kv = detail::split_key_value(line, line_no);
    auto it = fields.find(kv.key);
    if (it == fields.end())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" +
                                  kv.key + "'");
    *it->second = detail::parse_double(kv.value, line_no, kv.key);
    seen[kv.key] = true;
  }
  for (const auto& [key, ptr] : fields)
    if (!seen[key]) throw std::invalid_argument("calibration record is missing '" + key + "'");
  return rec;
}

CalibrationRecord CalibrationRecord::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration record '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void CalibrationRecord::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration record '" + path + "'");
  out << serialize();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace hent

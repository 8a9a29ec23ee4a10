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

#pragma once

#include "hent/scenario.hpp"
#include "hent/sweep.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hent {

/// CSV header for a scenario: shared columns, then one block per variant
/// ("red+purify.fidelity", ...). Trajectory columns appear when the engine
/// is trajectory or both; analytic fidelity columns unless it is trajectory.
std::vector<std::string> table_schema(const Scenario& s);

/// Values in schema order. Floats use the shortest round-trip decimal form,
/// flags are 0/1, missing trajectory values are "nan" with a herald
/// count of 0.
std::vector<std::string> table_row(const RateFidelityPoint& p, const Scenario& s);

void write_table(const std::vector<RateFidelityPoint>& points, const Scenario& s, std::ostream& out);

/// Throws std::runtime_error naming `path` when it cannot be written.
void emit_table(const std::vector<RateFidelityPoint>& points, const Scenario& s,
                const std::string& path);

struct ParsedTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a table written by write_table.
ParsedTable parse_table(std::string_view text);

}  // namespace hent

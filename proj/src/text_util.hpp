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

// Small helpers shared by the key-value text formats (scenario files and
// calibration records).

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hent::detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

inline std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

struct KeyValue {
  std::string key;
  std::string value;
};

inline std::string at_line(int line_no) { return "line " + std::to_string(line_no) + ": "; }

inline KeyValue split_key_value(std::string_view line, int line_no) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos)
    throw std::invalid_argument(at_line(line_no) + "expected 'key = value'");
  KeyValue kv{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))};
  if (kv.key.empty()) throw std::invalid_argument(at_line(line_no) + "empty key");
  if (kv.value.empty())
    throw std::invalid_argument(at_line(line_no) + "empty value for '" + kv.key + "'");
  return kv;
}

inline double parse_double(std::string_view text, int line_no, std::string_view key) {
  double v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::invalid_argument(at_line(line_no) + "'" + std::string(key) +
                                "' expects a number, got '" + std::string(text) + "'");
  return v;
}

inline long long parse_int(std::string_view text, int line_no, std::string_view key) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::invalid_argument(at_line(line_no) + "'" + std::string(key) +
                                "' expects an integer, got '" + std::string(text) + "'");
  return v;
}

inline unsigned long long parse_uint(std::string_view text, int line_no, std::string_view key) {
  unsigned long long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::invalid_argument(at_line(line_no) + "'" + std::string(key) +
                                "' expects a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace hent::detail

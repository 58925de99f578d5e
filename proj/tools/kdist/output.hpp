// Copyright 2026 The kdist Authors
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

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace kdist::cli {

using Json = nlohmann::ordered_json;

/// Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // extra "# ..." header lines
};

struct OutputSpec {
  std::string command;
  std::string path = "-";
  std::string format = "csv";
  Json config = Json::object();
};

/// Writes either the CSV table (config in '#' header lines) or the JSON
/// document (config and version as top-level fields).
void emit(const OutputSpec& out, const Json& doc, const Table& table);

std::string fmt(double v);
std::string fmt(std::uint64_t v);

/// Accepts plain integers and exact scientific forms such as 1e5.
std::uint64_t parse_count(const std::string& text, const std::string& what);
std::vector<std::uint64_t> parse_count_list(const std::string& text, const std::string& what);

struct Common {
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string format = "csv";
};

}  // namespace kdist::cli

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

#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kdist/errors.hpp"
#include "kdist/version.hpp"

namespace kdist::cli {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::uint64_t parse_count(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParamError(what + ": not a number: " + text);
  }
  if (used != text.size() || !(v >= 0.0) || v > 1e18 || std::floor(v) != v) {
    throw ParamError(what + ": expected a non-negative integer, got " + text);
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_count_list(const std::string& text, const std::string& what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_count(item, what));
  }
  if (out.empty()) throw ParamError(what + ": empty list");
  return out;
}

namespace {

void write_to(const std::string& path, const std::string& body) {
  if (path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open output file " + path);
  f << body;
  if (!f) throw FormatError("failed writing " + path);
}

}  // namespace

void emit(const OutputSpec& out, const Json& doc, const Table& table) {
  std::ostringstream os;
  if (out.format == "json") {
    Json full = Json::object();
    full["tool"] = "kdist";
    full["version"] = kVersion;
    full["command"] = out.command;
    full["config"] = out.config;
    for (const auto& [key, value] : doc.items()) full[key] = value;
    os << full.dump(2) << '\n';
  } else if (out.format == "csv") {
    os << "# kdist " << kVersion << '\n';
    os << "# command: " << out.command << '\n';
    os << "# config: " << out.config.dump() << '\n';
    for (const auto& n : table.notes) os << "# " << n << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << '\n';
    }
  } else {
    throw ParamError("unknown output format " + out.format);
  }
  write_to(out.path, os.str());
}

}  // namespace kdist::cli

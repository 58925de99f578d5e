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

#include "CLI11.hpp"
#include "output.hpp"

namespace kdist::cli {

// Each registers a subcommand whose callback stores its exit code in rc.
void register_walk(CLI::App& root, const Common& common, int& rc);
void register_verify(CLI::App& root, const Common& common, int& rc);
void register_distinct(CLI::App& root, const Common& common, int& rc);
void register_store_bench(CLI::App& root, const Common& common, int& rc);

inline OutputSpec output_for(const std::string& command, const Common& common) {
  OutputSpec o;
  o.command = command;
  o.path = common.out;
  o.format = common.format;
  return o;
}

}  // namespace kdist::cli

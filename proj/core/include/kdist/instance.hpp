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

// Problem instances x_1..x_N over [M]. Indices are 1-based throughout the
// public API, matching the usual [N] = {1..N} convention.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kdist {

struct Instance {
  std::vector<std::uint64_t> values;  // values[i-1] = x_i
  std::uint64_t M = 0;

  std::uint64_t N() const noexcept { return values.size(); }
  std::uint64_t at(std::uint64_t i) const { return values.at(i - 1); }
};

/// Validates N >= 2 and 1 <= x_i <= M. M = 0 means "max of values".
Instance make_instance(std::vector<std::uint64_t> values, std::uint64_t M = 0);

/// One integer per line, or a JSON array of integers.
Instance parse_instance(std::string_view text, std::uint64_t M = 0);
Instance read_instance(const std::string& path, std::uint64_t M = 0);

/// Some k distinct indices (ascending) among `indices` with equal values.
std::optional<std::vector<std::uint64_t>> find_k_collision(const Instance& inst,
                                                           std::span<const std::uint64_t> indices,
                                                           std::uint64_t k);

/// Number of distinct values that occur at least k times among `indices`.
std::uint64_t count_k_collision_values(const Instance& inst, std::span<const std::uint64_t> indices,
                                       std::uint64_t k);

/// Instance of length N whose values are pairwise distinct except for
/// `groups` disjoint planted k-collisions (each exactly k equal values),
/// placed at random positions.
struct PlantedInstance {
  Instance instance;
  std::vector<std::vector<std::uint64_t>> collisions;  // ascending index sets
};

PlantedInstance planted_instance(std::uint64_t N, std::uint64_t k, std::uint64_t groups,
                                 std::uint64_t seed);

}  // namespace kdist

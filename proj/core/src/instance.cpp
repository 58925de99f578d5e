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

#include "kdist/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "kdist/errors.hpp"
#include "kdist/rng.hpp"

namespace kdist {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_value(std::string_view token, std::size_t where) {
  token = trim(token);
  std::uint64_t v = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw FormatError("instance: malformed value '" + std::string(token) + "' at item " +
                      std::to_string(where));
  }
  return v;
}

}  // namespace

Instance make_instance(std::vector<std::uint64_t> values, std::uint64_t M) {
  if (values.size() < 2) throw FormatError("instance: need at least two values");
  const std::uint64_t max_value = *std::max_element(values.begin(), values.end());
  if (M == 0) M = max_value;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 1 || values[i] > M) {
      throw FormatError("instance: value " + std::to_string(values[i]) + " at index " +
                        std::to_string(i + 1) + " outside [1, " + std::to_string(M) + "]");
    }
  }
  return Instance{std::move(values), M};
}

Instance parse_instance(std::string_view text, std::uint64_t M) {
  std::vector<std::uint64_t> values;
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw FormatError("instance: unterminated JSON array");
    std::string_view inner = body.substr(1, body.size() - 2);
    if (!trim(inner).empty()) {
      std::size_t pos = 0;
      while (true) {
        const auto comma = inner.find(',', pos);
        const auto token = inner.substr(pos, comma == std::string_view::npos ? inner.npos : comma - pos);
        values.push_back(parse_value(token, values.size() + 1));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      const auto line = trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
      if (!line.empty() && line.front() != '#') values.push_back(parse_value(line, values.size() + 1));
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
  }
  return make_instance(std::move(values), M);
}

Instance read_instance(const std::string& path, std::uint64_t M) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("instance: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), M);
}

std::optional<std::vector<std::uint64_t>> find_k_collision(const Instance& inst,
                                                           std::span<const std::uint64_t> indices,
                                                           std::uint64_t k) {
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> by_value;
  by_value.reserve(indices.size());
  for (std::uint64_t i : indices) {
    auto& group = by_value[inst.at(i)];
    group.push_back(i);
    if (group.size() == k) {
      std::sort(group.begin(), group.end());
      return group;
    }
  }
  return std::nullopt;
}

std::uint64_t count_k_collision_values(const Instance& inst, std::span<const std::uint64_t> indices,
                                       std::uint64_t k) {
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  counts.reserve(indices.size());
  std::uint64_t hits = 0;
  for (std::uint64_t i : indices) {
    if (++counts[inst.at(i)] == k) ++hits;
  }
  return hits;
}

PlantedInstance planted_instance(std::uint64_t N, std::uint64_t k, std::uint64_t groups,
                                 std::uint64_t seed) {
  if (k < 2 || groups * k > N) throw ParamError("planted_instance: cannot fit the planted collisions");
  Rng rng(seed);
  std::vector<std::uint64_t> order(N);
  for (std::uint64_t i = 0; i < N; ++i) order[i] = i + 1;
  for (std::uint64_t i = N; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  PlantedInstance out;
  std::vector<std::uint64_t> values(N, 0);
  std::uint64_t next_value = 1;
  std::size_t pos = 0;
  for (std::uint64_t g = 0; g < groups; ++g) {
    std::vector<std::uint64_t> idx(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                   order.begin() + static_cast<std::ptrdiff_t>(pos + k));
    pos += k;
    std::sort(idx.begin(), idx.end());
    for (std::uint64_t i : idx) values[i - 1] = next_value;
    ++next_value;
    out.collisions.push_back(std::move(idx));
  }
  for (; pos < order.size(); ++pos) values[order[pos] - 1] = next_value++;
  std::sort(out.collisions.begin(), out.collisions.end());
  out.instance = make_instance(std::move(values), next_value - 1);
  return out;
}

}  // namespace kdist

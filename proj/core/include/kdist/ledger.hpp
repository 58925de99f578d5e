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

namespace kdist {

/// Oracle value-queries charged by each phase of a run. Counters only grow.
struct QueryLedger {
  std::uint64_t setup_queries = 0;       // initial load of S (r per inner run)
  std::uint64_t walk_queries = 0;        // 2 per walk step: query + erasing query
  std::uint64_t classical_queries = 0;   // classical scans of small T_j
  std::uint64_t grover_charged = 0;      // emulated tuple search, ceil(sqrt(#tuples))

  std::uint64_t total() const noexcept {
    return setup_queries + walk_queries + classical_queries + grover_charged;
  }

  QueryLedger& operator+=(const QueryLedger& o) noexcept {
    setup_queries += o.setup_queries;
    walk_queries += o.walk_queries;
    classical_queries += o.classical_queries;
    grover_charged += o.grover_charged;
    return *this;
  }

  friend bool operator==(const QueryLedger&, const QueryLedger&) = default;
};

}  // namespace kdist

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

// Canonical set store: r hash buckets ordered by index, dyadic counters over
// aligned bucket ranges for O(log r) rank, and a skip list ordered by
// (value, index) whose levels come from d-wise independent boolean hashes.
// The memory image depends only on the stored set and the hash seed.

#include <cstdint>
#include <optional>
#include <vector>

#include "kdist/hash_families.hpp"
#include "kdist/rng.hpp"

namespace kdist::store {

struct StoreConfig {
  std::uint64_t N = 0;
  std::uint64_t M = 0;       // 0 means N
  std::uint64_t r = 0;
  std::uint64_t k = 2;
  std::uint64_t seed = 0;    // selects the level hash functions
  double budget_c = 1.0;     // budget = c * ceil(log2(N + M))^4
};

struct StepBudget {
  std::uint64_t budget = 0;
  std::uint64_t consumed = 0;  // steps of the last mutating operation
  bool failed = false;         // last mutating operation aborted
};

enum class Failure { kNone, kBudget, kOverflow };

class CanonicalStore {
 public:
  explicit CanonicalStore(const StoreConfig& cfg);

  /// Adds (i, x). Returns false and leaves the store untouched when the
  /// operation overflows a bucket or exceeds the step budget. Throws
  /// ParamError for a duplicate or out-of-range index, or when full.
  bool insert(std::uint64_t i, std::uint64_t x);
  /// Removes i. Same failure semantics as insert; throws if i is absent.
  bool remove(std::uint64_t i);

  std::optional<std::uint64_t> lookup(std::uint64_t i) const;
  bool contains(std::uint64_t i) const { return lookup(i).has_value(); }
  bool has_k_collision() const noexcept { return v_ > 0; }
  /// Position of y in 1..size(), ordered by bucket then index.
  std::uint64_t rank(std::uint64_t y) const;

  std::uint64_t size() const noexcept { return size_; }
  std::uint64_t capacity() const noexcept { return cfg_.r + 1; }
  std::uint64_t bucket_capacity() const noexcept { return bucket_cap_; }
  std::uint64_t bucket_of(std::uint64_t i) const;
  std::uint32_t level_of(std::uint64_t i) const;
  std::uint32_t max_level() const noexcept { return l_max_; }
  std::uint64_t collision_values() const noexcept { return v_; }
  const StoreConfig& config() const noexcept { return cfg_; }
  const StepBudget& budget() const noexcept { return budget_; }
  Failure last_failure() const noexcept { return last_failure_; }
  void set_budget(std::uint64_t steps) noexcept { budget_.budget = steps; }

  /// Indices in bucket order (equivalently, rank order).
  std::vector<std::uint64_t> members() const;
  /// Indices in skip-list order at the given level.
  std::vector<std::uint64_t> chain(std::uint32_t level) const;

  /// Recomputes counters, v and links from scratch; returns false on any
  /// disagreement with the maintained state.
  bool check_invariants() const;

  std::vector<std::uint8_t> serialize() const;
  static CanonicalStore deserialize(const std::vector<std::uint8_t>& bytes);

  friend bool operator==(const CanonicalStore& a, const CanonicalStore& b) {
    return a.serialize() == b.serialize();
  }

 private:
  struct Entry {
    std::uint64_t i = 0;
    std::uint64_t x = 0;
    std::uint32_t level = 0;
    std::vector<std::uint64_t> next;  // successor index per level, 0 = none
  };
  struct Steps;

  const Entry* find(std::uint64_t i) const;
  Entry* find(std::uint64_t i);
  std::uint64_t link(std::uint64_t from, std::uint32_t level) const;
  void set_link(std::uint64_t from, std::uint32_t level, std::uint64_t to);
  std::vector<std::uint64_t> predecessors(std::uint64_t x, std::uint64_t i, Steps& s) const;
  std::uint64_t count_value(std::uint64_t x, Steps& s) const;
  std::uint32_t compute_level(std::uint64_t i, Steps* s) const;
  void bump_counters(std::uint64_t bucket, int delta, Steps* s);
  std::uint64_t counter(std::uint32_t level, std::uint64_t j) const;
  bool finish(Steps& s);

  StoreConfig cfg_;
  std::uint64_t bucket_cap_ = 0;
  std::uint32_t counter_levels_ = 0;  // levels 0..counter_levels_-1
  std::uint32_t l_max_ = 0;
  std::vector<hash::BoolMember> level_fns_;
  std::vector<std::vector<Entry>> buckets_;
  std::vector<std::vector<std::uint32_t>> counters_;  // counters_[l][m-1] covers buckets (m 2^l - 2^l, m 2^l]
  std::vector<std::uint64_t> start_;
  std::uint64_t size_ = 0;
  std::uint64_t v_ = 0;
  StepBudget budget_;
  Failure last_failure_ = Failure::kNone;
};

/// Default step budget c * ceil(log2(N + M))^4.
std::uint64_t default_budget(std::uint64_t N, std::uint64_t M, double c = 1.0);

struct FailureStats {
  std::uint64_t ops = 0;
  std::uint64_t failures = 0;
  std::uint64_t overflow = 0;
  std::uint64_t over_budget = 0;
  std::uint64_t max_steps = 0;
  double rate() const noexcept { return ops == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(ops); }
};

/// Random insert/remove workload of `ops` operations against one store.
/// budget_c <= 0 keeps the default c = 1; budget_override > 0 replaces the
/// step budget outright.
FailureStats measure_failure_rate(std::uint64_t N, std::uint64_t r, std::uint64_t ops, std::uint64_t seed,
                                  double budget_c = 1.0, std::uint64_t budget_override = 0);

struct StoreOp {
  bool insert = true;
  std::uint64_t i = 0;
  std::uint64_t x = 0;  // value for inserts
};

/// Random operation sequence that starts from an empty store and ends
/// holding exactly `target` (pairs (i, x_i), distinct indices in [1, N]).
/// `decoys` extra indices are inserted and later removed, and `churn`
/// target members are removed and re-inserted along the way. Decoys and
/// their values are drawn from [1, N] and [1, M].
std::vector<StoreOp> random_history(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& target,
                                    std::uint64_t N, std::uint64_t M, std::uint64_t decoys, std::uint64_t churn,
                                    Rng& rng);

}  // namespace kdist::store

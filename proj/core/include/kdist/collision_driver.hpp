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

// Multiple-collision driver: repeatedly runs the walk on shrinking random
// subsets T_1 = [N] ⊇ T_2 ⊇ ... until one of them holds a unique
// k-collision, with classical fallbacks once |T_j| is small.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdist/hash_families.hpp"
#include "kdist/instance.hpp"
#include "kdist/ledger.hpp"

namespace kdist::driver {

struct PrimePower {
  std::uint64_t q = 0;
  std::uint64_t prime = 0;
  std::uint32_t exponent = 0;  // q = prime^exponent, exponent even
  bool relaxed = false;        // no even prime power inside the window
};

/// Smallest p^(2m) in [target, (1 + 1/(2k^2)) target]; otherwise the
/// smallest p^2 >= target with relaxed set.
PrimePower pick_prime_power(std::uint64_t target, std::uint64_t k);

enum class PermSource { kFeistel, kUniform };

/// A permutation of [q] with forward and inverse evaluation.
class Permutation {
 public:
  static Permutation feistel(std::uint64_t q, std::uint64_t d, std::uint64_t seed,
                             std::uint32_t rounds = hash::kDefaultRounds);
  static Permutation uniform(std::uint64_t q, std::uint64_t seed);
  static Permutation identity(std::uint64_t q);

  std::uint64_t size() const noexcept { return q_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t forward(std::uint64_t i) const;
  std::uint64_t inverse(std::uint64_t i) const;

 private:
  std::uint64_t q_ = 0;
  std::uint64_t seed_ = 0;
  PermSource source_ = PermSource::kFeistel;
  hash::PermMember member_;
  std::vector<std::uint32_t> fwd_, inv_;  // explicit tables for kUniform
};

struct SubsetChain {
  std::vector<std::vector<std::uint64_t>> sets;  // T_1, T_2, ... as ascending index lists
  std::vector<std::uint64_t> q_values;
  std::vector<std::uint64_t> perm_seeds;
};

SubsetChain initial_chain(std::uint64_t N);

/// ceil(2k/(2k+1) * q).
std::uint64_t kept_prefix(std::uint64_t q, std::uint64_t k);

/// Appends T_{j+1} = { T_j[pi^{-1}(i)] : i <= kept_prefix(q, k), pi^{-1}(i) <= |T_j| },
/// where T_j[p] is the p-th smallest element. Requires perm.size() >= |T_j|.
void next_subset(SubsetChain& chain, const Permutation& perm, std::uint64_t k);

struct InnerRun {
  std::vector<std::uint64_t> measured;  // positions in the sub-instance, ascending
  QueryLedger delta;
  std::uint64_t t1 = 0;
  std::uint64_t t2 = 0;
  std::uint64_t collisions = 0;          // distinct values occurring >= k times
  std::optional<double> engine_success;  // set when the promise holds
};

/// One run of the walk on `sub` with memory r_j. Under a unique k-collision
/// the measured S is drawn from the exact collapsed-engine distribution;
/// otherwise S is uniform (a pessimistic model for several collisions).
InnerRun inner_algorithm2(const Instance& sub, std::uint64_t r_j, std::uint64_t k, std::uint64_t seed);

struct IterationRecord {
  std::uint64_t size = 0;  // |T_j|
  std::uint64_t r_j = 0;
  std::uint64_t t1 = 0;
  std::uint64_t t2 = 0;
  std::uint64_t q = 0;
  bool relaxed = false;
  std::uint64_t collisions = 0;
  std::string outcome;
  QueryLedger cost;
};

struct CollisionResult {
  std::optional<std::vector<std::uint64_t>> found;  // ascending indices with equal values
  QueryLedger ledger;
  std::vector<IterationRecord> trace;
  std::uint64_t iteration_cap = 0;
};

struct DriverOptions {
  PermSource source = PermSource::kFeistel;
  std::uint32_t rounds = hash::kDefaultRounds;
};

/// ceil(5 k ln N).
std::uint64_t iteration_cap(std::uint64_t N, std::uint64_t k);

CollisionResult run_k_distinctness(const Instance& inst, std::uint64_t r, std::uint64_t k, std::uint64_t seed,
                                   const DriverOptions& opts = {});

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Largest r with r^(k+1) <= N^k.
std::uint64_t optimal_memory(std::uint64_t N, std::uint64_t k);

struct ScanRow {
  std::uint64_t N = 0;
  std::uint64_t r = 0;
  std::vector<std::uint64_t> totals;  // one per trial
  double median_total = 0.0;
  double mean_total = 0.0;
  double success_rate = 0.0;
};

struct ExponentScan {
  std::uint64_t k = 0;
  std::vector<ScanRow> rows;
  LogLogFit fit;  // on median totals
};

/// Per-run costs are bimodal (first-round hit or not), so the median needs
/// enough trials to be stable.
inline constexpr std::uint64_t kDefaultScanTrials = 21;

/// Runs the driver at r = optimal_memory(N, k) on planted single-collision
/// instances, `trials` seeds per grid point, and fits log(median) vs log N.
ExponentScan exponent_scan(std::uint64_t k, const std::vector<std::uint64_t>& N_grid, std::uint64_t seed,
                           std::uint64_t trials = kDefaultScanTrials, const DriverOptions& opts = {});

struct TradeoffRow {
  std::uint64_t r = 0;
  double median_total = 0.0;
  double model = 0.0;  // max(N / sqrt(r), r)
};

struct Tradeoff {
  std::uint64_t N = 0;
  std::uint64_t k = 0;
  std::vector<TradeoffRow> rows;
  double c = 0.0;           // geometric midpoint of total/model
  double max_factor = 0.0;  // largest deviation factor from c * model
};

Tradeoff tradeoff_scan(std::uint64_t N, std::uint64_t k, const std::vector<std::uint64_t>& r_values,
                       std::uint64_t seed, std::uint64_t trials = kDefaultScanTrials, const DriverOptions& opts = {});

}  // namespace kdist::driver

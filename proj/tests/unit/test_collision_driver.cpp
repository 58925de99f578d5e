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

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "kdist/collision_driver.hpp"
#include "kdist/errors.hpp"
#include "kdist/walk.hpp"

using namespace kdist;
using namespace kdist::driver;

namespace {

// Independent oracle: all even prime powers p^(2m) up to `limit`.
std::set<std::uint64_t> even_prime_powers(std::uint64_t limit) {
  std::set<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= limit; ++p) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= p; ++d) prime = prime && p % d != 0;
    if (!prime) continue;
    for (std::uint64_t q = p * p; q <= limit; q *= p * p) {
      out.insert(q);
      if (q > limit / (p * p)) break;
    }
  }
  return out;
}

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("prime power selection") {
  const PrimePower four = pick_prime_power(4, 2);
  CHECK(four.q == 4);
  CHECK(four.prime == 2);
  CHECK(four.exponent == 2);
  CHECK_FALSE(four.relaxed);

  const PrimePower five = pick_prime_power(5, 2);
  CHECK(five.q == 9);
  CHECK(five.relaxed);

  const auto powers = even_prime_powers(3000000);
  for (std::uint64_t k : {2u, 3u, 5u}) {
    for (std::uint64_t target = 2; target <= 3000; ++target) {
      // q <= target (1 + 1/(2k^2)) in exact integer form.
      const auto in_window = [&](std::uint64_t q) { return 2 * k * k * q <= (2 * k * k + 1) * target; };
      const auto it = powers.lower_bound(target);
      const PrimePower got = pick_prime_power(target, k);
      if (it != powers.end() && in_window(*it)) {
        CHECK(got.q == *it);
        CHECK_FALSE(got.relaxed);
      } else {
        CHECK(got.relaxed);
        std::uint64_t p = 2;
        while (p * p < target || !is_prime(p)) ++p;
        CHECK(got.q == p * p);
      }
    }
  }
  const PrimePower hundred = pick_prime_power(100, 2);
  CHECK(hundred.q == 121);
  CHECK(hundred.relaxed);
  CHECK_THROWS_AS(pick_prime_power(1, 2), ParamError);
}

TEST_CASE("subset chain with identity permutations") {
  SubsetChain chain = initial_chain(30);
  next_subset(chain, Permutation::identity(32), 2);
  REQUIRE(chain.sets.size() == 2);
  // kept prefix ceil(4/5 * 32) = 26, all inside T_1.
  CHECK(chain.sets[1].size() == 26);
  for (std::uint64_t i = 0; i < 26; ++i) CHECK(chain.sets[1][i] == i + 1);
  next_subset(chain, Permutation::identity(49), 2);
  CHECK(chain.sets[2] == chain.sets[1]);  // prefix 40 covers all 26 positions
  CHECK(chain.q_values == std::vector<std::uint64_t>{32, 49});
  CHECK_THROWS_AS(next_subset(chain, Permutation::identity(10), 2), ParamError);
}

TEST_CASE("subset chain shrinks by the expected factor") {
  for (std::uint64_t k : {2u, 3u}) {
    SubsetChain chain = initial_chain(5000);
    for (int step = 0; step < 10; ++step) {
      const std::uint64_t n = chain.sets.back().size();
      const PrimePower pp = pick_prime_power(n, k);
      next_subset(chain, Permutation::feistel(pp.q, 10, 100 + step), k);
      const double kk = static_cast<double>(k);
      const std::uint64_t m = chain.sets.back().size();
      if (!pp.relaxed) CHECK(static_cast<double>(m) <= (2 * kk / (2 * kk + 1)) * (1 + 1 / (2 * kk * kk)) * n + 1);
      CHECK(static_cast<double>(m) <= (1.0 - 1.0 / (5.0 * kk)) * n + 1);
      CHECK(std::is_sorted(chain.sets.back().begin(), chain.sets.back().end()));
      const auto& prev = chain.sets[chain.sets.size() - 2];
      CHECK(std::includes(prev.begin(), prev.end(), chain.sets.back().begin(), chain.sets.back().end()));
    }
  }
}

TEST_CASE("a collision pair survives subsampling with the predicted probability") {
  const std::uint64_t trials = 10000;
  const double want = (4.0 / 5.0) * (4.0 / 5.0);
  for (PermSource src : {PermSource::kUniform, PermSource::kFeistel}) {
    std::uint64_t both = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      SubsetChain chain = initial_chain(64);
      const Permutation perm = src == PermSource::kUniform ? Permutation::uniform(64, t) : Permutation::feistel(64, 24, t);
      next_subset(chain, perm, 2);
      const auto& s = chain.sets.back();
      both += std::binary_search(s.begin(), s.end(), 17) && std::binary_search(s.begin(), s.end(), 41) ? 1 : 0;
    }
    CHECK(std::abs(static_cast<double>(both) / trials - want) <= 0.05);
  }
}

TEST_CASE("permutations") {
  const Permutation u = Permutation::uniform(100, 3);
  const Permutation f = Permutation::feistel(100, 5, 3);
  for (std::uint64_t i = 1; i <= 100; ++i) {
    CHECK(u.inverse(u.forward(i)) == i);
    CHECK(f.inverse(f.forward(i)) == i);
  }
}

TEST_CASE("inner runs") {
  SUBCASE("no collision never verifies") {
    std::vector<std::uint64_t> v(40);
    for (std::uint64_t i = 0; i < 40; ++i) v[i] = i + 1;
    const Instance inst = make_instance(v);
    for (std::uint64_t s = 0; s < 200; ++s) {
      const InnerRun run = inner_algorithm2(inst, 8, 2, s);
      CHECK(run.measured.size() == 8);
      CHECK(run.collisions == 0);
      CHECK_FALSE(find_k_collision(inst, run.measured, 2).has_value());
    }
  }
  SUBCASE("unique collision follows the engine distribution") {
    const PlantedInstance planted = planted_instance(1000, 2, 1, 5);
    const std::uint64_t draws = 10000;
    std::uint64_t hits = 0;
    double p = 0.0;
    for (std::uint64_t s = 0; s < draws; ++s) {
      const InnerRun run = inner_algorithm2(planted.instance, 100, 2, s);
      REQUIRE(run.engine_success.has_value());
      p = *run.engine_success;
      CHECK(run.measured.size() == 100);
      CHECK(run.delta.total() == 100 + 2 * run.t1 * run.t2);
      const auto& K = planted.collisions[0];
      hits += std::includes(run.measured.begin(), run.measured.end(), K.begin(), K.end()) ? 1 : 0;
    }
    CHECK(p == doctest::Approx(walk::run_single_solution(walk::reference_params(1000, 100, 2, planted.instance.M)).success_prob));
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(draws));
    CHECK(std::abs(static_cast<double>(hits) / draws - p) <= 3 * sigma);
  }
  SUBCASE("several collisions fall back to a uniform subset") {
    const PlantedInstance planted = planted_instance(40, 2, 3, 8);
    const std::uint64_t draws = 5000;
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < draws; ++s) {
      const InnerRun run = inner_algorithm2(planted.instance, 10, 2, s);
      CHECK(run.collisions == 3);
      CHECK_FALSE(run.engine_success.has_value());
      hits += find_k_collision(planted.instance, run.measured, 2).has_value() ? 1 : 0;
    }
    // Pr[a fixed pair inside a uniform 10-subset of 40] = (10*9)/(40*39).
    const double single = 90.0 / 1560.0;
    CHECK(static_cast<double>(hits) / draws >= single - 3 * std::sqrt(single / draws));
  }
}

TEST_CASE("driver on all-distinct input") {
  std::vector<std::uint64_t> v(200);
  for (std::uint64_t i = 0; i < 200; ++i) v[i] = 3 * i + 1;
  const Instance inst = make_instance(v);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const CollisionResult res = run_k_distinctness(inst, 30, 2, s);
    CHECK_FALSE(res.found.has_value());
    CHECK(res.trace.size() <= res.iteration_cap + 1);
  }
  CHECK_THROWS_AS(run_k_distinctness(inst, 1, 2, 0), ParamError);
}

TEST_CASE("driver falls back to a scan when a subsample is too small for the walk") {
  const Instance inst = make_instance({5, 2, 9, 2, 7, 5, 5});
  // r = 5 leaves fewer than k indices outside the walk subset: immediate scan.
  const CollisionResult scan = run_k_distinctness(inst, 5, 3, 0);
  REQUIRE(scan.found.has_value());
  CHECK(*scan.found == std::vector<std::uint64_t>{1, 6, 7});
  REQUIRE(scan.trace.size() == 1);
  CHECK(scan.trace[0].outcome == "scan-found");
  CHECK(scan.ledger.classical_queries == 7);
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (std::uint64_t r : {3u, 4u}) {
      const CollisionResult res = run_k_distinctness(inst, r, 3, s);
      if (res.found) CHECK(*res.found == std::vector<std::uint64_t>{1, 6, 7});
      for (const auto& rec : res.trace) {
        if (rec.outcome.rfind("walk", 0) == 0) CHECK(rec.size >= rec.r_j + 3);
      }
    }
  }
}

TEST_CASE("driver results verify and are reproducible") {
  const PlantedInstance planted = planted_instance(300, 3, 2, 4);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const CollisionResult a = run_k_distinctness(planted.instance, 40, 3, s);
    const CollisionResult b = run_k_distinctness(planted.instance, 40, 3, s);
    CHECK(a.ledger == b.ledger);
    CHECK(a.found == b.found);
    QueryLedger sum;
    for (const auto& rec : a.trace) sum += rec.cost;
    CHECK(sum == a.ledger);
    if (a.found) {
      const auto& f = *a.found;
      REQUIRE(f.size() == 3);
      CHECK(std::set<std::uint64_t>(f.begin(), f.end()).size() == 3);
      for (std::uint64_t i : f) CHECK(planted.instance.at(i) == planted.instance.at(f[0]));
    }
    CHECK(a.trace.size() <= iteration_cap(300, 3) + 1);
  }
}

TEST_CASE("driver success on planted instances") {
  const double p = walk::run_single_solution(walk::reference_params(60, 16, 2)).success_prob;
  std::uint64_t one = 0, three = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    one += run_k_distinctness(planted_instance(60, 2, 1, 1000 + s).instance, 16, 2, s).found ? 1 : 0;
  }
  for (std::uint64_t s = 0; s < 500; ++s) {
    three += run_k_distinctness(planted_instance(60, 2, 3, 5000 + s).instance, 16, 2, s).found ? 1 : 0;
  }
  CHECK(static_cast<double>(one) / 200.0 >= 0.9 * p);
  CHECK(static_cast<double>(three) / 500.0 >= 0.35);
}

TEST_CASE("Feistel and uniform permutations give indistinguishable success rates") {
  const std::uint64_t n = 600;
  std::uint64_t wins[2] = {0, 0};
  for (std::uint64_t s = 0; s < n; ++s) {
    const Instance inst = planted_instance(60, 2, 3, 9000 + s).instance;
    wins[0] += run_k_distinctness(inst, 16, 2, s, {PermSource::kFeistel}).found ? 1 : 0;
    wins[1] += run_k_distinctness(inst, 16, 2, s, {PermSource::kUniform}).found ? 1 : 0;
  }
  const double a = static_cast<double>(wins[0]) / n, b = static_cast<double>(wins[1]) / n;
  const double pooled = (a + b) / 2;
  const double se = std::sqrt(2 * pooled * (1 - pooled) / n);
  CHECK(std::abs(a - b) <= 3 * se);
}

TEST_CASE("optimal memory and fits") {
  CHECK(optimal_memory(1000, 2) == 100);
  CHECK(optimal_memory(10000, 2) == 464);
  CHECK(optimal_memory(1000000, 2) == 10000);
  CHECK(optimal_memory(1000, 3) == 177);
  CHECK(optimal_memory(10000, 3) == 1000);
  const LogLogFit f = fit_loglog({10, 100, 1000}, {3, 30, 300});
  CHECK(f.slope == doctest::Approx(1.0));
  CHECK(f.intercept == doctest::Approx(std::log(0.3)));
  CHECK_THROWS_AS(exponent_scan(2, {1000, 2000}, 1), ParamError);
  CHECK_THROWS_AS(exponent_scan(2, {3000, 2000, 4000}, 1), ParamError);
}

TEST_CASE("small exponent scan") {
  const ExponentScan scan = exponent_scan(2, {1000, 10000, 100000}, 3, 3);
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.fit.slope >= 0.55);
  CHECK(scan.fit.slope <= 0.8);
  for (const auto& row : scan.rows) CHECK(row.totals.size() == 3);
}

TEST_CASE("tradeoff has an interior minimum") {
  const Tradeoff tr = tradeoff_scan(100000, 2, {64, 1024, 65536}, 2, 3);
  REQUIRE(tr.rows.size() == 3);
  CHECK(tr.rows[1].median_total < tr.rows[0].median_total);
  CHECK(tr.rows[1].median_total < tr.rows[2].median_total);
}

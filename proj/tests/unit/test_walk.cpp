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

#include <bit>
#include <cmath>

#include "doctest.h"
#include "kdist/errors.hpp"
#include "kdist/full_sim.hpp"
#include "kdist/spectral.hpp"
#include "kdist/walk.hpp"

using namespace kdist;
using walk::WalkParams;

namespace {

double binom(std::uint64_t n, std::uint64_t m) {
  if (m > n) return 0.0;
  double out = 1.0;
  for (std::uint64_t i = 0; i < m; ++i) out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return out;
}

// Independent oracle: classify every (S, y) with |S| = r, y outside S, for
// the collision set K = {1..k}, and return squared amplitudes per type.
std::vector<double> enumerated_start(std::uint64_t N, std::uint64_t r, std::uint64_t k) {
  std::vector<double> counts(2 * k + 1, 0.0);
  double total = 0.0;
  const std::uint64_t kmask = (std::uint64_t{1} << k) - 1;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << N); ++s) {
    if (static_cast<std::uint64_t>(std::popcount(s)) != r) continue;
    for (std::uint64_t y = 0; y < N; ++y) {
      if (s >> y & 1) continue;
      const auto j = static_cast<std::uint64_t>(std::popcount(s & kmask));
      const std::uint64_t l = y < k ? 1 : 0;
      counts[2 * j + l] += 1.0;
      total += 1.0;
    }
  }
  for (double& c : counts) c /= total;
  return counts;
}

WalkParams params(std::uint64_t N, std::uint64_t r, std::uint64_t k, std::uint64_t t1 = 0, std::uint64_t t2 = 1) {
  return WalkParams{N, N, r, k, t1, t2};
}

}  // namespace

TEST_CASE("reflection block at one half is the swap") {
  const Eigen::Matrix2d d = walk::reflection_block(0.5);
  CHECK(d(0, 0) == doctest::Approx(0.0));
  CHECK(d(0, 1) == doctest::Approx(1.0));
  CHECK(d(1, 0) == doctest::Approx(1.0));
  CHECK(d(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("start state is an eigenvector with eigenvalue one") {
  const WalkParams p = params(100, 10, 2);
  const walk::SubspaceState s = walk::start_state(p);
  const Vector moved = walk::build_step_unitary(p).entries * s.amps;
  CHECK((moved - s.amps).norm() < 1e-10);
}

TEST_CASE("walk matrices are real orthogonal") {
  for (const WalkParams& p : {params(30, 5, 2), params(50, 7, 3), params(1000, 100, 2)}) {
    CHECK(walk::orthogonality_defect(walk::build_step_unitary(p).entries) < 1e-10);
    CHECK(walk::orthogonality_defect(walk::build_forward_half(p).entries) < 1e-10);
    CHECK(walk::orthogonality_defect(walk::build_backward_half(p).entries) < 1e-10);
  }
}

TEST_CASE("parameter validation rejects degenerate inputs") {
  CHECK_THROWS_AS(walk::validate(params(10, 3, 1)), ParamError);
  CHECK_THROWS_AS(walk::validate(params(10, 10, 2)), ParamError);
  CHECK_THROWS_AS(walk::validate(params(10, 20, 2)), ParamError);
  CHECK_THROWS_AS(walk::validate(params(10, 1, 2)), ParamError);
  CHECK_THROWS_AS(walk::validate(params(5, 3, 3)), ParamError);  // fewer than k indices outside S
  CHECK_NOTHROW(walk::validate(params(6, 3, 3)));
  CHECK_THROWS_AS(walk::validate(WalkParams{10, 10, 3, 2, 0, 0}), ParamError);
  CHECK_THROWS_AS(walk::validate(WalkParams{10, 0, 3, 2, 0, 1}), ParamError);
  CHECK_NOTHROW(walk::validate(params(10, 3, 2)));
}

TEST_CASE("default t2") {
  CHECK(walk::default_t2(100, 2) == 8);  // ceil(pi * 10 / (3 sqrt 2)) = ceil(7.40)
  CHECK(walk::default_t2(400, 2) == 15);
  CHECK(walk::default_t2(1, 2) == 1);
}

TEST_CASE("start state squared amplitudes sum to one") {
  for (const WalkParams& p : {params(4, 2, 2), params(100, 10, 2), params(27000, 900, 3), params(1000000, 10000, 2)}) {
    CHECK(walk::start_state(p).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("start state matches enumeration of basis pairs") {
  SUBCASE("N=4 r=2 k=2") {
    const walk::SubspaceState s = walk::start_state(params(4, 2, 2));
    CHECK(std::abs(s.amp(2, 0) - std::sqrt(1.0 / 6.0)) < 1e-12);
    const auto want = enumerated_start(4, 2, 2);
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::norm(s.amps(static_cast<Eigen::Index>(i))) == doctest::Approx(want[i]));
  }
  SUBCASE("N=8 r=3 k=2") {
    const walk::SubspaceState s = walk::start_state(params(8, 3, 2));
    const auto want = enumerated_start(8, 3, 2);
    REQUIRE(s.amps.size() == 5);
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(std::abs(s.amps(static_cast<Eigen::Index>(i)) - std::sqrt(want[i])) < 1e-12);
    }
  }
  SUBCASE("N=9 r=4 k=3") {
    const walk::SubspaceState s = walk::start_state(params(9, 4, 3));
    const auto want = enumerated_start(9, 4, 3);
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(std::abs(s.amps(static_cast<Eigen::Index>(i)) - std::sqrt(want[i])) < 1e-12);
    }
  }
}

TEST_CASE("phase flip") {
  const WalkParams p = params(30, 5, 2);
  const walk::SubspaceState s = walk::start_state(p);
  const walk::SubspaceState twice = walk::phase_flip(walk::phase_flip(s));
  CHECK((twice.amps - s.amps).norm() == 0.0);

  walk::SubspaceState good;
  good.amps = Vector::Zero(5);
  good.amps(4) = 1.0;
  CHECK(walk::phase_flip(good).amps(4) == Complex(-1.0, 0.0));

  Rng rng(3);
  walk::SubspaceState rnd;
  rnd.amps = Vector(7);
  for (Eigen::Index i = 0; i < 7; ++i) rnd.amps(i) = Complex(rng.normal(), rng.normal());
  rnd.amps.normalize();
  const walk::SubspaceState flipped = walk::phase_flip(rnd);
  CHECK(flipped.norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(flipped.amps(i) == rnd.amps(i));
  CHECK(flipped.amps(6) == -rnd.amps(6));
}

TEST_CASE("zero outer iterations measures the start state") {
  for (const WalkParams& p : {params(6, 3, 2), params(1000, 100, 2), params(200, 20, 3)}) {
    const double want = binom(p.N - p.k, p.r - p.k) / binom(p.N, p.r);
    CHECK(walk::run_single_solution(p).success_prob == doctest::Approx(want).epsilon(1e-10));
    CHECK(walk::good_fraction(p) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("collapsed engine agrees with the full simulation on a small instance") {
  const Instance inst = make_instance({1, 1, 2, 3, 4, 5});
  for (std::uint64_t t1 = 0; t1 <= 10; ++t1) {
    const double full = fullsim::run_full(inst, 3, 2, t1, 2).good_mass;
    const double fast = walk::run_single_solution(WalkParams{6, 5, 3, 2, t1, 2}).success_prob;
    CHECK(std::abs(full - fast) < 1e-9);
  }
}

TEST_CASE("collapsed engine agrees with the full simulation for every small size") {
  for (std::uint64_t N = 4; N <= 8; ++N) {
    for (std::uint64_t k = 2; k <= 3; ++k) {
      for (std::uint64_t r = k; r <= std::min<std::uint64_t>(4, N - k); ++r) {
        const PlantedInstance planted = planted_instance(N, k, 1, N * 31 + k * 7 + r);
        for (std::uint64_t t2 = 1; t2 <= 3; ++t2) {
          for (std::uint64_t t1 = 0; t1 <= 4; ++t1) {
            const double full = fullsim::run_full(planted.instance, static_cast<std::uint32_t>(r), k, t1, t2).good_mass;
            const double fast = walk::run_single_solution(WalkParams{N, planted.instance.M, r, k, t1, t2}).success_prob;
            CHECK(std::abs(full - fast) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("ledger charges setup plus two queries per walk step") {
  const walk::SingleRun run = walk::run_single_solution(WalkParams{1000, 1000, 100, 2, 7, 5});
  CHECK(run.ledger.setup_queries == 100);
  CHECK(run.ledger.walk_queries == 70);
  CHECK(run.ledger.total() == 100 + 2 * 7 * 5);
  CHECK(run.final_state.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reference parameters reach constant success probability") {
  const WalkParams p = walk::reference_params(1000, 100, 2);
  CHECK(p.t2 == 8);
  CHECK(walk::run_single_solution(p).success_prob >= 0.4);
}

TEST_CASE("success curve") {
  const WalkParams p = walk::reference_params(1000, 100, 2);
  const auto curve = walk::success_curve(p, 2 * p.t1);
  REQUIRE(curve.size() == 2 * p.t1 + 1);
  CHECK(curve[0].success_prob == doctest::Approx(walk::good_fraction(p)).epsilon(1e-10));
  std::size_t best = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].t1 == i);
    CHECK(curve[i].success_prob >= 0.0);
    CHECK(curve[i].success_prob <= 1.0 + 1e-12);
    if (curve[i].success_prob > curve[best].success_prob) best = i;
  }
  // Peak of the first lobe against floor(pi / (2 beta)).
  CHECK(static_cast<double>(best) >= 0.8 * static_cast<double>(p.t1));
  CHECK(static_cast<double>(best) <= 1.2 * static_cast<double>(p.t1));

  WalkParams q = p;
  for (std::uint64_t t1 : {0u, 3u, 11u}) {
    q.t1 = t1;
    CHECK(curve[t1].success_prob == doctest::Approx(walk::run_single_solution(q).success_prob).epsilon(1e-12));
  }
}

TEST_CASE("every operation preserves the norm") {
  WalkParams p = params(500, 40, 3, 0, 6);
  walk::SubspaceState s = walk::start_state(p);
  const Matrix u = walk::build_step_unitary(p).entries;
  for (int step = 0; step < 200; ++step) {
    s = walk::phase_flip(s);
    s.amps = u * s.amps;
    CHECK(std::abs(s.norm() - 1.0) < 1e-9);
  }
}

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

#include <cmath>

#include "doctest.h"
#include "kdist/errors.hpp"
#include "kdist/full_sim.hpp"
#include "kdist/rng.hpp"
#include "kdist/walk.hpp"

using namespace kdist;
using fullsim::Mode;

TEST_CASE("basis sizes and order") {
  const auto h = fullsim::enumerate_basis(4, 2, Mode::kH);
  const auto hp = fullsim::enumerate_basis(4, 2, Mode::kHPrime);
  CHECK(h.size() == 12);
  CHECK(hp.size() == 12);
  CHECK(fullsim::members(h[0].set) == std::vector<std::uint32_t>{1, 2});
  CHECK(h[0].y == 3);
  CHECK(h[1].y == 4);
  CHECK(fullsim::members(h[2].set) == std::vector<std::uint32_t>{1, 3});

  const auto big = fullsim::enumerate_basis(10, 4, Mode::kH);
  CHECK(big.size() == 210 * 6);
  for (std::size_t i = 1; i < big.size(); ++i) {
    const auto a = fullsim::members(big[i - 1].set);
    const auto b = fullsim::members(big[i].set);
    CHECK((a < b || (a == b && big[i - 1].y < big[i].y)));
  }
  for (std::size_t i = 0; i < hp.size(); ++i) CHECK(hp.index_of(hp[i].set, hp[i].y) == i);
}

TEST_CASE("size guard refuses oversized bases") {
  CHECK_THROWS_AS(fullsim::enumerate_basis(30, 10, Mode::kH), SizeLimitError);
  CHECK_THROWS_AS(fullsim::enumerate_basis(10, 4, Mode::kH, 100), SizeLimitError);
  CHECK_THROWS_AS(fullsim::enumerate_basis(5, 5, Mode::kH), ParamError);
}

TEST_CASE("walk step preserves the norm and matches the collapsed step") {
  const auto space = fullsim::make_space(6, 2);
  const std::vector<std::uint64_t> K = {2, 5};
  const walk::WalkParams p{6, 6, 2, 2, 0, 1};

  Rng rng(9);
  fullsim::FullState s = fullsim::uniform_state(space);
  for (Eigen::Index i = 0; i < s.amps.size(); ++i) s.amps(i) = Complex(rng.normal(), rng.normal());
  s.amps.normalize();
  QueryLedger ledger;
  const fullsim::FullState moved = fullsim::walk_step(s, &ledger);
  CHECK(std::abs(moved.norm() - 1.0) < 1e-12);
  CHECK(ledger.walk_queries == 2);

  const walk::SubspaceState start = walk::start_state(p);
  const fullsim::FullState embedded = fullsim::embed_subspace(start, space, K);
  CHECK((embedded.amps - fullsim::uniform_state(space).amps).norm() < 1e-12);
  walk::SubspaceState stepped;
  stepped.amps = walk::build_step_unitary(p).entries * start.amps;
  const fullsim::FullState want = fullsim::embed_subspace(stepped, space, K);
  CHECK((fullsim::walk_step(embedded).amps - want.amps).norm() < 1e-10);

  // A non-stationary state in the subspace as well.
  walk::SubspaceState other;
  other.amps = Vector::Zero(5);
  other.amps(4) = 1.0;
  const fullsim::FullState e2 = fullsim::embed_subspace(other, space, K);
  walk::SubspaceState other_stepped;
  other_stepped.amps = walk::build_step_unitary(p).entries * other.amps;
  CHECK((fullsim::walk_step(e2).amps - fullsim::embed_subspace(other_stepped, space, K).amps).norm() < 1e-10);
}

TEST_CASE("outside diffusion is an involution") {
  const auto space = fullsim::make_space(7, 3);
  Rng rng(4);
  fullsim::FullState s = fullsim::uniform_state(space);
  for (Eigen::Index i = 0; i < s.amps.size(); ++i) s.amps(i) = Complex(rng.normal(), rng.normal());
  s.amps.normalize();
  const fullsim::FullState twice = fullsim::diffuse_outside(fullsim::diffuse_outside(s));
  CHECK((twice.amps - s.amps).norm() < 1e-12);
}

TEST_CASE("run_full") {
  SUBCASE("all distinct values never succeed") {
    const Instance inst = make_instance({1, 2, 3, 4, 5, 6, 7});
    const auto run = fullsim::run_full(inst, 3, 2, 5, 2);
    CHECK(run.good_mass == 0.0);
    double total = 0.0;
    for (const auto& sp : run.distribution) total += sp.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("agrees with the collapsed engine") {
    const Instance inst = make_instance({1, 1, 2, 3, 4, 5});
    for (std::uint64_t t1 = 0; t1 <= 6; ++t1) {
      const auto run = fullsim::run_full(inst, 3, 2, t1, 2);
      const double fast = walk::run_single_solution(walk::WalkParams{6, 5, 3, 2, t1, 2}).success_prob;
      CHECK(std::abs(run.good_mass - fast) < 1e-9);
      double total = 0.0;
      for (const auto& sp : run.distribution) total += sp.probability;
      CHECK(std::abs(total - 1.0) < 1e-9);
      CHECK(run.ledger.total() == 3 + 2 * t1 * 2);
    }
  }
}

TEST_CASE("projection onto the symmetric subspace") {
  const std::vector<std::uint64_t> K = {1, 4};
  const auto space = fullsim::make_space(6, 2);
  const Instance inst = make_instance({7, 2, 3, 7, 5, 6});

  SUBCASE("start state has no residual") {
    const auto proj = fullsim::project_to_subspace(fullsim::uniform_state(space), K);
    CHECK(proj.residual < 1e-12);
    CHECK((proj.sub.amps - walk::start_state(walk::WalkParams{6, 7, 2, 2, 0, 1}).amps).norm() < 1e-12);
  }
  SUBCASE("closure under walk steps and flips") {
    Rng rng(11);
    fullsim::FullState s = fullsim::uniform_state(space);
    for (int n = 0; n < 60; ++n) {
      s = rng.below(3) == 0 ? fullsim::conditional_flip(s, inst, 2) : fullsim::walk_step(s);
      CHECK(fullsim::project_to_subspace(s, K).residual < 1e-9);
    }
  }
  SUBCASE("a state orthogonal to the subspace projects to zero") {
    Rng rng(5);
    fullsim::FullState s = fullsim::uniform_state(space);
    for (Eigen::Index i = 0; i < s.amps.size(); ++i) s.amps(i) = Complex(rng.normal(), rng.normal());
    const auto first = fullsim::project_to_subspace(s, K);
    s.amps -= fullsim::embed_subspace(first.sub, space, K).amps;
    s.amps.normalize();
    const auto proj = fullsim::project_to_subspace(s, K);
    CHECK(proj.sub.amps.norm() < 1e-12);
    CHECK(proj.residual == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("type fractions match the start amplitudes") {
  const auto basis = fullsim::enumerate_basis(8, 3, Mode::kH);
  const auto frac = fullsim::type_fractions(basis, {3, 6});
  const auto start = walk::start_state(walk::WalkParams{8, 8, 3, 2, 0, 1});
  for (std::size_t i = 0; i < frac.size(); ++i) {
    CHECK(frac[i] == doctest::Approx(std::norm(start.amps(static_cast<Eigen::Index>(i)))).epsilon(1e-12));
  }
}

TEST_CASE("mode mismatch is rejected") {
  const auto space = fullsim::make_space(5, 2);
  fullsim::FullState s = fullsim::uniform_state(space);
  s.mode = Mode::kHPrime;
  CHECK_THROWS_AS(fullsim::walk_step(s), ParamError);
}

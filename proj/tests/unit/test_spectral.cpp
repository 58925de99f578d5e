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
#include <numbers>

#include "doctest.h"
#include "kdist/errors.hpp"
#include "kdist/spectral.hpp"
#include "kdist/walk.hpp"

using namespace kdist;
using std::numbers::pi;

namespace {

walk::WalkParams params(std::uint64_t N, std::uint64_t r, std::uint64_t k) { return {N, N, r, k, 0, 1}; }

spectral::GengroverInput single_mode(double alpha) {
  spectral::GengroverInput in;
  in.alpha = alpha;
  in.epsilon = pi / 2;
  in.modes.push_back({pi / 2, std::sqrt((1.0 - alpha * alpha) / 2.0)});
  return in;
}

}  // namespace

TEST_CASE("eigenphases of simple matrices") {
  const auto id = spectral::eigenphases(Matrix::Identity(4, 4));
  for (double ph : id.phases) CHECK(std::abs(ph) < 1e-12);

  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const auto sp = spectral::eigenphases(swap);
  REQUIRE(sp.phases.size() == 2);
  CHECK(std::abs(sp.phases[0]) < 1e-12);
  CHECK(sp.phases[1] == doctest::Approx(pi));
  CHECK((sp.reconstruct() - swap).norm() < 1e-8);

  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(spectral::eigenphases(bad), MatrixError);
}

TEST_CASE("walk step spectrum") {
  const walk::WalkParams p = params(100, 10, 2);
  const auto sp = spectral::eigenphases(walk::build_step_unitary(p));
  CHECK((sp.reconstruct() - walk::build_step_unitary(p).entries).norm() < 1e-8);
  int zeros = 0;
  Eigen::Index zero_col = -1;
  for (std::size_t i = 0; i < sp.phases.size(); ++i) {
    if (std::abs(sp.phases[i]) < 1e-9) {
      ++zeros;
      zero_col = static_cast<Eigen::Index>(i);
    }
  }
  REQUIRE(zeros == 1);
  const Vector start = walk::start_state(p).amps;
  CHECK((sp.vectors.col(zero_col) - start).norm() < 1e-9);
  // Remaining phases come in +- pairs.
  std::vector<double> ph = sp.phases;
  for (std::size_t i = 0; i < ph.size(); ++i) CHECK(ph[i] == doctest::Approx(-ph[ph.size() - 1 - i]).epsilon(1e-9));
}

TEST_CASE("eigenphases reject half-step operators") {
  CHECK_THROWS_AS(spectral::eigenphases(walk::build_forward_half(params(30, 5, 2))), MatrixError);
}

TEST_CASE("eigenphase law") {
  for (const auto& row : spectral::theta_table(params(8000, 400, 2))) CHECK(row.rel_error <= 0.1);
  const auto t3 = spectral::theta_table(params(27000, 900, 3));
  REQUIRE(t3.size() == 3);
  for (const auto& row : t3) {
    CHECK(row.rel_error <= 0.1);
    CHECK(row.predicted == doctest::Approx(2.0 * std::sqrt(static_cast<double>(row.j)) / 30.0));
  }
  // The correction is driven by r/N: it falls as N grows at fixed r ...
  double prev = 1.0;
  for (std::uint64_t ratio : {10u, 40u, 160u}) {
    const double e = spectral::theta_table(params(ratio * 400, 400, 2))[0].rel_error;
    CHECK(e < prev);
    prev = e;
  }
  // ... and settles to a constant of about r/(2N) at fixed N/r.
  double last = 0.0, step = 1.0;
  for (std::uint64_t r : {100u, 400u, 1600u, 6400u}) {
    const double e = spectral::theta_table(params(20 * r, r, 2))[0].rel_error;
    CHECK(std::abs(e - last) < step);
    step = std::abs(e - last);
    last = e;
  }
  CHECK(last == doctest::Approx(1.0 / 40.0).epsilon(0.1));
}

TEST_CASE("min-cost assignment matches brute force") {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform01();
    const auto got = spectral::min_cost_assignment(cost);
    double got_cost = 0.0;
    for (int i = 0; i < n; ++i) got_cost += cost(i, static_cast<Eigen::Index>(got[i]));
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    double best = INFINITY;
    do {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got_cost == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("Hoffman-Wielandt check") {
  Rng rng(17);
  const Matrix b = spectral::random_unitary(4, rng);
  SUBCASE("identity perturbation") {
    const auto res = spectral::hoffman_wielandt_check(Matrix::Identity(4, 4), b);
    CHECK(res.holds);
    CHECK(res.bound == 0.0);
    CHECK(std::abs(res.margin) < 1e-9);
  }
  SUBCASE("global phase") {
    const Complex z = std::polar(1.0, 0.3);
    const auto res = spectral::hoffman_wielandt_check(z * Matrix::Identity(4, 4), b);
    CHECK(res.holds);
    CHECK(res.bound == doctest::Approx(4.0 * std::abs(z - 1.0)));
    CHECK(res.max_distance <= std::abs(z - 1.0) + 1e-9);
  }
  SUBCASE("random near-identity pairs") {
    for (int t = 0; t < 100; ++t) {
      const Matrix a = spectral::near_identity_unitary(4, 0.2, rng);
      CHECK((a - Matrix::Identity(4, 4)).operatorNorm() <= 0.2 + 1e-9);
      CHECK(spectral::hoffman_wielandt_check(a, spectral::random_unitary(4, rng)).holds);
    }
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(spectral::hoffman_wielandt_check(Matrix::Identity(3, 3), b), MatrixError);
    Matrix bad = Matrix::Identity(4, 4);
    bad(1, 1) = 0.5;
    CHECK_THROWS_AS(spectral::hoffman_wielandt_check(bad, b), MatrixError);
  }
}

TEST_CASE("random unitaries are unitary") {
  Rng rng(8);
  for (std::size_t d = 1; d <= 8; ++d) CHECK(spectral::unitarity_defect(spectral::random_unitary(d, rng)) < 1e-12);
}

TEST_CASE("generalized Grover analysis on one mode") {
  const double alpha = 0.01;
  const auto in = single_mode(alpha);
  const auto model = spectral::build_model_system(in);
  const auto rep = spectral::gengrover_analysis(in, model);
  CHECK(std::abs(spectral::gengrover_f(in, rep.beta)) < 1e-10);
  CHECK(rep.beta >= rep.bracket_lo);
  CHECK(rep.beta <= rep.bracket_hi);
  CHECK(rep.beta >= in.epsilon * alpha / std::sqrt(pi));
  CHECK(rep.beta <= 2.6 * alpha);
  CHECK(rep.t == static_cast<std::uint64_t>(std::floor(pi / (2.0 * rep.beta))));
  REQUIRE(rep.measured_overlap.has_value());
  CHECK(*rep.measured_overlap >= 0.3);
  CHECK(*rep.measured_overlap == doctest::Approx(spectral::overlap_at_t(model.u1, model.u2, model.psi_start,
                                                                          model.psi_good, rep.t)));
  CHECK(rep.predicted_overlap == doctest::Approx((1 - alpha * alpha) / std::sqrt(1 + 1 / std::pow(std::tan(pi / 4), 2))));
}

TEST_CASE("beta scales linearly with alpha") {
  const double b1 = spectral::gengrover_analysis(single_mode(0.02)).beta;
  const double b2 = spectral::gengrover_analysis(single_mode(0.01)).beta;
  CHECK(b2 / b1 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("generalized Grover regime checks") {
  CHECK_THROWS_AS(spectral::gengrover_analysis(single_mode(0.2)), RegimeError);
  auto in = single_mode(0.01);
  in.modes[0].weight *= 1.1;
  CHECK_THROWS_AS(spectral::gengrover_analysis(in), RegimeError);
  auto at_pi = single_mode(0.01);
  at_pi.modes[0].theta = pi;
  CHECK_THROWS_AS(spectral::gengrover_analysis(at_pi), RegimeError);
}

TEST_CASE("model system realizes its input") {
  Rng rng(21);
  const auto in = spectral::random_gengrover_input(1e-3, 0.3, 4, rng);
  const auto model = spectral::build_model_system(in);
  CHECK(spectral::unitarity_defect(model.u1) < 1e-12);
  CHECK(spectral::unitarity_defect(model.u2) < 1e-12);
  CHECK(std::abs(model.psi_good.dot(model.psi_start)) == doctest::Approx(in.alpha));
  CHECK(((model.u2 * model.psi_start) - model.psi_start).norm() < 1e-12);
  CHECK(model.psi_good.norm() == doctest::Approx(1.0));
}

TEST_CASE("random mode sets meet the overlap guarantee") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto in = spectral::random_gengrover_input(1e-3, 0.3, 4, rng);
    const auto rep = spectral::gengrover_analysis(in, spectral::build_model_system(in));
    CHECK(std::abs(spectral::gengrover_f(in, rep.beta)) < 1e-9);
    CHECK(*rep.measured_overlap >= spectral::guaranteed_overlap(1e-3, 0.3));
  }
}

TEST_CASE("overlap_at_t") {
  const auto in = single_mode(0.05);
  const auto m = spectral::build_model_system(in);
  CHECK(spectral::overlap_at_t(m.u1, m.u2, m.psi_start, m.psi_good, 0) == doctest::Approx(0.05));
  const Vector rotated = std::polar(1.0, 1.1) * m.psi_good;
  CHECK(spectral::overlap_at_t(m.u1, m.u2, m.psi_start, rotated, 7) ==
        doctest::Approx(spectral::overlap_at_t(m.u1, m.u2, m.psi_start, m.psi_good, 7)));
  CHECK_THROWS_AS(spectral::overlap_at_t(m.u1, m.u2, Vector::Zero(2), m.psi_good, 1), MatrixError);
}

TEST_CASE("walk system overlap equals the walk success amplitude") {
  const walk::WalkParams p = walk::reference_params(1000, 100, 2);
  const walk::BlockUnitary u = walk::build_step_unitary(p);
  Matrix u2 = Matrix::Identity(5, 5);
  for (std::uint64_t s = 0; s < p.t2; ++s) u2 = u.entries * u2;
  Vector good = Vector::Zero(5);
  good(4) = 1.0;
  const Matrix u1 = Matrix::Identity(5, 5) - 2.0 * good * good.adjoint();
  const double ov = spectral::overlap_at_t(u1, u2, walk::start_state(p).amps, good, p.t1);
  CHECK(std::abs(ov - std::sqrt(walk::run_single_solution(p).success_prob)) < 1e-9);
}

TEST_CASE("principal phase and spectral t1") {
  const walk::WalkParams p = walk::reference_params(1000, 100, 2);
  const double beta = spectral::principal_phase(p);
  CHECK(beta > 0.0);
  CHECK(p.t1 == static_cast<std::uint64_t>(std::floor(pi / (2.0 * beta))));
}

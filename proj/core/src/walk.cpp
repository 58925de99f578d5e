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

#include "kdist/walk.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kdist/errors.hpp"
#include "kdist/spectral.hpp"

namespace kdist::walk {

namespace {

std::string describe(const WalkParams& p) {
  return "N=" + std::to_string(p.N) + " r=" + std::to_string(p.r) + " k=" + std::to_string(p.k);
}

// C(k, j) as a double; k is small.
double small_binomial(std::uint64_t n, std::uint64_t j) {
  double out = 1.0;
  for (std::uint64_t i = 0; i < j; ++i) {
    out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return out;
}

// C(N-k, r-j) / C(N, r) expanded into O(k) factors so large N stays exact
// to rounding: prod_{a<j} (r-a) * prod_{b<k-j} (N-r-b) / prod_{c<k} (N-c).
double subset_ratio(const WalkParams& p, std::uint64_t j) {
  const auto N = static_cast<double>(p.N);
  const auto r = static_cast<double>(p.r);
  double out = 1.0;
  std::uint64_t num_a = 0;
  std::uint64_t num_b = 0;
  for (std::uint64_t c = 0; c < p.k; ++c) {
    double num;
    if (num_a < j) {
      num = r - static_cast<double>(num_a++);
    } else {
      num = N - r - static_cast<double>(num_b++);
    }
    out *= num / (N - static_cast<double>(c));
  }
  return out;
}

Eigen::MatrixXd identity(std::size_t n) { return Eigen::MatrixXd::Identity(n, n); }

}  // namespace

void validate(const WalkParams& p) {
  if (p.k < 2) throw ParamError("collision arity k must be >= 2 (" + describe(p) + ")");
  if (p.r < p.k) throw ParamError("subset size r must be >= k (" + describe(p) + ")");
  if (p.r >= p.N) throw ParamError("subset size r must be < N (" + describe(p) + ")");
  if (p.N - p.r < p.k) throw ParamError("need at least k indices outside the subset, N - r >= k (" + describe(p) + ")");
  if (p.M < 1) throw ParamError("alphabet size M must be >= 1");
  if (p.t2 < 1) throw ParamError("t2 must be >= 1");
}

std::uint64_t default_t2(std::uint64_t r, std::uint64_t k) {
  const double v = std::numbers::pi / (3.0 * std::sqrt(static_cast<double>(k))) *
                   std::sqrt(static_cast<double>(r));
  return static_cast<std::uint64_t>(std::ceil(v - 1e-12));
}

WalkParams reference_params(std::uint64_t N, std::uint64_t r, std::uint64_t k, std::uint64_t M) {
  WalkParams p;
  p.N = N;
  p.r = r;
  p.k = k;
  p.M = M == 0 ? N : M;
  validate(p);
  p.t2 = default_t2(r, k);
  p.t1 = spectral::spectral_t1(p);
  return p;
}

std::size_t basis_index(std::uint64_t k, std::uint64_t j, std::uint64_t l) {
  if (j > k || l > 1 || (j == k && l == 1)) {
    throw ParamError("no basis state of type (" + std::to_string(j) + "," + std::to_string(l) + ")");
  }
  return static_cast<std::size_t>(2 * j + l);
}

Eigen::Matrix2d reflection_block(double eps) {
  const double off = 2.0 * std::sqrt(std::max(0.0, eps - eps * eps));
  Eigen::Matrix2d d;
  d << -1.0 + 2.0 * eps, off, off, 1.0 - 2.0 * eps;
  return d;
}

BlockUnitary build_forward_half(const WalkParams& p) {
  validate(p);
  const std::size_t n = p.dim();
  Eigen::MatrixXd m = identity(n);
  const auto outside = static_cast<double>(p.N - p.r);
  for (std::uint64_t j = 0; j < p.k; ++j) {
    const double eps = static_cast<double>(p.k - j) / outside;
    const auto at = static_cast<Eigen::Index>(2 * j);
    m.block<2, 2>(at, at) = reflection_block(1.0 - eps);
  }
  return {m.cast<Complex>(), BasisTag::kForwardHalf};
}

BlockUnitary build_backward_half(const WalkParams& p) {
  validate(p);
  const std::size_t n = p.dim();
  Eigen::MatrixXd m = identity(n);
  const auto inside = static_cast<double>(p.r + 1);
  for (std::uint64_t j = 1; j <= p.k; ++j) {
    const auto at = static_cast<Eigen::Index>(2 * j - 1);
    m.block<2, 2>(at, at) = reflection_block(static_cast<double>(j) / inside);
  }
  return {m.cast<Complex>(), BasisTag::kBackwardHalf};
}

BlockUnitary build_step_unitary(const WalkParams& p) {
  const BlockUnitary fwd = build_forward_half(p);
  const BlockUnitary bwd = build_backward_half(p);
  return {bwd.entries * fwd.entries, BasisTag::kSubspace};
}

double good_fraction(const WalkParams& p) {
  validate(p);
  return subset_ratio(p, p.k);
}

SubspaceState start_state(const WalkParams& p) {
  validate(p);
  const auto outside = static_cast<double>(p.N - p.r);
  SubspaceState s;
  s.amps = Vector::Zero(static_cast<Eigen::Index>(p.dim()));
  for (std::uint64_t j = 0; j <= p.k; ++j) {
    // Fraction of S with |S ∩ K| = j, then split by where y falls.
    const double sets = small_binomial(p.k, j) * subset_ratio(p, j);
    const auto missing = static_cast<double>(p.k - j);
    s.amps(static_cast<Eigen::Index>(basis_index(p.k, j, 0))) =
        std::sqrt(sets * (outside - missing) / outside);
    if (j < p.k) {
      s.amps(static_cast<Eigen::Index>(basis_index(p.k, j, 1))) =
          std::sqrt(sets * missing / outside);
    }
  }
  return s;
}

SubspaceState phase_flip(SubspaceState state) {
  state.amps(state.amps.size() - 1) *= -1.0;
  return state;
}

namespace {

// W = U^t2 * Flip, the matrix of one outer iteration.
Matrix iteration_matrix(const WalkParams& p) {
  const Matrix u = build_step_unitary(p).entries;
  Matrix w = Matrix::Identity(u.rows(), u.cols());
  for (std::uint64_t s = 0; s < p.t2; ++s) w = u * w;
  w.col(w.cols() - 1) *= -1.0;
  return w;
}

}  // namespace

SingleRun run_single_solution(const WalkParams& p) {
  validate(p);
  const Matrix w = iteration_matrix(p);
  SingleRun run;
  run.final_state = start_state(p);
  for (std::uint64_t t = 0; t < p.t1; ++t) {
    run.final_state.amps = w * run.final_state.amps;
  }
  run.success_prob = run.final_state.good_probability();
  run.ledger.setup_queries = p.r;
  run.ledger.walk_queries = 2 * p.t1 * p.t2;
  return run;
}

std::vector<CurvePoint> success_curve(const WalkParams& p, std::uint64_t t1_max) {
  validate(p);
  const Matrix w = iteration_matrix(p);
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(t1_max + 1));
  Vector state = start_state(p).amps;
  for (std::uint64_t t = 0; t <= t1_max; ++t) {
    out.push_back({t, std::norm(state(state.size() - 1))});
    if (t < t1_max) state = w * state;
  }
  return out;
}

double orthogonality_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  const Matrix gram = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return gram.cwiseAbs().maxCoeff() + m.imag().cwiseAbs().maxCoeff();
}

}  // namespace kdist::walk

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

// Collapsed (2k+1)-dimensional model of the Johnson-graph walk for
// k-distinctness under the unique-collision promise.
//
// Basis order of the symmetric subspace: (0,0),(0,1),(1,0),(1,1),...,
// (k-1,0),(k-1,1),(k,0), where a basis pair (S,y) has type (j,l) when
// |S ∩ K| = j and l = [y ∈ K] for the collision set K. (k,0) is psi_good.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kdist/ledger.hpp"

namespace kdist {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;

namespace walk {

struct WalkParams {
  std::uint64_t N = 0;   // instance length
  std::uint64_t M = 1;   // alphabet size
  std::uint64_t r = 0;   // subset size
  std::uint64_t k = 2;   // collision arity
  std::uint64_t t1 = 0;  // outer iterations
  std::uint64_t t2 = 1;  // walk steps per outer iteration

  std::size_t dim() const noexcept { return static_cast<std::size_t>(2 * k + 1); }
};

/// Throws ParamError unless 2 <= k <= r <= N - k, M >= 1 and t2 >= 1.
void validate(const WalkParams& p);

/// ceil(pi / (3 sqrt(k)) * sqrt(r)).
std::uint64_t default_t2(std::uint64_t r, std::uint64_t k);

/// Params with t2 at its default and t1 = floor(pi / (2 beta)) from the
/// exact spectrum of the iteration (see spectral::spectral_t1).
WalkParams reference_params(std::uint64_t N, std::uint64_t r, std::uint64_t k,
                            std::uint64_t M = 0);

/// Position of psi_{j,l} in the canonical ordering.
std::size_t basis_index(std::uint64_t k, std::uint64_t j, std::uint64_t l);

struct SubspaceState {
  Vector amps;

  std::uint64_t k() const noexcept { return static_cast<std::uint64_t>(amps.size() - 1) / 2; }
  Complex amp(std::uint64_t j, std::uint64_t l) const { return amps(basis_index(k(), j, l)); }
  double norm() const { return amps.norm(); }
  double good_probability() const { return std::norm(amps(amps.size() - 1)); }
};

enum class BasisTag {
  kSubspace,      // H~ -> H~ (a full walk step)
  kForwardHalf,   // H~ -> H~' (steps 1-3 of a walk step)
  kBackwardHalf,  // H~' -> H~ (steps 4-6)
};

/// Dense representation of a walk operator on the symmetric subspaces.
/// Rows of kForwardHalf use the H~' order phi(0,0),phi(1,1),phi(1,0),
/// phi(2,1),...,phi(k,1),phi(k,0); kBackwardHalf takes that order as columns.
struct BlockUnitary {
  Matrix entries;
  BasisTag basis = BasisTag::kSubspace;
};

/// The 2x2 reflection [[-1+2e, 2 sqrt(e-e^2)], [2 sqrt(e-e^2), 1-2e]].
Eigen::Matrix2d reflection_block(double eps);

/// Steps 1-3: block diagonal, block j maps (psi(j,0), psi(j,1)) to
/// (phi(j,0), phi(j+1,1)) by D_{1 - (k-j)/(N-r)}, plus a trailing 1.
BlockUnitary build_forward_half(const WalkParams& p);

/// Steps 4-6: leading 1, then block D_{j/(r+1)} for j = 1..k mapping
/// (phi(j,1), phi(j,0)) to (psi(j-1,1), psi(j,0)).
BlockUnitary build_backward_half(const WalkParams& p);

/// One walk step U = backward * forward, as a map H~ -> H~.
BlockUnitary build_step_unitary(const WalkParams& p);

/// alpha' = C(N-k, r-k) / C(N, r): probability that a uniform S contains K.
double good_fraction(const WalkParams& p);

/// Uniform superposition over all (S, y), expressed in the collapsed basis.
SubspaceState start_state(const WalkParams& p);

/// Conditional phase flip: negates the (k,0) amplitude.
SubspaceState phase_flip(SubspaceState state);

struct SingleRun {
  SubspaceState final_state;
  double success_prob = 0.0;
  QueryLedger ledger;
};

/// Applies (U^t2 * Flip)^t1 to the start state. Charges r setup queries and
/// two queries per walk step.
SingleRun run_single_solution(const WalkParams& p);

struct CurvePoint {
  std::uint64_t t1 = 0;
  double success_prob = 0.0;
};

/// Success probability for every t1 in [0, t1_max] (p.t1 is ignored).
std::vector<CurvePoint> success_curve(const WalkParams& p, std::uint64_t t1_max);

/// Largest |(M^T M - I)_ij| plus largest |Im M_ij|.
double orthogonality_defect(const Matrix& m);

}  // namespace walk
}  // namespace kdist

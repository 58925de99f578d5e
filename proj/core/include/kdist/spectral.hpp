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

// Eigen-analysis of the walk: eigenphase extraction, the eigenphase law
// table, the Hoffman-Wielandt product bound, and the generalized Grover
// analysis that fixes the outer iteration count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kdist/rng.hpp"
#include "kdist/walk.hpp"

namespace kdist::spectral {

/// Eigenphases in (-pi, pi], ascending, with matching orthonormal columns in
/// `vectors`. Each column is scaled so its first non-negligible component is
/// positive real.
struct PhaseSpectrum {
  std::vector<double> phases;
  Matrix vectors;

  Matrix reconstruct() const;
};

PhaseSpectrum eigenphases(const Matrix& u, double tol = kDefaultTol);
PhaseSpectrum eigenphases(const walk::BlockUnitary& u, double tol = kDefaultTol);

/// max |(U^* U - I)_ij|.
double unitarity_defect(const Matrix& u);

struct ThetaRow {
  std::uint64_t j = 0;
  double theta = 0.0;      // exact eigenphase of one walk step
  double predicted = 0.0;  // 2 sqrt(j) / sqrt(r)
  double rel_error = 0.0;  // |theta sqrt(r) / (2 sqrt(j)) - 1|
};

/// Positive eigenphases of one walk step matched to j = 1..k in ascending order.
std::vector<ThetaRow> theta_table(const walk::WalkParams& p);

struct HoffmanWielandtResult {
  bool holds = false;
  double margin = 0.0;        // bound - max_distance
  double bound = 0.0;         // sum_i |delta_i|
  double max_distance = 0.0;  // max_j |mu_j - mu'_{pairing_j}|
  std::vector<std::size_t> pairing;
};

/// Eigenvalues of A are 1 + delta_i; mu are eigenvalues of B and mu' of AB.
/// Pairs mu with mu' by minimum total squared distance and checks
/// max |mu_j - mu'_j| <= sum |delta_i|.
HoffmanWielandtResult hoffman_wielandt_check(const Matrix& a, const Matrix& b,
                                             double tol = kDefaultTol);

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost);

struct Mode {
  double theta = 0.0;   // eigenphase of the +theta eigenvector
  double weight = 0.0;  // a_j >= 0, overlap of psi_good with each of w_{j,+-}
};

struct GengroverInput {
  double alpha = 0.0;  // <psi_good|psi_start>
  std::vector<Mode> modes;
  double epsilon = 0.0;  // spectral gap: every theta in [epsilon, 2 pi - epsilon]
};

struct GengroverReport {
  double beta = 0.0;
  std::uint64_t t = 0;              // floor(pi / (2 beta))
  double predicted_overlap = 0.0;   // lower bound (1-alpha^2)/sqrt(1+cot^2(eps/2))
  std::optional<double> measured_overlap;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

inline constexpr double kMaxAlpha = 0.1;

/// f(beta) = alpha^2 cot(beta/2) + sum a_j^2 (cot((beta-theta_j)/2) + cot((beta+theta_j)/2)).
double gengrover_f(const GengroverInput& in, double beta);

/// Throws RegimeError when the input invariants fail, alpha >= 0.1, or the
/// bracket shows no sign change.
void validate(const GengroverInput& in, double tol = kDefaultTol);

/// Root of f by bisection on [eps alpha / sqrt(2 pi (1-alpha^2)), sqrt(2 pi) alpha / sqrt(1-alpha^2)].
GengroverReport gengrover_analysis(const GengroverInput& in);

/// A concrete system realizing `in`: psi_start = e_0, U2 = diag(1, R(theta_1), ...)
/// with 2x2 rotations R, psi_good real with block j equal to (sqrt(2) a_j, 0),
/// and U1 the reflection about psi_good.
struct ModelSystem {
  Matrix u1;
  Matrix u2;
  Vector psi_start;
  Vector psi_good;
};

ModelSystem build_model_system(const GengroverInput& in);

/// As above, additionally filling measured_overlap from the model system.
GengroverReport gengrover_analysis(const GengroverInput& in, const ModelSystem& model);

/// |<psi_good| (U2 U1)^t |psi_start>| by direct iteration.
double overlap_at_t(const Matrix& u1, const Matrix& u2, const Vector& psi_start,
                    const Vector& psi_good, std::uint64_t t);

/// Decomposition of psi_good = psi_(k,0) over the eigenvectors of U^t2.
GengroverInput walk_gengrover_input(const walk::WalkParams& p);

/// Smallest positive eigenphase of the outer iteration U^t2 * Flip.
double principal_phase(const walk::WalkParams& p);

/// Outer iteration count floor(pi / (2 beta)). beta comes from
/// gengrover_analysis when alpha < 0.1 and from principal_phase otherwise.
std::uint64_t spectral_t1(const walk::WalkParams& p);

/// Haar-distributed unitary (QR of a complex Gaussian matrix, phases fixed).
Matrix random_unitary(std::size_t dim, Rng& rng);

/// exp(iH) for a random Hermitian H scaled so that ||A - I|| <= radius.
Matrix near_identity_unitary(std::size_t dim, double radius, Rng& rng);

/// 1 to max_modes modes with phases in [epsilon, pi - epsilon/2] and random
/// weights normalized against alpha.
GengroverInput random_gengrover_input(double alpha, double epsilon, std::size_t max_modes, Rng& rng);

/// min((1-a^2)/2, (1-a^2) eps/4) - 0.1 eps: the overlap guaranteed at t.
double guaranteed_overlap(double alpha, double epsilon);

}  // namespace kdist::spectral

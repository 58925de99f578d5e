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

#include "kdist/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "kdist/errors.hpp"

namespace kdist::spectral {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPhaseTieTol = 1e-12;
constexpr double kComponentTol = 1e-10;

double wrap_phase(double phase) {
  // std::arg yields -pi for negative reals carrying a -0 imaginary part.
  if (phase <= -kPi + kPhaseTieTol) return kPi;
  return phase;
}

void normalize_column_phase(Eigen::Ref<Vector> col) {
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double mag = std::abs(col(i));
    if (mag > kComponentTol) {
      col *= std::conj(col(i)) / mag;
      col(i) = Complex(mag, 0.0);
      return;
    }
  }
}

bool column_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i).real() - b(i).real()) > kComponentTol) return a(i).real() < b(i).real();
    if (std::abs(a(i).imag() - b(i).imag()) > kComponentTol) return a(i).imag() < b(i).imag();
  }
  return false;
}

Eigen::VectorXcd eigenvalues_of(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw MatrixError("eigenvalue computation did not converge");
  return solver.eigenvalues();
}

Matrix matrix_power(const Matrix& u, std::uint64_t e) {
  Matrix out = Matrix::Identity(u.rows(), u.cols());
  for (std::uint64_t s = 0; s < e; ++s) out = u * out;
  return out;
}

double cot(double x) { return 1.0 / std::tan(x); }

}  // namespace

Matrix PhaseSpectrum::reconstruct() const {
  Vector diag(static_cast<Eigen::Index>(phases.size()));
  for (std::size_t i = 0; i < phases.size(); ++i) {
    diag(static_cast<Eigen::Index>(i)) = std::polar(1.0, phases[i]);
  }
  return vectors * diag.asDiagonal() * vectors.adjoint();
}

double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

PhaseSpectrum eigenphases(const Matrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) throw MatrixError("eigenphases: matrix must be square");
  const double defect = unitarity_defect(u);
  if (defect > tol) {
    throw MatrixError("eigenphases: input is not unitary (defect " + std::to_string(defect) + ")");
  }
  // A unitary matrix is normal, so its Schur form is diagonal and the Schur
  // vectors are an orthonormal eigenbasis even for repeated eigenvalues.
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) throw MatrixError("eigenphases: Schur decomposition failed");
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();

  const auto n = static_cast<std::size_t>(u.rows());
  std::vector<double> phase(n);
  std::vector<Vector> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    phase[i] = wrap_phase(std::arg(t(ii, ii)));
    cols[i] = q.col(ii);
    normalize_column_phase(cols[i]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (std::abs(phase[a] - phase[b]) > kPhaseTieTol) return phase[a] < phase[b];
    return column_less(cols[a], cols[b]);
  });

  PhaseSpectrum out;
  out.phases.reserve(n);
  out.vectors.resize(u.rows(), u.cols());
  for (std::size_t i = 0; i < n; ++i) {
    out.phases.push_back(phase[order[i]]);
    out.vectors.col(static_cast<Eigen::Index>(i)) = cols[order[i]];
  }
  return out;
}

PhaseSpectrum eigenphases(const walk::BlockUnitary& u, double tol) {
  if (u.basis != walk::BasisTag::kSubspace) {
    throw MatrixError("eigenphases: half-step operators map between different bases");
  }
  return eigenphases(u.entries, tol);
}

std::vector<ThetaRow> theta_table(const walk::WalkParams& p) {
  const PhaseSpectrum spec = eigenphases(walk::build_step_unitary(p));
  std::vector<double> positive;
  for (double ph : spec.phases) {
    if (ph > kPhaseTieTol) positive.push_back(ph);
  }
  if (positive.size() != p.k) {
    throw MatrixError("theta_table: expected " + std::to_string(p.k) + " positive phases, found " +
                      std::to_string(positive.size()));
  }
  std::vector<ThetaRow> rows;
  const double sqrt_r = std::sqrt(static_cast<double>(p.r));
  for (std::uint64_t j = 1; j <= p.k; ++j) {
    ThetaRow row;
    row.j = j;
    row.theta = positive[j - 1];
    row.predicted = 2.0 * std::sqrt(static_cast<double>(j)) / sqrt_r;
    row.rel_error = std::abs(row.theta / row.predicted - 1.0);
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw MatrixError("assignment: cost matrix must be square");
  // Hungarian method with row/column potentials, 1-based internally.
  const auto n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t row0 = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(static_cast<Eigen::Index>(row0 - 1), static_cast<Eigen::Index>(c - 1)) -
                           u[row0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

HoffmanWielandtResult hoffman_wielandt_check(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw MatrixError("hoffman_wielandt_check: dimension mismatch");
  }
  if (unitarity_defect(a) > tol || unitarity_defect(b) > tol) {
    throw MatrixError("hoffman_wielandt_check: inputs must be unitary");
  }
  const Eigen::VectorXcd lam_a = eigenvalues_of(a);
  const Eigen::VectorXcd mu = eigenvalues_of(b);
  const Eigen::VectorXcd mu_prod = eigenvalues_of(a * b);

  HoffmanWielandtResult res;
  for (Eigen::Index i = 0; i < lam_a.size(); ++i) res.bound += std::abs(lam_a(i) - 1.0);

  const Eigen::Index m = mu.size();
  Eigen::MatrixXd cost(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = std::norm(mu(i) - mu_prod(j));
  }
  res.pairing = min_cost_assignment(cost);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = static_cast<Eigen::Index>(res.pairing[static_cast<std::size_t>(i)]);
    res.max_distance = std::max(res.max_distance, std::abs(mu(i) - mu_prod(j)));
  }
  res.margin = res.bound - res.max_distance;
  // Eigenvalues are only accurate to rounding; allow that much slack.
  res.holds = res.margin >= -1e-12;
  return res;
}

double gengrover_f(const GengroverInput& in, double beta) {
  double f = in.alpha * in.alpha * cot(beta / 2.0);
  for (const Mode& m : in.modes) {
    f += m.weight * m.weight * (cot((beta - m.theta) / 2.0) + cot((beta + m.theta) / 2.0));
  }
  return f;
}

void validate(const GengroverInput& in, double tol) {
  if (!(in.alpha > 0.0)) throw RegimeError("gengrover: alpha must be positive");
  if (in.alpha >= kMaxAlpha) {
    throw RegimeError("gengrover: alpha = " + std::to_string(in.alpha) + " is outside the regime alpha < 0.1");
  }
  if (!(in.epsilon > 0.0) || in.epsilon >= kPi) throw RegimeError("gengrover: epsilon must lie in (0, pi)");
  double norm2 = in.alpha * in.alpha;
  for (const Mode& m : in.modes) {
    if (m.weight < 0.0) throw RegimeError("gengrover: mode weights must be nonnegative");
    if (m.theta < in.epsilon - kPhaseTieTol || m.theta > 2.0 * kPi - in.epsilon + kPhaseTieTol) {
      throw RegimeError("gengrover: mode phase outside [epsilon, 2 pi - epsilon]");
    }
    if (std::abs(m.theta - kPi) <= kPhaseTieTol) throw RegimeError("gengrover: eigenvalue -1 is not supported");
    norm2 += 2.0 * m.weight * m.weight;
  }
  if (std::abs(norm2 - 1.0) > tol) {
    throw RegimeError("gengrover: alpha^2 + 2 sum a_j^2 = " + std::to_string(norm2) + ", expected 1");
  }
}

GengroverReport gengrover_analysis(const GengroverInput& in) {
  validate(in);
  const double a = in.alpha;
  const double s = std::sqrt(1.0 - a * a);
  GengroverReport rep;
  rep.bracket_lo = in.epsilon * a / (std::sqrt(2.0 * kPi) * s);
  rep.bracket_hi = std::sqrt(2.0 * kPi) * a / s;

  double lo = rep.bracket_lo;
  double hi = rep.bracket_hi;
  if (!(gengrover_f(in, lo) > 0.0) || !(gengrover_f(in, hi) < 0.0)) {
    throw RegimeError("gengrover: f has no sign change on the bracket");
  }
  // f decreases through its root; bisect down to rounding of beta.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (gengrover_f(in, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  rep.beta = 0.5 * (lo + hi);
  rep.t = static_cast<std::uint64_t>(std::floor(kPi / (2.0 * rep.beta)));
  rep.predicted_overlap = (1.0 - a * a) / std::sqrt(1.0 + std::pow(cot(in.epsilon / 2.0), 2));
  return rep;
}

ModelSystem build_model_system(const GengroverInput& in) {
  const auto dim = static_cast<Eigen::Index>(1 + 2 * in.modes.size());
  ModelSystem sys;
  sys.psi_start = Vector::Zero(dim);
  sys.psi_start(0) = 1.0;
  sys.psi_good = Vector::Zero(dim);
  sys.psi_good(0) = in.alpha;
  Eigen::MatrixXd u2 = Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t j = 0; j < in.modes.size(); ++j) {
    const auto at = static_cast<Eigen::Index>(1 + 2 * j);
    const double c = std::cos(in.modes[j].theta);
    const double sn = std::sin(in.modes[j].theta);
    u2.block<2, 2>(at, at) << c, -sn, sn, c;
    sys.psi_good(at) = std::sqrt(2.0) * in.modes[j].weight;
  }
  sys.u2 = u2.cast<Complex>();
  sys.u1 = Matrix::Identity(dim, dim) - 2.0 * sys.psi_good * sys.psi_good.adjoint();
  return sys;
}

GengroverReport gengrover_analysis(const GengroverInput& in, const ModelSystem& model) {
  GengroverReport rep = gengrover_analysis(in);
  rep.measured_overlap = overlap_at_t(model.u1, model.u2, model.psi_start, model.psi_good, rep.t);
  return rep;
}

double overlap_at_t(const Matrix& u1, const Matrix& u2, const Vector& psi_start,
                    const Vector& psi_good, std::uint64_t t) {
  const Eigen::Index n = psi_start.size();
  if (u1.rows() != n || u1.cols() != n || u2.rows() != n || u2.cols() != n || psi_good.size() != n) {
    throw MatrixError("overlap_at_t: dimension mismatch");
  }
  const Matrix step = u2 * u1;
  Vector state = psi_start;
  for (std::uint64_t s = 0; s < t; ++s) state = step * state;
  return std::abs(psi_good.dot(state));
}

GengroverInput walk_gengrover_input(const walk::WalkParams& p) {
  const Matrix u2 = matrix_power(walk::build_step_unitary(p).entries, p.t2);
  const PhaseSpectrum spec = eigenphases(u2, 1e-8);
  const auto good = static_cast<Eigen::Index>(p.dim() - 1);

  GengroverInput in;
  in.alpha = std::abs(walk::start_state(p).amps(good));
  in.epsilon = kPi;
  for (std::size_t i = 0; i < spec.phases.size(); ++i) {
    const double ph = spec.phases[i];
    if (ph <= kDefaultTol) continue;  // the fixed vector and the conjugate half
    Mode m;
    m.theta = ph;
    m.weight = std::abs(spec.vectors(good, static_cast<Eigen::Index>(i)));
    in.modes.push_back(m);
    in.epsilon = std::min(in.epsilon, ph);
  }
  return in;
}

double principal_phase(const walk::WalkParams& p) {
  Matrix w = matrix_power(walk::build_step_unitary(p).entries, p.t2);
  w.col(w.cols() - 1) *= -1.0;
  const PhaseSpectrum spec = eigenphases(w, 1e-8);
  double best = std::numeric_limits<double>::infinity();
  for (double ph : spec.phases) {
    if (ph > kPhaseTieTol) best = std::min(best, ph);
  }
  if (!std::isfinite(best)) throw MatrixError("principal_phase: iteration has no positive eigenphase");
  return best;
}

std::uint64_t spectral_t1(const walk::WalkParams& p) {
  walk::validate(p);
  double beta = 0.0;
  if (std::sqrt(walk::good_fraction(p)) < kMaxAlpha) {
    try {
      beta = gengrover_analysis(walk_gengrover_input(p)).beta;
    } catch (const RegimeError&) {
      beta = principal_phase(p);
    }
  } else {
    beta = principal_phase(p);
  }
  return static_cast<std::uint64_t>(std::floor(kPi / (2.0 * beta)));
}

Matrix random_unitary(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix near_identity_unitary(std::size_t dim, double radius, Rng& rng) {
  if (radius <= 0.0 || radius >= 2.0) throw ParamError("near_identity_unitary: radius must be in (0, 2)");
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = Complex(rng.normal(), rng.normal());
  }
  h = (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  // |e^{i phi} - 1| = 2 sin(phi / 2) <= radius.
  const double phi_max = 2.0 * std::asin(radius / 2.0) * rng.uniform(0.05, 1.0);
  Vector phases(n);
  for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, top > 0.0 ? lam(i) / top * phi_max : 0.0);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

GengroverInput random_gengrover_input(double alpha, double epsilon, std::size_t max_modes, Rng& rng) {
  if (max_modes == 0) throw ParamError("random_gengrover_input: need at least one mode");
  GengroverInput in;
  in.alpha = alpha;
  in.epsilon = epsilon;
  const std::size_t count = 1 + static_cast<std::size_t>(rng.below(max_modes));
  std::vector<double> w(count);
  double total = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    w[j] = rng.uniform(0.1, 1.0);
    total += w[j];
  }
  // alpha^2 + 2 sum a_j^2 = 1.
  for (std::size_t j = 0; j < count; ++j) {
    Mode m;
    m.theta = rng.uniform(epsilon, kPi - epsilon / 2.0);
    m.weight = std::sqrt((1.0 - alpha * alpha) * w[j] / (2.0 * total));
    in.modes.push_back(m);
  }
  in.modes.front().theta = epsilon;  // the gap is attained
  return in;
}

double guaranteed_overlap(double alpha, double epsilon) {
  const double a2 = 1.0 - alpha * alpha;
  return std::min(a2 / 2.0, a2 * epsilon / 4.0) - 0.1 * epsilon;
}

}  // namespace kdist::spectral

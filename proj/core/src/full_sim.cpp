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

#include "kdist/full_sim.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "kdist/errors.hpp"

namespace kdist::fullsim {

namespace {

std::uint64_t pair_key(IndexSet s, std::uint32_t y) { return s * 64u + y; }

double binomial(std::uint32_t n, std::uint32_t m) {
  double out = 1.0;
  for (std::uint32_t i = 0; i < m; ++i) out = out * (n - i) / (i + 1);
  return std::round(out);
}

IndexSet bit(std::uint32_t i) { return IndexSet{1} << (i - 1); }

void require_mode(const FullState& s, Mode m, const char* what) {
  if (s.mode != m) throw ParamError(std::string(what) + ": state is in the wrong space");
}

std::uint32_t type_slot(const FullBasis& basis, const BasisPair& p, IndexSet k_set, std::uint64_t k) {
  const auto j = static_cast<std::uint64_t>(std::popcount(p.set & k_set));
  const std::uint64_t l = (k_set & bit(p.y)) ? 1 : 0;
  (void)basis;
  return static_cast<std::uint32_t>(walk::basis_index(k, j, l));
}

IndexSet collision_mask(const std::vector<std::uint64_t>& collision_set, std::uint32_t N) {
  IndexSet m = 0;
  for (std::uint64_t i : collision_set) {
    if (i < 1 || i > N) throw ParamError("collision set index out of range");
    m |= bit(static_cast<std::uint32_t>(i));
  }
  if (static_cast<std::size_t>(std::popcount(m)) != collision_set.size()) {
    throw ParamError("collision set has repeated indices");
  }
  return m;
}

}  // namespace

std::vector<std::uint32_t> members(IndexSet s) {
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(std::popcount(s)));
  while (s != 0) {
    out.push_back(static_cast<std::uint32_t>(std::countr_zero(s)) + 1);
    s &= s - 1;
  }
  return out;
}

IndexSet make_set(const std::vector<std::uint64_t>& indices) {
  IndexSet s = 0;
  for (std::uint64_t i : indices) {
    if (i < 1 || i > kMaxN) throw ParamError("index out of range for an explicit set");
    s |= bit(static_cast<std::uint32_t>(i));
  }
  return s;
}

std::size_t FullBasis::index_of(IndexSet s, std::uint32_t y) const {
  const auto it = index_.find(pair_key(s, y));
  if (it == index_.end()) throw ParamError("basis pair not present in this basis");
  return it->second;
}

FullBasis enumerate_basis(std::uint32_t N, std::uint32_t r, Mode mode, std::size_t cap) {
  if (N > kMaxN) throw SizeLimitError("full simulation supports N <= " + std::to_string(kMaxN));
  if (r >= N) throw ParamError("enumerate_basis: need r < N");
  const std::uint32_t set_size = mode == Mode::kH ? r : r + 1;
  const std::uint32_t per_set = mode == Mode::kH ? N - r : r + 1;
  const double count = binomial(N, set_size) * per_set;
  if (count > static_cast<double>(cap)) {
    throw SizeLimitError("basis of " + std::to_string(static_cast<long double>(count)) +
                         " pairs exceeds cap " + std::to_string(cap));
  }

  FullBasis b;
  b.mode_ = mode;
  b.n_ = N;
  b.r_ = r;
  b.pairs_.reserve(static_cast<std::size_t>(count));
  b.index_.reserve(static_cast<std::size_t>(count));

  std::vector<std::uint32_t> comb(set_size);
  for (std::uint32_t i = 0; i < set_size; ++i) comb[i] = i + 1;
  while (true) {
    IndexSet s = 0;
    for (std::uint32_t i : comb) s |= bit(i);
    for (std::uint32_t y = 1; y <= N; ++y) {
      const bool inside = (s & bit(y)) != 0;
      if (inside == (mode == Mode::kHPrime)) {
        b.index_.emplace(pair_key(s, y), b.pairs_.size());
        b.pairs_.push_back({s, y});
      }
    }
    // Next combination in lexicographic order.
    std::int64_t pos = static_cast<std::int64_t>(set_size) - 1;
    while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == N - set_size + static_cast<std::uint32_t>(pos) + 1) {
      --pos;
    }
    if (pos < 0) break;
    ++comb[static_cast<std::size_t>(pos)];
    for (auto i = static_cast<std::size_t>(pos) + 1; i < set_size; ++i) comb[i] = comb[i - 1] + 1;
  }
  return b;
}

std::shared_ptr<const WalkSpace> make_space(std::uint32_t N, std::uint32_t r, std::size_t cap) {
  auto space = std::make_shared<WalkSpace>();
  space->h = enumerate_basis(N, r, Mode::kH, cap);
  space->h_prime = enumerate_basis(N, r, Mode::kHPrime, cap);
  return space;
}

FullState uniform_state(std::shared_ptr<const WalkSpace> space) {
  FullState s;
  const auto n = static_cast<Eigen::Index>(space->h.size());
  s.amps = Vector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  s.space = std::move(space);
  s.mode = Mode::kH;
  return s;
}

namespace {

// Grover diffusion within each group of pairs sharing S: a -> -a + (2/g) sum.
void diffuse_groups(Vector& amps, std::size_t group) {
  const double w = 2.0 / static_cast<double>(group);
  for (Eigen::Index start = 0; start < amps.size(); start += static_cast<Eigen::Index>(group)) {
    auto seg = amps.segment(start, static_cast<Eigen::Index>(group));
    const Complex sum = seg.sum();
    seg = -seg + Vector::Constant(seg.size(), w * sum);
  }
}

}  // namespace

FullState diffuse_outside(const FullState& state) {
  require_mode(state, Mode::kH, "diffuse_outside");
  FullState out = state;
  diffuse_groups(out.amps, state.space->h.group_size());
  return out;
}

FullState walk_step(const FullState& state, QueryLedger* ledger) {
  require_mode(state, Mode::kH, "walk_step");
  const WalkSpace& sp = *state.space;

  // Step 1: diffusion over y not in S.
  Vector a = state.amps;
  diffuse_groups(a, sp.h.group_size());

  // Steps 2-3: (S, y) -> (S + y, y); the query only fills the implicit x register.
  Vector b = Vector::Zero(static_cast<Eigen::Index>(sp.h_prime.size()));
  for (std::size_t i = 0; i < sp.h.size(); ++i) {
    const BasisPair& p = sp.h[i];
    b(static_cast<Eigen::Index>(sp.h_prime.index_of(p.set | bit(p.y), p.y))) = a(static_cast<Eigen::Index>(i));
  }

  // Step 4: diffusion over y in S.
  diffuse_groups(b, sp.h_prime.group_size());

  // Steps 5-6: erase x_y, then (S, y) -> (S - y, y).
  FullState out;
  out.space = state.space;
  out.mode = Mode::kH;
  out.amps = Vector::Zero(static_cast<Eigen::Index>(sp.h.size()));
  for (std::size_t i = 0; i < sp.h_prime.size(); ++i) {
    const BasisPair& p = sp.h_prime[i];
    out.amps(static_cast<Eigen::Index>(sp.h.index_of(p.set & ~bit(p.y), p.y))) = b(static_cast<Eigen::Index>(i));
  }
  if (ledger != nullptr) ledger->walk_queries += 2;
  return out;
}

bool contains_k_collision(IndexSet s, const Instance& inst, std::uint64_t k) {
  std::vector<std::uint64_t> idx;
  for (std::uint32_t i : members(s)) idx.push_back(i);
  return find_k_collision(inst, idx, k).has_value();
}

FullState conditional_flip(const FullState& state, const Instance& inst, std::uint64_t k) {
  FullState out = state;
  const FullBasis& basis = state.basis();
  const std::size_t g = basis.group_size();
  for (std::size_t start = 0; start < basis.size(); start += g) {
    if (contains_k_collision(basis[start].set, inst, k)) {
      out.amps.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(g)) *= -1.0;
    }
  }
  return out;
}

FullRun run_full(const Instance& inst, std::uint32_t r, std::uint64_t k, std::uint64_t t1,
                 std::uint64_t t2, std::size_t cap) {
  if (inst.N() > kMaxN) throw SizeLimitError("run_full: instance too long for brute force");
  if (k < 2 || r < k) throw ParamError("run_full: need 2 <= k <= r");
  auto space = make_space(static_cast<std::uint32_t>(inst.N()), r, cap);

  FullRun run;
  run.ledger.setup_queries = r;
  FullState state = uniform_state(space);
  for (std::uint64_t t = 0; t < t1; ++t) {
    state = conditional_flip(state, inst, k);
    for (std::uint64_t s = 0; s < t2; ++s) state = walk_step(state, &run.ledger);
  }

  const FullBasis& basis = space->h;
  const std::size_t g = basis.group_size();
  for (std::size_t start = 0; start < basis.size(); start += g) {
    SetProbability sp;
    sp.set = members(basis[start].set);
    sp.probability = state.amps.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(g)).squaredNorm();
    if (contains_k_collision(basis[start].set, inst, k)) run.good_mass += sp.probability;
    run.distribution.push_back(std::move(sp));
  }
  run.final_state = std::move(state);
  return run;
}

std::vector<double> type_fractions(const FullBasis& basis, const std::vector<std::uint64_t>& collision_set) {
  const std::uint64_t k = collision_set.size();
  const IndexSet km = collision_mask(collision_set, basis.N());
  std::vector<double> counts(static_cast<std::size_t>(2 * k + 1), 0.0);
  for (const BasisPair& p : basis.pairs()) counts[type_slot(basis, p, km, k)] += 1.0;
  for (double& c : counts) c /= static_cast<double>(basis.size());
  return counts;
}

Projection project_to_subspace(const FullState& state, const std::vector<std::uint64_t>& collision_set) {
  require_mode(state, Mode::kH, "project_to_subspace");
  const FullBasis& basis = state.basis();
  const std::uint64_t k = collision_set.size();
  if (k < 2) throw ParamError("project_to_subspace: collision set needs at least two indices");
  const IndexSet km = collision_mask(collision_set, basis.N());
  const auto dim = static_cast<Eigen::Index>(2 * k + 1);

  std::vector<std::uint32_t> slot(basis.size());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(dim);
  Vector sums = Vector::Zero(dim);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    slot[i] = type_slot(basis, basis[i], km, k);
    counts(slot[i]) += 1.0;
    sums(slot[i]) += state.amps(static_cast<Eigen::Index>(i));
  }
  Projection out;
  out.sub.amps = Vector::Zero(dim);
  for (Eigen::Index t = 0; t < dim; ++t) {
    if (counts(t) > 0.0) out.sub.amps(t) = sums(t) / std::sqrt(counts(t));
  }
  double rem = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Eigen::Index t = slot[i];
    const Complex along = counts(t) > 0.0 ? out.sub.amps(t) / std::sqrt(counts(t)) : Complex(0.0);
    rem += std::norm(state.amps(static_cast<Eigen::Index>(i)) - along);
  }
  out.residual = std::sqrt(rem);
  return out;
}

FullState embed_subspace(const walk::SubspaceState& sub, std::shared_ptr<const WalkSpace> space,
                         const std::vector<std::uint64_t>& collision_set) {
  const FullBasis& basis = space->h;
  const std::uint64_t k = collision_set.size();
  if (static_cast<std::uint64_t>(sub.amps.size()) != 2 * k + 1) {
    throw ParamError("embed_subspace: state dimension does not match the collision set");
  }
  const IndexSet km = collision_mask(collision_set, basis.N());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(sub.amps.size());
  for (const BasisPair& p : basis.pairs()) counts(type_slot(basis, p, km, k)) += 1.0;

  FullState out;
  out.mode = Mode::kH;
  out.amps = Vector::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Eigen::Index t = type_slot(basis, basis[i], km, k);
    if (counts(t) > 0.0) out.amps(static_cast<Eigen::Index>(i)) = sub.amps(t) / std::sqrt(counts(t));
  }
  out.space = std::move(space);
  return out;
}

}  // namespace kdist::fullsim

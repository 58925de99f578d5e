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

// Brute-force state-vector simulation over explicit basis pairs (S, y).
// The x register is not materialized: for a fixed instance it is a function
// of S. Intended as a correctness oracle for small N only.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "kdist/instance.hpp"
#include "kdist/ledger.hpp"
#include "kdist/walk.hpp"

namespace kdist::fullsim {

inline constexpr std::size_t kDefaultPairCap = 1'000'000;
inline constexpr std::uint64_t kMaxN = 58;

enum class Mode {
  kH,       // |S| = r, y not in S
  kHPrime,  // |S| = r + 1, y in S
};

/// Bit (i-1) set for every index i in S.
using IndexSet = std::uint64_t;

struct BasisPair {
  IndexSet set = 0;
  std::uint32_t y = 0;
};

std::vector<std::uint32_t> members(IndexSet s);
IndexSet make_set(const std::vector<std::uint64_t>& indices);

/// Pairs in lexicographic (S, y) order, S compared as ascending sequences.
class FullBasis {
 public:
  Mode mode() const noexcept { return mode_; }
  std::uint32_t N() const noexcept { return n_; }
  std::uint32_t r() const noexcept { return r_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  /// Number of consecutive pairs sharing each S.
  std::size_t group_size() const noexcept { return mode_ == Mode::kH ? n_ - r_ : r_ + 1; }
  const std::vector<BasisPair>& pairs() const noexcept { return pairs_; }
  const BasisPair& operator[](std::size_t i) const { return pairs_[i]; }
  std::size_t index_of(IndexSet s, std::uint32_t y) const;

  friend FullBasis enumerate_basis(std::uint32_t, std::uint32_t, Mode, std::size_t);

 private:
  Mode mode_ = Mode::kH;
  std::uint32_t n_ = 0;
  std::uint32_t r_ = 0;
  std::vector<BasisPair> pairs_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Throws SizeLimitError when the pair count would exceed `cap`.
FullBasis enumerate_basis(std::uint32_t N, std::uint32_t r, Mode mode,
                          std::size_t cap = kDefaultPairCap);

/// Both bases used by one walk step.
struct WalkSpace {
  FullBasis h;
  FullBasis h_prime;
};

std::shared_ptr<const WalkSpace> make_space(std::uint32_t N, std::uint32_t r,
                                            std::size_t cap = kDefaultPairCap);

struct FullState {
  std::shared_ptr<const WalkSpace> space;
  Mode mode = Mode::kH;
  Vector amps;

  const FullBasis& basis() const { return mode == Mode::kH ? space->h : space->h_prime; }
  double norm() const { return amps.norm(); }
};

/// Uniform superposition over all pairs of H (psi_start).
FullState uniform_state(std::shared_ptr<const WalkSpace> space);

/// Step 1 alone: diffusion over y' not in S.
FullState diffuse_outside(const FullState& state);

/// One full walk step (steps 1-6). Charges two queries to `ledger` if given.
FullState walk_step(const FullState& state, QueryLedger* ledger = nullptr);

bool contains_k_collision(IndexSet s, const Instance& inst, std::uint64_t k);

/// Negates every pair whose S contains a k-collision of `inst`.
FullState conditional_flip(const FullState& state, const Instance& inst, std::uint64_t k);

struct SetProbability {
  std::vector<std::uint32_t> set;
  double probability = 0.0;
};

struct FullRun {
  std::vector<SetProbability> distribution;  // lexicographic in S
  double good_mass = 0.0;                    // mass on S containing a k-collision
  FullState final_state;
  QueryLedger ledger;
};

/// The search loop on the explicit basis: uniform start, then t1 rounds of
/// (flip, t2 walk steps), then the measurement distribution over S.
FullRun run_full(const Instance& inst, std::uint32_t r, std::uint64_t k, std::uint64_t t1,
                 std::uint64_t t2, std::size_t cap = kDefaultPairCap);

struct Projection {
  walk::SubspaceState sub;
  double residual = 0.0;
};

/// Coordinates on the symmetric basis psi_{j,l} for the collision set K
/// (|K| = k), and the norm of what is left over.
Projection project_to_subspace(const FullState& state, const std::vector<std::uint64_t>& collision_set);

/// Inverse of the projection for a state inside the symmetric subspace.
FullState embed_subspace(const walk::SubspaceState& sub, std::shared_ptr<const WalkSpace> space,
                         const std::vector<std::uint64_t>& collision_set);

/// Probability that a pair of type (j, l) appears, by enumeration.
std::vector<double> type_fractions(const FullBasis& basis, const std::vector<std::uint64_t>& collision_set);

}  // namespace kdist::fullsim

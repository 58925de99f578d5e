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

// Hash families: exact d-wise independent boolean functions (random
// polynomials over GF(2^w)) and keyed permutations of [q] built as a
// cycle-walking Feistel network whose round functions are random
// polynomials of degree d-1 over the prime field Z_{2^61-1}.

#include <cstdint>
#include <string>
#include <vector>

namespace kdist::hash {

inline constexpr std::uint32_t kConstructionVersion = 1;
inline constexpr std::uint32_t kDefaultRounds = 7;

/// ceil(log2 n), at least 1.
std::uint32_t field_bits(std::uint64_t n);

/// Low-order bits of the fixed irreducible polynomial of degree w (the x^w
/// term is implicit). Supported for 1 <= w <= 32.
std::uint64_t irreducible_poly(std::uint32_t w);

/// Product in GF(2^w) modulo irreducible_poly(w).
std::uint64_t gf_mul(std::uint64_t a, std::uint64_t b, std::uint32_t w);

struct BoolMember {
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::uint64_t seed = 0;
  std::uint32_t w = 1;
  std::vector<std::uint64_t> coeffs;  // coeffs[t] multiplies z^t
};

BoolMember sample_bool_member(std::uint64_t n, std::uint64_t d, std::uint64_t seed);

/// Member with explicit coefficients; d = coeffs.size(). Used for enumeration.
BoolMember bool_member_from_coeffs(std::uint64_t n, std::vector<std::uint64_t> coeffs);

/// Low bit of the polynomial evaluated at the field element i-1; i in [1, n].
bool eval_bool(const BoolMember& f, std::uint64_t i);

enum class Direction { kForward, kInverse };

struct PermMember {
  std::uint64_t q = 0;
  std::uint64_t d = 0;
  std::uint64_t seed = 0;
  std::uint32_t rounds = kDefaultRounds;
  std::uint64_t side = 0;                          // a = ceil(sqrt(q)); network acts on Z_a x Z_a
  std::vector<std::vector<std::uint64_t>> keys;    // per-round polynomial coefficients mod 2^61-1
};

PermMember sample_perm_member(std::uint64_t q, std::uint64_t d, std::uint64_t seed,
                              std::uint32_t rounds = kDefaultRounds);

/// Image of i in [1, q] under the member or its inverse.
std::uint64_t eval_perm(const PermMember& p, std::uint64_t i, Direction dir = Direction::kForward);

/// Portable identity of a member: kind, size, degree, seed, rounds, version.
std::string member_key(const BoolMember& f);
std::string member_key(const PermMember& p);

}  // namespace kdist::hash

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

#include "kdist/hash_families.hpp"

#include <array>
#include <bit>
#include <cmath>

#include "kdist/errors.hpp"
#include "kdist/rng.hpp"

namespace kdist::hash {

namespace {

// x^w + (low bits) is irreducible over GF(2) for each w = 1..32.
constexpr std::array<std::uint64_t, 33> kIrreducible = {
    0,        0x1,  0x3,  0x3,   0x3,   0x5,  0x3,      0x3,  0x1D, 0x11, 0x9,
    0x5,      0x53, 0x1B, 0x443, 0x3,   0x100B, 0x9,    0x81, 0x27, 0x9,  0x5,
    0x3,      0x21, 0x87, 0x9,   0x47,  0x27, 0x9,      0x5,  0x800007, 0x9, 0x400007};

__extension__ using U128 = unsigned __int128;

constexpr std::uint64_t kP61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
  const U128 z = static_cast<U128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(z & kP61);
  std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kP61) s -= kP61;
  return s;
}

std::uint64_t round_fn(const std::vector<std::uint64_t>& c, std::uint64_t x, std::uint64_t side) {
  std::uint64_t acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    acc = mulmod61(acc, x) + *it;
    if (acc >= kP61) acc -= kP61;
  }
  return acc % side;
}

// Coefficient t of a keyed stream; cheap enough to sample millions of members.
std::uint64_t stream_word(std::uint64_t key, std::uint64_t t) { return mix_seed(key + t * 0x9e3779b97f4a7c15ULL); }

std::uint64_t feistel(const PermMember& p, std::uint64_t x, Direction dir) {
  const std::uint64_t a = p.side;
  std::uint64_t left = x / a;
  std::uint64_t right = x % a;
  if (dir == Direction::kForward) {
    for (std::uint32_t k = 0; k < p.rounds; ++k) {
      const std::uint64_t next = (left + round_fn(p.keys[k], right, a)) % a;
      left = right;
      right = next;
    }
  } else {
    for (std::uint32_t k = p.rounds; k-- > 0;) {
      const std::uint64_t prev = (right + a - round_fn(p.keys[k], left, a)) % a;
      right = left;
      left = prev;
    }
  }
  return left * a + right;
}

}  // namespace

std::uint32_t field_bits(std::uint64_t n) {
  if (n <= 2) return 1;
  return static_cast<std::uint32_t>(std::bit_width(n - 1));
}

std::uint64_t irreducible_poly(std::uint32_t w) {
  if (w < 1 || w > 32) throw ParamError("binary field degree must be in [1, 32]");
  return kIrreducible[w];
}

std::uint64_t gf_mul(std::uint64_t a, std::uint64_t b, std::uint32_t w) {
  const std::uint64_t top = std::uint64_t{1} << w;
  const std::uint64_t reduce = top | irreducible_poly(w);
  std::uint64_t out = 0;
  while (b != 0) {
    if (b & 1) out ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= reduce;
  }
  return out;
}

BoolMember sample_bool_member(std::uint64_t n, std::uint64_t d, std::uint64_t seed) {
  if (n < 2 || d < 1) throw ParamError("boolean family needs n >= 2 and d >= 1");
  BoolMember f;
  f.n = n;
  f.d = d;
  f.seed = seed;
  f.w = field_bits(n);
  const std::uint64_t key = derive_seed(seed, 0xB001);
  const std::uint64_t mask = (std::uint64_t{1} << f.w) - 1;
  f.coeffs.resize(d);
  for (std::uint64_t t = 0; t < d; ++t) f.coeffs[t] = stream_word(key, t) & mask;
  return f;
}

BoolMember bool_member_from_coeffs(std::uint64_t n, std::vector<std::uint64_t> coeffs) {
  if (n < 2 || coeffs.empty()) throw ParamError("boolean family needs n >= 2 and d >= 1");
  BoolMember f;
  f.n = n;
  f.d = coeffs.size();
  f.w = field_bits(n);
  for (std::uint64_t c : coeffs) {
    if (c >> f.w) throw ParamError("coefficient outside the field");
  }
  f.coeffs = std::move(coeffs);
  return f;
}

bool eval_bool(const BoolMember& f, std::uint64_t i) {
  if (i < 1 || i > f.n) throw ParamError("eval_bool: index out of range");
  const std::uint64_t z = i - 1;
  std::uint64_t acc = 0;
  for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) acc = gf_mul(acc, z, f.w) ^ *it;
  return (acc & 1) != 0;
}

PermMember sample_perm_member(std::uint64_t q, std::uint64_t d, std::uint64_t seed, std::uint32_t rounds) {
  if (q < 2) throw ParamError("permutation family needs q >= 2");
  if (d < 1) throw ParamError("permutation family needs d >= 1");
  PermMember p;
  p.q = q;
  p.d = d;
  p.seed = seed;
  p.rounds = rounds;
  auto a = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(q)));
  while (a * a < q) ++a;
  while (a > 1 && (a - 1) * (a - 1) >= q) --a;
  p.side = a;
  p.keys.resize(rounds);
  for (std::uint32_t k = 0; k < rounds; ++k) {
    const std::uint64_t key = derive_seed(seed, 0xFE00 + k);
    p.keys[k].resize(d);
    std::uint64_t t = 0;
    for (auto& c : p.keys[k]) {
      do {
        c = stream_word(key, t++) >> 3;
      } while (c >= kP61);
    }
  }
  return p;
}

std::uint64_t eval_perm(const PermMember& p, std::uint64_t i, Direction dir) {
  if (i < 1 || i > p.q) throw ParamError("eval_perm: index out of range");
  std::uint64_t x = i - 1;
  // Cycle walking: the network permutes [0, a^2); iterate until back in [0, q).
  do {
    x = feistel(p, x, dir);
  } while (x >= p.q);
  return x + 1;
}

std::string member_key(const BoolMember& f) {
  return "bool/v" + std::to_string(kConstructionVersion) + "/n=" + std::to_string(f.n) +
         "/d=" + std::to_string(f.d) + "/seed=" + std::to_string(f.seed) +
         "/poly=" + std::to_string(irreducible_poly(f.w));
}

std::string member_key(const PermMember& p) {
  return "perm/v" + std::to_string(kConstructionVersion) + "/q=" + std::to_string(p.q) +
         "/d=" + std::to_string(p.d) + "/seed=" + std::to_string(p.seed) +
         "/rounds=" + std::to_string(p.rounds);
}

}  // namespace kdist::hash

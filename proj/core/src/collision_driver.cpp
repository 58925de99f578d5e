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

#include "kdist/collision_driver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "kdist/errors.hpp"
#include "kdist/rng.hpp"
#include "kdist/walk.hpp"

namespace kdist::driver {

namespace {

__extension__ using U128 = unsigned __int128;

// Returns the prime p when n = p^m for some m >= 1, else 0.
std::uint64_t prime_base(std::uint64_t n) {
  if (n < 2) return 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      return n == 1 ? p : 0;
    }
  }
  return n;
}

std::uint32_t exponent_of(std::uint64_t n, std::uint64_t p) {
  std::uint32_t e = 0;
  while (n > 1) {
    n /= p;
    ++e;
  }
  return e;
}

std::uint64_t ceil_sqrt(std::uint64_t n) {
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (s * s < n) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= n) --s;
  return s;
}

// Saturating power for comparisons near 2^127.
U128 ipow(std::uint64_t b, std::uint64_t e) {
  U128 out = 1;
  const U128 cap = static_cast<U128>(1) << 120;
  for (std::uint64_t n = 0; n < e; ++n) {
    out *= b;
    if (out > cap) return cap;
  }
  return out;
}

// m distinct values from [0, n), ascending (Floyd's algorithm).
std::vector<std::uint64_t> sample_subset(std::uint64_t n, std::uint64_t m, Rng& rng) {
  std::unordered_set<std::uint64_t> picked;
  picked.reserve(m * 2);
  for (std::uint64_t j = n - m; j < n; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!picked.insert(t).second) picked.insert(j);
  }
  std::vector<std::uint64_t> out(picked.begin(), picked.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t independence_degree(std::uint64_t N, std::uint64_t k) {
  return static_cast<std::uint64_t>(std::ceil(2.0 * static_cast<double>(k) * std::log2(static_cast<double>(N))));
}

double median(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? static_cast<double>(v[n / 2])
                    : 0.5 * (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2]));
}

}  // namespace

PrimePower pick_prime_power(std::uint64_t target, std::uint64_t k) {
  if (target < 2) throw ParamError("pick_prime_power: target must be at least 2");
  if (k < 1) throw ParamError("pick_prime_power: k must be positive");
  const std::uint64_t two_k2 = 2 * k * k;
  const std::uint64_t hi = target + target / two_k2;  // floor(target * (1 + 1/(2k^2)))
  // q = b^2 is an even prime power exactly when b is a prime power.
  for (std::uint64_t b = ceil_sqrt(target); b * b <= hi; ++b) {
    if (const std::uint64_t p = prime_base(b); p != 0) {
      return {b * b, p, 2 * exponent_of(b, p), false};
    }
  }
  for (std::uint64_t b = ceil_sqrt(target);; ++b) {
    if (prime_base(b) == b) return {b * b, b, 2, true};
  }
}

Permutation Permutation::feistel(std::uint64_t q, std::uint64_t d, std::uint64_t seed, std::uint32_t rounds) {
  Permutation p;
  p.q_ = q;
  p.seed_ = seed;
  p.source_ = PermSource::kFeistel;
  p.member_ = hash::sample_perm_member(q, d, seed, rounds);
  return p;
}

Permutation Permutation::uniform(std::uint64_t q, std::uint64_t seed) {
  if (q < 2 || q > UINT32_MAX) throw ParamError("uniform permutation size out of range");
  Permutation p;
  p.q_ = q;
  p.seed_ = seed;
  p.source_ = PermSource::kUniform;
  p.fwd_.resize(q);
  std::iota(p.fwd_.begin(), p.fwd_.end(), 1u);
  Rng rng(seed);
  for (std::uint64_t i = q - 1; i > 0; --i) std::swap(p.fwd_[i], p.fwd_[rng.below(i + 1)]);
  p.inv_.resize(q);
  for (std::uint64_t i = 0; i < q; ++i) p.inv_[p.fwd_[i] - 1] = static_cast<std::uint32_t>(i + 1);
  return p;
}

Permutation Permutation::identity(std::uint64_t q) { return feistel(q, 1, 0, 0); }

std::uint64_t Permutation::forward(std::uint64_t i) const {
  if (source_ == PermSource::kFeistel) return hash::eval_perm(member_, i, hash::Direction::kForward);
  if (i < 1 || i > q_) throw ParamError("permutation index out of range");
  return fwd_[i - 1];
}

std::uint64_t Permutation::inverse(std::uint64_t i) const {
  if (source_ == PermSource::kFeistel) return hash::eval_perm(member_, i, hash::Direction::kInverse);
  if (i < 1 || i > q_) throw ParamError("permutation index out of range");
  return inv_[i - 1];
}

SubsetChain initial_chain(std::uint64_t N) {
  SubsetChain c;
  c.sets.emplace_back(N);
  std::iota(c.sets.back().begin(), c.sets.back().end(), std::uint64_t{1});
  return c;
}

std::uint64_t kept_prefix(std::uint64_t q, std::uint64_t k) {
  return (2 * k * q + 2 * k) / (2 * k + 1);
}

void next_subset(SubsetChain& chain, const Permutation& perm, std::uint64_t k) {
  if (chain.sets.empty()) throw ParamError("next_subset: empty chain");
  const std::vector<std::uint64_t>& cur = chain.sets.back();
  const std::uint64_t n = cur.size();
  if (perm.size() < n) throw ParamError("next_subset: permutation smaller than the current subset");
  const std::uint64_t m = std::min(kept_prefix(perm.size(), k), perm.size());
  std::vector<std::uint64_t> next;
  next.reserve(m);
  for (std::uint64_t i = 1; i <= m; ++i) {
    const std::uint64_t pos = perm.inverse(i);
    if (pos <= n) next.push_back(cur[pos - 1]);
  }
  std::sort(next.begin(), next.end());
  chain.sets.push_back(std::move(next));
  chain.q_values.push_back(perm.size());
  chain.perm_seeds.push_back(perm.seed());
}

InnerRun inner_algorithm2(const Instance& sub, std::uint64_t r_j, std::uint64_t k, std::uint64_t seed) {
  const std::uint64_t n = sub.N();
  const walk::WalkParams wp = walk::reference_params(n, r_j, k, sub.M);
  InnerRun run;
  run.t1 = wp.t1;
  run.t2 = wp.t2;
  run.delta.setup_queries = r_j;
  run.delta.walk_queries = 2 * wp.t1 * wp.t2;

  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  counts.reserve(n * 2);
  for (std::uint64_t v : sub.values) ++counts[v];
  std::uint64_t collision_value = 0;
  bool unique = true;
  for (const auto& [v, c] : counts) {
    if (c < k) continue;
    ++run.collisions;
    collision_value = v;
    if (c > k) unique = false;
  }
  unique = unique && run.collisions == 1;

  Rng rng(seed);
  if (!unique) {
    for (std::uint64_t p : sample_subset(n, r_j, rng)) run.measured.push_back(p + 1);
    return run;
  }

  std::vector<std::uint64_t> K;
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (sub.at(i) == collision_value) K.push_back(i);
  }
  const walk::SingleRun engine = walk::run_single_solution(wp);
  run.engine_success = engine.success_prob;

  // Number of collision indices inside S, distributed as in the final state.
  std::vector<double> weight(k + 1, 0.0);
  for (std::uint64_t j = 0; j <= k; ++j) {
    weight[j] = std::norm(engine.final_state.amp(j, 0));
    if (j < k) weight[j] += std::norm(engine.final_state.amp(j, 1));
    if (r_j < j || r_j - j > n - k) weight[j] = 0.0;
  }
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  double u = rng.uniform01() * total;
  std::uint64_t j = 0;
  while (j < k && u >= weight[j]) u -= weight[j++];
  while (weight[j] == 0.0 && j > 0) --j;

  for (std::uint64_t t : sample_subset(k, j, rng)) run.measured.push_back(K[t]);
  for (std::uint64_t t : sample_subset(n - k, r_j - j, rng)) {
    // t-th (0-based) index outside K; K is ascending.
    std::uint64_t pos = t + 1;
    for (std::size_t a = 0; a < K.size() && K[a] <= pos; ++a) ++pos;
    run.measured.push_back(pos);
  }
  std::sort(run.measured.begin(), run.measured.end());
  return run;
}

std::uint64_t iteration_cap(std::uint64_t N, std::uint64_t k) {
  return static_cast<std::uint64_t>(std::ceil(5.0 * static_cast<double>(k) * std::log(static_cast<double>(N))));
}

CollisionResult run_k_distinctness(const Instance& inst, std::uint64_t r, std::uint64_t k, std::uint64_t seed,
                                   const DriverOptions& opts) {
  if (k < 2) throw ParamError("k must be at least 2");
  if (r < k) throw ParamError("memory r must be at least k");
  const std::uint64_t N = inst.N();
  CollisionResult res;
  res.iteration_cap = iteration_cap(N, k);
  const std::uint64_t d = independence_degree(N, k);

  SubsetChain chain = initial_chain(N);
  auto large = [&](std::uint64_t size) {
    return size > r && static_cast<long double>(size) * size > static_cast<long double>(N);
  };
  auto memory_for = [&](std::uint64_t size) {
    return std::max<std::uint64_t>(k, static_cast<std::uint64_t>(static_cast<U128>(r) * size / N));
  };
  // The walk needs at least k indices outside its r_j-subset.
  auto walk_fits = [&](std::uint64_t size) { return memory_for(size) + k <= size; };

  for (std::uint64_t iter = 0;
       large(chain.sets.back().size()) && walk_fits(chain.sets.back().size()) && iter < res.iteration_cap; ++iter) {
    const std::vector<std::uint64_t>& T = chain.sets.back();
    const std::uint64_t n = T.size();
    std::vector<std::uint64_t> sub_values(n);
    for (std::uint64_t p = 0; p < n; ++p) sub_values[p] = inst.at(T[p]);
    const Instance sub = make_instance(std::move(sub_values), inst.M);

    IterationRecord rec;
    rec.size = n;
    rec.r_j = memory_for(n);
    const InnerRun run = inner_algorithm2(sub, rec.r_j, k, derive_seed(seed, 2 * iter));
    rec.t1 = run.t1;
    rec.t2 = run.t2;
    rec.collisions = run.collisions;
    rec.cost = run.delta;
    res.ledger += run.delta;

    if (auto hit = find_k_collision(sub, run.measured, k)) {
      std::vector<std::uint64_t> idx;
      for (std::uint64_t p : *hit) idx.push_back(T[p - 1]);
      std::sort(idx.begin(), idx.end());
      res.found = std::move(idx);
      rec.outcome = "walk-found";
      res.trace.push_back(std::move(rec));
      return res;
    }
    rec.outcome = "walk-miss";

    const PrimePower pp = pick_prime_power(n, k);
    rec.q = pp.q;
    rec.relaxed = pp.relaxed;
    const std::uint64_t pseed = derive_seed(seed, 2 * iter + 1);
    const Permutation perm = opts.source == PermSource::kFeistel ? Permutation::feistel(pp.q, d, pseed, opts.rounds)
                                                                 : Permutation::uniform(pp.q, pseed);
    next_subset(chain, perm, k);
    res.trace.push_back(std::move(rec));
  }

  const std::vector<std::uint64_t>& T = chain.sets.back();
  IterationRecord rec;
  rec.size = T.size();
  rec.collisions = count_k_collision_values(inst, T, k);
  if (large(T.size()) && walk_fits(T.size())) {
    rec.outcome = "cap-reached";
  }
  if (T.size() <= r || !walk_fits(T.size())) {
    rec.cost.classical_queries = T.size();
    rec.outcome += rec.outcome.empty() ? "scan" : "+scan";
  } else {
    const long double n = static_cast<long double>(T.size());
    long double tuples = 1.0L;
    for (std::uint64_t a = 0; a < k; ++a) tuples = tuples * (n - static_cast<long double>(a)) / static_cast<long double>(a + 1);
    rec.cost.grover_charged = static_cast<std::uint64_t>(std::ceil(std::sqrt(std::max(tuples, 0.0L))));
    rec.outcome += rec.outcome.empty() ? "grover" : "+grover";
  }
  res.ledger += rec.cost;
  if (T.size() >= k) res.found = find_k_collision(inst, T, k);
  rec.outcome += res.found ? "-found" : "-none";
  res.trace.push_back(std::move(rec));
  return res;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParamError("fit_loglog needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw ParamError("fit_loglog needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  LogLogFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

std::uint64_t optimal_memory(std::uint64_t N, std::uint64_t k) {
  const double guess = std::pow(static_cast<double>(N), static_cast<double>(k) / static_cast<double>(k + 1));
  auto r = static_cast<std::uint64_t>(guess);
  const U128 bound = ipow(N, k);
  while (ipow(r + 1, k + 1) <= bound) ++r;
  while (r > 0 && ipow(r, k + 1) > bound) --r;
  return r;
}

ExponentScan exponent_scan(std::uint64_t k, const std::vector<std::uint64_t>& N_grid, std::uint64_t seed,
                           std::uint64_t trials, const DriverOptions& opts) {
  if (N_grid.size() < 3) throw ParamError("exponent_scan needs at least three grid points");
  if (!std::is_sorted(N_grid.begin(), N_grid.end())) throw ParamError("exponent_scan grid must be ascending");
  if (trials == 0) throw ParamError("exponent_scan needs at least one trial");
  ExponentScan scan;
  scan.k = k;
  std::vector<double> xs, ys;
  for (std::uint64_t N : N_grid) {
    ScanRow row;
    row.N = N;
    row.r = optimal_memory(N, k);
    std::uint64_t wins = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::uint64_t s = derive_seed(seed, N * 1000 + t);
      const PlantedInstance planted = planted_instance(N, k, 1, s);
      const CollisionResult res = run_k_distinctness(planted.instance, row.r, k, derive_seed(s, 7), opts);
      row.totals.push_back(res.ledger.total());
      wins += res.found ? 1 : 0;
    }
    row.median_total = median(row.totals);
    row.mean_total = std::accumulate(row.totals.begin(), row.totals.end(), 0.0) / static_cast<double>(trials);
    row.success_rate = static_cast<double>(wins) / static_cast<double>(trials);
    xs.push_back(static_cast<double>(N));
    ys.push_back(row.median_total);
    scan.rows.push_back(std::move(row));
  }
  scan.fit = fit_loglog(xs, ys);
  return scan;
}

Tradeoff tradeoff_scan(std::uint64_t N, std::uint64_t k, const std::vector<std::uint64_t>& r_values,
                       std::uint64_t seed, std::uint64_t trials, const DriverOptions& opts) {
  if (r_values.empty() || trials == 0) throw ParamError("tradeoff_scan needs r values and trials");
  Tradeoff out;
  out.N = N;
  out.k = k;
  double lo = INFINITY, hi = 0.0;
  for (std::uint64_t r : r_values) {
    std::vector<std::uint64_t> totals;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::uint64_t s = derive_seed(seed, r * 1000 + t);
      const PlantedInstance planted = planted_instance(N, k, 1, s);
      totals.push_back(run_k_distinctness(planted.instance, r, k, derive_seed(s, 7), opts).ledger.total());
    }
    TradeoffRow row;
    row.r = r;
    row.median_total = median(totals);
    row.model = std::max(static_cast<double>(N) / std::sqrt(static_cast<double>(r)), static_cast<double>(r));
    const double ratio = row.median_total / row.model;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    out.rows.push_back(row);
  }
  out.c = std::sqrt(lo * hi);
  out.max_factor = std::sqrt(hi / lo);
  return out;
}

}  // namespace kdist::driver

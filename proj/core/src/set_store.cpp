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

#include "kdist/set_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>

#include "kdist/errors.hpp"
#include "kdist/rng.hpp"

namespace kdist::store {

namespace {

constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint8_t kMagic[4] = {'K', 'D', 'C', 'S'};

std::uint64_t ceil_log2(std::uint64_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}
  std::uint64_t take(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) throw FormatError("serialized store is truncated");
    std::uint64_t v = 0;
    for (int n = 0; n < width; ++n) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  std::uint64_t u64() { return take(8); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

struct CanonicalStore::Steps {
  std::uint64_t n = 0;
  void charge(std::uint64_t k = 1) { n += k; }
};

std::uint64_t default_budget(std::uint64_t N, std::uint64_t M, double c) {
  const double lg = static_cast<double>(ceil_log2(N + M));
  return static_cast<std::uint64_t>(std::ceil(c * lg * lg * lg * lg));
}

CanonicalStore::CanonicalStore(const StoreConfig& cfg) : cfg_(cfg) {
  if (cfg_.M == 0) cfg_.M = cfg_.N;
  if (cfg_.N < 2) throw ParamError("store needs N >= 2");
  if (cfg_.r < 1 || cfg_.r >= cfg_.N) throw ParamError("store needs 1 <= r < N");
  if (cfg_.k < 2) throw ParamError("store needs k >= 2");
  bucket_cap_ = std::max<std::uint64_t>(1, ceil_log2(cfg_.N));
  l_max_ = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, ceil_log2(cfg_.N)));
  counter_levels_ = static_cast<std::uint32_t>(std::bit_width(cfg_.r));

  const auto d = static_cast<std::uint64_t>(std::ceil(4.0 * std::log2(static_cast<double>(cfg_.N)) + 1.0));
  level_fns_.reserve(l_max_);
  for (std::uint32_t t = 1; t <= l_max_; ++t) {
    level_fns_.push_back(hash::sample_bool_member(cfg_.N, d, derive_seed(cfg_.seed, t)));
  }
  buckets_.resize(cfg_.r);
  counters_.resize(counter_levels_);
  for (std::uint32_t l = 0; l < counter_levels_; ++l) counters_[l].assign(cfg_.r >> l, 0);
  start_.assign(l_max_ + 1, 0);
  budget_.budget = default_budget(cfg_.N, cfg_.M, cfg_.budget_c);
}

std::uint64_t CanonicalStore::bucket_of(std::uint64_t i) const {
  if (i < 1 || i > cfg_.N) throw ParamError("index out of range");
  // i = N would land in bucket r + 1; it shares the last bucket instead.
  return std::min(i * cfg_.r / cfg_.N + 1, cfg_.r);
}

std::uint32_t CanonicalStore::compute_level(std::uint64_t i, Steps* s) const {
  std::uint32_t l = 0;
  while (l < l_max_) {
    if (s != nullptr) s->charge();
    if (!hash::eval_bool(level_fns_[l], i)) break;
    ++l;
  }
  return l;
}

std::uint32_t CanonicalStore::level_of(std::uint64_t i) const {
  bucket_of(i);
  return compute_level(i, nullptr);
}

const CanonicalStore::Entry* CanonicalStore::find(std::uint64_t i) const {
  for (const Entry& e : buckets_[bucket_of(i) - 1]) {
    if (e.i == i) return &e;
    if (e.i > i) break;
  }
  return nullptr;
}

CanonicalStore::Entry* CanonicalStore::find(std::uint64_t i) {
  return const_cast<Entry*>(std::as_const(*this).find(i));
}

std::uint64_t CanonicalStore::link(std::uint64_t from, std::uint32_t level) const {
  return from == 0 ? start_[level] : find(from)->next[level];
}

void CanonicalStore::set_link(std::uint64_t from, std::uint32_t level, std::uint64_t to) {
  if (from == 0) {
    start_[level] = to;
  } else {
    find(from)->next[level] = to;
  }
}

std::vector<std::uint64_t> CanonicalStore::predecessors(std::uint64_t x, std::uint64_t i, Steps& s) const {
  std::vector<std::uint64_t> preds(l_max_ + 1, 0);
  std::uint64_t cur = 0;
  for (std::uint32_t l = l_max_ + 1; l-- > 0;) {
    while (true) {
      s.charge();
      const std::uint64_t nxt = link(cur, l);
      if (nxt == 0) break;
      s.charge();
      const Entry* e = find(nxt);
      if (std::tie(e->x, e->i) < std::tie(x, i)) {
        cur = nxt;
      } else {
        break;
      }
    }
    preds[l] = cur;
  }
  return preds;
}

std::uint64_t CanonicalStore::count_value(std::uint64_t x, Steps& s) const {
  const std::vector<std::uint64_t> preds = predecessors(x, 0, s);
  std::uint64_t count = 0;
  std::uint64_t cur = link(preds[0], 0);
  while (cur != 0 && count <= cfg_.k) {
    s.charge();
    const Entry* e = find(cur);
    if (e->x != x) break;
    ++count;
    cur = e->next[0];
  }
  return count;
}

void CanonicalStore::bump_counters(std::uint64_t bucket, int delta, Steps* s) {
  for (std::uint32_t l = 0; l < counter_levels_; ++l) {
    const std::uint64_t span = std::uint64_t{1} << l;
    const std::uint64_t m = (bucket + span - 1) / span;
    if (m * span > cfg_.r) continue;
    if (s != nullptr) {
      s->charge();
    } else {
      counters_[l][m - 1] = static_cast<std::uint32_t>(static_cast<int>(counters_[l][m - 1]) + delta);
    }
  }
}

std::uint64_t CanonicalStore::counter(std::uint32_t level, std::uint64_t j) const {
  return counters_[level][(j >> level) - 1];
}

bool CanonicalStore::finish(Steps& s) {
  budget_.consumed = s.n;
  budget_.failed = s.n > budget_.budget;
  last_failure_ = budget_.failed ? Failure::kBudget : Failure::kNone;
  return !budget_.failed;
}

bool CanonicalStore::insert(std::uint64_t i, std::uint64_t x) {
  const std::uint64_t b = bucket_of(i);
  if (x < 1 || x > cfg_.M) throw ParamError("value out of range");
  Steps s;
  auto& bucket = buckets_[b - 1];
  std::size_t pos = 0;
  for (const Entry& e : bucket) {
    s.charge();
    if (e.i == i) throw ParamError("index already stored");
    if (e.i > i) break;
    ++pos;
  }
  if (size_ >= capacity()) throw ParamError("store is full");
  if (bucket.size() >= bucket_cap_) {
    budget_.consumed = s.n;
    budget_.failed = true;
    last_failure_ = Failure::kOverflow;
    return false;
  }
  const std::uint32_t level = compute_level(i, &s);
  const std::vector<std::uint64_t> preds = predecessors(x, i, s);
  const std::uint64_t same = count_value(x, s);
  bump_counters(b, +1, &s);
  s.charge(level + 1);
  if (!finish(s)) return false;

  Entry e;
  e.i = i;
  e.x = x;
  e.level = level;
  e.next.resize(level + 1);
  for (std::uint32_t l = 0; l <= level; ++l) e.next[l] = link(preds[l], l);
  bucket.insert(bucket.begin() + static_cast<std::ptrdiff_t>(pos), std::move(e));
  for (std::uint32_t l = 0; l <= level; ++l) set_link(preds[l], l, i);
  bump_counters(b, +1, nullptr);
  ++size_;
  if (same + 1 == cfg_.k) ++v_;
  return true;
}

bool CanonicalStore::remove(std::uint64_t i) {
  const std::uint64_t b = bucket_of(i);
  Steps s;
  auto& bucket = buckets_[b - 1];
  std::size_t pos = 0;
  for (const Entry& e : bucket) {
    s.charge();
    if (e.i >= i) break;
    ++pos;
  }
  if (pos == bucket.size() || bucket[pos].i != i) throw ParamError("index not stored");
  const Entry& target = bucket[pos];
  const std::vector<std::uint64_t> preds = predecessors(target.x, i, s);
  const std::uint64_t same = count_value(target.x, s);
  bump_counters(b, -1, &s);
  s.charge(target.level + 1);
  if (!finish(s)) return false;

  for (std::uint32_t l = 0; l <= target.level; ++l) set_link(preds[l], l, target.next[l]);
  bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(pos));
  bump_counters(b, -1, nullptr);
  --size_;
  if (same == cfg_.k) --v_;
  return true;
}

std::optional<std::uint64_t> CanonicalStore::lookup(std::uint64_t i) const {
  if (i < 1 || i > cfg_.N) return std::nullopt;
  const Entry* e = find(i);
  if (e == nullptr) return std::nullopt;
  return e->x;
}

std::uint64_t CanonicalStore::rank(std::uint64_t y) const {
  const std::uint64_t hy = bucket_of(y);
  // f1: entries in buckets 1..h(y)-1, by descending through aligned ranges.
  std::uint64_t f1 = 0;
  std::uint64_t at = 0;
  for (std::uint32_t l = counter_levels_; l-- > 0;) {
    const std::uint64_t span = std::uint64_t{1} << l;
    if (at + span < hy) {
      f1 += counter(l, at + span);
      at += span;
    }
  }
  // f2: position within the bucket.
  std::uint64_t f2 = 0;
  for (const Entry& e : buckets_[hy - 1]) {
    ++f2;
    if (e.i == y) return f1 + f2;
    if (e.i > y) break;
  }
  throw ParamError("rank: index not stored");
}

std::vector<std::uint64_t> CanonicalStore::members() const {
  std::vector<std::uint64_t> out;
  out.reserve(size_);
  for (const auto& bucket : buckets_) {
    for (const Entry& e : bucket) out.push_back(e.i);
  }
  return out;
}

std::vector<std::uint64_t> CanonicalStore::chain(std::uint32_t level) const {
  if (level > l_max_) throw ParamError("chain: level out of range");
  std::vector<std::uint64_t> out;
  for (std::uint64_t cur = start_[level]; cur != 0; cur = find(cur)->next[level]) {
    out.push_back(cur);
    if (out.size() > size_) break;  // corrupted links; let the caller notice
  }
  return out;
}

bool CanonicalStore::check_invariants() const {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_bucket(cfg_.r, 0);
  std::map<std::uint64_t, std::uint64_t> value_counts;
  std::vector<const Entry*> all;
  for (std::uint64_t b = 1; b <= cfg_.r; ++b) {
    const auto& bucket = buckets_[b - 1];
    if (bucket.size() > bucket_cap_) return false;
    for (std::size_t n = 0; n < bucket.size(); ++n) {
      const Entry& e = bucket[n];
      if (bucket_of(e.i) != b) return false;
      if (n > 0 && bucket[n - 1].i >= e.i) return false;
      if (e.level != compute_level(e.i, nullptr) || e.next.size() != e.level + 1) return false;
      ++value_counts[e.x];
      all.push_back(&e);
    }
    per_bucket[b - 1] = bucket.size();
    total += bucket.size();
  }
  if (total != size_) return false;

  for (std::uint32_t l = 0; l < counter_levels_; ++l) {
    const std::uint64_t span = std::uint64_t{1} << l;
    for (std::uint64_t m = 1; m * span <= cfg_.r; ++m) {
      std::uint64_t want = 0;
      for (std::uint64_t b = (m - 1) * span + 1; b <= m * span; ++b) want += per_bucket[b - 1];
      if (counters_[l][m - 1] != want) return false;
    }
  }

  std::uint64_t v = 0;
  for (const auto& [x, c] : value_counts) v += c >= cfg_.k ? 1 : 0;
  if (v != v_) return false;

  std::sort(all.begin(), all.end(),
            [](const Entry* a, const Entry* b) { return std::tie(a->x, a->i) < std::tie(b->x, b->i); });
  for (std::uint32_t l = 0; l <= l_max_; ++l) {
    std::uint64_t prev = 0;
    for (const Entry* e : all) {
      if (e->level < l) continue;
      if (link(prev, l) != e->i) return false;
      prev = e->i;
    }
    if (link(prev, l) != 0) return false;
  }
  return true;
}

std::vector<std::uint8_t> CanonicalStore::serialize() const {
  Writer w;
  for (std::uint8_t c : kMagic) w.out.push_back(c);
  w.u32(kFormatVersion);
  w.u64(cfg_.N);
  w.u64(cfg_.M);
  w.u64(cfg_.r);
  w.u64(cfg_.k);
  w.u64(cfg_.seed);
  w.u32(l_max_);
  w.u64(level_fns_.front().d);
  for (const auto& bucket : buckets_) {
    w.u32(static_cast<std::uint32_t>(bucket.size()));
    for (const Entry& e : bucket) {
      w.u64(e.i);
      w.u64(e.x);
    }
  }
  for (const auto& row : counters_) {
    for (std::uint32_t c : row) w.u32(c);
  }
  for (std::uint64_t s : start_) w.u64(s);
  for (const auto& bucket : buckets_) {
    for (const Entry& e : bucket) {
      w.u32(e.level);
      for (std::uint64_t n : e.next) w.u64(n);
    }
  }
  w.u64(v_);
  return std::move(w.out);
}

CanonicalStore CanonicalStore::deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader rd(bytes);
  for (std::uint8_t c : kMagic) {
    if (rd.take(1) != c) throw FormatError("not a serialized store");
  }
  if (rd.u32() != kFormatVersion) throw FormatError("unsupported store format version");
  StoreConfig cfg;
  cfg.N = rd.u64();
  cfg.M = rd.u64();
  cfg.r = rd.u64();
  cfg.k = rd.u64();
  cfg.seed = rd.u64();
  if (cfg.N < 2 || cfg.r < 1 || cfg.r >= cfg.N || cfg.M < 1 || cfg.k < 2 || cfg.N > (std::uint64_t{1} << 40)) {
    throw FormatError("serialized store has invalid parameters");
  }
  CanonicalStore st(cfg);
  if (rd.u32() != st.l_max_ || rd.u64() != st.level_fns_.front().d) {
    throw FormatError("serialized store uses a different hash layout");
  }
  for (auto& bucket : st.buckets_) {
    const std::uint32_t n = rd.u32();
    if (n > st.bucket_cap_) throw FormatError("bucket exceeds capacity");
    bucket.resize(n);
    for (Entry& e : bucket) {
      e.i = rd.u64();
      e.x = rd.u64();
      if (e.i < 1 || e.i > cfg.N || e.x < 1 || e.x > cfg.M) throw FormatError("entry out of range");
    }
    st.size_ += n;
  }
  if (st.size_ > st.capacity()) throw FormatError("store exceeds capacity");
  for (auto& row : st.counters_) {
    for (std::uint32_t& c : row) c = rd.u32();
  }
  for (std::uint64_t& s : st.start_) s = rd.u64();
  for (auto& bucket : st.buckets_) {
    for (Entry& e : bucket) {
      e.level = rd.u32();
      if (e.level > st.l_max_) throw FormatError("entry level out of range");
      e.next.resize(e.level + 1);
      for (std::uint64_t& n : e.next) n = rd.u64();
    }
  }
  st.v_ = rd.u64();
  if (!rd.done()) throw FormatError("trailing bytes after serialized store");
  bool ok = false;
  try {
    ok = st.check_invariants();
  } catch (const ParamError&) {
    ok = false;
  }
  if (!ok) throw FormatError("serialized store is inconsistent");
  return st;
}

FailureStats measure_failure_rate(std::uint64_t N, std::uint64_t r, std::uint64_t ops, std::uint64_t seed,
                                  double budget_c, std::uint64_t budget_override) {
  StoreConfig cfg;
  cfg.N = N;
  cfg.M = N;
  cfg.r = r;
  cfg.seed = derive_seed(seed, 0);
  cfg.budget_c = budget_c > 0.0 ? budget_c : 1.0;
  CanonicalStore st(cfg);
  if (budget_override > 0) st.set_budget(budget_override);

  Rng rng(derive_seed(seed, 1));
  std::vector<std::uint64_t> present;
  FailureStats stats;
  for (std::uint64_t op = 0; op < ops; ++op) {
    const bool grow = present.empty() || (present.size() < r && rng.below(2) == 0);
    bool ok = false;
    if (grow) {
      std::uint64_t i = 0;
      do {
        i = rng.below(N) + 1;
      } while (st.contains(i));
      ok = st.insert(i, rng.below(cfg.M) + 1);
      if (ok) present.push_back(i);
    } else {
      const std::size_t slot = rng.below(present.size());
      ok = st.remove(present[slot]);
      if (ok) {
        present[slot] = present.back();
        present.pop_back();
      }
    }
    ++stats.ops;
    stats.max_steps = std::max(stats.max_steps, st.budget().consumed);
    if (!ok) {
      ++stats.failures;
      if (st.last_failure() == Failure::kOverflow) {
        ++stats.overflow;
      } else {
        ++stats.over_budget;
      }
    }
  }
  return stats;
}

std::vector<StoreOp> random_history(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& target,
                                    std::uint64_t N, std::uint64_t M, std::uint64_t decoys, std::uint64_t churn,
                                    Rng& rng) {
  std::map<std::uint64_t, std::uint64_t> value;  // index -> value
  for (const auto& [i, x] : target) {
    if (i < 1 || i > N || !value.emplace(i, x).second) throw ParamError("random_history: bad target");
  }
  if (target.size() + decoys > N) throw ParamError("random_history: not enough free indices for decoys");
  // Tokens: one per operation; an element's j-th token is an insert for even j.
  std::vector<std::uint64_t> tokens;
  std::map<std::uint64_t, std::uint64_t> decoy_value;
  while (decoy_value.size() < decoys) {
    const std::uint64_t i = rng.below(N) + 1;
    if (value.count(i) == 0) decoy_value.emplace(i, rng.below(M) + 1);
  }
  for (const auto& [i, x] : target) tokens.push_back(i);
  for (const auto& [i, x] : decoy_value) {
    tokens.push_back(i);
    tokens.push_back(i);
  }
  for (std::uint64_t c = 0; c < churn && !target.empty(); ++c) {
    const std::uint64_t i = target[rng.below(target.size())].first;
    tokens.push_back(i);
    tokens.push_back(i);
  }
  for (std::size_t n = tokens.size(); n > 1; --n) std::swap(tokens[n - 1], tokens[rng.below(n)]);

  std::map<std::uint64_t, std::uint64_t> seen;
  std::vector<StoreOp> ops;
  ops.reserve(tokens.size());
  for (std::uint64_t i : tokens) {
    const bool ins = seen[i]++ % 2 == 0;
    const auto it = value.find(i);
    ops.push_back({ins, i, it != value.end() ? it->second : decoy_value.at(i)});
  }
  return ops;
}

}  // namespace kdist::store

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

#include <benchmark/benchmark.h>

#include "kdist/collision_driver.hpp"
#include "kdist/full_sim.hpp"
#include "kdist/hash_families.hpp"
#include "kdist/instance.hpp"
#include "kdist/set_store.hpp"
#include "kdist/walk.hpp"

namespace {

using namespace kdist;

void BM_CollapsedRun(benchmark::State& state) {
  const auto N = static_cast<std::uint64_t>(state.range(0));
  const walk::WalkParams p = walk::reference_params(N, static_cast<std::uint64_t>(std::cbrt(double(N) * N)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(walk::run_single_solution(p).success_prob);
  state.counters["steps"] = static_cast<double>(p.t1 * p.t2);
}
BENCHMARK(BM_CollapsedRun)->Arg(1000)->Arg(100000);

void BM_FullSimStep(benchmark::State& state) {
  const auto space = fullsim::make_space(static_cast<std::uint32_t>(state.range(0)), 3);
  fullsim::FullState s = fullsim::uniform_state(space);
  for (auto _ : state) {
    s = fullsim::walk_step(s);
    benchmark::DoNotOptimize(s.amps.data());
  }
  state.counters["pairs"] = static_cast<double>(space->h.size());
}
BENCHMARK(BM_FullSimStep)->Arg(8)->Arg(12);

void BM_StoreInsertRemove(benchmark::State& state) {
  store::StoreConfig sc;
  sc.N = 1 << 16;
  sc.r = static_cast<std::uint64_t>(state.range(0));
  store::CanonicalStore st(sc);
  Rng rng(1);
  while (st.size() < sc.r / 2) {
    const std::uint64_t i = rng.below(sc.N) + 1;
    if (!st.contains(i)) st.insert(i, rng.below(1000) + 1);
  }
  for (auto _ : state) {
    const std::uint64_t i = rng.below(sc.N) + 1;
    if (!st.contains(i) && st.insert(i, rng.below(1000) + 1)) st.remove(i);
  }
}
BENCHMARK(BM_StoreInsertRemove)->Arg(256)->Arg(4096);

void BM_FeistelEval(benchmark::State& state) {
  const auto q = static_cast<std::uint64_t>(state.range(0));
  const auto perm = hash::sample_perm_member(q, 16, 7, hash::kDefaultRounds);
  std::uint64_t i = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hash::eval_perm(perm, i, hash::Direction::kForward));
    i = i % q + 1;
  }
}
BENCHMARK(BM_FeistelEval)->Arg(1 << 10)->Arg(1 << 20);

void BM_Driver(benchmark::State& state) {
  const auto N = static_cast<std::uint64_t>(state.range(0));
  const Instance inst = planted_instance(N, 2, 1, 3).instance;
  const std::uint64_t r = driver::optimal_memory(N, 2);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(driver::run_k_distinctness(inst, r, 2, seed++).ledger);
}
BENCHMARK(BM_Driver)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

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

#include <memory>

#include "commands.hpp"
#include "kdist/set_store.hpp"

namespace kdist::cli {

namespace {

struct StoreOptions {
  std::string N = "1024", r = "128", ops = "10000";
  double budget_c = 1.0;
  std::uint64_t budget = 0;
};

int run_store(const StoreOptions& o, const Common& common) {
  const std::uint64_t N = parse_count(o.N, "--N");
  const std::uint64_t r = parse_count(o.r, "--r");
  const std::uint64_t ops = parse_count(o.ops, "--ops");
  const store::FailureStats st = store::measure_failure_rate(N, r, ops, common.seed, o.budget_c, o.budget);
  const std::uint64_t budget = o.budget ? o.budget : store::default_budget(N, N, o.budget_c);

  OutputSpec out = output_for("store-bench", common);
  out.config = {{"N", N}, {"r", r}, {"ops", ops}, {"budget_c", o.budget_c}, {"budget", budget},
                {"seed", common.seed}};
  Json doc = {{"ops", st.ops},           {"failures", st.failures},   {"overflow", st.overflow},
              {"over_budget", st.over_budget}, {"max_steps", st.max_steps}, {"failure_rate", st.rate()}};
  Table table;
  table.columns = {"ops", "failures", "overflow", "over_budget", "max_steps", "failure_rate"};
  table.rows.push_back({fmt(st.ops), fmt(st.failures), fmt(st.overflow), fmt(st.over_budget), fmt(st.max_steps),
                        fmt(st.rate())});
  emit(out, doc, table);
  return kExitOk;
}

}  // namespace

void register_store_bench(CLI::App& root, const Common& common, int& rc) {
  auto o = std::make_shared<StoreOptions>();
  CLI::App* sub = root.add_subcommand("store-bench", "failure rate of the canonical store under random workloads");
  sub->fallthrough();
  sub->add_option("--N", o->N, "index range")->capture_default_str();
  sub->add_option("--r", o->r, "number of buckets")->capture_default_str();
  sub->add_option("--ops", o->ops, "operations")->capture_default_str();
  sub->add_option("--budget-c", o->budget_c, "budget constant c in c*ceil(log2(N+M))^4")->capture_default_str();
  sub->add_option("--budget", o->budget, "explicit step budget (overrides --budget-c)");
  sub->callback([o, &common, &rc] { rc = run_store(*o, common); });
}

}  // namespace kdist::cli

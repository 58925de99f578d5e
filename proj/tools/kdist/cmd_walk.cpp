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
#include "kdist/spectral.hpp"
#include "kdist/walk.hpp"

namespace kdist::cli {

namespace {

struct WalkOptions {
  std::string N, r, M = "0";
  std::uint64_t k = 2;
  std::int64_t t1 = -1;
  std::uint64_t t2 = 0;
  std::int64_t t1_max = -1;
};

int run_walk(const WalkOptions& o, const Common& common) {
  walk::WalkParams p;
  p.N = parse_count(o.N, "--N");
  p.r = parse_count(o.r, "--r");
  p.k = o.k;
  p.M = parse_count(o.M, "--M");
  if (p.M == 0) p.M = p.N;
  p.t2 = o.t2 == 0 ? walk::default_t2(p.r, p.k) : o.t2;
  walk::validate(p);
  p.t1 = o.t1 >= 0 ? static_cast<std::uint64_t>(o.t1) : spectral::spectral_t1(p);
  const std::uint64_t t1_max = o.t1_max >= 0 ? static_cast<std::uint64_t>(o.t1_max) : 2 * p.t1 + 2;

  const auto curve = walk::success_curve(p, t1_max);
  const walk::SingleRun run = walk::run_single_solution(p);

  OutputSpec out = output_for("walk", common);
  out.config = {{"N", p.N}, {"M", p.M}, {"r", p.r}, {"k", p.k}, {"t1", p.t1},
                {"t2", p.t2}, {"t1_max", t1_max}, {"seed", common.seed}};
  Json ledger = {{"setup", run.ledger.setup_queries},
                 {"walk", run.ledger.walk_queries},
                 {"classical", run.ledger.classical_queries},
                 {"grover", run.ledger.grover_charged},
                 {"total", run.ledger.total()}};
  Json doc;
  doc["success_prob"] = run.success_prob;
  doc["ledger"] = ledger;
  Json arr = Json::array();
  Table table;
  table.columns = {"t1", "success_prob"};
  table.notes.push_back("success_prob_at_t1: " + fmt(run.success_prob));
  table.notes.push_back("ledger: " + ledger.dump());
  for (const auto& pt : curve) {
    arr.push_back({{"t1", pt.t1}, {"success_prob", pt.success_prob}});
    table.rows.push_back({fmt(pt.t1), fmt(pt.success_prob)});
  }
  doc["curve"] = std::move(arr);
  emit(out, doc, table);
  return kExitOk;
}

}  // namespace

void register_walk(CLI::App& root, const Common& common, int& rc) {
  auto o = std::make_shared<WalkOptions>();
  CLI::App* sub = root.add_subcommand("walk", "success curve and ledger of the collapsed walk");
  sub->fallthrough();
  sub->add_option("--N", o->N, "instance length")->required();
  sub->add_option("--r", o->r, "subset size")->required();
  sub->add_option("--k", o->k, "collision arity")->capture_default_str();
  sub->add_option("--M", o->M, "alphabet size (0 = N)");
  sub->add_option("--t1", o->t1, "outer iterations (default: spectral)");
  sub->add_option("--t2", o->t2, "walk steps per iteration (default: ceil(pi sqrt(r) / (3 sqrt(k))))");
  sub->add_option("--t1-max", o->t1_max, "last t1 of the curve (default 2 t1 + 2)");
  sub->callback([o, &common, &rc] { rc = run_walk(*o, common); });
}

}  // namespace kdist::cli

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

#include <iostream>
#include <memory>

#include "commands.hpp"
#include "kdist/collision_driver.hpp"
#include "kdist/errors.hpp"
#include "kdist/instance.hpp"

namespace kdist::cli {

namespace {

struct DistinctOptions {
  std::string input;
  std::uint64_t k = 2;
  std::string r = "0";
  std::string M = "0";
  std::string source = "feistel";
  std::uint32_t rounds = hash::kDefaultRounds;
  bool scan_exponent = false;
  bool scan_tradeoff = false;
  std::string grid;
  std::string N = "1e5";
  std::string r_grid = "64,128,256,512,1024,2048,4096,8192,16384,32768,65536";
  std::uint64_t trials = driver::kDefaultScanTrials;
};

Json ledger_json(const QueryLedger& l) {
  return {{"setup", l.setup_queries}, {"walk", l.walk_queries}, {"classical", l.classical_queries},
          {"grover", l.grover_charged}, {"total", l.total()}};
}

std::string join(const std::vector<std::uint64_t>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

driver::DriverOptions driver_options(const DistinctOptions& o) {
  driver::DriverOptions d;
  d.source = o.source == "uniform" ? driver::PermSource::kUniform : driver::PermSource::kFeistel;
  d.rounds = o.rounds;
  return d;
}

int run_single(const DistinctOptions& o, const Common& common) {
  if (o.input.empty()) throw ParamError("distinct: --input is required unless a scan is requested");
  const Instance inst = read_instance(o.input, parse_count(o.M, "--M"));
  std::uint64_t r = parse_count(o.r, "--r");
  if (r == 0) r = std::max<std::uint64_t>(o.k, driver::optimal_memory(inst.N(), o.k));
  const driver::CollisionResult res = driver::run_k_distinctness(inst, r, o.k, common.seed, driver_options(o));

  OutputSpec out = output_for("distinct", common);
  out.config = {{"input", o.input}, {"N", inst.N()}, {"M", inst.M}, {"k", o.k}, {"r", r},
                {"source", o.source}, {"rounds", o.rounds}, {"seed", common.seed}};
  Json doc;
  doc["found"] = res.found ? Json(*res.found) : Json("none");
  doc["ledger"] = ledger_json(res.ledger);
  doc["iteration_cap"] = res.iteration_cap;
  Json trace = Json::array();
  Table table;
  table.columns = {"iteration", "size", "r_j", "t1", "t2", "q", "relaxed", "collisions", "outcome",
                   "setup", "walk", "classical", "grover"};
  table.notes.push_back("found: " + (res.found ? join(*res.found, " ") : std::string("none")));
  table.notes.push_back("ledger: " + ledger_json(res.ledger).dump());
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const driver::IterationRecord& t = res.trace[i];
    trace.push_back({{"iteration", i + 1}, {"size", t.size}, {"r_j", t.r_j}, {"t1", t.t1}, {"t2", t.t2},
                     {"q", t.q}, {"relaxed", t.relaxed}, {"collisions", t.collisions}, {"outcome", t.outcome},
                     {"cost", ledger_json(t.cost)}});
    table.rows.push_back({fmt(std::uint64_t{i + 1}), fmt(t.size), fmt(t.r_j), fmt(t.t1), fmt(t.t2), fmt(t.q),
                          t.relaxed ? "1" : "0", fmt(t.collisions), t.outcome, fmt(t.cost.setup_queries),
                          fmt(t.cost.walk_queries), fmt(t.cost.classical_queries), fmt(t.cost.grover_charged)});
  }
  doc["trace"] = std::move(trace);
  emit(out, doc, table);
  if (common.out != "-") std::cout << (res.found ? "found: " + join(*res.found, " ") : std::string("none")) << '\n';
  return kExitOk;
}

int run_exponent(const DistinctOptions& o, const Common& common) {
  const std::vector<std::uint64_t> grid =
      parse_count_list(o.grid.empty() ? std::string(o.k == 2 ? "1e3,1e4,1e5,1e6" : "1e3,1e4,1e5") : o.grid, "--grid");
  const driver::ExponentScan scan = driver::exponent_scan(o.k, grid, common.seed, o.trials, driver_options(o));
  OutputSpec out = output_for("distinct --scan-exponent", common);
  out.config = {{"k", o.k}, {"grid", grid}, {"trials", o.trials}, {"source", o.source},
                {"rounds", o.rounds}, {"seed", common.seed}};
  Json rows = Json::array();
  Table table;
  table.columns = {"N", "r", "median_total", "mean_total", "success_rate"};
  for (const auto& row : scan.rows) {
    rows.push_back({{"N", row.N}, {"r", row.r}, {"median_total", row.median_total},
                    {"mean_total", row.mean_total}, {"success_rate", row.success_rate}, {"totals", row.totals}});
    table.rows.push_back({fmt(row.N), fmt(row.r), fmt(row.median_total), fmt(row.mean_total), fmt(row.success_rate)});
  }
  const double target = static_cast<double>(o.k) / static_cast<double>(o.k + 1);
  table.notes.push_back("slope: " + fmt(scan.fit.slope) + " target: " + fmt(target));
  Json doc;
  doc["rows"] = std::move(rows);
  doc["slope"] = scan.fit.slope;
  doc["intercept"] = scan.fit.intercept;
  doc["target_slope"] = target;
  emit(out, doc, table);
  if (common.out != "-") std::cout << "slope: " << fmt(scan.fit.slope) << '\n';
  return kExitOk;
}

int run_tradeoff(const DistinctOptions& o, const Common& common) {
  const std::uint64_t N = parse_count(o.N, "--N");
  const std::vector<std::uint64_t> rs = parse_count_list(o.r_grid, "--r-grid");
  const driver::Tradeoff tr = driver::tradeoff_scan(N, o.k, rs, common.seed, o.trials, driver_options(o));
  OutputSpec out = output_for("distinct --scan-tradeoff", common);
  out.config = {{"N", N}, {"k", o.k}, {"r_grid", rs}, {"trials", o.trials}, {"source", o.source},
                {"rounds", o.rounds}, {"seed", common.seed}};
  Json rows = Json::array();
  Table table;
  table.columns = {"r", "median_total", "model", "ratio"};
  for (const auto& row : tr.rows) {
    rows.push_back({{"r", row.r}, {"median_total", row.median_total}, {"model", row.model}});
    table.rows.push_back({fmt(row.r), fmt(row.median_total), fmt(row.model), fmt(row.median_total / row.model)});
  }
  table.notes.push_back("c: " + fmt(tr.c) + " max_factor: " + fmt(tr.max_factor));
  Json doc;
  doc["rows"] = std::move(rows);
  doc["c"] = tr.c;
  doc["max_factor"] = tr.max_factor;
  emit(out, doc, table);
  return kExitOk;
}

}  // namespace

void register_distinct(CLI::App& root, const Common& common, int& rc) {
  auto o = std::make_shared<DistinctOptions>();
  CLI::App* sub = root.add_subcommand("distinct", "k-distinctness on an instance file, or query-count scans");
  sub->fallthrough();
  sub->add_option("--input", o->input, "instance file: one integer per line, or a JSON array");
  sub->add_option("--k", o->k, "collision arity")->capture_default_str();
  sub->add_option("--r", o->r, "memory size (0 = largest r with r^(k+1) <= N^k)");
  sub->add_option("--M", o->M, "alphabet size (0 = max value)");
  sub->add_option("--source", o->source, "permutation source: feistel or uniform")
      ->check(CLI::IsMember({"feistel", "uniform"}))
      ->capture_default_str();
  sub->add_option("--rounds", o->rounds, "Feistel rounds")->capture_default_str();
  sub->add_flag("--scan-exponent", o->scan_exponent, "fit the query exponent over --grid");
  sub->add_flag("--scan-tradeoff", o->scan_tradeoff, "queries versus r at fixed --N over --r-grid");
  sub->add_option("--grid", o->grid, "comma-separated N values, e.g. 1e3,1e4,1e5");
  sub->add_option("--N", o->N, "tradeoff: instance length")->capture_default_str();
  sub->add_option("--r-grid", o->r_grid, "tradeoff: comma-separated r values");
  sub->add_option("--trials", o->trials, "scans: seeds per grid point")->capture_default_str();
  sub->callback([o, &common, &rc] {
    if (o->k < 2) throw ParamError("--k must be at least 2");
    if (o->scan_exponent) {
      rc = run_exponent(*o, common);
    } else if (o->scan_tradeoff) {
      rc = run_tradeoff(*o, common);
    } else {
      rc = run_single(*o, common);
    }
  });
}

}  // namespace kdist::cli

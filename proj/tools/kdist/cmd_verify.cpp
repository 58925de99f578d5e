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

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>

#include "commands.hpp"
#include "kdist/errors.hpp"
#include "kdist/full_sim.hpp"
#include "kdist/instance.hpp"
#include "kdist/set_store.hpp"
#include "kdist/spectral.hpp"
#include "kdist/walk.hpp"

namespace kdist::cli {

namespace {

struct VerifyOptions {
  std::string suite;
  std::string N = "6", r = "2";
  std::uint64_t k = 2;
  std::uint64_t t1_max = 8;
  std::uint64_t t2_max = 4;
  std::uint64_t trials = 0;  // 0: suite default
  std::uint64_t histories = 1000;
  std::uint64_t set_size = 0;
  double tol = 1e-9;
  double theta_tol = 0.1;
  double alpha = 1e-3;
  double epsilon = 0.3;
};

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // how value is compared with tolerance
  bool pass = false;
};

Check at_most(std::string name, double value, double tol) {
  return {std::move(name), value, tol, "<=", value <= tol};
}

Check at_least(std::string name, double value, double tol) {
  return {std::move(name), value, tol, ">=", value >= tol};
}

std::vector<Check> suite_subspace(const VerifyOptions& o, std::uint64_t seed, Json& cfg) {
  const std::uint64_t N = parse_count(o.N, "--N");
  const std::uint64_t r = parse_count(o.r, "--r");
  cfg["N"] = N;
  cfg["r"] = r;
  if (N > fullsim::kMaxN) throw ParamError("subspace suite needs N <= " + std::to_string(fullsim::kMaxN));
  const PlantedInstance planted = planted_instance(N, o.k, 1, seed);
  std::vector<Check> checks;
  for (std::uint64_t t2 = 1; t2 <= o.t2_max; ++t2) {
    double delta = 0.0, residual = 0.0;
    for (std::uint64_t t1 = 0; t1 <= o.t1_max; ++t1) {
      const fullsim::FullRun full = fullsim::run_full(planted.instance, static_cast<std::uint32_t>(r), o.k, t1, t2);
      const walk::WalkParams p{N, planted.instance.M, r, o.k, t1, t2};
      const walk::SingleRun fast = walk::run_single_solution(p);
      delta = std::max(delta, std::abs(full.good_mass - fast.success_prob));
      residual = std::max(residual, fullsim::project_to_subspace(full.final_state, planted.collisions[0]).residual);
    }
    checks.push_back(at_most("engine_delta t2=" + std::to_string(t2), delta, o.tol));
    checks.push_back(at_most("subspace_residual t2=" + std::to_string(t2), residual, o.tol));
  }
  return checks;
}

std::vector<Check> suite_spectrum(const VerifyOptions& o, Json& cfg) {
  walk::WalkParams p;
  p.N = parse_count(o.N, "--N");
  p.r = parse_count(o.r, "--r");
  p.k = o.k;
  p.M = p.N;
  cfg["N"] = p.N;
  cfg["r"] = p.r;
  std::vector<Check> checks;
  for (const spectral::ThetaRow& row : spectral::theta_table(p)) {
    checks.push_back(at_most("theta j=" + std::to_string(row.j) + " theta=" + fmt(row.theta) +
                                 " predicted=" + fmt(row.predicted),
                             row.rel_error, o.theta_tol));
  }
  return checks;
}

std::vector<Check> suite_hw(const VerifyOptions& o, std::uint64_t seed) {
  Rng rng(seed);
  const std::uint64_t trials = o.trials ? o.trials : 100;
  std::vector<Check> checks;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::size_t dim = 3 + static_cast<std::size_t>(rng.below(6));
    const Matrix a = spectral::near_identity_unitary(dim, 0.2, rng);
    const Matrix b = spectral::random_unitary(dim, rng);
    const auto res = spectral::hoffman_wielandt_check(a, b);
    checks.push_back({"trial " + std::to_string(t) + " dim=" + std::to_string(dim) + " margin", res.margin, 0.0,
                      ">=", res.holds});
  }
  return checks;
}

std::vector<Check> suite_gengrover(const VerifyOptions& o, std::uint64_t seed) {
  Rng rng(seed);
  const std::uint64_t trials = o.trials ? o.trials : 50;
  const double lo = o.epsilon * o.alpha / std::sqrt(std::numbers::pi);
  const double hi = 2.6 * o.alpha;
  const double floor_overlap = spectral::guaranteed_overlap(o.alpha, o.epsilon);
  std::vector<Check> checks;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const spectral::GengroverInput in = spectral::random_gengrover_input(o.alpha, o.epsilon, 4, rng);
    const auto rep = spectral::gengrover_analysis(in, spectral::build_model_system(in));
    const std::string tag = "trial " + std::to_string(t);
    checks.push_back({tag + " beta in [" + fmt(lo) + ", " + fmt(hi) + "]", rep.beta, hi, "in",
                      rep.beta >= lo && rep.beta <= hi});
    checks.push_back(at_least(tag + " overlap t=" + std::to_string(rep.t), *rep.measured_overlap, floor_overlap));
  }
  return checks;
}

std::vector<Check> suite_store(const VerifyOptions& o, std::uint64_t seed, Json& cfg) {
  store::StoreConfig sc;
  sc.N = parse_count(o.N, "--N");
  sc.r = parse_count(o.r, "--r");
  sc.k = o.k;
  sc.seed = seed;
  const store::CanonicalStore probe(sc);
  const std::uint64_t set_size = o.set_size ? o.set_size : std::min<std::uint64_t>(200, probe.capacity());
  if (set_size > probe.capacity()) throw ParamError("--set-size exceeds the store capacity r + 1");
  const std::uint64_t decoys = std::min<std::uint64_t>(set_size / 4, probe.capacity() - set_size);
  cfg["N"] = sc.N;
  cfg["r"] = sc.r;
  cfg["set_size"] = set_size;
  cfg["decoys"] = decoys;

  Rng rng(derive_seed(seed, 1));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> target;
  std::set<std::uint64_t> used;
  const std::uint64_t value_range = std::max<std::uint64_t>(2, sc.N / 8);
  while (target.size() < set_size) {
    const std::uint64_t i = rng.below(sc.N) + 1;
    if (used.insert(i).second) target.emplace_back(i, rng.below(value_range) + 1);
  }
  std::sort(target.begin(), target.end());
  store::CanonicalStore reference(sc);
  for (const auto& [i, x] : target) reference.insert(i, x);
  const auto want = reference.serialize();

  std::uint64_t identical = 0, rank_failures = 0, invariant_failures = 0, op_failures = 0;
  for (std::uint64_t h = 0; h < o.histories; ++h) {
    store::CanonicalStore st(sc);
    bool ok = true;
    for (const store::StoreOp& op : store::random_history(target, sc.N, value_range, decoys, set_size / 4, rng)) {
      const bool done = op.insert ? st.insert(op.i, op.x) : st.remove(op.i);
      if (!done) {
        ++op_failures;
        ok = false;
        break;
      }
      std::vector<bool> hit(st.size() + 1, false);
      for (std::uint64_t m : st.members()) {
        const std::uint64_t rk = st.rank(m);
        if (rk < 1 || rk > st.size() || hit[rk]) {
          ++rank_failures;
          break;
        }
        hit[rk] = true;
      }
    }
    if (!st.check_invariants()) ++invariant_failures;
    if (ok && st.serialize() == want) ++identical;
  }
  return {at_least("identical_serializations", static_cast<double>(identical), static_cast<double>(o.histories)),
          at_most("rank_bijection_failures", static_cast<double>(rank_failures), 0.0),
          at_most("invariant_failures", static_cast<double>(invariant_failures), 0.0),
          at_most("operation_failures", static_cast<double>(op_failures), 0.0)};
}

int run_verify(const VerifyOptions& o, const Common& common) {
  OutputSpec out = output_for("verify", common);
  Json cfg = {{"suite", o.suite}, {"k", o.k}, {"seed", common.seed}};
  std::vector<Check> checks;
  if (o.suite == "subspace") {
    cfg["t1_max"] = o.t1_max;
    cfg["t2_max"] = o.t2_max;
    cfg["tol"] = o.tol;
    checks = suite_subspace(o, common.seed, cfg);
  } else if (o.suite == "spectrum") {
    cfg["theta_tol"] = o.theta_tol;
    checks = suite_spectrum(o, cfg);
  } else if (o.suite == "hw") {
    cfg["trials"] = o.trials ? o.trials : 100;
    checks = suite_hw(o, common.seed);
  } else if (o.suite == "gengrover") {
    cfg["trials"] = o.trials ? o.trials : 50;
    cfg["alpha"] = o.alpha;
    cfg["epsilon"] = o.epsilon;
    checks = suite_gengrover(o, common.seed);
  } else {
    cfg["histories"] = o.histories;
    checks = suite_store(o, common.seed, cfg);
  }
  out.config = cfg;

  bool all = true;
  Json arr = Json::array();
  Table table;
  table.columns = {"check", "value", "relation", "tolerance", "pass"};
  for (const Check& c : checks) {
    all = all && c.pass;
    arr.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation},
                   {"tolerance", c.tolerance}, {"pass", c.pass}});
    table.rows.push_back({c.name, fmt(c.value), c.relation, fmt(c.tolerance), c.pass ? "pass" : "FAIL"});
  }
  table.notes.push_back(std::string("result: ") + (all ? "pass" : "FAIL"));
  Json doc;
  doc["pass"] = all;
  doc["checks"] = std::move(arr);
  emit(out, doc, table);
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

void register_verify(CLI::App& root, const Common& common, int& rc) {
  auto o = std::make_shared<VerifyOptions>();
  CLI::App* sub = root.add_subcommand("verify", "run a verification suite; exit 0 iff every check passes");
  sub->fallthrough();
  sub->add_option("--suite", o->suite, "subspace, spectrum, hw, gengrover or store")
      ->required()
      ->check(CLI::IsMember({"subspace", "spectrum", "hw", "gengrover", "store"}));
  sub->add_option("--N", o->N, "instance length")->capture_default_str();
  sub->add_option("--r", o->r, "subset size / store buckets")->capture_default_str();
  sub->add_option("--k", o->k, "collision arity")->capture_default_str();
  sub->add_option("--t1-max", o->t1_max, "subspace: largest t1")->capture_default_str();
  sub->add_option("--t2-max", o->t2_max, "subspace: largest t2")->capture_default_str();
  sub->add_option("--trials", o->trials, "hw / gengrover: number of random trials");
  sub->add_option("--histories", o->histories, "store: number of random histories")->capture_default_str();
  sub->add_option("--set-size", o->set_size, "store: size of the target set");
  sub->add_option("--tol", o->tol, "subspace: absolute tolerance")->capture_default_str();
  sub->add_option("--theta-tol", o->theta_tol, "spectrum: relative tolerance")->capture_default_str();
  sub->add_option("--alpha", o->alpha, "gengrover: overlap alpha")->capture_default_str();
  sub->add_option("--epsilon", o->epsilon, "gengrover: spectral gap")->capture_default_str();
  sub->callback([o, &common, &rc] { rc = run_verify(*o, common); });
}

}  // namespace kdist::cli

// One line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles/mip_enumeration.hpp"
#include "satsched/formulations.hpp"
#include "satsched/generator.hpp"
#include "satsched/linear_model.hpp"
#include "satsched/solver.hpp"
#include "satsched/validator.hpp"
#include "satsched/windowing.hpp"
#include "support/fixtures.hpp"
#include "support/mutation.hpp"

using namespace satsched;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Failures {
 public:
  void add(const std::string& what) {
    if (count_++ < 3) messages_ << (count_ > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string& ok_detail) const {
    if (count_ == 0) return {true, ok_detail};
    return {false, std::to_string(count_) + " failures: " + messages_.str()};
  }

 private:
  std::size_t count_ = 0;
  std::ostringstream messages_;
};

std::vector<SchedulingInstance> tiny_instances(std::size_t count, std::uint64_t seed,
                                               const fixture::TinyShape& shape) {
  std::mt19937_64 rng(seed);
  std::vector<SchedulingInstance> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(normalize_and_clip(fixture::random_tiny(rng, shape)));
  return out;
}

const std::vector<SchedulingInstance>& criterion3_instances() {
  static const auto instances = tiny_instances(400, 20240601, {8, 3, 3, 20, 4});
  return instances;
}

long value_of(const Schedule& s, ObjectiveKind kind) { return objective_value(s, kind); }

// Mission counts of the published instances, which the utilization table
// itself does not carry.
std::map<std::string, std::size_t> published_mission_counts() {
  std::map<std::string, std::size_t> n;
  const std::size_t cm[] = {100, 200, 300, 100, 200, 300, 400, 500, 100, 200, 300, 400, 500};
  for (int k = 0; k < 13; ++k) {
    n["C-" + std::to_string(k + 1)] = cm[k];
    n["M-" + std::to_string(k + 1)] = cm[k];
  }
  const std::size_t rm[] = {300, 400, 500, 300, 400, 500, 600, 700, 800, 900, 1000};
  for (int k = 0; k < 11; ++k) n["R-" + std::to_string(k + 1)] = rm[k];
  return n;
}

Outcome statistics_formulas() {
  std::ifstream in(std::string(SATSCHED_TEST_DATA) + "/resource_utilization.csv");
  if (!in) return {false, "cannot open resource_utilization.csv"};
  struct Published {
    std::vector<ResourceStats> rows;
    std::vector<double> conf;
    double paon = 0.0;
    double paot = 0.0;
  };
  std::map<std::string, Published> table;
  std::vector<std::string> order;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) c.push_back(cell);
    c.resize(10);
    if (!table.count(c[0])) order.push_back(c[0]);
    auto& p = table[c[0]];
    ResourceStats s;
    s.window_count = std::stoul(c[3]);
    s.total_visible = std::stod(c[4]);
    s.feasible_time = std::stod(c[5]);
    p.rows.push_back(s);
    p.conf.push_back(std::stod(c[7]));
    if (!c[8].empty()) p.paon = std::stod(c[8]);
    if (!c[9].empty()) p.paot = std::stod(c[9]);
  }
  const auto n = published_mission_counts();
  Failures f;
  std::size_t checked = 0;
  for (const auto& name : order) {
    auto& p = table[name];
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      const auto conf = contention_degree(p.rows[r].total_visible, p.rows[r].feasible_time);
      ++checked;
      if (!conf || std::abs(*conf - p.conf[r]) > 0.01) f.add(name + " conf row " + std::to_string(r));
    }
    if (!n.count(name)) {
      f.add(name + " has no mission count");
      continue;
    }
    const auto s = summarize_stats(n.at(name), p.rows);
    if (std::abs(s.paon - p.paon) > 0.01) f.add(name + " paon " + std::to_string(s.paon));
    if (std::abs(s.paot - p.paot) > 0.01) f.add(name + " paot " + std::to_string(s.paot));
  }
  return f.outcome(std::to_string(checked) + " conf values, " + std::to_string(order.size()) +
                   " instances");
}

Outcome model_sizes() {
  Failures f;
  const TargetStyle styles[] = {TargetStyle::R, TargetStyle::C, TargetStyle::M};
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto style = styles[k % 3];
    const auto inst = normalize_and_clip(generate({style, 40 + 10 * (k % 4), 3, 86400, 100 + k, std::nullopt}));
    const auto prep = preprocess(inst);
    const auto base = report_model(build_baseline(inst, prep, ObjectiveKind::Weight).model);
    const auto impr = report_model(build_improved(inst, prep, ObjectiveKind::Weight).model);
    const std::string tag = std::string(to_string(style)) + " seed " + std::to_string(100 + k);
    if (base.continuous_count != inst.mission_count() - prep.n_prime()) f.add(tag + " baseline mVC");
    if (impr.continuous_count != prep.reduced.windows().size()) f.add(tag + " improved mVC");
    if (style != TargetStyle::R && impr.binary_count > base.binary_count) f.add(tag + " mVB");
  }
  return f.outcome("20 generated instances");
}

Outcome oracle_equivalence() {
  Failures f;
  std::size_t k = 0;
  for (const auto& inst : criterion3_instances()) {
    const auto prep = preprocess(inst);
    for (auto kind : {ObjectiveKind::Count, ObjectiveKind::Weight}) {
      const auto r = solve_exact(inst, prep, kind);
      const auto b = brute_force(inst, kind);
      if (!r.proven_optimal) f.add("instance " + std::to_string(k) + " not proven");
      if (value_of(r.best, kind) != value_of(b, kind)) {
        f.add("instance " + std::to_string(k) + " " + std::string(to_string(kind)) + " " +
              std::to_string(value_of(r.best, kind)) + " vs " + std::to_string(value_of(b, kind)));
      }
      if (!validate(inst, r.best).ok()) f.add("instance " + std::to_string(k) + " invalid schedule");
    }
    ++k;
  }
  return f.outcome(std::to_string(k) + " instances, both objectives");
}

// Optimum of the exported model, reparsed from LP text. Values are mapped
// back by name so the check does not rely on the reader's variable order.
std::optional<long> exported_optimum(const Formulation& form, const SchedulingInstance& inst,
                                     const PreprocessResult& prep, ObjectiveKind kind, Failures& f,
                                     const std::string& tag) {
  const auto reparsed = read_lp(write_lp(form.model));
  const auto sol = oracle::enumerate_mip(reparsed);
  if (!sol.feasible) {
    f.add(tag + " infeasible model");
    return std::nullopt;
  }
  std::map<std::string, double> by_name;
  for (std::size_t v = 0; v < reparsed.variables().size(); ++v) by_name[reparsed.variables()[v].name] = sol.values[v];
  const auto e = evaluate(form.model, by_name);
  if (!e.feasible()) f.add(tag + " oracle point violates " + e.violations.front().name);
  std::vector<double> values;
  for (const auto& var : form.model.variables()) values.push_back(by_name.at(var.name));
  const auto s = extract_schedule(form, inst, prep, values);
  if (!validate(inst, s).ok()) f.add(tag + " extracted schedule invalid");
  long fixed = 0;
  for (const auto& p : prep.preassigned) fixed += mission_profit(inst.missions()[p.mission], kind);
  const long total = std::lround(e.objective) + fixed;
  if (total != value_of(s, kind)) f.add(tag + " extracted objective differs");
  return total;
}

Outcome cross_formulation() {
  Failures f;
  const auto instances = tiny_instances(200, 77, {6, 3, 3, 18, 4});
  std::size_t k = 0;
  std::size_t binaries = 0;
  for (const auto& inst : instances) {
    // The full models carry every constraint family; the preprocessed ones
    // are what the tool exports by default.
    const PreprocessResult preps[] = {PreprocessResult::identity(inst), preprocess(inst)};
    for (auto kind : {ObjectiveKind::Count, ObjectiveKind::Weight}) {
      const long oracle = value_of(brute_force(inst, kind), kind);
      for (const auto& prep : preps) {
        for (auto fk : {FormulationKind::Baseline, FormulationKind::Improved}) {
          const std::string tag = "instance " + std::to_string(k) + " " + std::string(to_string(fk)) + " " +
                                  std::string(to_string(kind)) + (prep.n_prime() ? " preprocessed" : "");
          const auto form = build_formulation(fk, inst, prep, kind);
          binaries += report_model(form.model).binary_count;
          const auto opt = exported_optimum(form, inst, prep, kind, f, tag);
          if (opt && *opt != oracle) f.add(tag + " " + std::to_string(*opt) + " vs " + std::to_string(oracle));
        }
      }
    }
    ++k;
  }
  return f.outcome(std::to_string(k) + " instances, 2 formulations x 2 objectives, with and without preprocessing, " +
                   std::to_string(binaries) + " binaries enumerated");
}

Outcome mutation_suite() {
  Failures f;
  const auto inst = fixture::mutation_instance();
  const auto good = validate(inst, fixture::good_schedule(inst));
  if (!good.ok()) f.add("known-good schedule has findings");
  std::size_t n = 0;
  for (const auto& m : fixture::mutations(inst)) {
    if (!fixture::only(validate(inst, m.schedule), m.code)) f.add(std::string(to_string(m.code)) + ": " + m.what);
    ++n;
  }
  return f.outcome(std::to_string(n) + " finding codes");
}

Outcome preprocessing_soundness() {
  Failures f;
  std::size_t k = 0;
  std::size_t fixed = 0;
  for (const auto& inst : criterion3_instances()) {
    const auto prep = preprocess(inst);
    const auto plain = PreprocessResult::identity(inst);
    for (auto kind : {ObjectiveKind::Count, ObjectiveKind::Weight}) {
      const auto a = solve_exact(inst, prep, kind);
      const auto b = solve_exact(inst, plain, kind);
      if (value_of(a.best, kind) != value_of(b.best, kind)) f.add("instance " + std::to_string(k) + " optimum changed");
      if (!validate(inst, a.best).ok()) f.add("instance " + std::to_string(k) + " completion invalid");
      for (const auto& p : prep.preassigned) {
        bool present = false;
        for (const auto& as : a.best.assignments) present = present || (as.mission == p.mission && as.start == p.start);
        if (!present) f.add("instance " + std::to_string(k) + " lost a pre-assigned mission");
      }
    }
    fixed += prep.n_prime();
    ++k;
  }
  return f.outcome(std::to_string(k) + " instances, " + std::to_string(fixed) + " pre-assigned missions");
}

Outcome export_fidelity() {
  Failures f;
  std::size_t models = 0;
  const TargetStyle styles[] = {TargetStyle::R, TargetStyle::C, TargetStyle::M};
  for (std::uint64_t k = 0; k < 6; ++k) {
    const auto inst = normalize_and_clip(generate({styles[k % 3], 30, 3, 86400, 500 + k, std::nullopt}));
    const auto prep = preprocess(inst);
    for (auto fk : {FormulationKind::Baseline, FormulationKind::Improved}) {
      const auto model = build_formulation(fk, inst, prep, ObjectiveKind::Weight).model;
      const auto again = build_formulation(fk, inst, preprocess(inst), ObjectiveKind::Weight).model;
      const std::string tag = std::to_string(500 + k) + " " + std::string(to_string(fk));
      const auto lp = write_lp(model);
      const auto mps = write_mps(model);
      if (!(read_lp(lp) == model)) f.add(tag + " LP reparse differs");
      if (!(read_mps(mps.text, mps.renamed) == model)) f.add(tag + " MPS reparse differs");
      if (write_lp(again) != lp || write_mps(again).text != mps.text) f.add(tag + " bytes differ between runs");
      ++models;
    }
  }
  return f.outcome(std::to_string(models) + " models, LP and MPS");
}

Outcome desk_scale_statement() {
  std::cout << "    Not reproducible at desk scale: the optima, bounds and runtimes of the published\n"
               "    result tables and runtime curves depend on unpublished orbit-derived instances and\n"
               "    a commercial MIP solver. Criteria 1-7 replace them. `satsched report` emits the\n"
               "    same table shape for users with an external solver.\n";
  std::ostringstream solved, err;
  std::istringstream none;
  const auto inst = serialize_instance(generate({TargetStyle::R, 8, 2, 3000, 3, std::nullopt}));
  std::istringstream in(inst);
  if (cli::run({"solve", "--objective", "count"}, in, solved, err) != 0) return {false, "solve failed: " + err.str()};
  const auto dir = std::filesystem::temp_directory_path() / "satsched_acceptance";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "solve.json").string();
  std::ofstream(path) << solved.str();
  std::ostringstream csv;
  const int rc = cli::run({"report", path}, none, csv, err);
  std::filesystem::remove_all(dir);
  if (rc != 0) return {false, "report failed: " + err.str()};
  const auto header = csv.str().substr(0, csv.str().find('\n'));
  if (header != "instance,objective,method,root_bound,final_bound,best,gap,runtime,proven_optimal,nodes") {
    return {false, "unexpected report header " + header};
  }
  return {true, "statement printed, report columns " + header};
}

}  // namespace

int main() {
  struct Criterion {
    std::string title;
    std::function<Outcome()> check;
    double budget;  // seconds
  };
  const std::vector<Criterion> criteria = {
      {"statistics formulas reproduce the published utilization table", statistics_formulas, 1},
      {"model-size relations", model_sizes, 10},
      {"branch and bound matches brute force", oracle_equivalence, 60},
      {"both exported formulations match the oracle", cross_formulation, 120},
      {"validator mutation suite", mutation_suite, 1},
      {"preprocessing keeps the optimum", preprocessing_soundness, 60},
      {"LP/MPS export fidelity and determinism", export_fidelity, 5},
      {"desk-scale limits stated, report shape", desk_scale_statement, 60},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs > criteria[c].budget) o = {false, o.detail + ", over the " + std::to_string(static_cast<int>(criteria[c].budget)) + " s budget"};
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "C" << c + 1 << " " << criteria[c].title << " ("
              << o.detail << ", " << std::fixed << std::setprecision(2) << secs << " s)" << std::endl;
    std::cout.unsetf(std::ios::fixed);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

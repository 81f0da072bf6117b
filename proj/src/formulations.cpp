#include "satsched/formulations.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

namespace satsched {

namespace {

// Identifier tokens restricted to [A-Za-z0-9_], made unique by suffixing.
std::vector<std::string> name_tokens(const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  std::set<std::string> used;
  for (const auto& id : ids) {
    std::string base;
    for (char c : id) base += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    if (base.empty()) base = "_";
    std::string token = base;
    for (int n = 2; used.count(token); ++n) token = base + "_" + std::to_string(n);
    used.insert(token);
    out.push_back(token);
  }
  return out;
}

void check_prep(const SchedulingInstance& instance, const PreprocessResult& prep) {
  const auto& r = prep.reduced;
  if (r.missions() != instance.missions() || r.resources() != instance.resources() ||
      r.period() != instance.period()) {
    throw std::invalid_argument("preprocessing result does not belong to this instance");
  }
  for (const auto& p : prep.preassigned) {
    if (p.mission >= instance.mission_count() || p.window >= instance.windows().size()) {
      throw std::invalid_argument("preassignment references an unknown mission or window");
    }
  }
  for (const auto& s : prep.subintervals) {
    for (auto w : s.candidates) {
      if (w >= r.windows().size()) {
        throw std::invalid_argument("subinterval references an unknown window");
      }
    }
  }
}

// Naming plus the constraint families both models share.
class Builder {
 public:
  Builder(const SchedulingInstance& instance, const PreprocessResult& prep, ObjectiveKind objective,
          FormulationKind kind)
      : prep_(prep), reduced_(prep.reduced), objective_(objective) {
    check_prep(instance, prep);
    std::vector<std::string> ids;
    for (const auto& m : reduced_.missions()) ids.push_back(m.id);
    mission_tok_ = name_tokens(ids);
    ids.clear();
    for (const auto& r : reduced_.resources()) ids.push_back(r.id);
    resource_tok_ = name_tokens(ids);
    out_.kind = kind;
    out_.model.metadata.formulation = std::string(to_string(kind));
    out_.model.metadata.objective = std::string(to_string(objective));
  }

  const SchedulingInstance& reduced() const { return reduced_; }
  LinearModel& model() { return out_.model; }
  Formulation& out() { return out_; }

  // "{mission}_{resource}_{rank}" of one window.
  std::string window_key(std::size_t w) const {
    const auto& win = reduced_.windows()[w];
    return mission_tok_[win.mission] + "_" + resource_tok_[win.resource] + "_" +
           std::to_string(reduced_.window_rank(w));
  }
  const std::string& mission_tok(std::size_t m) const { return mission_tok_[m]; }
  const std::string& resource_tok(std::size_t r) const { return resource_tok_[r]; }

  void add_x_variables() {
    const auto& windows = reduced_.windows();
    out_.x_of_window.resize(windows.size());
    std::vector<Term> objective;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      out_.x_of_window[w] = model().add_binary("x_" + window_key(w));
      const auto& m = reduced_.missions()[windows[w].mission];
      objective.push_back({out_.x_of_window[w], static_cast<double>(mission_profit(m, objective_))});
    }
    model().set_objective(std::move(objective));
  }

  Seconds latest_start(std::size_t mission) const {
    return std::max(0.0, reduced_.period().end - reduced_.missions()[mission].duration);
  }

  void add_mission_and_usage() {
    for (std::size_t i = 0; i < reduced_.mission_count(); ++i) {
      std::vector<Term> terms;
      for (auto w : reduced_.windows_of_mission(i)) terms.push_back({out_.x_of_window[w], 1.0});
      if (!terms.empty()) model().add_constraint("assign_" + mission_tok_[i], terms, Sense::LessEqual, 1.0);
    }
    for (std::size_t j = 0; j < reduced_.resource_count(); ++j) {
      std::vector<Term> terms;
      for (auto w : reduced_.windows_of_resource(j)) {
        terms.push_back({out_.x_of_window[w], reduced_.missions()[reduced_.windows()[w].mission].duration});
      }
      if (!terms.empty()) {
        model().add_constraint("usage_" + resource_tok_[j], terms, Sense::LessEqual,
                               reduced_.resources()[j].max_usage);
      }
    }
  }

  void add_resource_feasibility() {
    std::map<std::size_t, int> counter;
    for (const auto& s : prep_.subintervals) {
      const auto& res = reduced_.resources()[s.resource];
      const auto key = resource_tok_[s.resource] + "_" + std::to_string(counter[s.resource]++);
      std::vector<Term> count;
      std::vector<Term> length;
      for (auto w : s.candidates) {
        const Seconds d = reduced_.missions()[reduced_.windows()[w].mission].duration;
        count.push_back({out_.x_of_window[w], 1.0});
        length.push_back({out_.x_of_window[w], d + res.stabilize});
      }
      model().add_constraint("cap_" + key, count, Sense::LessEqual, s.capacity);
      model().add_constraint("len_" + key, length, Sense::LessEqual, s.length() + res.stabilize);
    }
  }

  Formulation finish() { return std::move(out_); }

 private:
  const PreprocessResult& prep_;
  const SchedulingInstance& reduced_;
  ObjectiveKind objective_;
  std::vector<std::string> mission_tok_;
  std::vector<std::string> resource_tok_;
  Formulation out_;
};

std::vector<Term> x_sum(const Formulation& f, const std::vector<std::size_t>& windows, double coef) {
  std::vector<Term> out;
  for (auto w : windows) out.push_back({f.x_of_window[w], coef});
  return out;
}

std::vector<Term> concat(std::vector<Term> a, const std::vector<Term>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::Weight ? "weight" : "count";
}

std::optional<ObjectiveKind> parse_objective_kind(std::string_view text) {
  if (text == "count") return ObjectiveKind::Count;
  if (text == "weight") return ObjectiveKind::Weight;
  return std::nullopt;
}

std::string_view to_string(FormulationKind kind) {
  return kind == FormulationKind::Improved ? "improved" : "baseline";
}

std::optional<FormulationKind> parse_formulation_kind(std::string_view text) {
  if (text == "baseline") return FormulationKind::Baseline;
  if (text == "improved") return FormulationKind::Improved;
  return std::nullopt;
}

std::string_view to_string(PairClass c) {
  switch (c) {
    case PairClass::OrderedFirstSecond:
      return "ordered_first_second";
    case PairClass::OrderedSecondFirst:
      return "ordered_second_first";
    case PairClass::Overlapping:
      return "overlapping";
    case PairClass::Independent:
      return "independent";
  }
  return "independent";
}

PairClass classify_pair(const VisibleWindow& first, const VisibleWindow& second, Seconds setup) {
  if (first.mission == second.mission) {
    throw std::invalid_argument("classify_pair needs windows of two different missions");
  }
  if (overlaps(first.begin, first.end, second.begin, second.end)) return PairClass::Overlapping;
  if (first.end <= second.begin + kTimeEps) {
    return second.begin - first.end >= setup ? PairClass::Independent
                                             : PairClass::OrderedFirstSecond;
  }
  return first.begin - second.end >= setup ? PairClass::Independent
                                           : PairClass::OrderedSecondFirst;
}

Seconds big_m(const SchedulingInstance& instance) {
  Seconds longest = 0.0;
  for (const auto& m : instance.missions()) longest = std::max(longest, m.duration);
  Seconds setup = 0.0;
  for (const auto& r : instance.resources()) setup = std::max(setup, setup_time_bound(r));
  return instance.period().length() + longest + setup;
}

Formulation build_baseline(const SchedulingInstance& instance, const PreprocessResult& prep,
                           ObjectiveKind objective) {
  Builder b(instance, prep, objective, FormulationKind::Baseline);
  const auto& r = b.reduced();
  const auto& windows = r.windows();
  const Seconds U = big_m(r);
  b.model().metadata.big_m = U;
  auto& out = b.out();

  b.add_x_variables();

  std::set<std::size_t> fixed;
  for (const auto& p : prep.preassigned) fixed.insert(p.mission);
  out.t_of_mission.assign(r.mission_count(), kUnknownIndex);
  for (std::size_t i = 0; i < r.mission_count(); ++i) {
    if (fixed.count(i)) continue;
    out.t_of_mission[i] = b.model().add_continuous("t_" + b.mission_tok(i), 0.0, b.latest_start(i));
  }

  // f_{i}_{i'}_{j}: i observed after i' on j.
  struct Pair {
    std::size_t resource, a, b, f_ab, f_ba;
  };
  std::vector<Pair> pairs;
  for (std::size_t j = 0; j < r.resource_count(); ++j) {
    const auto missions = r.missions_of(j);
    for (std::size_t p = 0; p < missions.size(); ++p) {
      for (std::size_t q = p + 1; q < missions.size(); ++q) {
        const auto a = missions[p];
        const auto c = missions[q];
        const auto suffix = "_" + b.resource_tok(j);
        const auto f_ac = b.model().add_binary("f_" + b.mission_tok(a) + "_" + b.mission_tok(c) + suffix);
        const auto f_ca = b.model().add_binary("f_" + b.mission_tok(c) + "_" + b.mission_tok(a) + suffix);
        out.order_vars.push_back({f_ac, j, a, c});
        out.order_vars.push_back({f_ca, j, c, a});
        pairs.push_back({j, a, c, f_ac, f_ca});
      }
    }
  }

  b.add_mission_and_usage();

  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& win = windows[w];
    const auto t = out.t_of_mission[win.mission];
    const auto x = out.x_of_window[w];
    const Seconds d = r.missions()[win.mission].duration;
    b.model().add_constraint("wlo_" + b.window_key(w), {{t, 1.0}, {x, -win.begin}},
                             Sense::GreaterEqual, 0.0);
    b.model().add_constraint("whi_" + b.window_key(w), {{t, 1.0}, {x, U - (win.end - d)}},
                             Sense::LessEqual, U);
  }

  for (const auto& p : pairs) {
    const Seconds setup = setup_time_bound(r.resources()[p.resource]);
    const Seconds da = r.missions()[p.a].duration;
    const Seconds dc = r.missions()[p.b].duration;
    const auto ta = out.t_of_mission[p.a];
    const auto tc = out.t_of_mission[p.b];
    const auto key = b.mission_tok(p.a) + "_" + b.mission_tok(p.b) + "_" + b.resource_tok(p.resource);
    const auto rkey = b.mission_tok(p.b) + "_" + b.mission_tok(p.a) + "_" + b.resource_tok(p.resource);
    b.model().add_constraint("setup_" + key, {{ta, 1.0}, {tc, -1.0}, {p.f_ab, -(U + setup)}},
                             Sense::GreaterEqual, -(U - dc));
    b.model().add_constraint("setup_" + rkey, {{tc, 1.0}, {ta, -1.0}, {p.f_ba, -(U + setup)}},
                             Sense::GreaterEqual, -(U - da));

    std::vector<std::size_t> wa;
    std::vector<std::size_t> wc;
    for (auto w : r.windows_of_resource(p.resource)) {
      if (windows[w].mission == p.a) wa.push_back(w);
      if (windows[w].mission == p.b) wc.push_back(w);
    }
    const std::vector<Term> ff{{p.f_ab, 1.0}, {p.f_ba, 1.0}};
    b.model().add_constraint("fa_" + key, concat(ff, x_sum(out, wa, -1.0)), Sense::LessEqual, 0.0);
    b.model().add_constraint("fb_" + key, concat(ff, x_sum(out, wc, -1.0)), Sense::LessEqual, 0.0);
    b.model().add_constraint("fab_" + key, concat(concat(ff, x_sum(out, wa, -1.0)), x_sum(out, wc, -1.0)),
                             Sense::GreaterEqual, -1.0);
  }

  // One shared-resource sum per mission pair.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Term>> sums;
  for (const auto& p : pairs) {
    auto& terms = sums[{p.a, p.b}];
    terms.push_back({p.f_ab, 1.0});
    terms.push_back({p.f_ba, 1.0});
  }
  for (const auto& [key, terms] : sums) {
    b.model().add_constraint("fsum_" + b.mission_tok(key.first) + "_" + b.mission_tok(key.second),
                             terms, Sense::LessEqual, 1.0);
  }

  b.add_resource_feasibility();
  return b.finish();
}

Formulation build_improved(const SchedulingInstance& instance, const PreprocessResult& prep,
                           ObjectiveKind objective) {
  if (instance.period().begin != 0.0 || prep.reduced.period().begin != 0.0) {
    throw std::invalid_argument("the improved model needs a normalized instance");
  }
  Builder b(instance, prep, objective, FormulationKind::Improved);
  const auto& r = b.reduced();
  const auto& windows = r.windows();
  auto& out = b.out();

  b.add_x_variables();
  out.t_of_window.resize(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    out.t_of_window[w] = b.model().add_continuous("t_" + b.window_key(w), 0.0,
                                                  b.latest_start(windows[w].mission));
  }

  struct Pair {
    std::size_t resource, a, c;
    PairClass cls;
    std::size_t f_ac = 0, f_ca = 0;  // a after c, c after a
  };
  std::vector<Pair> pairs;
  for (std::size_t j = 0; j < r.resource_count(); ++j) {
    const Seconds setup = setup_time_bound(r.resources()[j]);
    const auto on_j = r.windows_of_resource(j);
    for (std::size_t p = 0; p < on_j.size(); ++p) {
      for (std::size_t q = p + 1; q < on_j.size(); ++q) {
        const auto a = on_j[p];
        const auto c = on_j[q];
        if (windows[a].mission == windows[c].mission) continue;
        Pair pair{j, a, c, classify_pair(windows[a], windows[c], setup)};
        if (pair.cls == PairClass::Overlapping) {
          pair.f_ac = b.model().add_binary("f_" + b.resource_tok(j) + "_" + b.window_key(a) +
                                           "_" + b.window_key(c));
          pair.f_ca = b.model().add_binary("f_" + b.resource_tok(j) + "_" + b.window_key(c) + "_" +
                                           b.window_key(a));
          out.order_vars.push_back({pair.f_ac, j, windows[a].mission, windows[c].mission, a, c});
          out.order_vars.push_back({pair.f_ca, j, windows[c].mission, windows[a].mission, c, a});
        }
        if (pair.cls != PairClass::Independent) pairs.push_back(pair);
      }
    }
  }

  b.add_mission_and_usage();

  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& win = windows[w];
    const auto t = out.t_of_window[w];
    const auto x = out.x_of_window[w];
    const Seconds d = r.missions()[win.mission].duration;
    b.model().add_constraint("wlo_" + b.window_key(w), {{t, 1.0}, {x, -win.begin}},
                             Sense::GreaterEqual, 0.0);
    b.model().add_constraint("whi_" + b.window_key(w), {{t, 1.0}, {x, -(win.end - d)}},
                             Sense::LessEqual, 0.0);
  }

  std::map<std::pair<std::size_t, std::size_t>, std::vector<Term>> sums;
  for (const auto& p : pairs) {
    const Seconds setup = setup_time_bound(r.resources()[p.resource]);
    const auto& wa = windows[p.a];
    const auto& wc = windows[p.c];
    const Seconds da = r.missions()[wa.mission].duration;
    const Seconds dc = r.missions()[wc.mission].duration;
    const auto ta = out.t_of_window[p.a];
    const auto tc = out.t_of_window[p.c];
    const auto xa = out.x_of_window[p.a];
    const auto xc = out.x_of_window[p.c];
    const auto ac = b.resource_tok(p.resource) + "_" + b.window_key(p.a) + "_" + b.window_key(p.c);
    const auto ca = b.resource_tok(p.resource) + "_" + b.window_key(p.c) + "_" + b.window_key(p.a);

    switch (p.cls) {
      case PairClass::OrderedFirstSecond:
        // a before c whenever both are selected.
        b.model().add_constraint("ord_" + ac,
                                 {{tc, 1.0}, {ta, -1.0}, {xa, -(da + setup)}, {xc, -(wa.end + setup)}},
                                 Sense::GreaterEqual, -(wa.end + setup));
        break;
      case PairClass::OrderedSecondFirst:
        b.model().add_constraint("ord_" + ca,
                                 {{ta, 1.0}, {tc, -1.0}, {xc, -(dc + setup)}, {xa, -(wc.end + setup)}},
                                 Sense::GreaterEqual, -(wc.end + setup));
        break;
      case PairClass::Overlapping: {
        b.model().add_constraint("dis_" + ac,
                                 {{ta, 1.0}, {tc, -1.0}, {p.f_ac, -(wc.end + setup)}, {p.f_ca, -wa.begin}},
                                 Sense::GreaterEqual, -(wc.end - dc));
        b.model().add_constraint("dis_" + ca,
                                 {{tc, 1.0}, {ta, -1.0}, {p.f_ca, -(wa.end + setup)}, {p.f_ac, -wc.begin}},
                                 Sense::GreaterEqual, -(wa.end - da));
        b.model().add_constraint("fa_" + ac, {{p.f_ac, 1.0}, {p.f_ca, 1.0}, {xa, -1.0}},
                                 Sense::LessEqual, 0.0);
        b.model().add_constraint("fb_" + ac, {{p.f_ac, 1.0}, {p.f_ca, 1.0}, {xc, -1.0}},
                                 Sense::LessEqual, 0.0);
        b.model().add_constraint("fab_" + ac,
                                 {{p.f_ac, 1.0}, {p.f_ca, 1.0}, {xa, -1.0}, {xc, -1.0}},
                                 Sense::GreaterEqual, -1.0);
        auto key = std::minmax(wa.mission, wc.mission);
        auto& terms = sums[{key.first, key.second}];
        terms.push_back({p.f_ac, 1.0});
        terms.push_back({p.f_ca, 1.0});
        break;
      }
      case PairClass::Independent:
        break;
    }
  }
  for (const auto& [key, terms] : sums) {
    b.model().add_constraint("fsum_" + b.mission_tok(key.first) + "_" + b.mission_tok(key.second),
                             terms, Sense::LessEqual, 1.0);
  }

  b.add_resource_feasibility();
  return b.finish();
}

Formulation build_formulation(FormulationKind kind, const SchedulingInstance& instance,
                              const PreprocessResult& prep, ObjectiveKind objective) {
  return kind == FormulationKind::Improved ? build_improved(instance, prep, objective)
                                           : build_baseline(instance, prep, objective);
}

ModelStats report_model(const LinearModel& model) { return model_stats(model); }

std::vector<Assignment> preassigned_assignments(const SchedulingInstance& instance,
                                                const PreprocessResult& prep) {
  std::vector<Assignment> out;
  for (const auto& p : prep.preassigned) {
    const auto& w = instance.windows()[p.window];
    out.push_back({p.mission, p.resource, w.begin, w.end, p.start});
  }
  return out;
}

std::vector<double> embed_schedule(const Formulation& formulation, const PreprocessResult& prep,
                                   const Schedule& schedule) {
  const auto& r = prep.reduced;
  const auto& windows = r.windows();
  std::vector<double> values(formulation.model.variables().size(), 0.0);
  std::set<std::size_t> fixed;
  for (const auto& p : prep.preassigned) fixed.insert(p.mission);

  std::vector<std::size_t> chosen(r.mission_count(), kUnknownIndex);
  std::vector<Seconds> start(r.mission_count(), 0.0);
  for (const auto& a : schedule.assignments) {
    if (fixed.count(a.mission)) continue;
    if (a.mission >= r.mission_count()) throw std::invalid_argument("unknown mission in schedule");
    const Seconds d = r.missions()[a.mission].duration;
    std::size_t best = kUnknownIndex;
    // Prefer the named window, then any window holding the observation; a
    // named window that does not hold it is still used so the model reports
    // the violation.
    std::size_t named = kUnknownIndex;
    for (auto w : r.windows_of_mission(a.mission)) {
      const auto& win = windows[w];
      if (win.resource != a.resource) continue;
      const bool holds = a.start >= win.begin - kFeasibilityTol && a.start + d <= win.end + kFeasibilityTol;
      const bool is_named = win.begin == a.window_begin && win.end == a.window_end;
      if (is_named) named = w;
      if (holds && (best == kUnknownIndex || is_named)) best = w;
    }
    if (best == kUnknownIndex) best = named;
    if (best == kUnknownIndex) {
      throw std::invalid_argument("assignment of mission '" + r.missions()[a.mission].id +
                                  "' matches no window of the model");
    }
    chosen[a.mission] = best;
    start[a.mission] = a.start;
    values[formulation.x_of_window[best]] = 1.0;
    if (formulation.kind == FormulationKind::Baseline) {
      values[formulation.t_of_mission[a.mission]] = a.start;
    } else {
      values[formulation.t_of_window[best]] = a.start;
    }
  }

  for (const auto& o : formulation.order_vars) {
    const auto wl = chosen[o.later];
    const auto we = chosen[o.earlier];
    if (wl == kUnknownIndex || we == kUnknownIndex) continue;
    if (windows[wl].resource != o.resource || windows[we].resource != o.resource) continue;
    if (o.later_window != kUnknownIndex && (o.later_window != wl || o.earlier_window != we)) continue;
    if (start[o.later] > start[o.earlier]) values[o.var] = 1.0;
  }
  return values;
}

Schedule extract_schedule(const Formulation& formulation, const SchedulingInstance& instance,
                          const PreprocessResult& prep, std::span<const double> values) {
  const auto& windows = prep.reduced.windows();
  auto assignments = preassigned_assignments(instance, prep);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (values[formulation.x_of_window[w]] < 0.5) continue;
    const auto& win = windows[w];
    const auto t = formulation.kind == FormulationKind::Baseline
                       ? formulation.t_of_mission[win.mission]
                       : formulation.t_of_window[w];
    assignments.push_back({win.mission, win.resource, win.begin, win.end, values[t]});
  }
  return make_schedule(instance, std::move(assignments));
}

}  // namespace satsched

#pragma once

// Exhaustive optimum of a small mixed-binary model. Binaries are enumerated
// depth first; once every binary of a constraint is fixed, its continuous part
// must be a bound or a difference of two variables, and the continuous
// system is checked for a negative cycle with Bellman-Ford. The search only
// uses the model's rows, so it knows nothing about how the model was built.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "satsched/linear_model.hpp"

namespace oracle {

struct MipResult {
  bool feasible = false;
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<double> values;  // indexed like model.variables()
  std::size_t leaves = 0;
};

class MipEnumerator {
 public:
  explicit MipEnumerator(const satsched::LinearModel& model) : model_(model) {
    const auto& vars = model.variables();
    slot_.assign(vars.size(), -1);
    std::vector<double> obj(vars.size(), 0.0);
    for (const auto& t : model.objective()) obj[t.var] = t.coef;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (vars[v].kind == satsched::VarKind::Continuous) {
        if (obj[v] != 0.0) throw std::invalid_argument("continuous objective terms unsupported");
        slot_[v] = static_cast<int>(continuous_.size());
        continuous_.push_back(v);
      }
    }
    // Profitable binaries first so good incumbents appear early.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].kind != satsched::VarKind::Binary) continue;
        if ((obj[v] != 0.0) == (pass == 0)) {
          slot_[v] = static_cast<int>(binaries_.size());
          binaries_.push_back(v);
        }
      }
    }
    obj_.resize(binaries_.size());
    for (std::size_t d = 0; d < binaries_.size(); ++d) obj_[d] = obj[binaries_[d]];
    suffix_gain_.assign(binaries_.size() + 1, 0.0);
    for (std::size_t d = binaries_.size(); d-- > 0;) {
      suffix_gain_[d] = suffix_gain_[d + 1] + std::max(0.0, obj_[d]);
    }

    activate_.resize(binaries_.size() + 1);
    touches_.resize(binaries_.size());
    const auto& rows = model.constraints();
    for (std::size_t c = 0; c < rows.size(); ++c) {
      int last = -1;
      bool has_continuous = false;
      for (const auto& t : rows[c].terms) {
        if (vars[t.var].kind == satsched::VarKind::Continuous) {
          has_continuous = true;
        } else {
          last = std::max(last, slot_[t.var]);
        }
      }
      if (!has_continuous) {
        for (const auto& t : rows[c].terms) touches_[static_cast<std::size_t>(slot_[t.var])].push_back(c);
      }
      activate_[static_cast<std::size_t>(last + 1)].push_back(c);
    }
  }

  MipResult solve() {
    bin_value_.assign(binaries_.size(), -1);
    edges_.clear();
    result_ = {};
    dfs(0, 0.0);
    return result_;
  }

 private:
  struct Edge {
    int from;
    int to;
    double weight;
  };

  double binary_part(const satsched::LinearConstraint& row, double& lo, double& hi) const {
    double fixed = 0.0;
    lo = hi = 0.0;
    for (const auto& t : row.terms) {
      const int s = slot_[t.var];
      if (model_.variables()[t.var].kind != satsched::VarKind::Binary) continue;
      const int v = bin_value_[static_cast<std::size_t>(s)];
      if (v >= 0) {
        fixed += t.coef * v;
      } else {
        lo += std::min(0.0, t.coef);
        hi += std::max(0.0, t.coef);
      }
    }
    return fixed;
  }

  static bool possible(satsched::Sense sense, double lo, double hi, double rhs) {
    constexpr double tol = 1e-9;
    switch (sense) {
      case satsched::Sense::LessEqual:
        return lo <= rhs + tol;
      case satsched::Sense::GreaterEqual:
        return hi >= rhs - tol;
      case satsched::Sense::Equal:
        return lo <= rhs + tol && hi >= rhs - tol;
    }
    return false;
  }

  // Adds the continuous part of a fully fixed row as edges.
  bool add_row(const satsched::LinearConstraint& row) {
    double lo = 0.0;
    double hi = 0.0;
    const double rhs = row.rhs - binary_part(row, lo, hi);
    std::vector<satsched::Term> cont;
    for (const auto& t : row.terms) {
      if (model_.variables()[t.var].kind == satsched::VarKind::Continuous) cont.push_back(t);
    }
    if (cont.empty()) return possible(row.sense, 0.0, 0.0, rhs);
    const int src = static_cast<int>(continuous_.size());
    // a*u + b*v <= r with b == -a becomes u - v <= r/a (sign flips for a < 0).
    auto push_le = [&](const std::vector<satsched::Term>& terms, double r) {
      if (terms.size() == 1) {
        const int u = slot_[terms[0].var];
        const double a = terms[0].coef;
        if (a > 0) {
          edges_.push_back({src, u, r / a});  // u <= r/a
        } else {
          edges_.push_back({u, src, -(r / a)});  // u >= r/a  ->  src - u <= -r/a
        }
        return;
      }
      const double a = terms[0].coef;
      const double b = terms[1].coef;
      if (std::abs(a + b) > 1e-12) throw std::invalid_argument("row is not a difference: " + row.name);
      int u = slot_[terms[0].var];
      int v = slot_[terms[1].var];
      double c = r / std::abs(a);
      if (a < 0) std::swap(u, v);
      edges_.push_back({v, u, c});  // u - v <= c
    };
    if (cont.size() > 2) throw std::invalid_argument("too many continuous terms in " + row.name);
    auto negated = cont;
    for (auto& t : negated) t.coef = -t.coef;
    if (row.sense != satsched::Sense::GreaterEqual) push_le(cont, rhs);
    if (row.sense != satsched::Sense::LessEqual) push_le(negated, -rhs);
    return true;
  }

  bool consistent(std::vector<double>* potentials) const {
    const std::size_t n = continuous_.size() + 1;
    std::vector<double> dist(n, 0.0);
    const auto& vars = model_.variables();
    std::vector<Edge> all = edges_;
    const int src = static_cast<int>(continuous_.size());
    for (std::size_t i = 0; i < continuous_.size(); ++i) {
      const auto& var = vars[continuous_[i]];
      if (std::isfinite(var.upper)) all.push_back({src, static_cast<int>(i), var.upper});
      if (std::isfinite(var.lower)) all.push_back({static_cast<int>(i), src, -var.lower});
    }
    for (std::size_t round = 0; round <= n; ++round) {
      bool relaxed = false;
      for (const auto& e : all) {
        if (dist[e.from] + e.weight < dist[e.to] - 1e-9) {
          dist[e.to] = dist[e.from] + e.weight;
          relaxed = true;
        }
      }
      if (!relaxed) {
        if (potentials) {
          potentials->resize(continuous_.size());
          for (std::size_t i = 0; i < continuous_.size(); ++i) (*potentials)[i] = dist[i] - dist[n - 1];
        }
        return true;
      }
    }
    return false;
  }

  void dfs(std::size_t depth, double value) {
    const std::size_t saved = edges_.size();
    bool added = false;
    for (auto c : activate_[depth]) {
      const auto& row = model_.constraints()[c];
      const std::size_t before = edges_.size();
      if (!add_row(row)) {
        edges_.resize(saved);
        return;
      }
      added = added || edges_.size() != before;
    }
    if ((added || depth == 0) && !consistent(nullptr)) {
      edges_.resize(saved);
      return;
    }
    if (value + suffix_gain_[depth] <= result_.objective + 1e-9) {
      edges_.resize(saved);
      return;
    }
    if (depth == binaries_.size()) {
      ++result_.leaves;
      std::vector<double> pot;
      consistent(&pot);
      result_.feasible = true;
      result_.objective = value;
      result_.values.assign(model_.variables().size(), 0.0);
      for (std::size_t d = 0; d < binaries_.size(); ++d) result_.values[binaries_[d]] = bin_value_[d];
      for (std::size_t i = 0; i < continuous_.size(); ++i) result_.values[continuous_[i]] = pot[i];
      edges_.resize(saved);
      return;
    }
    const int first = obj_[depth] > 0.0 ? 1 : 0;
    for (int k = 0; k < 2; ++k) {
      const int v = k == 0 ? first : 1 - first;
      bin_value_[depth] = v;
      bool ok = true;
      for (auto c : touches_[depth]) {
        const auto& row = model_.constraints()[c];
        double lo = 0.0;
        double hi = 0.0;
        const double fixed = binary_part(row, lo, hi);
        if (!possible(row.sense, fixed + lo, fixed + hi, row.rhs)) {
          ok = false;
          break;
        }
      }
      if (ok) dfs(depth + 1, value + obj_[depth] * v);
    }
    bin_value_[depth] = -1;
    edges_.resize(saved);
  }

  const satsched::LinearModel& model_;
  std::vector<int> slot_;  // variable -> position among binaries or continuous
  std::vector<std::size_t> binaries_;
  std::vector<std::size_t> continuous_;
  std::vector<double> obj_;
  std::vector<double> suffix_gain_;
  std::vector<std::vector<std::size_t>> activate_;  // rows fully fixed at a depth
  std::vector<std::vector<std::size_t>> touches_;   // binary-only rows per binary
  std::vector<int> bin_value_;
  std::vector<Edge> edges_;
  MipResult result_;
};

inline MipResult enumerate_mip(const satsched::LinearModel& model) {
  return MipEnumerator(model).solve();
}

}  // namespace oracle

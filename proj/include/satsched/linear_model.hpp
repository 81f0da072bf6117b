#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace satsched {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VarKind { Binary, Continuous };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const Variable&) const = default;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;

  bool operator==(const Term&) const = default;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;

  bool operator==(const LinearConstraint&) const = default;
};

struct ModelMetadata {
  std::string formulation;
  std::string objective;
  std::optional<double> big_m;

  bool operator==(const ModelMetadata&) const = default;
};

/// Maximization model. Zero coefficients are dropped on insertion so that
/// every stored term is structurally present in the exported files.
class LinearModel {
 public:
  std::size_t add_variable(std::string name, VarKind kind, double lower, double upper);
  std::size_t add_binary(std::string name) {
    return add_variable(std::move(name), VarKind::Binary, 0.0, 1.0);
  }
  std::size_t add_continuous(std::string name, double lower, double upper) {
    return add_variable(std::move(name), VarKind::Continuous, lower, upper);
  }

  /// Rejects duplicate variables, unknown indices and non-finite values.
  std::size_t add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                             double rhs);
  void set_objective(std::vector<Term> terms);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  std::optional<std::size_t> find_variable(std::string_view name) const;

  ModelMetadata metadata;

  /// Structural equality; metadata is not part of the exported matrix.
  bool operator==(const LinearModel& other) const;

 private:
  std::vector<Term> checked_terms(std::vector<Term> terms, const std::string& where) const;

  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<Term> objective_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
};

struct ModelStats {
  std::size_t continuous_count = 0;  // mVC
  std::size_t binary_count = 0;      // mVB
  std::size_t constraint_count = 0;  // mC

  bool operator==(const ModelStats&) const = default;
};

ModelStats model_stats(const LinearModel& model);

struct Violation {
  std::string name;  // constraint name, or "<var>:bounds" / "<var>:integrality"
  double amount = 0.0;
};

struct Evaluation {
  double objective = 0.0;
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
};

inline constexpr double kFeasibilityTol = 1e-6;

/// `values` is indexed like model.variables().
Evaluation evaluate(const LinearModel& model, std::span<const double> values);
/// Throws ModelError when a variable is missing from `values`.
Evaluation evaluate(const LinearModel& model, const std::map<std::string, double>& values);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// CPLEX LP text. Every variable is listed in Bounds in declaration order so
/// read_lp restores the same variable order.
std::string write_lp(const LinearModel& model);
LinearModel read_lp(std::string_view text);

struct MpsOutput {
  std::string text;
  /// (mps name, original name) for every renamed row or column.
  std::vector<std::pair<std::string, std::string>> renamed;

  std::string name_map_csv() const;
};

/// Fixed-column MPS. Row and column names longer than 8 characters are
/// replaced by R0000001 / C0000001 style names.
MpsOutput write_mps(const LinearModel& model);
/// `renamed` maps MPS names back to original ones when given.
LinearModel read_mps(std::string_view text,
                     std::span<const std::pair<std::string, std::string>> renamed = {});

}  // namespace satsched

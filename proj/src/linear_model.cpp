#include "satsched/linear_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace satsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kLpLineWidth = 100;

bool lp_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

void check_lp_name(const std::string& name) {
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])) || name[0] == '.') {
    throw ModelError("name '" + name + "' cannot be written to LP");
  }
  for (char c : name) {
    if (!lp_name_char(c)) throw ModelError("name '" + name + "' cannot be written to LP");
  }
}

std::string_view sense_text(Sense s) {
  switch (s) {
    case Sense::LessEqual:
      return "<=";
    case Sense::GreaterEqual:
      return ">=";
    case Sense::Equal:
      return "=";
  }
  return "=";
}

std::string bound_text(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  return format_number(v);
}

// Appends " + 3 x" style pieces, wrapping long lines.
class LpLine {
 public:
  explicit LpLine(std::string& out, std::string head) : out_(out), line_(std::move(head)) {}

  void term(const std::string& name, double coef, bool first) {
    std::string piece;
    if (coef < 0) {
      piece = first ? "-" : " -";
    } else if (!first) {
      piece = " +";
    }
    const double magnitude = std::abs(coef);
    if (magnitude != 1.0) piece += (piece.empty() ? "" : " ") + format_number(magnitude);
    piece += (piece.empty() ? "" : " ") + name;
    put(first ? " " + piece : piece);
  }

  void put(const std::string& piece) {
    if (line_.size() + piece.size() > kLpLineWidth && line_.find_first_not_of(' ') != std::string::npos) {
      out_ += line_ + "\n";
      line_ = "  ";
    }
    line_ += piece;
  }

  void finish() { out_ += line_ + "\n"; }

 private:
  std::string& out_;
  std::string line_;
};

// ---- LP reading -----------------------------------------------------------

enum class TokKind { Number, Name, Op, Sign, Colon };

struct Token {
  TokKind kind;
  std::string text;
  double value = 0.0;
};

double parse_double(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ModelError("bad number '" + std::string(text) + "'");
  }
  return v;
}

bool is_infinity_word(std::string_view w) {
  std::string lower(w);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "inf" || lower == "infinity";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '+' || c == '-') {
      out.push_back({TokKind::Sign, std::string(1, c)});
      ++i;
    } else if (c == ':') {
      out.push_back({TokKind::Colon, ":"});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::size_t j = i + 1;
      if (j < text.size() && (text[j] == '=' || text[j] == '<' || text[j] == '>')) ++j;
      std::string op(text.substr(i, j - i));
      if (op == "<" || op == "=<") op = "<=";
      if (op == ">" || op == "=>") op = ">=";
      out.push_back({TokKind::Op, op});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          j = k;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      out.push_back({TokKind::Number, std::string(text.substr(i, j - i)),
                     parse_double(text.substr(i, j - i))});
      i = j;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             std::string_view("+-<>=:").find(text[j]) == std::string_view::npos) {
        ++j;
      }
      out.push_back({TokKind::Name, std::string(text.substr(i, j - i))});
      i = j;
    }
  }
  return out;
}

struct ParsedRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    static const Token end{TokKind::Op, ""};
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : end;
  }
  Token next() {
    if (done()) throw ModelError("unexpected end of LP section");
    return tokens_[pos_++];
  }

  // name ':' prefix, if present.
  std::optional<std::string> label() {
    if (peek().kind == TokKind::Name && peek(1).kind == TokKind::Colon) {
      auto name = next().text;
      next();
      return name;
    }
    return std::nullopt;
  }

  // Terms up to (not including) a relational operator or the end.
  std::vector<std::pair<std::string, double>> terms() {
    std::vector<std::pair<std::string, double>> out;
    while (!done() && peek().kind != TokKind::Op) {
      double sign = 1.0;
      while (peek().kind == TokKind::Sign) sign *= next().text == "-" ? -1.0 : 1.0;
      double coef = 1.0;
      if (peek().kind == TokKind::Number) coef = next().value;
      const auto name = next();
      if (name.kind != TokKind::Name) throw ModelError("expected variable near '" + name.text + "'");
      out.emplace_back(name.text, sign * coef);
    }
    return out;
  }

  double signed_value() {
    double sign = 1.0;
    while (peek().kind == TokKind::Sign) sign *= next().text == "-" ? -1.0 : 1.0;
    const auto t = next();
    if (t.kind == TokKind::Number) return sign * t.value;
    if (t.kind == TokKind::Name && is_infinity_word(t.text)) return sign * kInf;
    throw ModelError("expected number, found '" + t.text + "'");
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string lower_trim(std::string_view line) {
  std::string out;
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != ' ') {
      out += ' ';
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

struct VarDraft {
  bool binary = false;
  bool bounded = false;
  double lower = 0.0;
  double upper = kInf;
};

// Collects names in first-seen order plus explicit bound declarations.
class ModelDraft {
 public:
  VarDraft& var(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, drafts_.size()).first;
      drafts_.push_back({});
      seen_.push_back(name);
    }
    return drafts_[it->second];
  }

  void declare_order(const std::string& name) {
    var(name);
    if (std::find(order_.begin(), order_.end(), name) == order_.end()) order_.push_back(name);
  }

  LinearModel finish(const std::vector<std::pair<std::string, double>>& objective,
                     const std::vector<ParsedRow>& rows) {
    std::vector<std::string> names = order_;
    for (const auto& n : seen_) {
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
    LinearModel model;
    for (const auto& n : names) {
      const auto& d = drafts_[index_.at(n)];
      if (d.binary) {
        model.add_binary(n);
      } else {
        model.add_continuous(n, d.lower, d.upper);
      }
    }
    auto convert = [&](const std::vector<std::pair<std::string, double>>& in) {
      std::vector<Term> out;
      for (const auto& [n, c] : in) out.push_back({*model.find_variable(n), c});
      return out;
    };
    model.set_objective(convert(objective));
    for (const auto& row : rows) model.add_constraint(row.name, convert(row.terms), row.sense, row.rhs);
    return model;
  }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<VarDraft> drafts_;
  std::vector<std::string> seen_;
  std::vector<std::string> order_;
};

void parse_bound_line(std::string_view line, ModelDraft& draft) {
  TokenCursor cur(tokenize(line));
  if (cur.done()) return;
  auto set = [&](const std::string& name, const std::string& op, double value) {
    auto& v = draft.var(name);
    v.bounded = true;
    if (op == "<=") v.upper = value;
    if (op == ">=") v.lower = value;
    if (op == "=") v.lower = v.upper = value;
  };
  auto flip = [](const std::string& op) {
    return op == "<=" ? std::string(">=") : op == ">=" ? std::string("<=") : op;
  };

  if (cur.peek().kind == TokKind::Name && !is_infinity_word(cur.peek().text)) {
    const auto name = cur.next().text;
    draft.declare_order(name);
    if (cur.peek().kind == TokKind::Name && lower_trim(cur.peek().text) == "free") {
      auto& v = draft.var(name);
      v.lower = -kInf;
      v.upper = kInf;
      return;
    }
    const auto op = cur.next().text;
    set(name, op, cur.signed_value());
    return;
  }
  const double first = cur.signed_value();
  const auto op1 = cur.next().text;
  const auto name = cur.next().text;
  draft.declare_order(name);
  set(name, flip(op1), first);
  if (!cur.done()) {
    const auto op2 = cur.next().text;
    set(name, op2, cur.signed_value());
  }
}

// ---- MPS ------------------------------------------------------------------

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string mps_line(std::string_view f1, std::string_view f2, std::string_view f3,
                     std::string_view f4) {
  char buf[256];
  std::snprintf(buf, sizeof buf, " %-2.*s %-8.*s  %-8.*s  %.*s", static_cast<int>(f1.size()),
                f1.data(), static_cast<int>(f2.size()), f2.data(), static_cast<int>(f3.size()),
                f3.data(), static_cast<int>(f4.size()), f4.data());
  std::string out(buf);
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out + "\n";
}

}  // namespace

// ---- LinearModel -----------------------------------------------------------

std::size_t LinearModel::add_variable(std::string name, VarKind kind, double lower,
                                      double upper) {
  if (name.empty()) throw ModelError("variable name must not be empty");
  if (by_name_.count(name)) throw ModelError("duplicate variable '" + name + "'");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw ModelError("invalid bounds for '" + name + "'");
  }
  if (kind == VarKind::Binary && (lower < 0.0 || upper > 1.0)) {
    throw ModelError("binary '" + name + "' must stay within [0,1]");
  }
  by_name_.emplace(name, variables_.size());
  variables_.push_back({std::move(name), kind, lower, upper});
  return variables_.size() - 1;
}

std::vector<Term> LinearModel::checked_terms(std::vector<Term> terms,
                                             const std::string& where) const {
  std::erase_if(terms, [](const Term& t) { return t.coef == 0.0; });
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].var >= variables_.size()) throw ModelError(where + ": unknown variable");
    if (!std::isfinite(terms[i].coef)) throw ModelError(where + ": non-finite coefficient");
    if (i > 0 && terms[i].var == terms[i - 1].var) {
      throw ModelError(where + ": duplicate variable '" + variables_[terms[i].var].name + "'");
    }
  }
  return terms;
}

std::size_t LinearModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                                        double rhs) {
  if (name.empty()) throw ModelError("constraint name must not be empty");
  if (!std::isfinite(rhs)) throw ModelError(name + ": non-finite right-hand side");
  auto checked = checked_terms(std::move(terms), name);
  if (checked.empty()) throw ModelError(name + ": constraint has no terms");
  constraints_.push_back({std::move(name), std::move(checked), sense, rhs});
  return constraints_.size() - 1;
}

void LinearModel::set_objective(std::vector<Term> terms) {
  objective_ = checked_terms(std::move(terms), "objective");
}

std::optional<std::size_t> LinearModel::find_variable(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

bool LinearModel::operator==(const LinearModel& other) const {
  return variables_ == other.variables_ && constraints_ == other.constraints_ &&
         objective_ == other.objective_;
}

ModelStats model_stats(const LinearModel& model) {
  ModelStats s;
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::Binary) {
      ++s.binary_count;
    } else {
      ++s.continuous_count;
    }
  }
  s.constraint_count = model.constraints().size();
  return s;
}

Evaluation evaluate(const LinearModel& model, std::span<const double> values) {
  if (values.size() != model.variables().size()) {
    throw ModelError("assignment size does not match the variable count");
  }
  Evaluation out;
  for (const auto& t : model.objective()) out.objective += t.coef * values[t.var];

  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& v = model.variables()[i];
    const double x = values[i];
    if (x < v.lower - kFeasibilityTol) out.violations.push_back({v.name + ":bounds", v.lower - x});
    if (x > v.upper + kFeasibilityTol) out.violations.push_back({v.name + ":bounds", x - v.upper});
    if (v.kind == VarKind::Binary && std::abs(x - std::round(x)) > kFeasibilityTol) {
      out.violations.push_back({v.name + ":integrality", std::abs(x - std::round(x))});
    }
  }
  for (const auto& c : model.constraints()) {
    double activity = 0.0;
    for (const auto& t : c.terms) activity += t.coef * values[t.var];
    double excess = 0.0;
    switch (c.sense) {
      case Sense::LessEqual:
        excess = activity - c.rhs;
        break;
      case Sense::GreaterEqual:
        excess = c.rhs - activity;
        break;
      case Sense::Equal:
        excess = std::abs(activity - c.rhs);
        break;
    }
    if (excess > kFeasibilityTol) out.violations.push_back({c.name, excess});
  }
  return out;
}

Evaluation evaluate(const LinearModel& model, const std::map<std::string, double>& values) {
  std::vector<double> dense;
  dense.reserve(model.variables().size());
  for (const auto& v : model.variables()) {
    auto it = values.find(v.name);
    if (it == values.end()) throw ModelError("assignment misses variable '" + v.name + "'");
    dense.push_back(it->second);
  }
  return evaluate(model, dense);
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw ModelError("cannot format number");
  return std::string(buf, ptr);
}

// ---- LP --------------------------------------------------------------------

std::string write_lp(const LinearModel& model) {
  const auto& vars = model.variables();
  for (const auto& v : vars) check_lp_name(v.name);
  for (const auto& c : model.constraints()) check_lp_name(c.name);

  std::string out;
  if (!model.metadata.formulation.empty()) {
    out += "\\ formulation " + model.metadata.formulation + ", objective " +
           model.metadata.objective + "\n";
  }
  out += "Maximize\n";
  {
    LpLine line(out, " obj:");
    bool first = true;
    for (const auto& t : model.objective()) {
      line.term(vars[t.var].name, t.coef, first);
      first = false;
    }
    line.finish();
  }
  out += "Subject To\n";
  for (const auto& c : model.constraints()) {
    LpLine line(out, " " + c.name + ":");
    bool first = true;
    for (const auto& t : c.terms) {
      line.term(vars[t.var].name, t.coef, first);
      first = false;
    }
    line.put(" " + std::string(sense_text(c.sense)) + " " + format_number(c.rhs));
    line.finish();
  }
  out += "Bounds\n";
  for (const auto& v : vars) {
    if (v.lower == v.upper) {
      out += " " + v.name + " = " + format_number(v.lower) + "\n";
    } else if (v.lower == -kInf && v.upper == kInf) {
      out += " " + v.name + " free\n";
    } else {
      out += " " + bound_text(v.lower) + " <= " + v.name + " <= " + bound_text(v.upper) + "\n";
    }
  }
  bool any_binary = std::any_of(vars.begin(), vars.end(),
                                [](const Variable& v) { return v.kind == VarKind::Binary; });
  if (any_binary) {
    out += "Binaries\n";
    LpLine line(out, "");
    for (const auto& v : vars) {
      if (v.kind == VarKind::Binary) line.put(" " + v.name);
    }
    line.finish();
  }
  out += "End\n";
  return out;
}

LinearModel read_lp(std::string_view text) {
  enum class Section { None, Objective, Constraints, Bounds, Binaries, End };
  Section section = Section::None;
  std::string objective_text;
  std::string constraint_text;
  ModelDraft draft;
  std::vector<std::string> binaries;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (auto bs = line.find('\\'); bs != std::string_view::npos) line = line.substr(0, bs);
    const auto key = lower_trim(line);
    if (key.empty()) continue;

    if (key == "maximize" || key == "maximise" || key == "max") {
      section = Section::Objective;
      continue;
    }
    if (key == "minimize" || key == "minimise" || key == "min") {
      throw ModelError("only maximization models are supported");
    }
    if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") {
      section = Section::Constraints;
      continue;
    }
    if (key == "bounds" || key == "bound") {
      section = Section::Bounds;
      continue;
    }
    if (key == "binaries" || key == "binary" || key == "bin") {
      section = Section::Binaries;
      continue;
    }
    if (key == "generals" || key == "general" || key == "gen" || key == "semi-continuous") {
      throw ModelError("general integer and semi-continuous variables are not supported");
    }
    if (key == "end") {
      section = Section::End;
      break;
    }

    switch (section) {
      case Section::Objective:
        objective_text += std::string(line) + "\n";
        break;
      case Section::Constraints:
        constraint_text += std::string(line) + "\n";
        break;
      case Section::Bounds:
        parse_bound_line(line, draft);
        break;
      case Section::Binaries:
        for (auto& name : split_ws(line)) binaries.push_back(name);
        break;
      default:
        throw ModelError("text outside of any LP section: '" + std::string(line) + "'");
    }
  }
  if (section != Section::End) throw ModelError("LP text lacks End");

  TokenCursor obj(tokenize(objective_text));
  obj.label();
  auto objective = obj.terms();
  if (!obj.done()) throw ModelError("unexpected token in objective");
  for (const auto& [n, c] : objective) draft.var(n);

  std::vector<ParsedRow> rows;
  TokenCursor cons(tokenize(constraint_text));
  while (!cons.done()) {
    ParsedRow row;
    row.name = cons.label().value_or("c" + std::to_string(rows.size() + 1));
    row.terms = cons.terms();
    const auto op = cons.next();
    if (op.kind != TokKind::Op) throw ModelError("expected relational operator in " + row.name);
    row.sense = op.text == "<=" ? Sense::LessEqual : op.text == ">=" ? Sense::GreaterEqual : Sense::Equal;
    row.rhs = cons.signed_value();
    for (const auto& [n, c] : row.terms) draft.var(n);
    rows.push_back(std::move(row));
  }
  for (const auto& name : binaries) {
    auto& v = draft.var(name);
    v.binary = true;
  }
  return draft.finish(objective, rows);
}

// ---- MPS -------------------------------------------------------------------

std::string MpsOutput::name_map_csv() const {
  std::string out = "mps_name,original_name\n";
  for (const auto& [mps, original] : renamed) out += mps + "," + original + "\n";
  return out;
}

MpsOutput write_mps(const LinearModel& model) {
  const auto& vars = model.variables();
  const auto& cons = model.constraints();
  MpsOutput result;

  auto fits = [](const std::string& n) {
    return n.size() <= 8 && n.find_first_of(" \t") == std::string::npos && n != "obj";
  };
  std::set<std::string> taken{"obj"};
  for (const auto& v : vars) {
    if (fits(v.name)) taken.insert(v.name);
  }
  for (const auto& c : cons) {
    if (fits(c.name)) taken.insert(c.name);
  }
  auto rename = [&](const std::string& original, char prefix, std::size_t& counter) {
    if (fits(original)) return original;
    std::string name;
    do {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%c%07zu", prefix, ++counter);
      name = buf;
    } while (taken.count(name));
    taken.insert(name);
    result.renamed.emplace_back(name, original);
    return name;
  };

  std::size_t row_counter = 0;
  std::size_t col_counter = 0;
  std::vector<std::string> row_names;
  for (const auto& c : cons) row_names.push_back(rename(c.name, 'R', row_counter));
  std::vector<std::string> col_names;
  for (const auto& v : vars) col_names.push_back(rename(v.name, 'C', col_counter));

  // Column-major entries in declaration order.
  std::vector<std::vector<std::pair<std::string, double>>> columns(vars.size());
  for (const auto& t : model.objective()) columns[t.var].emplace_back("obj", t.coef);
  for (std::size_t r = 0; r < cons.size(); ++r) {
    for (const auto& t : cons[r].terms) columns[t.var].emplace_back(row_names[r], t.coef);
  }

  std::string& out = result.text;
  out += "NAME          satsched\n";
  out += "OBJSENSE\n    MAX\n";
  out += "ROWS\n";
  out += mps_line("N", "obj", "", "");
  for (std::size_t r = 0; r < cons.size(); ++r) {
    const char* type = cons[r].sense == Sense::LessEqual      ? "L"
                       : cons[r].sense == Sense::GreaterEqual ? "G"
                                                              : "E";
    out += mps_line(type, row_names[r], "", "");
  }
  out += "COLUMNS\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (columns[j].empty()) {
      out += mps_line("", col_names[j], "obj", "0");
      continue;
    }
    for (const auto& [row, coef] : columns[j]) {
      out += mps_line("", col_names[j], row, format_number(coef));
    }
  }
  out += "RHS\n";
  for (std::size_t r = 0; r < cons.size(); ++r) {
    if (cons[r].rhs != 0.0) out += mps_line("", "RHS", row_names[r], format_number(cons[r].rhs));
  }
  out += "BOUNDS\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    if (v.kind == VarKind::Binary) {
      out += mps_line("BV", "BND", col_names[j], "");
    } else if (v.lower == v.upper) {
      out += mps_line("FX", "BND", col_names[j], format_number(v.lower));
    } else {
      if (v.lower == -kInf) {
        out += mps_line("MI", "BND", col_names[j], "");
      } else {
        out += mps_line("LO", "BND", col_names[j], format_number(v.lower));
      }
      if (v.upper != kInf) out += mps_line("UP", "BND", col_names[j], format_number(v.upper));
    }
  }
  out += "ENDATA\n";
  return result;
}

LinearModel read_mps(std::string_view text,
                     std::span<const std::pair<std::string, std::string>> renamed) {
  std::map<std::string, std::string> original;
  for (const auto& [mps, name] : renamed) original[mps] = name;
  auto restore = [&](const std::string& n) {
    auto it = original.find(n);
    return it == original.end() ? n : it->second;
  };

  enum class Section { None, ObjSense, Rows, Columns, Rhs, Bounds, Done };
  Section section = Section::None;
  bool minimize = false;
  std::string objective_row;
  std::vector<ParsedRow> rows;
  std::map<std::string, std::size_t> row_index;
  ModelDraft draft;
  std::vector<std::pair<std::string, double>> objective;
  std::map<std::string, bool> integer_marker_cols;
  bool in_integer_block = false;

  std::size_t pos = 0;
  while (pos < text.size() && section != Section::Done) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '*') continue;
    auto fields = split_ws(line);
    if (fields.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const auto& head = fields[0];
      if (head == "NAME") {
        section = Section::None;
      } else if (head == "OBJSENSE") {
        section = Section::ObjSense;
        if (fields.size() > 1) minimize = fields[1] == "MIN" || fields[1] == "MINIMIZE";
      } else if (head == "ROWS") {
        section = Section::Rows;
      } else if (head == "COLUMNS") {
        section = Section::Columns;
      } else if (head == "RHS") {
        section = Section::Rhs;
      } else if (head == "BOUNDS") {
        section = Section::Bounds;
      } else if (head == "RANGES") {
        throw ModelError("MPS RANGES are not supported");
      } else if (head == "ENDATA") {
        section = Section::Done;
      } else {
        throw ModelError("unknown MPS section '" + head + "'");
      }
      continue;
    }

    switch (section) {
      case Section::ObjSense:
        minimize = fields[0] == "MIN" || fields[0] == "MINIMIZE";
        break;
      case Section::Rows: {
        if (fields.size() != 2) throw ModelError("malformed ROWS line");
        if (fields[0] == "N") {
          if (!objective_row.empty()) throw ModelError("multiple objective rows");
          objective_row = fields[1];
          break;
        }
        ParsedRow row;
        row.name = restore(fields[1]);
        row.sense = fields[0] == "L"   ? Sense::LessEqual
                    : fields[0] == "G" ? Sense::GreaterEqual
                    : fields[0] == "E" ? Sense::Equal
                                       : throw ModelError("bad row type '" + fields[0] + "'");
        row_index[fields[1]] = rows.size();
        rows.push_back(std::move(row));
        break;
      }
      case Section::Columns: {
        if (fields.size() >= 3 && fields[1] == "'MARKER'") {
          in_integer_block = fields[2] == "'INTORG'";
          break;
        }
        if (fields.size() != 3 && fields.size() != 5) throw ModelError("malformed COLUMNS line");
        const auto col = restore(fields[0]);
        auto& var = draft.var(col);
        if (in_integer_block) {
          integer_marker_cols[col] = true;
          var.binary = true;
        }
        for (std::size_t f = 1; f + 1 < fields.size(); f += 2) {
          const double coef = parse_double(fields[f + 1]);
          if (fields[f] == objective_row) {
            if (coef != 0.0) objective.emplace_back(col, coef);
          } else {
            auto it = row_index.find(fields[f]);
            if (it == row_index.end()) throw ModelError("unknown row '" + fields[f] + "'");
            rows[it->second].terms.emplace_back(col, coef);
          }
        }
        break;
      }
      case Section::Rhs: {
        if (fields.size() != 3 && fields.size() != 5) throw ModelError("malformed RHS line");
        for (std::size_t f = 1; f + 1 < fields.size(); f += 2) {
          if (fields[f] == objective_row) continue;
          auto it = row_index.find(fields[f]);
          if (it == row_index.end()) throw ModelError("unknown row '" + fields[f] + "'");
          rows[it->second].rhs = parse_double(fields[f + 1]);
        }
        break;
      }
      case Section::Bounds: {
        if (fields.size() < 3) throw ModelError("malformed BOUNDS line");
        const auto& type = fields[0];
        auto& var = draft.var(restore(fields[2]));
        const double value = fields.size() > 3 ? parse_double(fields[3]) : 0.0;
        if (type == "BV") {
          var.binary = true;
        } else if (type == "LO") {
          var.lower = value;
        } else if (type == "UP") {
          var.upper = value;
        } else if (type == "FX") {
          var.lower = var.upper = value;
        } else if (type == "MI") {
          var.lower = -kInf;
        } else if (type == "PL") {
          var.upper = kInf;
        } else if (type == "FR") {
          var.lower = -kInf;
          var.upper = kInf;
        } else {
          throw ModelError("unsupported bound type '" + type + "'");
        }
        break;
      }
      default:
        throw ModelError("data line outside of an MPS section");
    }
  }
  if (section != Section::Done) throw ModelError("MPS text lacks ENDATA");
  if (minimize) {
    for (auto& [n, c] : objective) c = -c;
  }
  return draft.finish(objective, rows);
}

}  // namespace satsched

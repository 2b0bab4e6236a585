#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <string_view>
#include <map>
#include <ostream>
#include <stdexcept>

#include "floodsp/lp.hpp"

namespace floodsp::lp {

int Model::add_variable(std::string name, double lower, double upper, double cost, VarKind kind) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw std::invalid_argument("lp: invalid bounds for variable " + name);
  if (kind == VarKind::kBinary && (lower < 0.0 || upper > 1.0))
    throw std::invalid_argument("lp: binary bounds must lie in [0,1] for " + name);
  vars_.push_back(Variable{std::move(name), lower, upper, cost, kind});
  return static_cast<int>(vars_.size()) - 1;
}

int Model::add_binary(std::string name, double cost) {
  return add_variable(std::move(name), 0.0, 1.0, cost, VarKind::kBinary);
}

int Model::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  std::map<int, double> merged;
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) throw std::out_of_range("lp: constraint " + name + " references unknown variable");
    merged[t.var] += t.coef;
  }
  std::vector<Term> clean;
  clean.reserve(merged.size());
  for (const auto& [var, coef] : merged) {
    if (coef != 0.0) clean.push_back(Term{var, coef});
  }
  rows_.push_back(Constraint{std::move(name), std::move(clean), sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

void Model::set_bounds(int var, double lower, double upper) {
  auto& v = vars_.at(static_cast<size_t>(var));
  if (lower > upper) throw std::invalid_argument("lp: invalid bounds for variable " + v.name);
  v.lower = lower;
  v.upper = upper;
}

void Model::set_cost(int var, double cost) { vars_.at(static_cast<size_t>(var)).cost = cost; }

void Model::set_rhs(int row, double rhs) { rows_.at(static_cast<size_t>(row)).rhs = rhs; }

std::vector<int> Model::binaries() const {
  std::vector<int> out;
  for (int j = 0; j < num_variables(); ++j) {
    if (vars_[static_cast<size_t>(j)].kind == VarKind::kBinary) out.push_back(j);
  }
  return out;
}

double Model::objective_value(std::span<const double> x) const {
  double obj = offset_;
  for (size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].cost * x[j];
  return obj;
}

double Model::max_violation(std::span<const double> x) const {
  if (x.size() != vars_.size()) throw std::invalid_argument("lp: point dimension mismatch");
  double worst = 0.0;
  for (size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max({worst, vars_[j].lower - x[j], x[j] - vars_[j].upper});
  }
  for (const auto& row : rows_) {
    double act = 0.0;
    for (const auto& t : row.terms) act += t.coef * x[static_cast<size_t>(t.var)];
    switch (row.sense) {
      case Sense::kLessEqual: worst = std::max(worst, act - row.rhs); break;
      case Sense::kGreaterEqual: worst = std::max(worst, row.rhs - act); break;
      case Sense::kEqual: worst = std::max(worst, std::abs(act - row.rhs)); break;
    }
  }
  return worst;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double LpSolution::duality_gap() const { return std::abs(objective - dual_objective); }

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// LP-format names may not contain spaces, brackets, or operator characters,
// and may not start with a digit or period.
std::string lp_name(const std::string& raw, char prefix, int index) {
  if (raw.empty()) return std::string(1, prefix) + std::to_string(index);
  std::string out;
  for (char ch : raw) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || std::string_view("!\"#$%&()/,.;?@_`'{}|~").find(ch) != std::string_view::npos;
    out.push_back(ok ? ch : '_');
  }
  if (std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') out.insert(out.begin(), prefix);
  return out;
}

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  int on_line = 0;
  bool first = true;
  for (const auto& [coef, name] : terms) {
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    const bool negative = std::signbit(coef);
    if (first) out << (negative ? " - " : " ");
    else out << (negative ? " - " : " + ");
    out << number(std::abs(coef)) << ' ' << name;
    first = false;
    ++on_line;
  }
  if (first) out << " 0";
}

}  // namespace

void write_lp_format(const Model& model, std::ostream& out) {
  const auto& vars = model.variables();
  std::vector<std::string> names;
  names.reserve(vars.size());
  for (size_t j = 0; j < vars.size(); ++j) names.push_back(lp_name(vars[j].name, 'v', static_cast<int>(j)));

  out << "\\ floodsp extensive-form export\n";
  out << "Minimize\n obj:";
  std::vector<std::pair<double, std::string>> terms;
  for (size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].cost != 0.0) terms.emplace_back(vars[j].cost, names[j]);
  }
  write_terms(out, terms);
  if (model.objective_offset() != 0.0) {
    out << (std::signbit(model.objective_offset()) ? " - " : " + ") << number(std::abs(model.objective_offset()));
  }
  out << "\nSubject To\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const auto& row = model.constraints()[static_cast<size_t>(i)];
    out << ' ' << lp_name(row.name, 'c', i) << ':';
    terms.clear();
    for (const auto& t : row.terms) terms.emplace_back(t.coef, names[static_cast<size_t>(t.var)]);
    write_terms(out, terms);
    switch (row.sense) {
      case Sense::kLessEqual: out << " <= "; break;
      case Sense::kGreaterEqual: out << " >= "; break;
      case Sense::kEqual: out << " = "; break;
    }
    out << number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    if (v.kind == VarKind::kBinary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (v.lower == v.upper) {
      out << ' ' << names[j] << " = " << number(v.lower) << '\n';
    } else if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
      out << ' ' << names[j] << " free\n";
    } else {
      out << ' ' << (std::isfinite(v.lower) ? number(v.lower) : "-inf") << " <= " << names[j] << " <= "
          << (std::isfinite(v.upper) ? number(v.upper) : "+inf") << '\n';
    }
  }
  const auto bins = model.binaries();
  if (!bins.empty()) {
    out << "Binaries\n";
    int on_line = 0;
    for (int j : bins) {
      out << ' ' << names[static_cast<size_t>(j)];
      if (++on_line == 10) {
        out << '\n';
        on_line = 0;
      }
    }
    if (on_line != 0) out << '\n';
  }
  out << "End\n";
}

}  // namespace floodsp::lp

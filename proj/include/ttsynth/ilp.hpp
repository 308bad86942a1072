#pragma once

// Exact bounded integer linear programming.
//
// solve() runs depth-first branch-and-bound over an LP relaxation solved by a
// bounded-variable primal simplex in rational arithmetic. Branching picks the
// fractional variable declared first and explores the floor branch first.
// Among all optimal points the lexicographically greatest assignment (in
// declaration order) is returned; a second pass maximises each variable in
// turn with the objective pinned to its optimum.

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "ttsynth/core.hpp"

namespace ttsynth::ilp {

using Rational = boost::multiprecision::mpq_rational;

enum class Relation { less_equal, equal, greater_equal };

inline const char* symbol(Relation r) {
  switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::equal: return "=";
    case Relation::greater_equal: return ">=";
  }
  return "?";
}

struct Variable {
  std::string id;
  Integer lower;
  Integer upper;
};

using LinearExpression = std::map<std::string, Integer>;

struct LinearConstraint {
  LinearExpression terms;
  Relation relation = Relation::equal;
  Integer rhs = 0;
  std::string name;
};

using Assignment = std::map<std::string, Integer>;

struct Solution {
  Assignment assignment;
  Integer objective_value;
};

/// Minimisation model over bounded integer variables. References are checked
/// on insertion so every stored constraint is well formed.
class IlpModel {
 public:
  std::size_t add_variable(const std::string& id, const Integer& lower, const Integer& upper) {
    if (id.empty()) throw Error("variable ids must be non-empty");
    if (index_.count(id) != 0) throw Error(detail::concat("duplicate variable '", id, "'"));
    if (lower > upper) throw Error(detail::concat("variable '", id, "' has lower bound above upper bound"));
    index_.emplace(id, variables_.size());
    variables_.push_back({id, lower, upper});
    return variables_.size() - 1;
  }

  void add_constraint(LinearConstraint c) {
    check_terms(c.terms);
    if (c.name.empty()) c.name = detail::concat("c", constraints_.size());
    std::erase_if(c.terms, [](const auto& term) { return term.second == 0; });
    constraints_.push_back(std::move(c));
  }

  void add_constraint(const LinearExpression& terms, Relation relation, const Integer& rhs,
                      const std::string& name = {}) {
    add_constraint(LinearConstraint{terms, relation, rhs, name});
  }

  void set_objective(LinearExpression objective) {
    check_terms(objective);
    std::erase_if(objective, [](const auto& term) { return term.second == 0; });
    objective_ = std::move(objective);
  }

  bool has_variable(const std::string& id) const { return index_.count(id) != 0; }
  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(detail::concat("unknown variable '", id, "'"));
    return it->second;
  }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const LinearExpression& objective() const { return objective_; }

 private:
  void check_terms(const LinearExpression& terms) const {
    for (const auto& [id, coefficient] : terms) {
      if (!has_variable(id)) throw Error(detail::concat("constraint references unknown variable '", id, "'"));
    }
  }

  std::vector<Variable> variables_;
  std::map<std::string, std::size_t> index_;
  std::vector<LinearConstraint> constraints_;
  LinearExpression objective_;
};

inline Integer evaluate(const LinearExpression& e, const Assignment& a) {
  Integer sum = 0;
  for (const auto& [id, coefficient] : e) {
    auto it = a.find(id);
    if (it == a.end()) throw Error(detail::concat("assignment misses variable '", id, "'"));
    sum += coefficient * it->second;
  }
  return sum;
}

inline bool holds(Relation r, const Integer& lhs, const Integer& rhs) {
  switch (r) {
    case Relation::less_equal: return lhs <= rhs;
    case Relation::equal: return lhs == rhs;
    case Relation::greater_equal: return lhs >= rhs;
  }
  return false;
}

/// Checks bounds, then constraints in insertion order. The verdict names the
/// first violated constraint (or "bounds") and the offending item.
inline Verdict<std::string> check_assignment(const IlpModel& model, const Assignment& a) {
  for (const auto& v : model.variables()) {
    auto it = a.find(v.id);
    if (it == a.end()) throw Error(detail::concat("assignment misses variable '", v.id, "'"));
    if (it->second < v.lower || it->second > v.upper) return {"bounds", v.id};
  }
  for (const auto& c : model.constraints()) {
    if (!holds(c.relation, evaluate(c.terms, a), c.rhs)) return {c.name, c.name};
  }
  return {};
}

namespace detail {

/// min cost·y subject to rows, 0 <= y <= upper.
struct LinearProgram {
  std::size_t columns = 0;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
  std::vector<Relation> relations;
  std::vector<Rational> rhs;
  std::vector<Rational> cost;
  std::vector<Rational> upper;
};

struct LpOptimum {
  std::vector<Rational> values;
  Rational objective;
};

/// Dense bounded-variable simplex with Bland's rule.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const LinearProgram& lp) : structural_(lp.columns) {
    const std::size_t m = lp.rows.size();
    // Column layout: structural | one auxiliary per row (slack or surplus) |
    // one artificial per row that needs it.
    std::vector<std::optional<int>> slack_sign(m);
    std::vector<bool> needs_artificial(m);
    std::vector<Rational> b = lp.rhs;
    std::vector<Relation> rel = lp.relations;
    std::vector<Rational> sign(m, Rational(1));
    for (std::size_t i = 0; i < m; ++i) {
      if (b[i] < 0) {
        sign[i] = -1;
        b[i] = -b[i];
        if (rel[i] == Relation::less_equal) {
          rel[i] = Relation::greater_equal;
        } else if (rel[i] == Relation::greater_equal) {
          rel[i] = Relation::less_equal;
        }
      }
      if (rel[i] == Relation::less_equal) slack_sign[i] = 1;
      if (rel[i] == Relation::greater_equal) slack_sign[i] = -1;
      needs_artificial[i] = rel[i] != Relation::less_equal;
    }

    columns_ = structural_;
    std::vector<std::size_t> slack_column(m), artificial_column(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (slack_sign[i]) slack_column[i] = columns_++;
    }
    first_artificial_ = columns_;
    for (std::size_t i = 0; i < m; ++i) {
      if (needs_artificial[i]) artificial_column[i] = columns_++;
    }

    upper_.assign(columns_, std::nullopt);
    for (std::size_t j = 0; j < structural_; ++j) upper_[j] = lp.upper[j];
    at_upper_.assign(columns_, false);
    tableau_.assign(m, std::vector<Rational>(columns_));
    value_ = b;
    basis_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& [j, a] : lp.rows[i]) tableau_[i][j] += sign[i] * a;
      if (slack_sign[i]) tableau_[i][slack_column[i]] = *slack_sign[i];
      if (needs_artificial[i]) {
        tableau_[i][artificial_column[i]] = 1;
        basis_[i] = artificial_column[i];
      } else {
        basis_[i] = slack_column[i];
      }
    }
    cost_ = lp.cost;
    cost_.resize(columns_);
  }

  std::optional<LpOptimum> solve() {
    if (first_artificial_ < columns_) {
      std::vector<Rational> phase_one(columns_);
      for (std::size_t j = first_artificial_; j < columns_; ++j) phase_one[j] = 1;
      optimize(phase_one);
      if (objective(phase_one) > 0) return std::nullopt;
      // Artificials are pinned to zero for the second phase.
      for (std::size_t j = first_artificial_; j < columns_; ++j) upper_[j] = Rational(0);
    }
    optimize(cost_);
    LpOptimum out;
    out.values.resize(structural_);
    for (std::size_t j = 0; j < structural_; ++j) out.values[j] = nonbasic_value(j);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] < structural_) out.values[basis_[i]] = value_[i];
    }
    out.objective = 0;
    for (std::size_t j = 0; j < structural_; ++j) out.objective += cost_[j] * out.values[j];
    return out;
  }

 private:
  Rational nonbasic_value(std::size_t j) const { return at_upper_[j] ? *upper_[j] : Rational(0); }

  Rational objective(const std::vector<Rational>& cost) const {
    Rational z = 0;
    std::vector<bool> basic(columns_, false);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      basic[basis_[i]] = true;
      z += cost[basis_[i]] * value_[i];
    }
    for (std::size_t j = 0; j < columns_; ++j) {
      if (!basic[j] && at_upper_[j]) z += cost[j] * *upper_[j];
    }
    return z;
  }

  void optimize(const std::vector<Rational>& cost) {
    const std::size_t m = basis_.size();
    std::vector<bool> basic(columns_, false);
    for (std::size_t i = 0; i < m; ++i) basic[basis_[i]] = true;

    std::vector<Rational> reduced = cost;
    for (std::size_t i = 0; i < m; ++i) {
      const Rational& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < columns_; ++j) {
        if (tableau_[i][j] != 0) reduced[j] -= cb * tableau_[i][j];
      }
    }

    for (;;) {
      // Bland: lowest-index improving column.
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < columns_ && !entering; ++j) {
        if (basic[j] || fixed(j)) continue;
        if (!at_upper_[j] && reduced[j] < 0) entering = j;
        if (at_upper_[j] && reduced[j] > 0) entering = j;
      }
      if (!entering) return;
      const std::size_t q = *entering;
      const bool increase = !at_upper_[q];

      // Ratio test. `limit` is the step length along the entering direction;
      // ties keep the lowest-index leaving variable.
      std::optional<Rational> limit = upper_[q];
      std::optional<std::size_t> leaving_row;
      std::size_t leaving_index = q;
      bool leaving_to_upper = false;
      for (std::size_t i = 0; i < m; ++i) {
        const Rational& a = tableau_[i][q];
        if (a == 0) continue;
        // Basic value moves by -a * delta where delta = +step (increase) or -step.
        const bool basic_decreases = increase ? a > 0 : a < 0;
        Rational step;
        bool to_upper = false;
        if (basic_decreases) {
          step = value_[i] / abs(a);
        } else {
          const auto& ub = upper_[basis_[i]];
          if (!ub) continue;
          step = (*ub - value_[i]) / abs(a);
          to_upper = true;
        }
        if (!limit || step < *limit || (step == *limit && basis_[i] < leaving_index)) {
          limit = step;
          leaving_row = i;
          leaving_index = basis_[i];
          leaving_to_upper = to_upper;
        }
      }
      if (!limit) throw Error("linear relaxation is unbounded");

      const Rational delta = increase ? *limit : -*limit;
      for (std::size_t i = 0; i < m; ++i) {
        if (tableau_[i][q] != 0) value_[i] -= tableau_[i][q] * delta;
      }

      if (!leaving_row) {
        at_upper_[q] = increase;
        continue;
      }

      const std::size_t r = *leaving_row;
      const std::size_t old = basis_[r];
      const Rational entering_value = nonbasic_value(q) + delta;
      at_upper_[old] = leaving_to_upper;
      basic[old] = false;
      basic[q] = true;
      at_upper_[q] = false;
      basis_[r] = q;
      value_[r] = entering_value;
      pivot(r, q, reduced);
    }
  }

  bool fixed(std::size_t j) const { return upper_[j] && *upper_[j] == 0; }

  void pivot(std::size_t r, std::size_t q, std::vector<Rational>& reduced) {
    auto& row = tableau_[r];
    const Rational inv = 1 / row[q];
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < columns_; ++j) {
      if (row[j] != 0) {
        row[j] *= inv;
        support.push_back(j);
      }
    }
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (i == r || tableau_[i][q] == 0) continue;
      const Rational factor = tableau_[i][q];
      for (std::size_t j : support) tableau_[i][j] -= factor * row[j];
    }
    if (reduced[q] != 0) {
      const Rational factor = reduced[q];
      for (std::size_t j : support) reduced[j] -= factor * row[j];
    }
  }

  std::size_t structural_;
  std::size_t columns_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<std::vector<Rational>> tableau_;
  std::vector<Rational> value_;
  std::vector<std::size_t> basis_;
  std::vector<std::optional<Rational>> upper_;
  std::vector<bool> at_upper_;
  std::vector<Rational> cost_;
};

inline Integer floor_of(const Rational& q) {
  Integer n = numerator(q), d = denominator(q);
  Integer f = n / d;
  if (n % d != 0 && n < 0) f -= 1;
  return f;
}

inline Integer ceil_of(const Rational& q) { return -floor_of(-q); }

/// Model flattened to indices, with the objective replaced per pass.
struct IndexedModel {
  std::vector<Integer> lower, upper;
  std::vector<std::vector<std::pair<std::size_t, Integer>>> rows;
  std::vector<Relation> relations;
  std::vector<Integer> rhs;

  explicit IndexedModel(const IlpModel& model) {
    for (const auto& v : model.variables()) {
      lower.push_back(v.lower);
      upper.push_back(v.upper);
    }
    for (const auto& c : model.constraints()) add_row(model, c.terms, c.relation, c.rhs);
  }

  void add_row(const IlpModel& model, const LinearExpression& terms, Relation r, const Integer& b) {
    std::vector<std::pair<std::size_t, Integer>> row;
    for (const auto& [id, coefficient] : terms) row.emplace_back(model.index_of(id), coefficient);
    rows.push_back(std::move(row));
    relations.push_back(r);
    rhs.push_back(b);
  }
};

struct Incumbent {
  std::vector<Integer> values;
  Integer objective;
};

/// Solves the LP relaxation under the given bounds. Fixed variables are
/// substituted out. Returns nullopt when infeasible.
inline std::optional<LpOptimum> relax(const IndexedModel& m, const std::vector<Integer>& cost,
                                      const std::vector<Integer>& lower, const std::vector<Integer>& upper) {
  const std::size_t n = lower.size();
  std::vector<std::optional<std::size_t>> column(n);
  LinearProgram lp;
  for (std::size_t j = 0; j < n; ++j) {
    if (lower[j] == upper[j]) continue;
    column[j] = lp.columns++;
    lp.upper.emplace_back(upper[j] - lower[j]);
    lp.cost.emplace_back(cost[j]);
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    Integer b = m.rhs[i];
    std::vector<std::pair<std::size_t, Rational>> row;
    for (const auto& [j, a] : m.rows[i]) {
      b -= a * lower[j];
      if (column[j]) row.emplace_back(*column[j], Rational(a));
    }
    if (row.empty()) {
      if (!holds(m.relations[i], Integer(0), b)) return std::nullopt;
      continue;
    }
    lp.rows.push_back(std::move(row));
    lp.relations.push_back(m.relations[i]);
    lp.rhs.emplace_back(b);
  }
  auto shifted = BoundedSimplex(lp).solve();
  if (!shifted) return std::nullopt;
  LpOptimum out;
  out.values.resize(n);
  out.objective = 0;
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = Rational(lower[j]) + (column[j] ? shifted->values[*column[j]] : Rational(0));
    out.objective += Rational(cost[j]) * out.values[j];
  }
  return out;
}

/// Depth-first branch-and-bound. Only strictly better points replace the
/// incumbent.
inline std::optional<Incumbent> branch_and_bound(const IndexedModel& m, const std::vector<Integer>& cost,
                                                 std::optional<Incumbent> incumbent) {
  struct Node {
    std::vector<Integer> lower, upper;
  };
  std::vector<Node> stack{{m.lower, m.upper}};
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    auto lp = relax(m, cost, node.lower, node.upper);
    if (!lp) continue;
    if (incumbent && ceil_of(lp->objective) >= incumbent->objective) continue;

    std::optional<std::size_t> fractional;
    for (std::size_t j = 0; j < lp->values.size(); ++j) {
      if (denominator(lp->values[j]) != 1) {
        fractional = j;
        break;
      }
    }
    if (!fractional) {
      Incumbent found;
      for (const auto& v : lp->values) found.values.push_back(numerator(v));
      found.objective = numerator(lp->objective);
      incumbent = std::move(found);
      continue;
    }
    const std::size_t j = *fractional;
    Node down = node, up = std::move(node);
    down.upper[j] = floor_of(lp->values[j]);
    up.lower[j] = down.upper[j] + 1;
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));
  }
  return incumbent;
}

}  // namespace detail

/// Minimises the objective. Returns nullopt iff the model has no integer
/// point. Among optima the lexicographically greatest assignment is chosen.
inline std::optional<Solution> solve(const IlpModel& model) {
  const std::size_t n = model.variables().size();
  detail::IndexedModel indexed(model);

  std::vector<Integer> cost(n);
  for (const auto& [id, coefficient] : model.objective()) cost[model.index_of(id)] = coefficient;

  auto best = detail::branch_and_bound(indexed, cost, std::nullopt);
  if (!best) return std::nullopt;
  const Integer optimum = best->objective;

  if (!model.objective().empty()) indexed.add_row(model, model.objective(), Relation::equal, optimum);
  std::vector<Integer> current = best->values;
  for (std::size_t j = 0; j < n; ++j) {
    if (current[j] != indexed.upper[j]) {
      std::vector<Integer> raise(n);
      raise[j] = -1;
      detail::Incumbent seed{current, -current[j]};
      current = detail::branch_and_bound(indexed, raise, seed)->values;
    }
    indexed.lower[j] = indexed.upper[j] = current[j];
  }

  Solution out;
  for (std::size_t j = 0; j < n; ++j) out.assignment[model.variables()[j].id] = current[j];
  out.objective_value = optimum;
  return out;
}

/// LP-style text dump for inspection.
inline void write_lp(std::ostream& out, const IlpModel& model) {
  auto expression = [&out](const LinearExpression& e) {
    if (e.empty()) {
      out << "0";
      return;
    }
    bool first = true;
    for (const auto& [id, coefficient] : e) {
      if (coefficient < 0) {
        out << (first ? "- " : " - ");
      } else if (!first) {
        out << " + ";
      }
      Integer magnitude = abs(coefficient);
      if (magnitude != 1) out << magnitude << ' ';
      out << id;
      first = false;
    }
  };
  out << "minimize\n  obj: ";
  expression(model.objective());
  out << "\nsubject to\n";
  for (const auto& c : model.constraints()) {
    out << "  " << c.name << ": ";
    expression(c.terms);
    out << ' ' << symbol(c.relation) << ' ' << c.rhs << '\n';
  }
  out << "bounds\n";
  for (const auto& v : model.variables()) out << "  " << v.lower << " <= " << v.id << " <= " << v.upper << '\n';
  out << "general\n ";
  for (const auto& v : model.variables()) out << ' ' << v.id;
  out << "\nend\n";
}

inline std::string to_lp_string(const IlpModel& model) {
  std::ostringstream out;
  write_lp(out, model);
  return out.str();
}

}  // namespace ttsynth::ilp

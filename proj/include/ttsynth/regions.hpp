#pragma once

// Token-trail regions: the ILP encoding of "same label, same rise" and "same
// initial sum of tokens", minimal-region enumeration with blocking
// constraints, and an ILP-free verifier.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttsynth/core.hpp"
#include "ttsynth/ilp.hpp"
#include "ttsynth/semantics.hpp"

namespace ttsynth {

/// Token distribution over all places of a specification, computed under the
/// bound `k`.
struct Region {
  Marking marking;
  Integer k = 1;

  friend bool operator==(const Region&, const Region&) = default;
};

enum class Mode { synthesis, discovery };

struct RegionProblem {
  Specification spec;
  Integer k = 1;
  Mode mode = Mode::synthesis;
  std::optional<std::size_t> max_regions;
};

/// The region ILP together with the bookkeeping needed to extend it.
struct RegionModel {
  ilp::IlpModel ilp;
  Integer k;
  /// Place ids of the specification, in ingestion order.
  std::vector<std::string> places;
  /// ILP variable for each entry of `places`.
  std::vector<std::string> place_variables;
  std::size_t blocked = 0;
};

inline std::string place_variable(const std::string& place) { return "p_" + place; }

/// Final place of every net: an explicit override if the net carries one,
/// otherwise the unique place without outgoing arcs.
inline std::vector<std::string> discovery_final_places(const Specification& spec) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < spec.nets().size(); ++i) {
    const auto& net = spec.nets()[i];
    if (net.final_place) {
      out.push_back(*net.final_place);
      continue;
    }
    std::vector<std::string> sinks;
    for (const auto& c : net.net.places()) {
      if (net.net.place_postset(c).empty()) sinks.push_back(c);
    }
    if (sinks.size() != 1) throw Error(detail::concat("no unique final place in net ", i + 1));
    out.push_back(sinks.front());
  }
  return out;
}

namespace detail {

inline ilp::LinearExpression rise_expression(const LabelledNet& net, const std::string& e) {
  ilp::LinearExpression out;
  for (const auto& [c, w] : net.net.postset(e)) out[place_variable(c)] += w;
  for (const auto& [c, w] : net.net.preset(e)) out[place_variable(c)] -= w;
  return out;
}

inline ilp::LinearExpression initial_sum_expression(const LabelledNet& net) {
  ilp::LinearExpression out;
  for (const auto& [c, tokens] : net.initial) out[place_variable(c)] += tokens;
  return out;
}

inline ilp::LinearExpression difference(ilp::LinearExpression a, const ilp::LinearExpression& b) {
  for (const auto& [id, coefficient] : b) a[id] -= coefficient;
  return a;
}

}  // namespace detail

inline RegionModel build_base_model(const RegionProblem& problem) {
  const Specification& spec = problem.spec;
  if (spec.empty()) throw Error("specification is empty");
  if (problem.k < 1) throw Error("k must be at least 1");

  RegionModel model;
  model.k = problem.k;
  model.places = spec.places();
  for (const auto& c : model.places) {
    model.place_variables.push_back(place_variable(c));
    model.ilp.add_variable(model.place_variables.back(), 0, problem.k);
  }

  // Same label, same rise: every transition is tied to the first one (in
  // net, then transition order) that carries its label.
  std::map<std::string, ilp::LinearExpression> pivot_rise;
  for (const auto& net : spec.nets()) {
    for (const auto& e : net.net.transitions()) {
      auto rise = detail::rise_expression(net, e);
      auto [it, first] = pivot_rise.emplace(net.label(e), rise);
      if (!first) {
        model.ilp.add_constraint(detail::difference(it->second, rise), ilp::Relation::equal, 0, "rise_" + e);
      }
    }
  }

  // Same initial sum of tokens, pivoting on the first net.
  const auto pivot_sum = detail::initial_sum_expression(spec.nets().front());
  for (std::size_t i = 1; i < spec.nets().size(); ++i) {
    model.ilp.add_constraint(detail::difference(pivot_sum, detail::initial_sum_expression(spec.nets()[i])),
                             ilp::Relation::equal, 0, detail::concat("initial_sum_", i + 1));
  }

  if (problem.mode == Mode::discovery) {
    for (const auto& c : discovery_final_places(spec)) {
      model.ilp.add_constraint({{place_variable(c), 1}}, ilp::Relation::equal, 0, "final_" + c);
    }
  }
  return model;
}

/// Requires a non-empty region and minimises the token total; blocking
/// binaries take part in neither.
inline void add_seek_constraints(RegionModel& model) {
  ilp::LinearExpression total;
  for (const auto& v : model.place_variables) total[v] = 1;
  model.ilp.add_constraint(total, ilp::Relation::greater_equal, 1, "nonempty");
  model.ilp.set_objective(total);
}

/// Excludes every assignment that is componentwise >= `found`: for each
/// positive component a binary x with 0 <= (p - s) + k*x <= k - 1, and at
/// least one binary set.
inline void add_blocking(RegionModel& model, const Region& found) {
  if (found.marking.empty()) throw Error("cannot block the empty region");
  const std::size_t r = ++model.blocked;
  ilp::LinearExpression any;
  for (std::size_t i = 0; i < model.places.size(); ++i) {
    const Integer s = found.marking.count(model.places[i]);
    if (s == 0) continue;
    const std::string x = detail::concat("x_r", r, "_", model.places[i]);
    model.ilp.add_variable(x, 0, 1);
    ilp::LinearExpression shifted{{model.place_variables[i], 1}, {x, model.k}};
    model.ilp.add_constraint(shifted, ilp::Relation::greater_equal, s, x + "_lo");
    model.ilp.add_constraint(shifted, ilp::Relation::less_equal, model.k - 1 + s, x + "_hi");
    any[x] = 1;
  }
  model.ilp.add_constraint(any, ilp::Relation::greater_equal, 1, detail::concat("block_r", r));
}

inline Region region_from(const RegionModel& model, const ilp::Solution& solution) {
  Region region;
  region.k = model.k;
  for (std::size_t i = 0; i < model.places.size(); ++i) {
    region.marking.set(model.places[i], solution.assignment.at(model.place_variables[i]));
  }
  return region;
}

struct RegionEnumeration {
  std::vector<Region> regions;
  bool truncated = false;
};

/// Solve, record, block, repeat until infeasible (or `max_regions` reached).
inline RegionEnumeration enumerate_minimal_regions(const RegionProblem& problem) {
  RegionModel model = build_base_model(problem);
  add_seek_constraints(model);
  RegionEnumeration out;
  for (;;) {
    auto solution = ilp::solve(model.ilp);
    if (!solution) break;
    if (problem.max_regions && out.regions.size() >= *problem.max_regions) {
      out.truncated = true;
      break;
    }
    out.regions.push_back(region_from(model, *solution));
    add_blocking(model, out.regions.back());
  }
  return out;
}

enum class RegionCondition {
  bound,         // every value <= k
  same_rise,     // equally labelled transitions have equal rise
  initial_sums,  // every net has the same initial token sum
};

inline const char* to_string(RegionCondition c) {
  switch (c) {
    case RegionCondition::bound: return "bound";
    case RegionCondition::same_rise: return "same rise";
    case RegionCondition::initial_sums: return "initial sums";
  }
  return "?";
}

/// Direct check of the bound, equal rise over all equally labelled
/// transition pairs and equal initial sums over all net pairs.
inline Verdict<RegionCondition> verify_region(const Specification& spec, const Region& r) {
  std::map<std::string, const LabelledNet*> owner;
  for (const auto& net : spec.nets()) {
    for (const auto& c : net.net.places()) owner.emplace(c, &net);
  }
  for (const auto& [c, tokens] : r.marking) {
    if (owner.count(c) == 0) throw Error(detail::concat("region marks unknown place '", c, "'"));
    if (tokens > r.k) return {RegionCondition::bound, c};
  }

  struct Observed {
    std::string transition;
    Integer rise;
  };
  std::map<std::string, Observed> first_rise;
  for (const auto& net : spec.nets()) {
    for (const auto& e : net.net.transitions()) {
      Integer value = rise(net, r.marking, e);
      auto [it, first] = first_rise.emplace(net.label(e), Observed{e, value});
      if (!first && it->second.rise != value) return {RegionCondition::same_rise, e};
    }
  }

  std::optional<Integer> sum;
  for (std::size_t i = 0; i < spec.nets().size(); ++i) {
    Integer s = initial_sum(spec.nets()[i], r.marking);
    if (sum && *sum != s) return {RegionCondition::initial_sums, detail::concat("net ", i + 1)};
    sum = s;
  }
  return {};
}

/// Restriction of a region to the places of one net.
inline TokenTrail restrict_to(const Region& r, const LabelledNet& net) {
  TokenTrail x;
  for (const auto& c : net.net.places()) x.set(c, r.marking.count(c));
  return x;
}

}  // namespace ttsynth

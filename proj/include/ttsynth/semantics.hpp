#pragma once

// Validity of token trails and compact token flows, net-language membership
// and state-graph enabledness.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ttsynth/core.hpp"
#include "ttsynth/ilp.hpp"

namespace ttsynth {

/// Behaviour of a single place towards every label: W(p,t), W(t,p), m0(p).
/// Labels absent from `consume`/`produce` have weight 0.
struct PlaceBehavior {
  Multiset<std::string> consume;
  Multiset<std::string> produce;
  Integer initial = 0;

  friend bool operator==(const PlaceBehavior&, const PlaceBehavior&) = default;
};

/// Behaviour of `place` in a marked net whose transition identifiers are the
/// labels.
inline PlaceBehavior behavior_of(const MarkedPetriNet& model, const std::string& place) {
  PlaceBehavior pb;
  for (const auto& t : model.net.transitions()) {
    pb.consume.set(t, model.net.weight(place, t));
    pb.produce.set(t, model.net.weight(t, place));
  }
  pb.initial = model.initial.count(place);
  return pb;
}

using TokenTrail = Marking;

inline Integer inflow(const LabelledNet& net, const TokenTrail& x, const std::string& e) {
  Integer sum = 0;
  for (const auto& [c, w] : net.net.preset(e)) sum += w * x.count(c);
  return sum;
}

inline Integer outflow(const LabelledNet& net, const TokenTrail& x, const std::string& e) {
  Integer sum = 0;
  for (const auto& [c, w] : net.net.postset(e)) sum += w * x.count(c);
  return sum;
}

inline Integer rise(const LabelledNet& net, const TokenTrail& x, const std::string& e) {
  return outflow(net, x, e) - inflow(net, x, e);
}

/// Weighted token sum of `x` on the initially marked places.
inline Integer initial_sum(const LabelledNet& net, const Marking& x) {
  Integer sum = 0;
  for (const auto& [c, tokens] : net.initial) sum += tokens * x.count(c);
  return sum;
}

enum class TrailCondition {
  enough_inflow,     // in_x(e) >= W(p, l(e))
  balanced_outflow,  // out_x(e) = in_x(e) + W(l(e), p) - W(p, l(e))
  initial_tokens,    // sum_c i0(c) x(c) = m0(p)
};

inline const char* to_string(TrailCondition c) {
  switch (c) {
    case TrailCondition::enough_inflow: return "enough inflow";
    case TrailCondition::balanced_outflow: return "balanced outflow";
    case TrailCondition::initial_tokens: return "initial tokens";
  }
  return "?";
}

/// Checks inflow for all transitions, then outflow, then initial tokens.
/// Reports the first failing condition at the first failing transition.
inline Verdict<TrailCondition> is_valid_token_trail(const LabelledNet& net, const TokenTrail& x,
                                                    const PlaceBehavior& pb) {
  require_places(net.net, x, "token trail");
  for (const auto& e : net.net.transitions()) {
    if (inflow(net, x, e) < pb.consume.count(net.label(e))) return {TrailCondition::enough_inflow, e};
  }
  for (const auto& e : net.net.transitions()) {
    const auto& l = net.label(e);
    if (outflow(net, x, e) != inflow(net, x, e) + pb.produce.count(l) - pb.consume.count(l)) {
      return {TrailCondition::balanced_outflow, e};
    }
  }
  if (initial_sum(net, x) != pb.initial) return {TrailCondition::initial_tokens, {}};
  return {};
}

/// Bound used when the caller does not give one: initial tokens, plus every
/// label producing once per transition, plus the largest single demand.
inline Integer default_trail_bound(const LabelledNet& net, const PlaceBehavior& pb) {
  Integer max_consume = 0;
  for (const auto& [label, w] : pb.consume) max_consume = std::max(max_consume, w);
  return pb.initial + pb.produce.total() * Integer(net.net.transitions().size()) + max_consume;
}

/// Searches for a valid trail with every component <= bound. nullopt means
/// none exists within the bound, not that none exists at all.
inline std::optional<TokenTrail> find_token_trail(const LabelledNet& net, const PlaceBehavior& pb,
                                                  const Integer& bound) {
  if (bound < 0) throw Error("trail bound must be non-negative");
  ilp::IlpModel model;
  for (const auto& c : net.net.places()) model.add_variable(c, 0, bound);
  for (const auto& e : net.net.transitions()) {
    const auto& l = net.label(e);
    ilp::LinearExpression in, balance;
    for (const auto& [c, w] : net.net.preset(e)) {
      in[c] += w;
      balance[c] -= w;
    }
    for (const auto& [c, w] : net.net.postset(e)) balance[c] += w;
    model.add_constraint(in, ilp::Relation::greater_equal, pb.consume.count(l), "in_" + e);
    model.add_constraint(balance, ilp::Relation::equal, pb.produce.count(l) - pb.consume.count(l), "rise_" + e);
  }
  ilp::LinearExpression start;
  for (const auto& [c, tokens] : net.initial) start[c] += tokens;
  model.add_constraint(start, ilp::Relation::equal, pb.initial, "initial");

  auto solution = ilp::solve(model);
  if (!solution) return std::nullopt;
  TokenTrail x;
  for (const auto& [c, value] : solution->assignment) x.set(c, value);
  return x;
}

struct Enabled {
  /// One witness trail per model place.
  std::map<std::string, TokenTrail> trails;
};

struct NotShownWithinBound {
  std::string place;
};

using Membership = std::variant<Enabled, NotShownWithinBound>;

/// Net-language membership of `spec_net` in `model`, whose transition ids
/// act as labels. Each place is searched up to `bound`, or its default bound.
inline Membership is_enabled(const MarkedPetriNet& model, const LabelledNet& spec_net,
                             std::optional<Integer> bound = std::nullopt) {
  model.validate();
  spec_net.validate();
  for (const auto& e : spec_net.net.transitions()) {
    if (!model.net.has_transition(spec_net.label(e))) {
      throw Error(detail::concat("unknown label '", spec_net.label(e), "'"));
    }
  }
  Enabled out;
  for (const auto& p : model.net.places()) {
    PlaceBehavior pb = behavior_of(model, p);
    auto trail = find_token_trail(spec_net, pb, bound.value_or(default_trail_bound(spec_net, pb)));
    if (!trail) return NotShownWithinBound{p};
    out.trails.emplace(p, std::move(*trail));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs and compact token flows

/// Labelled events with a precedence relation whose transitive closure must
/// be irreflexive.
struct Run {
  std::vector<std::string> events;
  std::map<std::string, std::string> labels;
  std::vector<std::pair<std::string, std::string>> order;

  bool has_event(const std::string& v) const { return labels.count(v) != 0; }
};

/// Token counts on the initial slots (start, v), the order pairs and the
/// final slots (v, end) of a run. Missing entries are 0.
struct CompactTokenFlow {
  std::map<std::string, Integer> initial;
  std::map<std::pair<std::string, std::string>, Integer> order;
  std::map<std::string, Integer> final;
};

enum class FlowCondition {
  enough_inflow,
  balanced_outflow,
  initial_tokens,
};

inline const char* to_string(FlowCondition c) {
  switch (c) {
    case FlowCondition::enough_inflow: return "enough inflow";
    case FlowCondition::balanced_outflow: return "balanced outflow";
    case FlowCondition::initial_tokens: return "initial tokens";
  }
  return "?";
}

namespace detail {

inline Integer value_or_zero(const auto& map, const auto& key) {
  auto it = map.find(key);
  return it == map.end() ? Integer(0) : it->second;
}

}  // namespace detail

inline Verdict<FlowCondition> is_valid_compact_token_flow(const Run& run, const CompactTokenFlow& x,
                                                          const PlaceBehavior& pb) {
  std::set<std::pair<std::string, std::string>> pairs(run.order.begin(), run.order.end());
  for (const auto& [v, value] : x.initial) {
    if (!run.has_event(v)) throw Error(detail::concat("flow names unknown event '", v, "'"));
  }
  for (const auto& [v, value] : x.final) {
    if (!run.has_event(v)) throw Error(detail::concat("flow names unknown event '", v, "'"));
  }
  for (const auto& [pair, value] : x.order) {
    if (pairs.count(pair) == 0) {
      throw Error(detail::concat("flow names (", pair.first, ",", pair.second, ") which is not an order pair"));
    }
  }
  auto non_negative = [](const auto& map) {
    for (const auto& entry : map) {
      if (entry.second < 0) throw Error("flow values must be non-negative");
    }
  };
  non_negative(x.initial);
  non_negative(x.order);
  non_negative(x.final);

  auto in = [&](const std::string& v) {
    Integer sum = detail::value_or_zero(x.initial, v);
    for (const auto& pair : pairs) {
      if (pair.second == v) sum += detail::value_or_zero(x.order, pair);
    }
    return sum;
  };
  auto out = [&](const std::string& v) {
    Integer sum = detail::value_or_zero(x.final, v);
    for (const auto& pair : pairs) {
      if (pair.first == v) sum += detail::value_or_zero(x.order, pair);
    }
    return sum;
  };

  for (const auto& v : run.events) {
    if (in(v) < pb.consume.count(run.labels.at(v))) return {FlowCondition::enough_inflow, v};
  }
  for (const auto& v : run.events) {
    const auto& l = run.labels.at(v);
    if (out(v) != in(v) + pb.produce.count(l) - pb.consume.count(l)) return {FlowCondition::balanced_outflow, v};
  }
  Integer start = 0;
  for (const auto& v : run.events) start += detail::value_or_zero(x.initial, v);
  if (start != pb.initial) return {FlowCondition::initial_tokens, {}};
  return {};
}

// ---------------------------------------------------------------------------
// State graphs

struct StateGraphEnabled {
  std::map<std::string, Marking> embedding;
};

struct StateGraphRejected {
  std::string reason;
  std::string witness;
};

using StateGraphVerdict = std::variant<StateGraphEnabled, StateGraphRejected>;

/// Maps the initial state to m0 and propagates markings along arcs
/// breadth-first, firing the arc labels as model transitions. The mapping must
/// be consistent and injective and cover every state.
inline StateGraphVerdict check_state_graph_enabled(const MarkedPetriNet& model, const StateGraph& sg) {
  model.validate();
  if (!sg.has_state(sg.initial)) return StateGraphRejected{"unknown initial state", sg.initial};

  std::map<std::string, Marking> g{{sg.initial, model.initial}};
  std::deque<std::string> queue{sg.initial};
  while (!queue.empty()) {
    const std::string s = queue.front();
    queue.pop_front();
    for (const auto& a : sg.arcs) {
      if (a.from != s) continue;
      if (!sg.has_state(a.to)) return StateGraphRejected{"unknown state", a.to};
      if (!model.net.has_transition(a.label)) return StateGraphRejected{"unknown transition", a.label};
      if (!is_enabled(model.net, g.at(s), a.label)) return StateGraphRejected{"not enabled", a.label};
      Marking next = fire(model.net, g.at(s), a.label);
      auto [it, inserted] = g.emplace(a.to, next);
      if (inserted) {
        queue.push_back(a.to);
      } else if (!(it->second == next)) {
        return StateGraphRejected{"inconsistent", a.to};
      }
    }
  }
  for (const auto& s : sg.states) {
    if (g.count(s) == 0) return StateGraphRejected{"unreachable state", s};
  }
  std::map<Marking, std::string> image;
  for (const auto& s : sg.states) {
    auto [it, inserted] = image.emplace(g.at(s), s);
    if (!inserted) return StateGraphRejected{"not injective", s};
  }
  return StateGraphEnabled{std::move(g)};
}

}  // namespace ttsynth

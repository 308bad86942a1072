#pragma once

// State graphs, runs and traces as labelled nets.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ttsynth/core.hpp"
#include "ttsynth/semantics.hpp"

namespace ttsynth {

using Trace = std::vector<std::string>;

/// Place per state, transition per arc, one token on the initial state.
/// Transition ids have the form "(s,label,s')".
inline LabelledNet state_graph_to_labelled_net(const StateGraph& sg) {
  sg.validate();
  LabelledNet out;
  for (const auto& s : sg.states) out.net.add_place(s);
  for (const auto& a : sg.arcs) {
    std::string id = detail::concat("(", a.from, ",", a.label, ",", a.to, ")");
    out.net.add_transition(id);
    out.labels[id] = a.label;
    out.net.add_arc(a.from, id);
    out.net.add_arc(id, a.to);
  }
  out.initial.set(sg.initial, 1);
  return out;
}

/// True iff the transitive closure of the order is irreflexive.
inline bool check_run_wellformed(const Run& run) {
  std::map<std::string, std::vector<std::string>> successors;
  for (const auto& [a, b] : run.order) successors[a].push_back(b);
  // Depth-first cycle search: 0 = unvisited, 1 = on stack, 2 = done.
  std::map<std::string, int> state;
  auto visit = [&](auto&& self, const std::string& v) -> bool {
    state[v] = 1;
    for (const auto& w : successors[v]) {
      if (state[w] == 1) return false;
      if (state[w] == 0 && !self(self, w)) return false;
    }
    state[v] = 2;
    return true;
  };
  for (const auto& [v, next] : successors) {
    if (state[v] == 0 && !visit(visit, v)) return false;
  }
  return true;
}

inline std::string start_place(const std::string& v) { return "▶" + v; }
inline std::string end_place(const std::string& v) { return v + "■"; }
inline std::string order_place(const std::string& v, const std::string& w) { return v + "→" + w; }

/// One place per initial slot, order pair and final slot; events become
/// transitions with unit arcs; every initial slot holds one token.
inline LabelledNet run_to_labelled_net(const Run& run) {
  for (const auto& v : run.events) {
    if (!run.has_event(v)) throw Error(detail::concat("event '", v, "' has no label"));
  }
  for (const auto& [a, b] : run.order) {
    if (!run.has_event(a) || !run.has_event(b)) throw Error("order relates unknown events");
  }
  if (!check_run_wellformed(run)) throw Error("not a partial order");

  LabelledNet out;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& v : run.events) out.net.add_place(start_place(v));
  for (const auto& pair : run.order) {
    if (pairs.insert(pair).second) out.net.add_place(order_place(pair.first, pair.second));
  }
  for (const auto& v : run.events) out.net.add_place(end_place(v));
  for (const auto& v : run.events) {
    out.net.add_transition(v);
    out.labels[v] = run.labels.at(v);
    out.net.add_arc(start_place(v), v);
    out.net.add_arc(v, end_place(v));
    out.initial.set(start_place(v), 1);
  }
  for (const auto& [a, b] : pairs) {
    out.net.add_arc(a, order_place(a, b));
    out.net.add_arc(order_place(a, b), b);
  }
  return out;
}

/// Token trail on the converted net carrying the same values as the flow.
inline TokenTrail flow_to_trail(const CompactTokenFlow& x) {
  TokenTrail out;
  for (const auto& [v, value] : x.initial) out.set(start_place(v), value);
  for (const auto& [pair, value] : x.order) out.set(order_place(pair.first, pair.second), value);
  for (const auto& [v, value] : x.final) out.set(end_place(v), value);
  return out;
}

/// Sequential net c0 -e1-> c1 ... -en-> cn; cn is its only sink place.
inline LabelledNet trace_to_labelled_net(const Trace& trace) {
  if (trace.empty()) throw Error("traces must be non-empty");
  LabelledNet out;
  out.net.add_place("c0");
  for (std::size_t i = 1; i <= trace.size(); ++i) {
    const std::string e = detail::concat("e", i);
    const std::string c = detail::concat("c", i);
    out.net.add_place(c);
    out.net.add_transition(e);
    out.labels[e] = trace[i - 1];
    out.net.add_arc(detail::concat("c", i - 1), e);
    out.net.add_arc(e, c);
  }
  out.initial.set("c0", 1);
  return out;
}

}  // namespace ttsynth

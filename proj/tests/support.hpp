#pragma once

// Fixtures, brute-force oracles and random generators shared by the unit and
// acceptance suites. The oracles deliberately avoid the library's ILP, region
// and trail code paths: they enumerate and re-evaluate from the raw arcs.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ttsynth/ttsynth.hpp"

namespace ttsynth::testing {

// ---------------------------------------------------------------------------
// Fixtures

/// c0 -e_a-> c1 -e_b-> c2, one token on c0.
inline LabelledNet e_seq() {
  LabelledNet n;
  for (const char* p : {"c0", "c1", "c2"}) n.net.add_place(p);
  n.net.add_transition("e_a");
  n.net.add_transition("e_b");
  n.labels = {{"e_a", "a"}, {"e_b", "b"}};
  n.net.add_arc("c0", "e_a");
  n.net.add_arc("e_a", "c1");
  n.net.add_arc("c1", "e_b");
  n.net.add_arc("e_b", "c2");
  n.initial.set("c0", 1);
  return n;
}

/// c0 -e1-> c1 -e2-> c2, both transitions labelled a.
inline LabelledNet e_dup() {
  LabelledNet n;
  for (const char* p : {"c0", "c1", "c2"}) n.net.add_place(p);
  n.net.add_transition("e1");
  n.net.add_transition("e2");
  n.labels = {{"e1", "a"}, {"e2", "a"}};
  n.net.add_arc("c0", "e1");
  n.net.add_arc("e1", "c1");
  n.net.add_arc("c1", "e2");
  n.net.add_arc("e2", "c2");
  n.initial.set("c0", 1);
  return n;
}

inline LabelledNet one_step(const std::string& from, const std::string& t, const std::string& to) {
  LabelledNet n;
  n.net.add_place(from);
  n.net.add_place(to);
  n.net.add_transition(t);
  n.labels[t] = "a";
  n.net.add_arc(from, t);
  n.net.add_arc(t, to);
  n.initial.set(from, 1);
  return n;
}

inline LabelledNet e_two_a() { return one_step("d0", "f_a", "d1"); }
inline LabelledNet e_two_b() { return one_step("g0", "h_a", "g1"); }

/// Two disjoint one-step chains with distinct labels: c0 -a-> c1, c2 -b-> c3.
inline LabelledNet two_chains() {
  LabelledNet n;
  for (const char* p : {"c0", "c1", "c2", "c3"}) n.net.add_place(p);
  n.net.add_transition("t_a");
  n.net.add_transition("t_b");
  n.labels = {{"t_a", "a"}, {"t_b", "b"}};
  n.net.add_arc("c0", "t_a");
  n.net.add_arc("t_a", "c1");
  n.net.add_arc("c2", "t_b");
  n.net.add_arc("t_b", "c3");
  n.initial.set("c0", 1);
  n.initial.set("c2", 1);
  return n;
}

inline PlaceBehavior behavior(std::map<std::string, int> consume, std::map<std::string, int> produce, int initial) {
  PlaceBehavior pb;
  for (const auto& [l, w] : consume) pb.consume.set(l, w);
  for (const auto& [l, w] : produce) pb.produce.set(l, w);
  pb.initial = initial;
  return pb;
}

inline Marking marking(std::map<std::string, int> values) {
  Marking m;
  for (const auto& [p, v] : values) m.set(p, v);
  return m;
}

// ---------------------------------------------------------------------------
// Enumeration helpers

/// Calls `visit` for every vector in {0..k}^n (last index fastest).
inline void for_each_vector(std::size_t n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> v(n, 0);
  for (;;) {
    visit(v);
    std::size_t i = n;
    while (i > 0 && v[i - 1] == k) v[--i] = 0;
    if (i == 0) return;
    ++v[i - 1];
  }
}

inline bool leq(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

/// Componentwise-minimal non-zero vectors of a set.
inline std::set<std::vector<int>> minimal_nonzero(const std::vector<std::vector<int>>& points) {
  std::vector<std::vector<int>> nonzero;
  for (const auto& p : points) {
    bool zero = true;
    for (int x : p) zero = zero && x == 0;
    if (!zero) nonzero.push_back(p);
  }
  std::set<std::vector<int>> out;
  for (const auto& p : nonzero) {
    bool minimal = true;
    for (const auto& q : nonzero) minimal = minimal && (q == p || !leq(q, p));
    if (minimal) out.insert(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Region oracle

/// Raw rise and initial-sum test of a dense vector indexed like spec.places(), computed
/// straight from the arc multisets.
inline bool oracle_is_region(const Specification& spec, const std::vector<int>& r,
                             const std::vector<std::string>& zero_places = {}) {
  std::map<std::string, int> value;
  const auto places = spec.places();
  for (std::size_t i = 0; i < places.size(); ++i) value[places[i]] = r[i];
  for (const auto& c : zero_places) {
    if (value.at(c) != 0) return false;
  }
  std::map<std::string, std::int64_t> rise_of_label;
  std::optional<std::int64_t> initial;
  for (const auto& net : spec.nets()) {
    std::map<std::string, std::int64_t> rise;
    for (const auto& t : net.net.transitions()) rise[t] = 0;
    for (const auto& [arc, w] : net.net.arcs()) {
      const std::int64_t weight = w.convert_to<std::int64_t>();
      if (net.net.has_transition(arc.first)) {
        rise[arc.first] += weight * value.at(arc.second);
      } else {
        rise[arc.second] -= weight * value.at(arc.first);
      }
    }
    for (const auto& [t, x] : rise) {
      auto [it, first] = rise_of_label.emplace(net.labels.at(t), x);
      if (!first && it->second != x) return false;
    }
    std::int64_t sum = 0;
    for (const auto& [c, tokens] : net.initial) sum += tokens.convert_to<std::int64_t>() * value.at(c);
    if (initial && *initial != sum) return false;
    initial = sum;
  }
  return true;
}

inline std::set<std::vector<int>> oracle_minimal_regions(const Specification& spec, int k,
                                                         const std::vector<std::string>& zero_places = {}) {
  std::vector<std::vector<int>> feasible;
  for_each_vector(spec.places().size(), k, [&](const std::vector<int>& r) {
    if (oracle_is_region(spec, r, zero_places)) feasible.push_back(r);
  });
  return minimal_nonzero(feasible);
}

inline std::vector<int> dense(const Specification& spec, const Region& r) {
  std::vector<int> out;
  for (const auto& c : spec.places()) out.push_back(r.marking.count(c).convert_to<int>());
  return out;
}

inline std::set<std::vector<int>> dense_set(const Specification& spec, const std::vector<Region>& regions) {
  std::set<std::vector<int>> out;
  for (const auto& r : regions) out.insert(dense(spec, r));
  return out;
}

// ---------------------------------------------------------------------------
// ILP oracle

struct OracleOptimum {
  bool feasible = false;
  std::int64_t objective = 0;
  ilp::Assignment assignment;  // lexicographically greatest optimum
};

inline OracleOptimum oracle_solve(const ilp::IlpModel& model) {
  const auto& vars = model.variables();
  std::vector<std::int64_t> lower, upper;
  for (const auto& v : vars) {
    lower.push_back(v.lower.convert_to<std::int64_t>());
    upper.push_back(v.upper.convert_to<std::int64_t>());
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i].id] = i;

  OracleOptimum best;
  std::vector<std::int64_t> x = lower;
  for (;;) {
    bool ok = true;
    for (const auto& c : model.constraints()) {
      std::int64_t lhs = 0;
      for (const auto& [id, a] : c.terms) lhs += a.convert_to<std::int64_t>() * x[index.at(id)];
      const std::int64_t b = c.rhs.convert_to<std::int64_t>();
      ok = c.relation == ilp::Relation::less_equal ? lhs <= b
           : c.relation == ilp::Relation::equal    ? lhs == b
                                                   : lhs >= b;
      if (!ok) break;
    }
    if (ok) {
      std::int64_t z = 0;
      for (const auto& [id, a] : model.objective()) z += a.convert_to<std::int64_t>() * x[index.at(id)];
      // Enumeration runs in increasing lexicographic order.
      if (!best.feasible || z <= best.objective) {
        best.feasible = true;
        best.objective = z;
        for (std::size_t i = 0; i < vars.size(); ++i) best.assignment[vars[i].id] = x[i];
      }
    }
    std::size_t i = x.size();
    while (i > 0 && x[i - 1] == upper[i - 1]) {
      x[i - 1] = lower[i - 1];
      --i;
    }
    if (i == 0) break;
    ++x[i - 1];
  }
  return best;
}

// ---------------------------------------------------------------------------
// Random generators

/// Random bounded model: <= 8 variables with bounds in [0,3], <= 12 rows.
inline ilp::IlpModel random_ilp_model(std::mt19937& rng) {
  std::uniform_int_distribution<int> nvars(1, 8), ncons(0, 12), bound(0, 3), coef(-3, 3), rel(0, 2), sparse(0, 2);
  ilp::IlpModel m;
  const int n = nvars(rng);
  for (int i = 0; i < n; ++i) {
    int a = bound(rng), b = bound(rng);
    m.add_variable("v" + std::to_string(i), std::min(a, b), std::max(a, b));
  }
  // Most models get a planted point so that the feasible case is well covered.
  ilp::Assignment planted;
  for (const auto& v : m.variables()) {
    std::uniform_int_distribution<int> value(static_cast<int>(v.lower), static_cast<int>(v.upper));
    planted[v.id] = value(rng);
  }
  const bool plant = sparse(rng) != 0;
  const int c = ncons(rng);
  for (int j = 0; j < c; ++j) {
    ilp::LinearExpression terms;
    for (int i = 0; i < n; ++i) {
      if (sparse(rng) != 0) terms["v" + std::to_string(i)] = coef(rng);
    }
    const auto relation = static_cast<ilp::Relation>(rel(rng));
    std::uniform_int_distribution<int> rhs(-3, 3 * n);
    Integer value = rhs(rng);
    if (plant) {
      value = ilp::evaluate(terms, planted);
      if (relation == ilp::Relation::less_equal) value += sparse(rng);
      if (relation == ilp::Relation::greater_equal) value -= sparse(rng);
    }
    m.add_constraint(terms, relation, value);
  }
  ilp::LinearExpression objective;
  for (int i = 0; i < n; ++i) objective["v" + std::to_string(i)] = coef(rng);
  m.set_objective(objective);
  return m;
}


/// Random labelled net with the given node counts over labels a, b, c.
inline LabelledNet random_net(std::mt19937& rng, int places, int transitions, int max_weight, int labels) {
  std::uniform_int_distribution<int> coin(0, 2), weight(1, max_weight), label(0, labels - 1), tokens(0, 1);
  LabelledNet n;
  for (int i = 0; i < places; ++i) n.net.add_place("c" + std::to_string(i));
  for (int j = 0; j < transitions; ++j) {
    const std::string t = "t" + std::to_string(j);
    n.net.add_transition(t);
    n.labels[t] = std::string(1, static_cast<char>('a' + label(rng)));
  }
  for (int i = 0; i < places; ++i) {
    for (int j = 0; j < transitions; ++j) {
      const std::string p = "c" + std::to_string(i), t = "t" + std::to_string(j);
      if (coin(rng) == 0) n.net.add_arc(p, t, weight(rng));
      if (coin(rng) == 0) n.net.add_arc(t, p, weight(rng));
    }
  }
  for (int i = 0; i < places; ++i) {
    if (tokens(rng) == 1) n.initial.set("c" + std::to_string(i), tokens(rng) + 1);
  }
  if (n.initial.empty() && places > 0) n.initial.set("c0", 1);
  return n;
}

/// Random specification: up to 3 nets, 6 places and 5 transitions overall.
inline Specification random_spec(std::mt19937& rng, int max_weight = 2) {
  std::uniform_int_distribution<int> net_count(1, 3);
  const int nets = net_count(rng);
  int places_left = 6, transitions_left = 5;
  Specification spec;
  for (int i = 0; i < nets; ++i) {
    const int remaining_nets = nets - i - 1;
    std::uniform_int_distribution<int> pc(1, std::max(1, places_left - remaining_nets));
    std::uniform_int_distribution<int> tc(0, std::max(0, transitions_left - remaining_nets));
    const int p = std::min(pc(rng), 3);
    const int t = std::min(tc(rng), 3);
    places_left -= p;
    transitions_left -= t;
    spec.add(random_net(rng, p, t, max_weight, 3));
  }
  return spec;
}

inline Run random_run(std::mt19937& rng, int max_events) {
  std::uniform_int_distribution<int> count(1, max_events), label(0, 1), coin(0, 1);
  Run run;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const std::string v = "v" + std::to_string(i);
    run.events.push_back(v);
    run.labels[v] = std::string(1, static_cast<char>('a' + label(rng)));
  }
  // Forward pairs only, so the order is acyclic.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng) == 1) run.order.emplace_back(run.events[i], run.events[j]);
    }
  }
  return run;
}

/// Random state graph with every state reachable from s0.
inline StateGraph random_state_graph(std::mt19937& rng, int max_states, int max_arcs, int labels) {
  std::uniform_int_distribution<int> count(1, max_states);
  const int n = count(rng);
  StateGraph sg;
  for (int i = 0; i < n; ++i) sg.states.push_back("s" + std::to_string(i));
  sg.initial = "s0";
  std::uniform_int_distribution<int> label(0, labels - 1);
  std::set<StateArc> arcs;
  // Spanning arcs first.
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    arcs.insert({sg.states[parent(rng)], std::string(1, static_cast<char>('a' + label(rng))), sg.states[i]});
  }
  std::uniform_int_distribution<int> extra(0, std::max(0, max_arcs - (n - 1))), state(0, n - 1);
  const int m = extra(rng);
  for (int i = 0; i < m; ++i) {
    arcs.insert({sg.states[state(rng)], std::string(1, static_cast<char>('a' + label(rng))), sg.states[state(rng)]});
  }
  sg.arcs.assign(arcs.begin(), arcs.end());
  return sg;
}

inline PlaceBehavior random_behavior(std::mt19937& rng, const std::vector<std::string>& labels, int max) {
  std::uniform_int_distribution<int> value(0, max);
  PlaceBehavior pb;
  for (const auto& l : labels) {
    pb.consume.set(l, value(rng));
    pb.produce.set(l, value(rng));
  }
  pb.initial = value(rng);
  return pb;
}

/// Every slot of a run's flow domain, in a fixed order.
struct Slots {
  std::vector<std::string> initial, final;
  std::vector<std::pair<std::string, std::string>> order;
  std::size_t size() const { return initial.size() + final.size() + order.size(); }

  CompactTokenFlow flow(const std::vector<int>& v) const {
    CompactTokenFlow x;
    std::size_t i = 0;
    for (const auto& e : initial) x.initial[e] = v[i++];
    for (const auto& p : order) x.order[p] = v[i++];
    for (const auto& e : final) x.final[e] = v[i++];
    return x;
  }
};

inline Slots slots_of(const Run& r) { return {r.events, r.events, r.order}; }

/// Classical state region: every arc of a label enters, exits or stays.
inline bool classical_region(const StateGraph& sg, const std::set<std::string>& in) {
  std::map<std::string, int> crossing;
  for (const auto& a : sg.arcs) {
    const int effect = int(in.count(a.to)) - int(in.count(a.from));
    auto [it, first] = crossing.emplace(a.label, effect);
    if (!first && it->second != effect) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// State-graph isomorphism for deterministic rooted graphs

/// True iff both graphs are deterministic, all states are reachable, and a
/// label-preserving bijection maps root to root and arcs onto arcs.
/// `relabel` maps arc labels of `a` before comparison.
inline bool deterministic_isomorphic(const StateGraph& a, const StateGraph& b,
                                     const std::map<std::string, std::string>& relabel = {}) {
  auto successors = [](const StateGraph& g, const std::map<std::string, std::string>& names)
      -> std::optional<std::map<std::string, std::map<std::string, std::string>>> {
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const auto& s : g.states) out[s];
    for (const auto& arc : g.arcs) {
      auto it = names.find(arc.label);
      const std::string label = it == names.end() ? arc.label : it->second;
      if (!out[arc.from].emplace(label, arc.to).second) return std::nullopt;
    }
    return out;
  };
  auto sa = successors(a, relabel);
  auto sb = successors(b, {});
  if (!sa || !sb || a.states.size() != b.states.size() || a.arcs.size() != b.arcs.size()) return false;
  std::map<std::string, std::string> forward, backward;
  std::deque<std::pair<std::string, std::string>> queue{{a.initial, b.initial}};
  forward[a.initial] = b.initial;
  backward[b.initial] = a.initial;
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    const auto& ox = sa->at(x);
    const auto& oy = sb->at(y);
    if (ox.size() != oy.size()) return false;
    for (const auto& [label, nx] : ox) {
      auto it = oy.find(label);
      if (it == oy.end()) return false;
      const std::string& ny = it->second;
      auto f = forward.find(nx);
      auto g = backward.find(ny);
      if (f == forward.end() && g == backward.end()) {
        forward[nx] = ny;
        backward[ny] = nx;
        queue.emplace_back(nx, ny);
      } else if (f == forward.end() || g == backward.end() || f->second != ny || g->second != nx) {
        return false;
      }
    }
  }
  return forward.size() == a.states.size();
}

}  // namespace ttsynth::testing

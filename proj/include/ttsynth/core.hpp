#pragma once

// Place/transition nets, markings, the firing rule and bounded reachability.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace ttsynth {

/// Exact integer used for token counts, arc weights and ILP coefficients.
using Integer = boost::multiprecision::mpz_int;

/// Every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream out;
  (out << ... << parts);
  return out.str();
}

}  // namespace detail

/// Outcome of a validity check: empty `violated` means valid. Otherwise it
/// names the first failing condition and `witness` the offending element.
template <typename Condition>
struct Verdict {
  std::optional<Condition> violated;
  std::string witness;

  bool valid() const { return !violated.has_value(); }
  explicit operator bool() const { return valid(); }
};

/// A finite multiset: element -> positive count. Zero counts are never stored,
/// so equality is extensional.
template <typename Key>
class Multiset {
 public:
  using Storage = std::map<Key, Integer>;
  using const_iterator = typename Storage::const_iterator;

  Multiset() = default;
  Multiset(std::initializer_list<std::pair<const Key, Integer>> entries) {
    for (const auto& [key, count] : entries) add(key, count);
  }

  Integer count(const Key& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? Integer(0) : it->second;
  }

  void set(const Key& key, const Integer& count) {
    if (count < 0) throw Error("multiset counts must be non-negative");
    if (count == 0) {
      counts_.erase(key);
    } else {
      counts_[key] = count;
    }
  }

  void add(const Key& key, const Integer& count) { set(key, this->count(key) + count); }

  /// Removes `count` copies; throws if fewer are present.
  void remove(const Key& key, const Integer& count) {
    Integer remaining = this->count(key) - count;
    if (remaining < 0) throw Error("multiset underflow");
    set(key, remaining);
  }

  /// Componentwise `*this >= other`.
  bool covers(const Multiset& other) const {
    return std::all_of(other.begin(), other.end(),
                       [this](const auto& entry) { return count(entry.first) >= entry.second; });
  }

  Integer total() const {
    Integer sum = 0;
    for (const auto& entry : counts_) sum += entry.second;
    return sum;
  }

  bool contains(const Key& key) const { return counts_.count(key) != 0; }
  bool empty() const { return counts_.empty(); }
  std::size_t support_size() const { return counts_.size(); }
  const_iterator begin() const { return counts_.begin(); }
  const_iterator end() const { return counts_.end(); }

  Multiset& operator+=(const Multiset& other) {
    for (const auto& [key, count] : other) add(key, count);
    return *this;
  }
  Multiset& operator-=(const Multiset& other) {
    for (const auto& [key, count] : other) remove(key, count);
    return *this;
  }

  friend bool operator==(const Multiset& a, const Multiset& b) { return a.counts_ == b.counts_; }
  friend bool operator<(const Multiset& a, const Multiset& b) { return a.counts_ < b.counts_; }

 private:
  Storage counts_;
};

/// Token distribution over place identifiers.
using Marking = Multiset<std::string>;

inline std::ostream& operator<<(std::ostream& out, const Marking& m) {
  out << '{';
  bool first = true;
  for (const auto& [place, count] : m) {
    out << (first ? "" : ", ") << place << ':' << count;
    first = false;
  }
  return out << '}';
}

inline std::string to_string(const Marking& m) {
  std::ostringstream out;
  out << m;
  return out.str();
}

/// Directed arc between a place and a transition (either direction).
using Arc = std::pair<std::string, std::string>;

/// Unmarked place/transition net. Nodes keep insertion order.
class PetriNet {
 public:
  void add_place(const std::string& id) {
    claim(id);
    places_.push_back(id);
    kinds_.emplace(id, Kind::place);
  }

  void add_transition(const std::string& id) {
    claim(id);
    transitions_.push_back(id);
    kinds_.emplace(id, Kind::transition);
    preset_.emplace(id, Marking{});
    postset_.emplace(id, Marking{});
  }

  /// Adds `weight` to the arc from -> to. One endpoint must be a place, the
  /// other a transition.
  void add_arc(const std::string& from, const std::string& to, const Integer& weight = 1) {
    if (weight < 1) throw Error(detail::concat("arc ", from, " -> ", to, ": weight must be >= 1"));
    auto from_kind = kind_of(from);
    auto to_kind = kind_of(to);
    if (!from_kind) throw Error(detail::concat("arc source '", from, "' is not a node of the net"));
    if (!to_kind) throw Error(detail::concat("arc target '", to, "' is not a node of the net"));
    if (*from_kind == *to_kind) {
      throw Error(detail::concat("arc ", from, " -> ", to, " must connect a place and a transition"));
    }
    arcs_.add({from, to}, weight);
    if (*from_kind == Kind::place) {
      preset_[to].add(from, weight);
    } else {
      postset_[from].add(to, weight);
    }
  }

  bool has_place(const std::string& id) const { return kind_of(id) == Kind::place; }
  bool has_transition(const std::string& id) const { return kind_of(id) == Kind::transition; }
  bool has_node(const std::string& id) const { return kinds_.count(id) != 0; }

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<std::string>& transitions() const { return transitions_; }
  const Multiset<Arc>& arcs() const { return arcs_; }

  Integer weight(const std::string& from, const std::string& to) const { return arcs_.count({from, to}); }

  /// Weighted preset of a transition.
  const Marking& preset(const std::string& t) const { return lookup(preset_, t); }
  /// Weighted postset of a transition.
  const Marking& postset(const std::string& t) const { return lookup(postset_, t); }

  /// Transitions that consume from `place` (document order).
  std::vector<std::string> place_postset(const std::string& place) const {
    std::vector<std::string> out;
    for (const auto& t : transitions_) {
      if (preset_.at(t).contains(place)) out.push_back(t);
    }
    return out;
  }

  friend bool operator==(const PetriNet& a, const PetriNet& b) {
    return a.places_ == b.places_ && a.transitions_ == b.transitions_ && a.arcs_ == b.arcs_;
  }

 private:
  enum class Kind { place, transition };

  std::optional<Kind> kind_of(const std::string& id) const {
    auto it = kinds_.find(id);
    if (it == kinds_.end()) return std::nullopt;
    return it->second;
  }

  void claim(const std::string& id) const {
    if (id.empty()) throw Error("node identifiers must be non-empty");
    if (kinds_.count(id) != 0) throw Error(detail::concat("duplicate node identifier '", id, "'"));
  }

  const Marking& lookup(const std::map<std::string, Marking>& sets, const std::string& t) const {
    auto it = sets.find(t);
    if (it == sets.end()) throw Error(detail::concat("unknown transition '", t, "'"));
    return it->second;
  }

  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::map<std::string, Kind> kinds_;
  Multiset<Arc> arcs_;
  std::map<std::string, Marking> preset_;
  std::map<std::string, Marking> postset_;
};

inline void require_places(const PetriNet& net, const Marking& m, std::string_view what) {
  for (const auto& [place, count] : m) {
    if (!net.has_place(place)) throw Error(detail::concat(what, " marks unknown place '", place, "'"));
  }
}

struct MarkedPetriNet {
  PetriNet net;
  Marking initial;

  void validate() const { require_places(net, initial, "initial marking"); }

  friend bool operator==(const MarkedPetriNet&, const MarkedPetriNet&) = default;
};

/// Marked net whose transitions carry (not necessarily distinct) labels.
struct LabelledNet {
  PetriNet net;
  Marking initial;
  std::map<std::string, std::string> labels;
  /// Optional explicit final place, used by discovery mode instead of the
  /// structural guess.
  std::optional<std::string> final_place;

  const std::string& label(const std::string& transition) const {
    auto it = labels.find(transition);
    if (it == labels.end()) throw Error(detail::concat("unknown transition '", transition, "'"));
    return it->second;
  }

  void validate() const {
    require_places(net, initial, "initial marking");
    for (const auto& t : net.transitions()) {
      if (labels.count(t) == 0) throw Error(detail::concat("transition '", t, "' has no label"));
    }
    for (const auto& [t, label] : labels) {
      if (!net.has_transition(t)) throw Error(detail::concat("label given for unknown transition '", t, "'"));
    }
    if (final_place && !net.has_place(*final_place)) {
      throw Error(detail::concat("final place '", *final_place, "' is not a place"));
    }
  }

  MarkedPetriNet marked() const { return {net, initial}; }

  friend bool operator==(const LabelledNet&, const LabelledNet&) = default;
};

/// A set of labelled nets with globally unique node identifiers.
class Specification {
 public:
  Specification() = default;
  explicit Specification(const std::vector<LabelledNet>& nets) {
    for (const auto& net : nets) add(net);
  }

  /// Adds a net. Identifiers that clash with nodes of earlier nets get the
  /// prefix "n<index>:" (1-based net index). Returns the stored net.
  const LabelledNet& add(const LabelledNet& input) {
    input.validate();
    const std::size_t index = nets_.size() + 1;
    std::map<std::string, std::string> rename;
    std::set<std::string> used;
    auto fresh = [&](const std::string& id) {
      std::string candidate = id;
      std::string prefix = detail::concat("n", index, ":");
      while (taken_.count(candidate) != 0 || used.count(candidate) != 0 ||
             (candidate != id && input.net.has_node(candidate))) {
        candidate = prefix + candidate;
      }
      used.insert(candidate);
      rename[id] = candidate;
      return candidate;
    };

    LabelledNet net;
    for (const auto& p : input.net.places()) net.net.add_place(fresh(p));
    for (const auto& t : input.net.transitions()) {
      net.net.add_transition(fresh(t));
      net.labels[rename.at(t)] = input.labels.at(t);
    }
    for (const auto& [arc, weight] : input.net.arcs()) {
      net.net.add_arc(rename.at(arc.first), rename.at(arc.second), weight);
    }
    for (const auto& [place, count] : input.initial) net.initial.set(rename.at(place), count);
    if (input.final_place) net.final_place = rename.at(*input.final_place);

    for (const auto& [from, to] : rename) taken_.insert(to);
    nets_.push_back(std::move(net));
    return nets_.back();
  }

  const std::vector<LabelledNet>& nets() const { return nets_; }
  std::size_t size() const { return nets_.size(); }
  bool empty() const { return nets_.empty(); }

  /// All places of all nets in ingestion order.
  std::vector<std::string> places() const {
    std::vector<std::string> out;
    for (const auto& n : nets_) out.insert(out.end(), n.net.places().begin(), n.net.places().end());
    return out;
  }

  /// Labels in order of first occurrence.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& n : nets_) {
      for (const auto& t : n.net.transitions()) {
        if (seen.insert(n.labels.at(t)).second) out.push_back(n.labels.at(t));
      }
    }
    return out;
  }

 private:
  std::vector<LabelledNet> nets_;
  std::set<std::string> taken_;
};

// ---------------------------------------------------------------------------
// Firing rule

inline Marking preset(const PetriNet& net, const std::string& t) { return net.preset(t); }
inline Marking postset(const PetriNet& net, const std::string& t) { return net.postset(t); }

inline bool is_enabled(const PetriNet& net, const Marking& m, const std::string& t) {
  return m.covers(net.preset(t));
}

inline std::vector<std::string> enabled_transitions(const MarkedPetriNet& n, const Marking& m) {
  require_places(n.net, m, "marking");
  std::vector<std::string> out;
  for (const auto& t : n.net.transitions()) {
    if (is_enabled(n.net, m, t)) out.push_back(t);
  }
  return out;
}

inline Marking fire(const PetriNet& net, const Marking& m, const std::string& t) {
  if (!net.has_transition(t)) throw Error(detail::concat("unknown transition '", t, "'"));
  if (!is_enabled(net, m, t)) throw Error(detail::concat("transition '", t, "' is not enabled"));
  Marking next = m;
  next -= net.preset(t);
  next += net.postset(t);
  return next;
}

inline Marking fire(const MarkedPetriNet& n, const Marking& m, const std::string& t) { return fire(n.net, m, t); }

// ---------------------------------------------------------------------------
// State graphs

struct StateArc {
  std::string from;
  std::string label;
  std::string to;

  friend bool operator==(const StateArc&, const StateArc&) = default;
  friend auto operator<=>(const StateArc&, const StateArc&) = default;
};

/// Rooted labelled transition graph.
struct StateGraph {
  std::vector<std::string> states;
  std::string initial;
  std::vector<StateArc> arcs;

  bool has_state(const std::string& s) const { return std::find(states.begin(), states.end(), s) != states.end(); }

  /// States that cannot be reached from the initial state.
  std::vector<std::string> unreachable_states() const {
    std::set<std::string> seen{initial};
    std::deque<std::string> queue{initial};
    while (!queue.empty()) {
      auto s = queue.front();
      queue.pop_front();
      for (const auto& a : arcs) {
        if (a.from == s && seen.insert(a.to).second) queue.push_back(a.to);
      }
    }
    std::vector<std::string> out;
    for (const auto& s : states) {
      if (seen.count(s) == 0) out.push_back(s);
    }
    return out;
  }

  /// Throws unless the initial state exists, arcs connect known states and
  /// every state is reachable from the initial one.
  void validate() const {
    if (!has_state(initial)) throw Error(detail::concat("initial state '", initial, "' is not a state"));
    std::set<std::string> unique(states.begin(), states.end());
    if (unique.size() != states.size()) throw Error("duplicate state identifier");
    for (const auto& a : arcs) {
      if (!has_state(a.from) || !has_state(a.to)) {
        throw Error(detail::concat("arc ", a.from, " -", a.label, "-> ", a.to, " references an unknown state"));
      }
    }
    auto lost = unreachable_states();
    if (!lost.empty()) throw Error(detail::concat("unreachable state '", lost.front(), "'"));
  }
};

/// Reachability graph: state `i` of `graph` is named "m<i>" and carries
/// `markings[i]`. Arcs are labelled with transition identifiers.
struct ReachabilityGraph {
  std::vector<Marking> markings;
  StateGraph graph;
};

/// Breadth-first exploration from the initial marking. Throws
/// "state cap exceeded" once more than `state_cap` markings are discovered.
inline ReachabilityGraph reachability_graph(const MarkedPetriNet& n, std::size_t state_cap) {
  if (state_cap < 1) throw Error("state cap must be positive");
  n.validate();
  ReachabilityGraph rg;
  std::map<Marking, std::size_t> index;
  auto intern = [&](const Marking& m) {
    auto [it, inserted] = index.emplace(m, rg.markings.size());
    if (inserted) {
      if (rg.markings.size() >= state_cap) throw Error("state cap exceeded");
      rg.markings.push_back(m);
      rg.graph.states.push_back(detail::concat("m", it->second));
    }
    return it->second;
  };
  intern(n.initial);
  rg.graph.initial = rg.graph.states.front();
  for (std::size_t i = 0; i < rg.markings.size(); ++i) {
    for (const auto& t : n.net.transitions()) {
      if (!is_enabled(n.net, rg.markings[i], t)) continue;
      std::size_t j = intern(fire(n.net, rg.markings[i], t));
      rg.graph.arcs.push_back({rg.graph.states[i], t, rg.graph.states[j]});
    }
  }
  return rg;
}

}  // namespace ttsynth

#pragma once

// From regions to places, and from places to the synthesised net.

#include <cstddef>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ttsynth/core.hpp"
#include "ttsynth/regions.hpp"
#include "ttsynth/semantics.hpp"

namespace ttsynth {

struct PlaceDefinition {
  PlaceBehavior behavior;
  Region source_region;
};

struct SynthesisResult {
  MarkedPetriNet net;
  /// Kept places; `places[i]` is the place `net.net.places()[i]`.
  std::vector<PlaceDefinition> places;
  std::vector<std::string> label_alphabet;
  std::size_t region_count = 0;
  bool truncated = false;
};

/// One place per region: each label consumes the smallest inflow any of its
/// transitions sees and produces that plus the shared rise. The initial
/// marking is the initial token sum on the first net.
inline PlaceDefinition place_from_region(const Specification& spec, const Region& r) {
  if (auto verdict = verify_region(spec, r); !verdict) {
    throw Error(detail::concat("not a region: ", to_string(*verdict.violated), " fails at ", verdict.witness));
  }
  PlaceDefinition out;
  out.source_region = r;
  std::set<std::string> seen;
  for (const auto& net : spec.nets()) {
    for (const auto& e : net.net.transitions()) {
      const auto& label = net.label(e);
      const Integer in = inflow(net, r.marking, e);
      if (seen.insert(label).second || in < out.behavior.consume.count(label)) {
        out.behavior.consume.set(label, in);
        out.behavior.produce.set(label, in + rise(net, r.marking, e));
      }
    }
  }
  out.behavior.initial = initial_sum(spec.nets().front(), r.marking);
  return out;
}

/// Keeps the first place of every (consume, produce, initial) triple.
inline std::vector<PlaceDefinition> dedupe_places(const std::vector<PlaceDefinition>& places) {
  std::vector<PlaceDefinition> out;
  for (const auto& p : places) {
    bool duplicate = false;
    for (const auto& kept : out) duplicate = duplicate || kept.behavior == p.behavior;
    if (!duplicate) out.push_back(p);
  }
  return out;
}

/// Assembles one transition per label and places "p1", "p2", ... from the
/// given definitions (all-zero places are skipped).
inline SynthesisResult assemble(const std::vector<std::string>& labels, const std::vector<PlaceDefinition>& places) {
  SynthesisResult result;
  result.label_alphabet = labels;
  std::set<std::string> label_set(labels.begin(), labels.end());
  for (const auto& label : labels) result.net.net.add_transition(label);
  std::size_t n = 0;
  for (const auto& p : places) {
    const auto& b = p.behavior;
    if (b.consume.empty() && b.produce.empty() && b.initial == 0) continue;
    std::string id = detail::concat("p", ++n);
    while (label_set.count(id) != 0) id = "_" + id;
    result.net.net.add_place(id);
    for (const auto& [label, w] : b.consume) result.net.net.add_arc(id, label, w);
    for (const auto& [label, w] : b.produce) result.net.net.add_arc(label, id, w);
    result.net.initial.set(id, b.initial);
    result.places.push_back(p);
  }
  return result;
}

inline SynthesisResult synthesize(const RegionProblem& problem) {
  RegionEnumeration regions = enumerate_minimal_regions(problem);
  std::vector<PlaceDefinition> places;
  for (const auto& r : regions.regions) places.push_back(place_from_region(problem.spec, r));
  SynthesisResult result = assemble(problem.spec.labels(), dedupe_places(places));
  result.region_count = regions.regions.size();
  result.truncated = regions.truncated;
  return result;
}

}  // namespace ttsynth

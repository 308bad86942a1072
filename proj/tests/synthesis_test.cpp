#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace ttsynth {
namespace {

using testing::behavior;
using testing::e_dup;
using testing::e_seq;
using testing::marking;

Region region(std::map<std::string, int> values, int k = 1) { return Region{marking(std::move(values)), k}; }

TEST(PlaceFromRegion, Examples) {
  Specification seq({e_seq()});
  auto p = place_from_region(seq, region({{"c0", 1}}));
  EXPECT_EQ(p.behavior, behavior({{"a", 1}}, {}, 1));
  EXPECT_EQ(p.behavior.consume.count("b"), 0);
  EXPECT_EQ(p.behavior.produce.count("b"), 0);

  auto zero = place_from_region(seq, Region{});
  EXPECT_EQ(zero.behavior, PlaceBehavior{});

  auto dup = place_from_region(Specification({e_dup()}), region({{"c0", 2}, {"c1", 1}}, 2));
  EXPECT_EQ(dup.behavior, behavior({{"a", 1}}, {}, 2));
}

TEST(PlaceFromRegion, RejectsNonRegions) {
  EXPECT_THROW(place_from_region(Specification({e_dup()}), region({{"c0", 1}})), Error);
}

TEST(Synthesize, SequentialNetIsRecovered) {
  auto result = synthesize(RegionProblem{Specification({e_seq()}), 1, Mode::synthesis, std::nullopt});
  const auto& net = result.net.net;
  EXPECT_EQ(net.transitions(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(net.places(), (std::vector<std::string>{"p1", "p2", "p3"}));
  EXPECT_EQ(result.net.initial, marking({{"p1", 1}}));
  EXPECT_EQ(net.arcs().support_size(), 4u);
  EXPECT_EQ(net.weight("p1", "a"), 1);
  EXPECT_EQ(net.weight("a", "p2"), 1);
  EXPECT_EQ(net.weight("p2", "b"), 1);
  EXPECT_EQ(net.weight("b", "p3"), 1);
  EXPECT_EQ(result.region_count, 3u);

  auto original = reachability_graph(e_seq().marked(), 10).graph;
  auto synthesized = reachability_graph(result.net, 10).graph;
  EXPECT_TRUE(testing::deterministic_isomorphic(original, synthesized, e_seq().labels));
}

TEST(Synthesize, DuplicateLabelGivesShortLoop) {
  auto result = synthesize(RegionProblem{Specification({e_dup()}), 1, Mode::synthesis, std::nullopt});
  ASSERT_EQ(result.places.size(), 1u);
  EXPECT_EQ(result.places[0].behavior, behavior({{"a", 1}}, {{"a", 1}}, 1));
  EXPECT_EQ(result.net.net.weight("p1", "a"), 1);
  EXPECT_EQ(result.net.net.weight("a", "p1"), 1);
  EXPECT_EQ(result.net.initial, marking({{"p1", 1}}));
}

TEST(Synthesize, LargerBoundLimitsFirings) {
  auto result = synthesize(RegionProblem{Specification({e_dup()}), 2, Mode::synthesis, std::nullopt});
  ASSERT_EQ(result.places.size(), 3u);
  EXPECT_EQ(result.places[0].behavior, behavior({{"a", 1}}, {}, 2));
  EXPECT_EQ(result.places[1].behavior, behavior({{"a", 1}}, {{"a", 1}}, 1));
  EXPECT_EQ(result.places[2].behavior, behavior({}, {{"a", 1}}, 0));
  // p1 holds two tokens and a consumes one each time: at most two firings.
  auto rg = reachability_graph(result.net, 10);
  EXPECT_EQ(rg.markings.size(), 3u);
}

TEST(Synthesize, PlaceIdsAvoidLabels) {
  LabelledNet n = e_seq();
  n.labels["e_a"] = "p1";
  auto result = synthesize(RegionProblem{Specification({n}), 1, Mode::synthesis, std::nullopt});
  EXPECT_EQ(result.net.net.places().front(), "_p1");
}

TEST(DedupePlaces, Examples) {
  PlaceDefinition a{behavior({{"a", 1}}, {}, 1), {}};
  PlaceDefinition b{behavior({{"a", 1}}, {}, 2), {}};
  EXPECT_EQ(dedupe_places({a, a}).size(), 1u);
  EXPECT_EQ(dedupe_places({a, b}).size(), 2u);

  Specification seq({e_seq()});
  std::vector<PlaceDefinition> places;
  for (const auto& r : enumerate_minimal_regions(RegionProblem{seq, 1, Mode::synthesis, std::nullopt}).regions) {
    places.push_back(place_from_region(seq, r));
  }
  EXPECT_EQ(dedupe_places(places).size(), 3u);
}

void check_certificates(const Specification& spec, const SynthesisResult& result) {
  for (const auto& place : result.places) {
    const auto& r = place.source_region;
    const auto& pb = place.behavior;
    for (const auto& net : spec.nets()) {
      // Membership certificate.
      EXPECT_TRUE(is_valid_token_trail(net, restrict_to(r, net), pb).valid());
      // Rise and initial-sum consistency.
      EXPECT_EQ(initial_sum(net, r.marking), pb.initial);
      for (const auto& e : net.net.transitions()) {
        const auto& l = net.label(e);
        EXPECT_EQ(rise(net, r.marking, e), pb.produce.count(l) - pb.consume.count(l));
      }
    }
  }
}

TEST(Synthesize, RegionsCertifyMembership) {
  std::mt19937 rng(17);
  for (int round = 0; round < 40; ++round) {
    Specification spec = testing::random_spec(rng);
    auto result = synthesize(RegionProblem{spec, 1 + round % 2, Mode::synthesis, std::nullopt});
    check_certificates(spec, result);
    for (const auto& net : spec.nets()) {
      EXPECT_TRUE(std::holds_alternative<Enabled>(is_enabled(result.net, net)));
    }
  }
}

// Any behaviour for which a region is a trail on every net is dominated by
// the place built from that region: same rise and initial, larger consume.
TEST(PlaceFromRegion, MaximisesShortLoops) {
  std::mt19937 rng(23);
  int checked = 0;
  for (int round = 0; round < 12; ++round) {
    Specification spec = testing::random_spec(rng);
    const auto labels = spec.labels();
    const auto places = spec.places();
    testing::for_each_vector(places.size(), 2, [&](const std::vector<int>& v) {
      if (!testing::oracle_is_region(spec, v)) return;
      Region r;
      r.k = 2;
      for (std::size_t i = 0; i < places.size(); ++i) r.marking.set(places[i], v[i]);
      const auto built = place_from_region(spec, r).behavior;
      testing::for_each_vector(2 * labels.size() + 1, 2, [&](const std::vector<int>& w) {
        PlaceBehavior pb;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          pb.consume.set(labels[i], w[2 * i]);
          pb.produce.set(labels[i], w[2 * i + 1]);
        }
        pb.initial = w.back();
        for (const auto& net : spec.nets()) {
          if (!is_valid_token_trail(net, restrict_to(r, net), pb).valid()) return;
        }
        ++checked;
        EXPECT_EQ(built.initial, pb.initial);
        for (const auto& l : labels) {
          EXPECT_GE(built.consume.count(l), pb.consume.count(l));
          EXPECT_EQ(built.produce.count(l) - built.consume.count(l), pb.produce.count(l) - pb.consume.count(l));
        }
      });
    });
  }
  EXPECT_GT(checked, 20);
}

}  // namespace
}  // namespace ttsynth

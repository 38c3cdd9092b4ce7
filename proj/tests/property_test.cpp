// Seeded property campaigns at reduced scale; the acceptance binary runs the
// full-size versions.

#include <gtest/gtest.h>

#include <vector>

#include "gluepo/async_automata.hpp"
#include "gluepo/cts_computation.hpp"
#include "gluepo/cts_witness.hpp"
#include "gluepo/pti_computation.hpp"
#include "gluepo/pti_witness.hpp"
#include "gluepo/random_models.hpp"
#include "test_models.hpp"

using namespace gluepo;
using namespace gluepo::testing;

namespace {

constexpr std::uint64_t kPnSeeds = 40;
constexpr std::uint64_t kCtsSeeds = 30;
constexpr std::uint64_t kAsyncSeeds = 30;
constexpr unsigned kBound = 4;

const MulticastBlockMode kModes[] = {MulticastBlockMode::listening, MulticastBlockMode::cannot_receive};

// Exhaustive reflexivity, antisymmetry and transitivity of the closure.
::testing::AssertionResult partial_order(const Lpo& l) {
  OrderIndex idx(l);
  const std::size_t n = idx.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (!idx.leq(a, a)) return ::testing::AssertionFailure() << "not reflexive at " << idx.elements()[a].str();
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && idx.leq(a, b) && idx.leq(b, a))
        return ::testing::AssertionFailure() << "not antisymmetric: " << idx.elements()[a].str();
      if (!idx.leq(a, b)) continue;
      for (std::size_t c = 0; c < n; ++c)
        if (idx.leq(b, c) && !idx.leq(a, c))
          return ::testing::AssertionFailure() << "not transitive via " << idx.elements()[b].str();
    }
  }
  return ::testing::AssertionSuccess();
}

template <class G, class W, class V>
void all_pairs_separate(const std::set<G>& gs, W witness, V verify, const std::string& what) {
  std::vector<const G*> v;
  for (const auto& g : gs) v.push_back(&g);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) {
      auto w = witness(*v[i], *v[j]);
      if (i == j) {
        EXPECT_FALSE(w.has_value()) << what;
        continue;
      }
      ASSERT_TRUE(w.has_value()) << what;
      EXPECT_TRUE(verify(*v[i], *v[j], *w)) << what << ": " << describe(*w);
    }
}

}  // namespace

TEST(PnProperties, FireConservesTokens) {
  for (std::uint64_t s = 0; s < kPnSeeds; ++s) {
    auto net = random_pti_net(s);
    for (const auto& seq : firing_sequences(net, kBound)) {
      Marking m = net.initial;
      for (const auto& t : seq) {
        Marking m2 = fire(net, m, t);
        EXPECT_EQ(m2 + net.pre(t), m + net.post(t)) << net.name;
        m = m2;
      }
    }
  }
}

TEST(PnProperties, GeneratedLposValidate) {
  for (std::uint64_t s = 0; s < kPnSeeds; ++s) {
    auto net = random_pti_net(s);
    for (const auto& l : enumerate_computations_pn(net, kBound).lpos) {
      auto r = validate_lpo_pn(net, l);
      EXPECT_TRUE(r.ok()) << net.name << ": " << r.summary();
      if (l.size() <= 40) EXPECT_TRUE(partial_order(l)) << net.name;
    }
  }
}

TEST(PnProperties, RefinementTheorem) {
  for (std::uint64_t s = 0; s < kPnSeeds; ++s) {
    auto r = check_refinement_theorem_pn(random_pti_net(s), kBound);
    EXPECT_TRUE(r.holds) << "seed " << s << ": " << r.counterexample;
  }
}

TEST(PnProperties, WitnessesForDistinctGluedLpos) {
  for (std::uint64_t s = 0; s < kPnSeeds; ++s) {
    auto net = random_pti_net(s);
    all_pairs_separate(enumerate_computations_pn(net, kBound).glpos, separation_witness_pn, verify_pn_witness,
                       net.name);
  }
  all_pairs_separate(enumerate_computations_pn(fig1_net(), 4).glpos, separation_witness_pn, verify_pn_witness,
                     "fig1");
}

TEST(PnProperties, StableUnderEnumerationOrder) {
  for (std::uint64_t s = 0; s < kPnSeeds; ++s) {
    auto net = random_pti_net(s);
    auto plain = enumerate_computations_pn(net, kBound);
    for (std::uint64_t k : {1u, 7u}) {
      auto shuffled = enumerate_computations_pn(net, EnumerateOptions{kBound, false, k});
      EXPECT_EQ(shuffled.lpos, plain.lpos) << net.name;
      EXPECT_EQ(shuffled.glpos, plain.glpos) << net.name;
    }
  }
}

TEST(PnProperties, EmbedsIsAPartialOrder) {
  auto all = enumerate_computations_pn(fig1_net(), 4).lpos;
  for (const auto& a : all)
    for (const auto& b : all) {
      EXPECT_FALSE(a != b && embeds(a, b) && embeds(b, a));
      if (!embeds(a, b)) continue;
      for (const auto& c : all)
        if (embeds(b, c)) EXPECT_TRUE(embeds(a, c));
    }
  for (const auto& a : all) EXPECT_TRUE(embeds(a, a));
}

TEST(CtsProperties, GeneratedLposValidate) {
  for (auto mode : kModes)
    for (std::uint64_t s = 0; s < kCtsSeeds; ++s) {
      auto sys = random_cts_system(s);
      for (const auto& l : enumerate_computations_cts(sys, kBound, false, mode).lpos) {
        auto r = validate_lpo_cts(sys, l, mode);
        EXPECT_TRUE(r.ok()) << sys.name << " " << to_string(mode) << ": " << r.summary();
        if (l.size() <= 40) EXPECT_TRUE(partial_order(l)) << sys.name;
      }
    }
}

TEST(CtsProperties, ChannelsAreTotallyOrdered) {
  for (std::uint64_t s = 0; s < kCtsSeeds; ++s) {
    auto sys = random_cts_system(s);
    for (const auto& l : enumerate_computations_cts(sys, kBound).lpos) {
      OrderIndex idx(l);
      for (const auto& e : l.edges)
        for (const auto& f : l.edges)
          if (parse_cts_label(l.edge_label.at(e)).channel == parse_cts_label(l.edge_label.at(f)).channel)
            EXPECT_TRUE(idx.comparable(e, f)) << sys.name;
    }
  }
}

TEST(CtsProperties, RefinementTheorem) {
  for (auto mode : kModes)
    for (std::uint64_t s = 0; s < kCtsSeeds; ++s) {
      auto r = check_refinement_theorem_cts(random_cts_system(s), kBound, mode);
      EXPECT_TRUE(r.holds) << "seed " << s << " " << to_string(mode) << ": " << r.counterexample;
    }
}

TEST(CtsProperties, WitnessesForDistinctGluedLpos) {
  for (auto mode : kModes)
    for (std::uint64_t s = 0; s < kCtsSeeds; ++s) {
      auto sys = random_cts_system(s);
      all_pairs_separate(enumerate_computations_cts(sys, kBound, false, mode).glpos, separation_witness_cts,
                         verify_cts_witness, sys.name);
    }
}

TEST(CtsProperties, StableUnderEnumerationOrder) {
  for (std::uint64_t s = 0; s < kCtsSeeds; ++s) {
    auto sys = random_cts_system(s);
    auto plain = enumerate_computations_cts(sys, kBound);
    auto shuffled = enumerate_computations_cts(sys, CtsEnumerateOptions{kBound, false, MulticastBlockMode::listening, s + 1});
    EXPECT_EQ(shuffled.lpos, plain.lpos) << sys.name;
    EXPECT_EQ(shuffled.glpos, plain.glpos) << sys.name;
  }
}

TEST(AsyncProperties, Baseline) {
  for (std::uint64_t s = 0; s < kAsyncSeeds; ++s) {
    auto sys = random_async_system(s);
    auto r = check_baseline_async(sys, kBound);
    EXPECT_TRUE(r.holds) << sys.name << ": " << r.counterexample;
    for (const auto& l : enumerate_computations_async(sys, kBound))
      if (l.size() <= 40) EXPECT_TRUE(partial_order(l)) << sys.name;
  }
}

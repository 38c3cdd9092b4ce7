#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "gluepo/pti_computation.hpp"
#include "gluepo/pti_witness.hpp"
#include "test_models.hpp"

using namespace gluepo;
using namespace gluepo::testing;

namespace {

Marking fig1_marking(std::initializer_list<const char*> marked) {
  auto net = fig1_net();
  Marking m(net.places.size());
  for (const char* p : marked) m[net.place_index(p)] = 1;
  return m;
}

// p0 -> a -> p1 -> b -> p2, one token in p0.
PtiNet chain() {
  PtiNet n;
  n.name = "chain";
  n.places = {"p0", "p1", "p2"};
  n.transitions = {"a", "b"};
  n.flow = {{{"p0", "a"}, 1}, {{"a", "p1"}, 1}, {{"p1", "b"}, 1}, {{"b", "p2"}, 1}};
  n.initial = Marking(std::vector<unsigned>{1, 0, 0});
  return n;
}

// Independent oracle: plain DFS on token vectors read straight off the flow map.
std::vector<std::vector<std::string>> oracle_sequences(const PtiNet& net, unsigned max) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  auto ts = net.transitions;
  std::sort(ts.begin(), ts.end());
  std::function<void(std::vector<unsigned>)> go = [&](std::vector<unsigned> m) {
    out.push_back(cur);
    if (cur.size() == max) return;
    for (const auto& t : ts) {
      bool ok = true;
      for (std::size_t i = 0; i < net.places.size(); ++i) {
        const auto& p = net.places[i];
        auto w = net.flow.count({p, t}) ? net.flow.at({p, t}) : 0u;
        if (m[i] < w || (net.inhibitors.count({p, t}) && m[i] > 0)) ok = false;
      }
      if (!ok) continue;
      auto m2 = m;
      for (std::size_t i = 0; i < net.places.size(); ++i) {
        const auto& p = net.places[i];
        if (net.flow.count({p, t})) m2[i] -= net.flow.at({p, t});
        if (net.flow.count({t, p})) m2[i] += net.flow.at({t, p});
      }
      cur.push_back(t);
      go(m2);
      cur.pop_back();
    }
  };
  go(net.initial.tokens);
  return out;
}

}  // namespace

TEST(Enabled, T1AtInitialMarking) {
  auto net = fig1_net();
  EXPECT_TRUE(enabled(net, net.initial, "t1"));
  EXPECT_TRUE(enabled(net, net.initial, "t4"));
  EXPECT_FALSE(enabled(net, net.initial, "t2"));
}

TEST(Enabled, InhibitedAfterT1) {
  auto net = fig1_net();
  EXPECT_FALSE(enabled(net, fire(net, net.initial, "t1"), "t4"));
}

TEST(Enabled, PresetPlaceThatInhibitsBlocks) {
  PtiNet n;
  n.places = {"p"};
  n.transitions = {"t"};
  n.flow = {{{"p", "t"}, 1}};
  n.inhibitors = {{"p", "t"}};
  for (unsigned k = 0; k < 4; ++k) EXPECT_FALSE(enabled(n, Marking(std::vector<unsigned>{k}), "t"));
}

TEST(Enabled, UnknownTransition) {
  auto net = fig1_net();
  EXPECT_THROW(enabled(net, net.initial, "t9"), ModelError);
}

TEST(Fire, T1FromInitialMarking) {
  auto net = fig1_net();
  EXPECT_EQ(fire(net, net.initial, "t1"), fig1_marking({"p3", "p4", "p7"}));
}

TEST(Fire, SelfLoopLeavesMarking) {
  PtiNet n;
  n.places = {"p", "q"};
  n.transitions = {"t"};
  n.flow = {{{"p", "t"}, 1}, {{"t", "p"}, 1}};
  n.initial = Marking(std::vector<unsigned>{1, 2});
  EXPECT_EQ(fire(n, n.initial, "t"), n.initial);
}

TEST(Fire, T2AfterT1) {
  auto net = fig1_net();
  EXPECT_EQ(fire(net, fig1_marking({"p3", "p4", "p7"}), "t2"), fig1_marking({"p5", "p6", "p7"}));
}

TEST(Fire, NotEnabledIsAnError) {
  auto net = fig1_net();
  EXPECT_THROW(fire(net, net.initial, "t2"), ModelError);
}

TEST(FiringSequences, ContainsBothT4Schedules) {
  auto seqs = firing_sequences(fig1_net(), 3);
  auto has = [&](std::vector<std::string> s) { return std::find(seqs.begin(), seqs.end(), s) != seqs.end(); };
  EXPECT_TRUE(has({"t4", "t1", "t2"}));
  EXPECT_TRUE(has({"t1", "t2", "t4"}));
  EXPECT_TRUE(has({"t4", "t1", "t3"}));
  EXPECT_FALSE(has({"t1", "t4"}));
}

TEST(FiringSequences, ZeroBound) {
  EXPECT_EQ(firing_sequences(fig1_net(), 0), (std::vector<std::vector<std::string>>{{}}));
}

TEST(FiringSequences, MatchesOracleAtFour) {
  auto net = fig1_net();
  auto got = firing_sequences(net, 4);
  EXPECT_EQ(got, oracle_sequences(net, 4));
  EXPECT_EQ(got.size(), 9u);
  EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
}

TEST(LpoFromFiringSequence, LeftRunHasT4BeforeT1) {
  auto l = fig1_lpo_i();
  EXPECT_EQ(l.interleave, (Relation{{only(l, "t4"), only(l, "t1")}}));
}

TEST(LpoFromFiringSequence, LateT4FollowsT2) {
  auto l = fig1_lpo_ii();
  EXPECT_EQ(l.interleave, (Relation{{only(l, "t2"), only(l, "t4")}}));
}

TEST(LpoFromFiringSequence, EmptySequence) {
  auto l = lpo_from_firing_sequence(fig1_net(), {});
  EXPECT_EQ(l.edges, (std::set<ElementId>{initial_t_history()->id}));
  EXPECT_EQ(l.nodes.size(), 3u);
  EXPECT_TRUE(l.interleave.empty());
  for (const auto& p : {"p1", "p2", "p7"}) EXPECT_NO_THROW(only(l, p));
}

TEST(LpoFromFiringSequence, InvalidSequence) {
  auto net = fig1_net();
  EXPECT_THROW(lpo_from_firing_sequence(net, {"t2"}), ModelError);
  EXPECT_THROW(lpo_from_firing_sequence(net, {"t1", "t4"}), ModelError);
  EXPECT_THROW(lpo_from_firing_sequence(net, {"nope"}), ModelError);
}

TEST(LpoFromFiringSequence, EveryTokenSplitIsADistinctComputation) {
  // Place p ends up with two tokens of different provenance; t may draw either.
  PtiNet n;
  n.places = {"p", "q", "r"};
  n.transitions = {"s", "t"};
  n.flow = {{{"q", "s"}, 1}, {{"s", "p"}, 1}, {{"p", "t"}, 1}, {{"t", "r"}, 1}};
  n.initial = Marking(std::vector<unsigned>{1, 1, 0});
  auto all = lpos_from_firing_sequence(n, {"s", "t"});
  ASSERT_EQ(all.size(), 2u);
  for (const auto& l : all) EXPECT_TRUE(validate_lpo_pn(n, l).ok());
  auto first = lpo_from_firing_sequence(n, {"s", "t"});
  EXPECT_NE(std::find(all.begin(), all.end(), first), all.end());
}

TEST(LpoFromFiringSequence, RepeatedTHistoryIsUnresolved) {
  // Two firings drawing one token each from the same two-token p-history
  // would carry the same identity.
  PtiNet n;
  n.places = {"p"};
  n.transitions = {"t"};
  n.flow = {{{"p", "t"}, 1}};
  n.initial = Marking(std::vector<unsigned>{2});
  try {
    lpo_from_firing_sequence(n, {"t", "t"});
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("unresolved token provenance"), std::string::npos);
  }
}

TEST(ValidateLpoPn, WorkedExampleRunsAreValid) {
  auto net = fig1_net();
  EXPECT_TRUE(validate_lpo_pn(net, fig1_lpo_i()).ok());
  EXPECT_TRUE(validate_lpo_pn(net, fig1_lpo_ii()).ok());
  EXPECT_TRUE(validate_lpo_pn(net, fig1_lpo_iii()).ok());
}

TEST(ValidateLpoPn, MissingInhibitorOrderViolatesN4b) {
  auto l = fig1_lpo_i();
  l.interleave.clear();
  auto r = validate_lpo_pn(fig1_net(), l);
  ASSERT_TRUE(r.has("N4(b)"));
  bool named = false;
  for (const auto& v : r.violations)
    if (v.rule == "N4(b)" && v.elements == std::vector<ElementId>{only(l, "t4"), only(l, "p3")}) named = true;
  EXPECT_TRUE(named) << r.summary();
}

TEST(ValidateLpoPn, OverdrawnHistoryViolatesN3) {
  PtiNet n;
  n.places = {"p"};
  n.transitions = {"t"};
  n.flow = {{{"p", "t"}, 2}};
  n.initial = Marking(std::vector<unsigned>{1});
  auto eps = initial_t_history();
  auto v = make_p_history(eps, "p", 1);
  auto t = make_t_history("t", {{v, 2}});
  Lpo l;
  l.nodes = {v.id};
  l.edges = {eps->id, t->id};
  l.comm = {{eps->id, v.id}, {v.id, t->id}};
  l.node_label = {{v.id, "p"}};
  l.edge_label = {{eps->id, kInitialTransition}, {t->id, "t"}};
  auto r = validate_lpo_pn(n, l);
  EXPECT_TRUE(r.has("N3")) << r.summary();
}

TEST(ValidateLpoPn, UnjustifiedInterleaveViolatesN4c) {
  auto net = fig1_net();
  auto l = fig1_lpo_i();
  l.interleave.insert({only(l, "t_eps"), only(l, "t4")});
  EXPECT_TRUE(validate_lpo_pn(net, l).has("N4(c)"));
}

TEST(ValidateLpoPn, MissingInitialEdgeViolatesN1) {
  auto l = lpo_from_firing_sequence(fig1_net(), {"t4"});
  auto eps = initial_t_history()->id;
  l.edges.erase(eps);
  l.edge_label.erase(eps);
  for (auto it = l.comm.begin(); it != l.comm.end();) it = it->first == eps ? l.comm.erase(it) : std::next(it);
  auto r = validate_lpo_pn(fig1_net(), l);
  EXPECT_TRUE(r.has("N1"));
  EXPECT_TRUE(r.has("N2"));
}

TEST(GlpoFromLpoPn, LeftGlueForT4) {
  auto net = fig1_net();
  auto l = fig1_lpo_i();
  auto g = glpo_from_lpo_pn(net, l);
  EXPECT_TRUE(g.base.interleave.empty());
  EXPECT_EQ(g.glue_for("t4"), (Relation{{only(l, "t1"), only(l, "p3")}, {only(l, "p3"), only(l, "t2")}}));
  EXPECT_TRUE(g.glue_for("t1").empty());
  EXPECT_TRUE(validate_glued(g).ok());
}

TEST(GlpoFromLpoPn, BothLeftRunsShareOneGluedLpo) {
  auto net = fig1_net();
  EXPECT_EQ(glpo_from_lpo_pn(net, fig1_lpo_i()), glpo_from_lpo_pn(net, fig1_lpo_ii()));
  EXPECT_NE(glpo_from_lpo_pn(net, fig1_lpo_i()), glpo_from_lpo_pn(net, fig1_lpo_iii()));
}

TEST(GlpoFromLpoPn, NoInhibitorsNoGlue) {
  auto net = chain();
  auto g = glpo_from_lpo_pn(net, lpo_from_firing_sequence(net, {"a", "b"}));
  EXPECT_TRUE(g.base.interleave.empty());
  for (const auto& r : g.glues) EXPECT_TRUE(r.empty());
}

TEST(EnumerateComputationsPn, WorkedExampleMaximal) {
  auto c = enumerate_computations_pn(fig1_net(), 4, true);
  EXPECT_EQ(c.lpos, (LpoSet{fig1_lpo_i(), fig1_lpo_ii(), fig1_lpo_iii()}));
  EXPECT_EQ(c.glpos.size(), 2u);
}

TEST(EnumerateComputationsPn, DeadNet) {
  PtiNet n;
  n.places = {"p", "q"};
  n.transitions = {"t"};
  n.flow = {{{"q", "t"}, 1}};
  n.initial = Marking(std::vector<unsigned>{1, 0});
  auto c = enumerate_computations_pn(n, 4, false);
  EXPECT_EQ(c.lpos.size(), 1u);
  EXPECT_EQ(c.glpos.size(), 1u);
}

TEST(EnumerateComputationsPn, WorkedExampleAtTwo) {
  auto net = fig1_net();
  auto c = enumerate_computations_pn(net, 2, false);
  LpoSet want;
  for (const auto& s : std::vector<std::vector<std::string>>{{}, {"t1"}, {"t4"}, {"t1", "t2"}, {"t1", "t3"}, {"t4", "t1"}})
    want.insert(lpo_from_firing_sequence(net, s));
  EXPECT_EQ(c.lpos, want);
  EXPECT_EQ(c.glpos.size(), 6u);
}

TEST(RefinementTheoremPn, WorkedExample) {
  auto r = check_refinement_theorem_pn(fig1_net(), 4);
  EXPECT_TRUE(r.holds) << r.counterexample;
  EXPECT_TRUE(r.image_stable) << r.unstable_example;
}

TEST(RefinementTheoremPn, InhibitorFreeNet) {
  auto r = check_refinement_theorem_pn(chain(), 4);
  EXPECT_TRUE(r.holds) << r.counterexample;
  EXPECT_EQ(r.lpos, 3u);
  EXPECT_EQ(r.refinements, 3u);
}

TEST(SeparationWitnessPn, WorkedExampleParticipation) {
  auto net = fig1_net();
  auto left = glpo_from_lpo_pn(net, fig1_lpo_i());
  auto right = glpo_from_lpo_pn(net, fig1_lpo_iii());
  auto w = separation_witness_pn(left, right);
  ASSERT_TRUE(w.has_value());
  auto* p = std::get_if<ParticipationMismatch>(&*w);
  ASSERT_NE(p, nullptr) << describe(*w);
  EXPECT_EQ(p->present_in, Side::left);
  EXPECT_EQ(left.base.edge_label.at(p->transition_edge), "t2");
  EXPECT_TRUE(p->nodes.count(only(left.base, "p4")));
  EXPECT_TRUE(verify_pn_witness(left, right, *w));

  auto back = separation_witness_pn(right, left);
  ASSERT_TRUE(back.has_value());
  auto* q = std::get_if<ParticipationMismatch>(&*back);
  ASSERT_NE(q, nullptr);
  EXPECT_EQ(right.base.edge_label.at(q->transition_edge), "t3");
  EXPECT_EQ(q->nodes, std::set<ElementId>{only(right.base, "p4")});
  EXPECT_TRUE(verify_pn_witness(right, left, *back));
}

TEST(SeparationWitnessPn, EqualInputs) {
  auto g = glpo_from_lpo_pn(fig1_net(), fig1_lpo_i());
  EXPECT_FALSE(separation_witness_pn(g, g).has_value());
}

TEST(SeparationWitnessPn, HaltedTokenLeftover) {
  auto net = chain();
  auto early = glpo_from_lpo_pn(net, lpo_from_firing_sequence(net, {"a"}));
  auto late = glpo_from_lpo_pn(net, lpo_from_firing_sequence(net, {"a", "b"}));
  auto w = separation_witness_pn(early, late);
  ASSERT_TRUE(w.has_value());
  auto* l = std::get_if<LeftoverMismatch>(&*w);
  ASSERT_NE(l, nullptr) << describe(*w);
  EXPECT_EQ(early.base.node_label.at(l->node), "p1");
  EXPECT_EQ(l->left_count, 1u);
  EXPECT_EQ(l->right_count, 0u);
  EXPECT_TRUE(verify_pn_witness(early, late, *w));
}

TEST(SeparationWitnessPn, TamperedWitnessFailsVerification) {
  auto net = chain();
  auto early = glpo_from_lpo_pn(net, lpo_from_firing_sequence(net, {"a"}));
  auto late = glpo_from_lpo_pn(net, lpo_from_firing_sequence(net, {"a", "b"}));
  auto w = std::get<LeftoverMismatch>(*separation_witness_pn(early, late));
  std::swap(w.left_count, w.right_count);
  EXPECT_FALSE(verify_pn_witness(early, late, w));
}

TEST(SeparationWitnessPn, SameEventsDifferentGlueIsAnError) {
  auto g = glpo_from_lpo_pn(fig1_net(), fig1_lpo_i());
  auto h = g;
  h.assignment.clear();
  EXPECT_THROW(separation_witness_pn(g, h), Error);
}

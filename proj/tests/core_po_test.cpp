#include <gtest/gtest.h>

#include "gluepo/core_po.hpp"
#include "gluepo/pti_computation.hpp"
#include "gluepo/serialize.hpp"
#include "test_models.hpp"

using namespace gluepo;
using namespace gluepo::testing;

namespace {

ElementId id(const char* s) { return ElementId(s); }

// Two edges a, b around one node v: a -> v -> b.
Lpo tiny() {
  Lpo l;
  l.nodes = {id("v")};
  l.edges = {id("a"), id("b")};
  l.comm = {{id("a"), id("v")}, {id("v"), id("b")}};
  l.node_label = {{id("v"), "p"}};
  l.edge_label = {{id("a"), "x"}, {id("b"), "y"}};
  return l;
}

// Three independent edges, nothing communicated.
Lpo three_edges() {
  Lpo l;
  l.edges = {id("a"), id("b"), id("c")};
  l.edge_label = {{id("a"), "x"}, {id("b"), "y"}, {id("c"), "z"}};
  return l;
}

}  // namespace

TEST(OrderQuery, InhibitorArrowPutsT4BeforeT1) {
  auto l = fig1_lpo_i();
  EXPECT_EQ(order_query(l, only(l, "t4"), only(l, "t1")), Order::before);
  EXPECT_EQ(order_query(l, only(l, "t1"), only(l, "t4")), Order::after);
}

TEST(OrderQuery, Reflexive) {
  auto l = fig1_lpo_i();
  for (const auto& n : l.nodes) EXPECT_EQ(order_query(l, n, n), Order::equal);
}

TEST(OrderQuery, InitialTokensAreIncomparable) {
  auto l = fig1_lpo_i();
  EXPECT_EQ(order_query(l, only(l, "p1"), only(l, "p7")), Order::incomparable);
}

TEST(OrderQuery, UnknownElementNamesTheId) {
  auto l = tiny();
  try {
    order_query(l, id("a"), id("ghost"));
    FAIL() << "expected UnknownElement";
  } catch (const UnknownElement& e) {
    EXPECT_EQ(e.id(), "ghost");
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(ValidateLpo, WorkedExampleIsValid) {
  EXPECT_TRUE(validate_lpo(fig1_lpo_i()).ok());
  EXPECT_TRUE(validate_lpo(fig1_lpo_ii()).ok());
  EXPECT_TRUE(validate_lpo(fig1_lpo_iii()).ok());
}

TEST(ValidateLpo, SelfLoopInInterleave) {
  auto l = three_edges();
  l.interleave = {{id("a"), id("a")}};
  EXPECT_TRUE(validate_lpo(l).has("anti-reflexivity"));
}

TEST(ValidateLpo, TwoWayInterleave) {
  auto l = three_edges();
  l.interleave = {{id("a"), id("b")}, {id("b"), id("a")}};
  auto r = validate_lpo(l);
  EXPECT_TRUE(r.has("anti-symmetry"));
  EXPECT_TRUE(r.has("acyclicity"));
}

TEST(ValidateLpo, ImpliedInterleavePair) {
  auto l = three_edges();
  l.interleave = {{id("a"), id("b")}, {id("b"), id("c")}, {id("a"), id("c")}};
  auto r = validate_lpo(l);
  EXPECT_TRUE(r.has("non-transitivity"));
  EXPECT_FALSE(r.has("acyclicity"));
}

TEST(ValidateLpo, Typing) {
  auto l = tiny();
  l.interleave = {{id("a"), id("v")}};
  EXPECT_TRUE(validate_lpo(l).has("interleave-typing"));
  l = tiny();
  l.comm.insert({id("a"), id("b")});
  EXPECT_TRUE(validate_lpo(l).has("comm-typing"));
  l = tiny();
  l.interleave = {{id("a"), id("b")}};
  EXPECT_TRUE(validate_lpo(l).ok());
}

TEST(ValidateLpo, NodeAndEdgeSetsOverlap) {
  auto l = tiny();
  l.nodes.insert(id("a"));
  EXPECT_TRUE(validate_lpo(l).has("partition"));
}

TEST(ValidateLpo, MissingLabel) {
  auto l = tiny();
  l.edge_label.erase(id("b"));
  EXPECT_TRUE(validate_lpo(l).has("labelling"));
}

TEST(Refines, LeftRunRefinesLeftGlue) {
  auto net = fig1_net();
  auto g = glpo_from_lpo_pn(net, fig1_lpo_i());
  EXPECT_TRUE(refines(fig1_lpo_i(), g).holds);
  EXPECT_TRUE(refines(fig1_lpo_ii(), g).holds);
}

TEST(Refines, EmptyGlueIdenticalInterleave) {
  auto l = fig1_lpo_i();
  GluedLpo g;
  g.base = l;
  EXPECT_TRUE(refines(l, g).holds);
}

TEST(Refines, MissingOrderingFailsClause3) {
  auto net = fig1_net();
  auto g = glpo_from_lpo_pn(net, fig1_lpo_i());
  auto l = fig1_lpo_i();
  l.interleave.clear();
  auto r = refines(l, g);
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(r.clause, 3);
  ASSERT_TRUE(r.pair.has_value());
  EXPECT_EQ(r.pair->first, only(l, "t1"));
  EXPECT_EQ(r.pair->second, only(l, "p3"));
  EXPECT_EQ(*r.edge, only(l, "t4"));
}

TEST(Refines, UnjustifiedExtraPairFailsClause4) {
  auto l = fig1_lpo_iii();
  GluedLpo g;
  g.base = l;
  g.base.interleave.clear();
  // No glue at all, so the run's t4 -> t1 pair has no justification.
  auto r = refines(l, g);
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(r.clause, 4);
}

TEST(Refines, DroppedGluedInterleaveFailsClause2) {
  auto l = tiny();
  GluedLpo g;
  g.base = l;
  g.base.edges.insert(id("c"));
  g.base.edge_label[id("c")] = "z";
  l.edges.insert(id("c"));
  l.edge_label[id("c")] = "z";
  g.base.interleave = {{id("b"), id("c")}};
  auto r = refines(l, g);
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(r.clause, 2);
}

TEST(Refines, DifferentUniverseIsAnError) {
  GluedLpo g;
  g.base = tiny();
  EXPECT_THROW(refines(three_edges(), g), UniverseMismatch);
}

TEST(Refinements, WorkedExampleCounts) {
  auto net = fig1_net();
  auto left = glpo_from_lpo_pn(net, fig1_lpo_i());
  auto right = glpo_from_lpo_pn(net, fig1_lpo_iii());
  auto rl = refinements(left);
  auto rr = refinements(right);
  ASSERT_EQ(rl.size(), 2u);
  EXPECT_EQ(rl, (std::vector<Lpo>{std::min(fig1_lpo_i(), fig1_lpo_ii()), std::max(fig1_lpo_i(), fig1_lpo_ii())}));
  ASSERT_EQ(rr.size(), 1u);
  EXPECT_EQ(rr.front(), fig1_lpo_iii());
}

TEST(Embeds, PrefixIntoMaximalRun) {
  auto net = fig1_net();
  auto prefix = lpo_from_firing_sequence(net, {"t1", "t3"});
  EXPECT_TRUE(embeds(prefix, fig1_lpo_iii()));
  EXPECT_FALSE(embeds(fig1_lpo_iii(), prefix));
}

TEST(Embeds, Reflexive) {
  EXPECT_TRUE(embeds(fig1_lpo_i(), fig1_lpo_i()));
  EXPECT_TRUE(embeds(tiny(), tiny()));
}

TEST(Embeds, DifferentBranches) {
  EXPECT_FALSE(embeds(fig1_lpo_i(), fig1_lpo_iii()));
  EXPECT_FALSE(embeds(fig1_lpo_iii(), fig1_lpo_i()));
}

TEST(Embeds, CommMustAgreeOnSharedElements) {
  auto big = tiny();
  auto small = tiny();
  small.comm.erase({id("v"), id("b")});
  EXPECT_FALSE(embeds(small, big));
}

TEST(MaximalFilter, WorkedExampleHasThreeMaximalRuns) {
  auto all = enumerate_computations_pn(fig1_net(), 4, false).lpos;
  EXPECT_EQ(maximal_filter(all), (LpoSet{fig1_lpo_i(), fig1_lpo_ii(), fig1_lpo_iii()}));
}

TEST(MaximalFilter, Singleton) {
  LpoSet one{tiny()};
  EXPECT_EQ(maximal_filter(one), one);
}

TEST(MaximalFilter, DropsPrefix) {
  auto prefix = lpo_from_firing_sequence(fig1_net(), {"t1", "t2"});
  LpoSet in{prefix, fig1_lpo_i(), fig1_lpo_ii()};
  EXPECT_EQ(maximal_filter(in), (LpoSet{fig1_lpo_i(), fig1_lpo_ii()}));
}

TEST(GluedLpo, SharedGlueRelationIsStoredOnce) {
  Relation r{{id("a"), id("v")}};
  auto g = GluedLpo::make(tiny(), {{"x", r}, {"y", r}});
  EXPECT_EQ(g.glues.size(), 1u);
  EXPECT_EQ(g.glue_for("x"), g.glue_for("y"));
  EXPECT_TRUE(g.glue_for("absent").empty());
  EXPECT_TRUE(validate_glued(g).ok());
}

TEST(GluedLpo, GlueOutsideCommIsReported) {
  auto g = GluedLpo::make(tiny(), {{"x", Relation{{id("a"), id("b")}}}});
  EXPECT_TRUE(validate_glued(g).has("glue-subset"));
}

TEST(Serialize, ByteStableAndRoundTrips) {
  auto l = fig1_lpo_i();
  auto g = glpo_from_lpo_pn(fig1_net(), l);
  EXPECT_EQ(to_json_text(l), to_json_text(fig1_lpo_i()));
  EXPECT_EQ(lpo_from_json(lpo_to_json(l)), l);
  EXPECT_EQ(glued_from_json(glued_to_json(g)), g);
}

TEST(Serialize, RejectsWrongFormat) {
  auto j = lpo_to_json(tiny());
  EXPECT_THROW(glued_from_json(j), FormatError);
}

// Copyright 2026 The boxprop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace boxprop {
namespace {

using testing::V;

constexpr double kTol = 1e-12;
constexpr double kSlack = 1e-9;

NodeRef var(std::size_t i) { return NodeRef::variable(V(i)); }
NodeRef fac(std::size_t f) { return NodeRef::factor(FactorId{f}); }

void expect_box(const Box& b, const std::vector<double>& lo, const std::vector<double>& hi, double tol = kTol) {
  ASSERT_EQ(b.size(), lo.size());
  for (std::size_t x = 0; x < lo.size(); ++x) {
    EXPECT_NEAR(b.lower()[x], lo[x], tol) << "state " << x;
    EXPECT_NEAR(b.upper()[x], hi[x], tol) << "state " << x;
  }
}

void expect_bound_invariants(const Box& b) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t x = 0; x < b.size(); ++x) {
    EXPECT_GE(b.lower()[x], 0.0);
    EXPECT_LE(b.upper()[x], 1.0);
    EXPECT_LE(b.lower()[x], b.upper()[x]);
    lo += b.lower()[x];
    hi += b.upper()[x];
  }
  EXPECT_LE(lo, 1.0 + kSlack);
  EXPECT_GE(hi, 1.0 - kSlack);
}

RandomGraphSpec small_spec(std::uint64_t seed, std::size_t max_arity = 3) {
  testing::Gen gen(seed * 7919 + 1);
  RandomGraphSpec s;
  s.num_variables = gen.between(2, 8);
  s.max_domain = 3;
  s.max_arity = max_arity;
  s.extra_factors = gen.between(0, 4);
  s.strength = gen.uniform(0.2, 1.5);
  s.seed = seed;
  return s;
}

// ---------------------------------------------------------------------------
// Subtree construction

TEST(SubtreeTest, BreadthFirstOnTriangle) {
  // K=(i,k) has the smaller id, so k is expanded before j and L hangs off k.
  const FactorGraph g = testing::triangle();
  const Subtree t = build_subtree(g, V(0));
  EXPECT_EQ(t.nodes(), (std::vector<NodeRef>{var(0), fac(0), fac(1), var(2), var(1), fac(2)}));
  EXPECT_TRUE(t.is_child_of(fac(0), var(0)));
  EXPECT_TRUE(t.is_child_of(fac(1), var(0)));
  EXPECT_TRUE(t.is_child_of(var(2), fac(0)));
  EXPECT_TRUE(t.is_child_of(var(1), fac(1)));
  EXPECT_TRUE(t.is_child_of(fac(2), var(2)));
  EXPECT_TRUE(t.children(fac(2)).empty());
}

TEST(SubtreeTest, BudgetLimitsNodes) {
  const FactorGraph g = testing::triangle();
  const Subtree one = build_subtree(g, V(0), 1);
  EXPECT_EQ(one.nodes(), std::vector<NodeRef>{var(0)});
  const Subtree five = build_subtree(g, V(0), 5);
  EXPECT_EQ(five.size(), 5u);
  EXPECT_FALSE(five.contains(fac(2)));
}

TEST(SubtreeTest, TreeGraphIsCoveredEntirely) {
  RandomGraphSpec s;
  s.num_variables = 20;
  s.seed = 3;
  const FactorGraph g = gen_random_tree(s);
  const Subtree t = build_subtree(g, V(7));
  EXPECT_EQ(t.size(), g.num_variables() + g.num_factors());
}

TEST(SubtreeTest, AddChildChecksEdges) {
  const FactorGraph g = testing::triangle();
  Subtree t(g, V(0));
  EXPECT_THROW(t.add_child(g, var(0), fac(2)), Error);  // not adjacent
  EXPECT_THROW(t.add_child(g, fac(0), var(2)), Error);  // parent missing
  t.add_child(g, var(0), fac(0));
  EXPECT_THROW(t.add_child(g, var(0), fac(0)), Error);  // twice
  EXPECT_THROW(Subtree(g, V(9)), Error);
}

TEST(SubtreeTest, IsATreeOfGraphEdges) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FactorGraph g = gen_random_graph(small_spec(seed));
    const Subtree t = build_subtree(g, V(0), 1 + seed);
    EXPECT_LE(t.size(), 1 + seed);
    std::set<NodeRef> seen{var(0)};
    for (std::size_t k = 1; k < t.nodes().size(); ++k) {
      const NodeRef n = t.nodes()[k];
      const auto p = t.parent(n);
      ASSERT_TRUE(p.has_value());
      EXPECT_TRUE(seen.count(*p)) << "parent precedes child";
      EXPECT_TRUE(seen.insert(n).second) << "no node twice";
      const VariableId v = n.is_variable() ? n.as_variable() : p->as_variable();
      const FactorId f = n.is_factor() ? n.as_factor() : p->as_factor();
      const auto& sc = g.factor(f).scope();
      EXPECT_NE(std::find(sc.begin(), sc.end(), v), sc.end());
    }
  }
}

// ---------------------------------------------------------------------------
// SAW tree construction

TEST(SawTreeTest, TriangleTreeShape) {
  const FactorGraph g = testing::triangle();
  const SawTree t = build_saw_tree(g, V(0));
  // i; K, J; k, j; L, L; j, k; J, K; i', i''
  EXPECT_EQ(t.node_count(), 13u);
  EXPECT_EQ(t.truncated_count(), 0u);
  std::size_t cycle = 0, dead = 0;
  for (std::size_t n = 0; n < t.nodes().size(); ++n) {
    const SawNode& s = t.node(n);
    if (s.kind == SawNodeKind::CycleInducedLeaf) {
      ++cycle;
      EXPECT_EQ(s.endpoint, var(0));
      EXPECT_EQ(t.walk(n).size(), 7u);
    }
    if (s.kind == SawNodeKind::DeadEndLeaf) ++dead;
  }
  EXPECT_EQ(cycle, 2u);
  EXPECT_EQ(dead, 0u);
  EXPECT_EQ(t.walk(12), (std::vector<NodeRef>{var(0), fac(1), var(1), fac(2), var(2), fac(0), var(0)}));
}

TEST(SawTreeTest, WalksAreSelfAvoidingAndLeafKindsAreRight) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FactorGraph g = gen_random_graph(small_spec(seed));
    const SawTree t = build_saw_tree(g, V(0), 400);
    EXPECT_LE(t.node_count(), 400u);
    std::size_t counted = 0;
    for (std::size_t n = 0; n < t.nodes().size(); ++n) {
      const SawNode& s = t.node(n);
      const auto w = t.walk(n);
      if (s.kind != SawNodeKind::TruncationLeaf) ++counted;
      std::set<NodeRef> prefix(w.begin(), w.end() - 1);
      EXPECT_EQ(prefix.size(), w.size() - 1) << "all but the last node distinct";
      if (s.kind == SawNodeKind::CycleInducedLeaf) { EXPECT_EQ(prefix.count(w.back()), 1u); }
      if (s.kind != SawNodeKind::CycleInducedLeaf && s.kind != SawNodeKind::TruncationLeaf) {
        EXPECT_EQ(prefix.count(w.back()), 0u);
      }
      if (w.size() >= 3) { EXPECT_NE(w[w.size() - 1], w[w.size() - 3]) << "no backtracking"; }
      if (s.kind == SawNodeKind::Inner || s.kind == SawNodeKind::Root) { EXPECT_FALSE(s.children.empty()); }
    }
    EXPECT_EQ(counted, t.node_count());
  }
}

TEST(SawTreeTest, TreeGraphGivesGraphShapedTree) {
  RandomGraphSpec s;
  s.num_variables = 15;
  s.seed = 9;
  const FactorGraph g = gen_random_tree(s);
  const SawTree t = build_saw_tree(g, V(4));
  EXPECT_EQ(t.node_count(), g.num_variables() + g.num_factors());
  for (const SawNode& n : t.nodes()) EXPECT_NE(n.kind, SawNodeKind::CycleInducedLeaf);
}

TEST(SawTreeTest, BudgetOfOneTruncatesAllChildren) {
  const FactorGraph g = testing::triangle();
  const SawTree t = build_saw_tree(g, V(0), 1);
  EXPECT_EQ(t.node_count(), 1u);
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_EQ(t.node(1).kind, SawNodeKind::TruncationLeaf);
  EXPECT_EQ(t.node(2).kind, SawNodeKind::TruncationLeaf);
}

TEST(SawTreeTest, RestrictionToSubtreeFollowsSubtreeEdges) {
  const FactorGraph g = testing::triangle();
  const Subtree st = build_subtree(g, V(0));
  const SawTree t = saw_tree_from_subtree(g, st);
  EXPECT_EQ(t.node_count(), st.size());
  for (std::size_t n = 1; n < t.nodes().size(); ++n) {
    const SawNode& s = t.node(n);
    if (s.kind == SawNodeKind::TruncationLeaf) continue;
    EXPECT_TRUE(st.is_child_of(s.endpoint, t.node(*s.parent).endpoint));
  }
}

// ---------------------------------------------------------------------------
// Golden boxes on the triangle

TEST(BoundTest, ExampleOne) {
  const FactorGraph g = testing::triangle();
  const BoundResult r = boxprop_subtree(g, build_subtree(g, V(0), 5));
  expect_box(r.box, {0.2, 0.2}, {0.8, 0.8});
  EXPECT_EQ(r.nodes_used, 5u);
  EXPECT_EQ(r.method, Method::SubT);
}

TEST(BoundTest, ExampleTwo) {
  const FactorGraph g = testing::triangle();
  const BoundResult r = boxprop_subtree(g, build_subtree(g, V(0)));
  expect_box(r.box, {2.0 / 7, 2.0 / 7}, {5.0 / 7, 5.0 / 7});
  EXPECT_TRUE(r.box.contains(Measure({V(0)}, {2}, {0.5, 0.5})));
}

TEST(BoundTest, SawTreeOnTriangleIsSoundAndNoLooser) {
  const FactorGraph g = testing::triangle();
  const BoundResult r = boxprop_sawtree(g, build_saw_tree(g, V(0)));
  EXPECT_TRUE(testing::inside(r.box, {0.5, 0.5}, kSlack));
  EXPECT_GE(r.box.lower()[0], 2.0 / 7 - kTol);
  EXPECT_LE(r.box.upper()[0], 5.0 / 7 + kTol);
  EXPECT_EQ(r.nodes_used, 13u);
  expect_bound_invariants(r.box);
}

TEST(BoundTest, RootOnlyTreesGiveTheSimplexBox) {
  const FactorGraph g = testing::triangle();
  expect_box(boxprop_subtree(g, build_subtree(g, V(1), 1)).box, {0, 0}, {1, 1});
  expect_box(boxprop_sawtree(g, build_saw_tree(g, V(1), 1)).box, {0, 0}, {1, 1});
}

TEST(BoundTest, ComputeBoundDispatchesAndTimes) {
  const FactorGraph g = testing::triangle();
  const BoundResult a = compute_bound(g, V(2), Method::SubT);
  const BoundResult b = compute_bound(g, V(2), Method::SAWT);
  EXPECT_EQ(a.method, Method::SubT);
  EXPECT_EQ(b.method, Method::SAWT);
  EXPECT_EQ(a.variable, V(2));
  EXPECT_GE(a.elapsed.count(), 0.0);
  expect_box(a.box, {2.0 / 7, 2.0 / 7}, {5.0 / 7, 5.0 / 7});
}

TEST(BoundTest, MethodLabels) {
  EXPECT_EQ(method_label(Method::SubT), "SubT");
  EXPECT_EQ(method_label(Method::SAWT), "SAWT");
  EXPECT_EQ(parse_method("subtree"), Method::SubT);
  EXPECT_EQ(parse_method("sawtree"), Method::SAWT);
  EXPECT_FALSE(parse_method("bogus"));
}

// ---------------------------------------------------------------------------
// Properties

TEST(BoundProperty, ExactMarginalsAreContained) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const FactorGraph g = gen_random_graph(small_spec(seed));
    const auto exact = testing::oracle_marginals(g);
    for (std::size_t v = 0; v < g.num_variables(); ++v) {
      for (Method m : {Method::SubT, Method::SAWT}) {
        const BoundResult r = compute_bound(g, V(v), m, 500);
        expect_bound_invariants(r.box);
        EXPECT_TRUE(testing::inside(r.box, exact[v], kSlack))
            << "seed " << seed << " variable " << v << " " << method_label(m);
      }
    }
  }
}

TEST(BoundProperty, ExactOnTrees) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    RandomGraphSpec s;
    s.num_variables = 2 + seed;
    s.seed = seed;
    const FactorGraph g = gen_random_tree(s);
    const auto exact = exact_marginals(g);
    for (std::size_t v = 0; v < g.num_variables(); ++v)
      for (Method m : {Method::SubT, Method::SAWT}) {
        const Box b = compute_bound(g, V(v), m, std::numeric_limits<std::size_t>::max()).box;
        expect_box(b, exact[v].values(), exact[v].values(), kSlack);
      }
  }
}

TEST(BoundProperty, LargerSawBudgetNeverLoosens) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const FactorGraph g = gen_random_graph(small_spec(seed));
    for (std::size_t v = 0; v < g.num_variables(); v += 2) {
      double previous = INFINITY;
      for (std::size_t budget : {1, 3, 8, 20, 60, 200, 1000}) {
        const double gp = gap(compute_bound(g, V(v), Method::SAWT, budget).box);
        EXPECT_LE(gp, previous + kTol) << "seed " << seed << " variable " << v << " budget " << budget;
        previous = gp;
      }
    }
  }
}

TEST(BoundProperty, PairwiseSubtreeEqualsRestrictedSawTree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const FactorGraph g = gen_random_graph(small_spec(seed, 2));
    for (std::size_t v = 0; v < g.num_variables(); ++v) {
      for (std::size_t budget : {std::size_t{4}, std::size_t{9}, std::numeric_limits<std::size_t>::max()}) {
        const Subtree t = build_subtree(g, V(v), budget);
        const Box a = boxprop_subtree(g, t).box;
        const Box b = boxprop_sawtree(g, saw_tree_from_subtree(g, t)).box;
        expect_box(b, a.lower().values(), a.upper().values());
      }
    }
  }
}

TEST(BoundProperty, FactorScalingLeavesBoxesUnchanged) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FactorGraph g = gen_random_graph(small_spec(seed));
    std::vector<Measure> tables;
    for (const Factor& f : g.factors()) tables.push_back(f.table);
    const std::size_t pick = seed % tables.size();
    tables[pick] = scale(tables[pick], 7.3);
    const FactorGraph h(std::move(tables));
    for (std::size_t v = 0; v < g.num_variables(); ++v)
      for (Method m : {Method::SubT, Method::SAWT}) {
        const Box a = compute_bound(g, V(v), m, 300).box;
        const Box b = compute_bound(h, V(v), m, 300).box;
        expect_box(b, a.lower().values(), a.upper().values());
      }
  }
}

TEST(BoundProperty, RelabelingStatesPermutesBounds) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const FactorGraph g = gen_random_graph(small_spec(seed));
    // Reverse the state order of variable 0 in every table that mentions it.
    const std::size_t d0 = g.domain_size(V(0));
    std::vector<Measure> tables;
    for (const Factor& f : g.factors()) {
      const Measure& t = f.table;
      std::vector<double> values(t.size());
      const auto pos = t.position(V(0));
      for (std::size_t i = 0; i < t.size(); ++i) {
        auto s = testing::decode(i, t.dims());
        if (pos) s[*pos] = d0 - 1 - s[*pos];
        std::size_t j = 0, mult = 1;
        for (std::size_t k = 0; k < s.size(); ++k) {
          j += s[k] * mult;
          mult *= t.dims()[k];
        }
        values[j] = t[i];
      }
      tables.emplace_back(t.scope(), t.dims(), std::move(values));
    }
    const FactorGraph h(std::move(tables));
    for (Method m : {Method::SubT, Method::SAWT}) {
      const Box a = compute_bound(g, V(0), m, 300).box;
      const Box b = compute_bound(h, V(0), m, 300).box;
      for (std::size_t x = 0; x < d0; ++x) {
        EXPECT_NEAR(a.lower()[x], b.lower()[d0 - 1 - x], kTol);
        EXPECT_NEAR(a.upper()[x], b.upper()[d0 - 1 - x], kTol);
      }
      EXPECT_NEAR(gap(a), gap(b), kTol);
    }
  }
}

}  // namespace
}  // namespace boxprop

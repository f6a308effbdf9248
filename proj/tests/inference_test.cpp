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

#include "test_support.hpp"

namespace boxprop {
namespace {

using testing::V;

TEST(ExactTest, TriangleIsUniform) {
  for (ExactEngine e : {ExactEngine::Brute, ExactEngine::VarElim}) {
    const auto m = exact_marginals(testing::triangle(), e);
    for (const Measure& p : m) {
      EXPECT_NEAR(p[0], 0.5, 1e-12);
      EXPECT_NEAR(p[1], 0.5, 1e-12);
    }
  }
}

TEST(ExactTest, SingleUnaryFactor) {
  const FactorGraph g({Measure({V(0)}, {2}, {3, 1})});
  for (ExactEngine e : {ExactEngine::Brute, ExactEngine::VarElim}) {
    const auto m = exact_marginals(g, e);
    EXPECT_NEAR(m[0][0], 0.75, 1e-15);
    EXPECT_NEAR(m[0][1], 0.25, 1e-15);
  }
}

TEST(ExactTest, EnginesAgreeWithEnumerationOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomGraphSpec s;
    s.num_variables = 2 + seed % 9;
    s.max_domain = 3;
    s.extra_factors = seed % 5;
    s.seed = seed;
    const FactorGraph g = gen_random_graph(s);
    const auto oracle = testing::oracle_marginals(g);
    const auto brute = exact_marginals(g, ExactEngine::Brute);
    const auto ve = exact_marginals(g, ExactEngine::VarElim);
    for (std::size_t v = 0; v < g.num_variables(); ++v) {
      EXPECT_LE(testing::max_abs(brute[v].values(), oracle[v]), 1e-12);
      EXPECT_LE(testing::max_abs(ve[v].values(), oracle[v]), 1e-12);
      EXPECT_EQ(ve[v].scope(), std::vector<VariableId>{V(v)});
    }
  }
}

TEST(ExactTest, StrongCouplingsStayFinite) {
  const FactorGraph g = gen_ising_grid({3, 3, 2, 40.0, 5});
  const auto brute = exact_marginals(g, ExactEngine::Brute);
  const auto ve = exact_marginals(g, ExactEngine::VarElim);
  for (std::size_t v = 0; v < 9; ++v) EXPECT_LE(testing::max_abs(brute[v].values(), ve[v].values()), 1e-12);
}

TEST(ExactTest, BruteForceRefusesHugeStateSpaces) {
  const FactorGraph g = gen_ising_grid({5, 6, 2, 1.0, 1});
  EXPECT_THROW(exact_marginals(g, ExactEngine::Brute), CapacityExceededError);
  EXPECT_NO_THROW(exact_marginals(g, ExactEngine::VarElim));
}

TEST(ExactTest, EngineNames) {
  EXPECT_EQ(parse_engine("brute"), ExactEngine::Brute);
  EXPECT_EQ(parse_engine("varelim"), ExactEngine::VarElim);
  EXPECT_FALSE(parse_engine("junction"));
}

TEST(BeliefPropagationTest, ExactOnTrees) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomGraphSpec s;
    s.num_variables = 3 + 2 * seed;
    s.seed = seed;
    const FactorGraph g = gen_random_tree(s);
    const BpResult r = bp_marginals(g);
    ASSERT_TRUE(r.converged);
    const auto exact = exact_marginals(g);
    for (std::size_t v = 0; v < g.num_variables(); ++v)
      EXPECT_LE(testing::max_abs(r.beliefs[v].values(), exact[v].values()), 1e-9);
  }
}

TEST(BeliefPropagationTest, TriangleBeliefInsideExampleTwoBox) {
  const FactorGraph g = testing::triangle();
  const BpResult r = bp_marginals(g);
  ASSERT_TRUE(r.converged);
  const Box b = compute_bound(g, V(0), Method::SubT).box;
  EXPECT_TRUE(b.contains(r.beliefs[0], 1e-9));
}

TEST(BeliefPropagationTest, ReportsNonConvergence) {
  BpOptions opt;
  opt.max_iter = 1;
  const BpResult r = bp_marginals(gen_ising_grid({4, 4, 2, 3.0, 2}), opt);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.beliefs.size(), 16u);
}

TEST(BeliefPropagationTest, DampingConvergesToSameFixedPoint) {
  const FactorGraph g = gen_ising_grid({3, 3, 2, 0.3, 8});
  const BpResult a = bp_marginals(g);
  BpOptions opt;
  opt.damping = 0.5;
  const BpResult b = bp_marginals(g, opt);
  ASSERT_TRUE(a.converged && b.converged);
  for (std::size_t v = 0; v < 9; ++v) EXPECT_LE(testing::max_abs(a.beliefs[v].values(), b.beliefs[v].values()), 1e-7);
  opt.damping = 1.0;
  EXPECT_THROW(bp_marginals(g, opt), Error);
}

TEST(BeliefPropagationTest, ConvergedBeliefsInsideBothBoxes) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomGraphSpec s;
    s.num_variables = 3 + seed % 6;
    s.seed = seed;
    const FactorGraph g = gen_random_graph(s);
    const BpResult r = bp_marginals(g);
    if (!r.converged) continue;
    ++checked;
    for (std::size_t v = 0; v < g.num_variables(); ++v)
      for (Method m : {Method::SubT, Method::SAWT})
        EXPECT_TRUE(compute_bound(g, V(v), m, 500).box.contains(r.beliefs[v], 1e-9))
            << "seed " << seed << " variable " << v << " " << method_label(m);
  }
  EXPECT_GT(checked, 20u);
}

}  // namespace
}  // namespace boxprop

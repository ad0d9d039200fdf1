// Copyright 2026 The endoid Authors
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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "endoid/builder.hpp"
#include "endoid/error.hpp"
#include "endoid/model.hpp"
#include "endoid/solver.hpp"
#include "fixtures.hpp"

namespace endoid {
namespace {

MilpModel build(const InfluenceDiagram& d, BuildOptions opts = {}) {
  return build_milp(d, enumerate_active_paths(d), opts);
}

TEST(BuildMilp, NoDecisions) {
  DiagramBuilder b;
  const NodeId c = b.chance("C", {"a", "b"}, {}, {0.25, 0.75});
  b.value("V", {c}, {4.0, -2.0});
  const auto m = build(b.build());
  EXPECT_EQ(m.num_z, 0u);
  EXPECT_EQ(m.vars.size(), 2u);
  const auto x = induced_solution(m, {});
  EXPECT_NEAR(objective_value(m, x), 0.25 * 4.0 - 0.75 * 2.0, 1e-12);
}

TEST(BuildMilp, CountsForOneDecision) {
  DiagramBuilder b;
  const NodeId c = b.chance("C", {"a", "b"}, {}, {0.5, 0.5});
  const NodeId d = b.decision("D", {"x", "y"}, {c});
  b.value("V", {d}, {1.0, 0.0});
  const auto m = build(b.build());
  EXPECT_EQ(m.num_z, 4u);
  EXPECT_EQ(m.num_rows(RowRole::z_sum), 2u);
  EXPECT_EQ(m.num_rows(RowRole::pi_upper), 4u);
  EXPECT_EQ(m.num_rows(RowRole::pi_lower), 4u);
  EXPECT_EQ(m.num_rows(RowRole::cnac), 0u);
}

TEST(BuildMilp, ShiftDropsLowerRows) {
  const auto d = testing::two_stage();
  const auto m = build(d, {.positive_utility_shift = true});
  EXPECT_EQ(m.num_rows(RowRole::pi_lower), 0u);
  EXPECT_GT(m.shift, 0.0);
  double min_coef = 1e300;
  for (const auto& rec : m.paths) min_coef = std::min(min_coef, m.vars[rec.var].objective);
  EXPECT_DOUBLE_EQ(min_coef, 1.0);
}

TEST(BuildMilp, RowCountsPerInvariant) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 100; ++k) {
    const auto d = testing::random_diagram(rng);
    const auto m = build(d);
    std::size_t groups = 0;
    for (NodeId j : d.decision_nodes()) groups += decision_info_space(d, j).size();
    EXPECT_EQ(m.num_rows(RowRole::z_sum), groups);
    EXPECT_EQ(m.num_rows(RowRole::pi_upper), d.decision_nodes().size() * m.paths.size());
    EXPECT_EQ(m.num_rows(RowRole::pi_lower), m.paths.size());
  }
}

TEST(BuildMilp, RejectsConditionalArcsWithoutCnacs) {
  EXPECT_THROW(build(testing::conditional_pair(), {.cnacs = false}), DomainError);
  EXPECT_NO_THROW(build(testing::conditional_pair(), {.cnacs = true}));
}

TEST(BuildMilp, PlaySkipOptimum) {
  const auto d = testing::play_skip();
  const auto r = solve_bnb(build(d));
  ASSERT_EQ(r.status, SolveStatus::optimal);
  EXPECT_NEAR(r.solution->objective, 6.0, 1e-12);
  EXPECT_EQ(r.solution->strategy.local[0].choice[0], 0);
}

TEST(BuildMilp, InducedSolutionIsFeasible) {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 1000; ++k) {
    const auto d = testing::random_diagram(rng);
    const auto table = enumerate_active_paths(d);
    const bool shift = k % 2 == 0;
    const auto m = build_milp(d, table, {.positive_utility_shift = shift});
    const Strategy z = testing::random_strategy(d, rng);
    const auto x = induced_solution(m, encode_strategy(m, z));
    ASSERT_LE(max_violation(m, x), 1e-12);
    ASSERT_NEAR(objective_value(m, x), expected_utility(d, table, z), 1e-9);
  }
}

TEST(Cnacs, EmptyWithoutConditionalInformation) {
  EXPECT_TRUE(generate_cnacs(testing::two_stage()).empty());
}

TEST(Cnacs, ConditionalPairGrid) {
  const auto d = testing::conditional_pair();
  // Combined space (k, i): index 2 * k + i. Pairs differ in i only; they are
  // tied exactly when k = not_install.
  const auto pairs = generate_cnacs(d);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (CnacPair{d.id_of("j"), 2, 3}));
  const auto m = build(d);
  EXPECT_EQ(m.num_rows(RowRole::cnac), 2u);
}

TEST(Cnacs, OutputIsOrdered) {
  std::mt19937_64 rng(47);
  for (int k = 0; k < 100; ++k) {
    const auto d = testing::random_diagram(rng, {.conditional_arcs = true});
    const auto pairs = generate_cnacs(d);
    for (const auto& p : pairs) EXPECT_LT(p.index_a, p.index_b);
    EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return std::tie(a.node, a.index_a, a.index_b) < std::tie(b.node, b.index_a, b.index_b);
    }));
  }
}

TEST(Cnacs, RejectsDistinguishabilityOutsideInfoSet) {
  DiagramBuilder b;
  const NodeId k = b.chance("k", {"a", "b"}, {}, {0.5, 0.5});
  const NodeId i = b.chance("i", {"a", "b"}, {}, {0.5, 0.5});
  const NodeId j = b.decision("j", {"go", "stop"}, {}, {i});
  b.value("V", {j}, {1.0, 0.0});
  b.conditional_arc(i, j, {k}, Condition::atom(k, 0));
  EXPECT_THROW(generate_cnacs(b.build()), DomainError);
}

TEST(DecodeStrategy, Identity) {
  DiagramBuilder b;
  const NodeId d = b.decision("D", {"x", "y"}, {});
  b.value("V", {d}, {1.0, 0.0});
  const auto m = build(b.build());
  const Strategy z = decode_strategy(m, {1.0, 0.0});
  EXPECT_EQ(z.local[0].choice[0], 0);
  EXPECT_THROW(decode_strategy(m, {0.0, 0.0}), DomainError);
  EXPECT_THROW(decode_strategy(m, {0.6, 0.6}), DomainError);
}

TEST(DecodeStrategy, RoundTrip) {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 100; ++k) {
    const auto d = testing::random_diagram(rng);
    const auto m = build(d);
    const Strategy z = testing::random_strategy(d, rng);
    const auto values = encode_strategy(m, z);
    EXPECT_EQ(decode_strategy(m, values), z);
    EXPECT_EQ(encode_strategy(m, decode_strategy(m, values)), values);
  }
}

}  // namespace
}  // namespace endoid

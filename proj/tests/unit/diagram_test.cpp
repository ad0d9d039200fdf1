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

#include <random>

#include <gtest/gtest.h>

#include "endoid/builder.hpp"
#include "endoid/diagram.hpp"
#include "endoid/error.hpp"
#include "fixtures.hpp"

namespace endoid {
namespace {

InfluenceDiagram single_chance(std::vector<double> cpt) {
  DiagramBuilder b;
  const NodeId c = b.chance("C", {"a", "b"}, {}, std::move(cpt));
  b.value("V", {c}, {1.0, 2.0});
  return b.build();
}

TEST(Validate, MinimalDiagramIsValid) {
  EXPECT_TRUE(validate(single_chance({0.5, 0.5})).empty());
}

TEST(Validate, ReportsNormalization) {
  const auto report = validate(single_chance({0.5, 0.6}));
  ASSERT_TRUE(report.contains("cpt-normalization"));
  EXPECT_NE(report.to_string().find("probability vector sums to 1.1"), std::string::npos)
      << report.to_string();
}

TEST(Validate, ReportsNegativeEntry) {
  EXPECT_TRUE(validate(single_chance({1.5, -0.5})).contains("cpt-negative"));
}

TEST(Validate, ToleranceIsOneNanoUnit) {
  EXPECT_TRUE(validate(single_chance({0.5, 0.5 + 5e-10})).empty());
  EXPECT_FALSE(validate(single_chance({0.5, 0.5 + 5e-9})).empty());
}

TEST(Validate, DistinguishabilitySetOutsideInfoSet) {
  // Conditional-arc topology with k removed from I(j).
  DiagramBuilder b;
  const NodeId k = b.chance("k", {"install", "not_install"}, {}, {0.5, 0.5});
  const NodeId i = b.chance("i", {"good", "bad"}, {}, {0.3, 0.7});
  const NodeId j = b.decision("j", {"go", "stop"}, {}, {i});
  b.value("V", {i, j}, {5.0, 0.0, -4.0, 0.0});
  b.conditional_arc(i, j, {k}, Condition::atom(k, 0));
  const auto report = validate(b.build());
  EXPECT_TRUE(report.contains("dist-set-outside-info-set")) << report.to_string();
}

TEST(Validate, ConditionalPairIsValid) {
  const auto report = validate(testing::conditional_pair());
  EXPECT_TRUE(report.empty()) << report.to_string();
}

TEST(Validate, SourceInInfoSetIsRejected) {
  DiagramBuilder b;
  const NodeId k = b.chance("k", {"a", "b"}, {}, {0.5, 0.5});
  const NodeId j = b.decision("j", {"go", "stop"}, {k}, {k});
  b.value("V", {j}, {1.0, 0.0});
  b.conditional_arc(k, j, {k}, Condition::atom(k, 0));
  const auto report = validate(b.build());
  EXPECT_FALSE(report.empty());
}

TEST(Validate, CondInfoMemberNeedsExactlyOneArc) {
  DiagramBuilder b;
  const NodeId k = b.chance("k", {"a", "b"}, {}, {0.5, 0.5});
  const NodeId i = b.chance("i", {"a", "b"}, {}, {0.5, 0.5});
  const NodeId j = b.decision("j", {"go", "stop"}, {k}, {i});
  b.value("V", {j}, {1.0, 0.0});
  const auto report = validate(b.build());
  EXPECT_TRUE(report.contains("cond-info-arc-mismatch")) << report.to_string();
}

TEST(Validate, NoValueNode) {
  DiagramBuilder b;
  b.chance("C", {"a"}, {}, {1.0});
  EXPECT_TRUE(validate(b.build()).contains("no-value-node"));
}

TEST(Validate, ArcOrderViolation) {
  Node c{node_id(0), "C", NodeKind::chance, {"a", "b"}, {node_id(1)}, {}, {0.5, 0.5, 0.5, 0.5}};
  Node d{node_id(1), "D", NodeKind::decision, {"x", "y"}, {}, {}, {}};
  Node v{node_id(2), "V", NodeKind::value, {}, {node_id(0)}, {}, {0.0, 1.0}};
  const auto report = validate(InfluenceDiagram({c, d, v}, {}));
  EXPECT_TRUE(report.contains("arc-order")) << report.to_string();
}

TEST(Validate, IsPureAndIdempotent) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const auto d = testing::random_diagram(rng, {.conditional_arcs = true});
    EXPECT_EQ(validate(d), validate(d));
    EXPECT_TRUE(validate(d).empty()) << validate(d).to_string();
  }
}

TEST(Validate, RequireValidThrows) {
  EXPECT_THROW(require_valid(single_chance({0.5, 0.6})), DomainError);
  EXPECT_NO_THROW(require_valid(single_chance({0.5, 0.5})));
}

TEST(InfoStateSpace, EmptyInfoSetHasOneState) {
  const auto d = single_chance({0.5, 0.5});
  const auto space = info_state_space(d, node_id(0));
  EXPECT_EQ(space.size(), 1u);
  EXPECT_TRUE(space.decode(0).empty());
}

TEST(InfoStateSpace, ProductOrderLastFastest) {
  DiagramBuilder b;
  const NodeId a = b.chance("a", {"0", "1"}, {}, {0.5, 0.5});
  const NodeId c = b.chance("b", {"0", "1", "2"}, {}, {0.2, 0.3, 0.5});
  b.value("V", {a, c}, {0, 1, 2, 3, 4, 5});
  const auto d = b.build();
  const auto space = info_state_space(d, node_id(2));
  EXPECT_EQ(space.size(), 6u);
  EXPECT_EQ(space.decode(0), (std::vector<int>{0, 0}));
  EXPECT_EQ(space.decode(1), (std::vector<int>{0, 1}));
  EXPECT_EQ(space.decode(3), (std::vector<int>{1, 0}));
  for (std::size_t k = 0; k < space.size(); ++k) EXPECT_EQ(space.encode(space.decode(k)), k);
}

TEST(InfoStateSpace, TwoStageSecondChanceHasFourStates) {
  const auto d = testing::two_stage();
  EXPECT_EQ(info_state_space(d, d.id_of("C2")).size(), 4u);
}

TEST(InfoStateSpace, UnknownNodeThrows) {
  const auto d = testing::two_stage();
  EXPECT_THROW(info_state_space(d, node_id(99)), DomainError);
}

TEST(InfoStateSpace, SizeIsProductOnRandomDiagrams) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const auto d = testing::random_diagram(rng, {.max_strategies = 1e12});
    for (const Node& n : d.nodes()) {
      std::size_t expected = 1;
      for (NodeId i : n.info_set) expected *= d.num_states(i);
      ASSERT_EQ(info_state_space(d, n.id).size(), expected);
    }
  }
}

TEST(InfoStateSpace, DecisionSpaceAppendsConditionalMembers) {
  const auto d = testing::conditional_pair();
  const auto space = decision_info_space(d, d.id_of("j"));
  ASSERT_EQ(space.nodes().size(), 2u);
  EXPECT_EQ(space.nodes()[0], d.id_of("k"));
  EXPECT_EQ(space.nodes()[1], d.id_of("i"));
  EXPECT_EQ(info_state_label(d, space, 1), "(k=install,i=bad)");
}

TEST(Builder, PermutesTablesToSortedInfoSets) {
  DiagramBuilder b;
  const NodeId a = b.chance("a", {"0", "1"}, {}, {0.5, 0.5});
  const NodeId c = b.chance("c", {"0", "1", "2"}, {}, {0.2, 0.3, 0.5});
  // Given in (c, a) order: value = 10 * c + a.
  b.value("V", {c, a}, [](std::span<const int> s) { return 10.0 * s[0] + s[1]; });
  const auto d = b.build();
  const Node& v = d.node(node_id(2));
  ASSERT_EQ(v.info_set, (std::vector<NodeId>{a, c}));
  EXPECT_EQ(v.table, (std::vector<double>{0, 10, 20, 1, 11, 21}));
}

TEST(Condition, EvaluatesAndFolds) {
  const NodeId x = node_id(0), y = node_id(1);
  const auto c = Condition::any_of({Condition::atom(x, 1),
                                    Condition::all_of({Condition::atom(y, 0),
                                                       Condition::negate(Condition::atom(x, 2))})});
  auto eval = [&](int sx, int sy) {
    return c.evaluate([&](NodeId n) { return n == x ? sx : sy; });
  };
  EXPECT_TRUE(eval(1, 1));
  EXPECT_TRUE(eval(0, 0));
  EXPECT_FALSE(eval(2, 0));
  EXPECT_FALSE(eval(0, 1));
  EXPECT_EQ(c.nodes(), (std::vector<NodeId>{x, y}));

  const auto folded = c.substitute([&](NodeId n) -> std::optional<int> {
    if (n == x) return 1;
    return std::nullopt;
  });
  EXPECT_EQ(folded, Condition::constant(true));
  const auto partial = c.substitute([&](NodeId n) -> std::optional<int> {
    if (n == x) return 0;
    return std::nullopt;
  });
  EXPECT_EQ(partial, Condition::atom(y, 0));
}

}  // namespace
}  // namespace endoid

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
#include "endoid/decomposition.hpp"
#include "endoid/error.hpp"
#include "fixtures.hpp"

namespace endoid {
namespace {

double full_optimum(const InfluenceDiagram& d) {
  return solve_enumerate(d, enumerate_active_paths(d)).solution->objective;
}

std::vector<NodeId> prefix(const InfluenceDiagram& d, std::size_t n) {
  const auto s = d.state_nodes();
  return {s.begin(), s.begin() + static_cast<std::ptrdiff_t>(std::min(n, s.size()))};
}

TEST(Split, EmptySubHasNoSubproblems) {
  const auto d = testing::two_stage();
  const auto dec = split(d, plan_partition(d, prefix(d, 4)));
  EXPECT_TRUE(dec.subproblems.empty());
  EXPECT_EQ(dec.main_table, enumerate_active_paths(d));
  const auto r = solve_decomposed(d, plan_partition(d, prefix(d, 4)));
  EXPECT_NEAR(r.result.solution->objective, full_optimum(d), 1e-12);
}

TEST(Split, EmptyMainIsOneSubproblem) {
  const auto d = testing::two_stage();
  const auto r = solve_decomposed(d, plan_partition(d, {}));
  ASSERT_EQ(r.decomposition.subproblems.size(), 1u);
  EXPECT_NEAR(r.result.solution->objective, full_optimum(d), 1e-12);
}

TEST(Split, SlicesFixMainStates) {
  const auto d = testing::play_skip();
  const auto dec = split(d, plan_partition(d, {d.id_of("D")}));
  ASSERT_EQ(dec.subproblems.size(), 2u);
  const auto& play = dec.subproblems[0];
  EXPECT_EQ(main_state(dec, play, "D"), 0);
  EXPECT_EQ(play.main_probability, 1.0);
  const Node& c = play.diagram_slice.node(play.diagram_slice.id_of("C"));
  EXPECT_TRUE(c.info_set.empty());
  EXPECT_EQ(c.table, (std::vector<double>{0.6, 0.4}));
  EXPECT_THROW(main_state(dec, play, "C"), DomainError);
}

TEST(Split, ZeroProbabilityMainPathsHaveNoSubproblem) {
  DiagramBuilder b;
  const NodeId c1 = b.chance("C1", {"a", "b", "c"}, {}, {0.5, 0.5, 0.0});
  const NodeId d1 = b.decision("D1", {"x", "y"}, {c1});
  b.value("V", {c1, d1}, {1, 0, 0, 1, 2, 2});
  const auto d = b.build();
  const auto dec = split(d, plan_partition(d, {c1}));
  EXPECT_EQ(dec.subproblems.size(), 2u);
}

TEST(Split, RejectsInvalidPartition) {
  const auto d = testing::two_stage();
  const auto plan = plan_partition(d, {d.id_of("C1"), d.id_of("D1"), d.id_of("C2")});
  EXPECT_THROW(split(d, plan), DomainError);
  EXPECT_NO_THROW(split(d, plan, {.check_partition = false}));
}

TEST(SolveDecomposed, PlaySkipAfterDecision) {
  const auto d = testing::play_skip();
  const auto r = solve_decomposed(d, plan_partition(d, {d.id_of("D")}));
  ASSERT_EQ(r.result.status, SolveStatus::optimal);
  EXPECT_NEAR(r.result.solution->objective, 6.0, 1e-12);
  EXPECT_EQ(r.result.solution->strategy.local[0].choice[0], 0);
}

TEST(SolveDecomposed, MatchesFullOptimumOnValidPartitions) {
  std::mt19937_64 rng(131);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const auto d = testing::random_diagram(rng, {.conditional_arcs = k % 2 == 0});
    const double oracle = full_optimum(d);
    for (std::size_t n = 0; n <= d.state_nodes().size(); ++n) {
      const auto plan = plan_partition(d, prefix(d, n));
      if (!validate_partition(d, plan).empty()) continue;
      ++checked;
      const auto r = solve_decomposed(d, plan, {.workers = 2});
      ASSERT_EQ(r.result.status, SolveStatus::optimal);
      ASSERT_NEAR(r.result.solution->objective, oracle, 1e-9) << "diagram " << k << " n " << n;
    }
  }
  EXPECT_GT(checked, 600);
}

TEST(SolveDecomposed, SerialParallelAndMemoAgree) {
  std::mt19937_64 rng(137);
  for (int k = 0; k < 50; ++k) {
    const auto d = testing::random_diagram(rng, {.max_chance = 4, .max_strategies = 1e6});
    const auto plan = plan_partition(d, prefix(d, 2));
    if (!validate_partition(d, plan).empty()) continue;
    const auto a = solve_decomposed(d, plan, {.workers = 1, .memoize = false});
    const auto b = solve_decomposed(d, plan, {.workers = 8, .memoize = true});
    EXPECT_EQ(a.result.solution->objective, b.result.solution->objective);
    EXPECT_EQ(a.result.solution->strategy, b.result.solution->strategy);
    for (std::size_t s = 0; s < a.outcomes.size(); ++s) {
      EXPECT_EQ(a.outcomes[s].utility, b.outcomes[s].utility);
    }
    EXPECT_LE(b.unique_subproblems, a.unique_subproblems);
  }
}

TEST(SolveDecomposed, PluginReceivesEverySubproblem) {
  const auto d = testing::play_skip();
  const auto plan = plan_partition(d, {d.id_of("D")});
  DecomposeOptions opts;
  opts.plugin = [](const SubproblemSpec& spec) {
    const auto r = solve_bnb(build_milp(spec.diagram_slice,
                                        enumerate_active_paths(spec.diagram_slice)));
    return PluginResult{r.solution->objective, spec.main_path};
  };
  const auto r = solve_decomposed(d, plan, opts);
  EXPECT_NEAR(r.result.solution->objective, 6.0, 1e-12);
  ASSERT_EQ(r.outcomes.size(), 2u);
  EXPECT_EQ(std::any_cast<std::size_t>(r.outcomes[1].solution), 1u);
  EXPECT_EQ(r.decomposition.subproblems[0].solver_kind, SubproblemKind::plugin);
}

TEST(SolveDecomposed, FailingSubproblemNamesSubpath) {
  const auto d = testing::play_skip();
  DecomposeOptions opts;
  opts.plugin = [](const SubproblemSpec& spec) -> PluginResult {
    if (spec.main_path == 1) throw DomainError("boom");
    return {0.0, {}};
  };
  try {
    solve_decomposed(d, plan_partition(d, {d.id_of("D")}), opts);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(D=skip)"), std::string::npos) << e.what();
  }
}

TEST(SolveDecomposed, SubproblemCeiling) {
  const auto d = testing::play_skip();
  const auto r = solve_decomposed(d, plan_partition(d, {d.id_of("D")}), {.max_subproblems = 1});
  EXPECT_EQ(r.result.status, SolveStatus::capacity_exceeded);
}

TEST(Timing, RowShape) {
  const auto d = testing::play_skip();
  const auto r = solve_decomposed(d, plan_partition(d, {d.id_of("D")}));
  const auto row = timing_row(1, r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);
  EXPECT_EQ(row.substr(row.rfind(',') + 1), "6");
  EXPECT_EQ(timing_header().substr(0, 7), "n_main,");
}

}  // namespace
}  // namespace endoid

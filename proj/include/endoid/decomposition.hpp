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

/**
 * @file decomposition.hpp
 *
 * Subdiagram decomposition. The main problem is the decision model over
 * N_main whose path utilities are the main-side value nodes plus the optimum
 * of one subproblem per active main subpath. A subproblem is the diagram over
 * N_sub with every main node fixed to its state on that subpath.
 */

#ifndef ENDOID_DECOMPOSITION_HPP_
#define ENDOID_DECOMPOSITION_HPP_

#include <any>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "endoid/diagram.hpp"
#include "endoid/model.hpp"
#include "endoid/parallel.hpp"
#include "endoid/paths.hpp"
#include "endoid/solver.hpp"
#include "endoid/transforms.hpp"

namespace endoid {

enum class SubproblemKind { milp, plugin };

/// Marks placeholder nodes in id maps.
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct SubproblemSpec {
  std::size_t main_path = 0;         // row of the main path table
  std::vector<int> main_subpath;     // states of the main C and D nodes, by id
  double main_probability = 0.0;
  InfluenceDiagram diagram_slice;
  std::vector<NodeId> slice_to_original;  // by slice id; placeholder nodes map to none
  SubproblemKind solver_kind = SubproblemKind::milp;
};

struct PluginResult {
  double utility = 0.0;
  std::any solution;
};

/// Must be pure, deterministic and safe to call concurrently.
using SubproblemPlugin = std::function<PluginResult(const SubproblemSpec&)>;

struct Decomposition {
  PartitionPlan plan;
  InfluenceDiagram main_diagram;
  std::vector<NodeId> main_to_original;  // by main id; placeholder nodes map to none
  /// Active main subpaths; utilities hold the main-side value nodes only.
  PathTable main_table;
  /// One per row of main_table, or none when N_sub holds no chance or
  /// decision node.
  std::vector<SubproblemSpec> subproblems;
};

struct SplitOptions {
  SubproblemKind kind = SubproblemKind::milp;
  bool check_partition = true;
  std::uint64_t max_subproblems = 10'000'000;
};

/// Throws DomainError when check_partition is set and the plan violates the
/// partitioning condition, and CapacityError above max_subproblems.
Decomposition split(const InfluenceDiagram& d, const PartitionPlan& plan,
                    const SplitOptions& opts = {});

/// State of the main node `name` on the spec's subpath. Throws DomainError
/// when `name` is not a main chance or decision node.
int main_state(const Decomposition& dec, const SubproblemSpec& spec, std::string_view name);

struct SubproblemOutcome {
  double utility = 0.0;
  std::optional<Strategy> strategy;  // milp subproblems
  std::any solution;                 // plugin subproblems
  double time_s = 0.0;               // zero when reused
  bool reused = false;
  std::uint64_t nodes_explored = 0;
};

struct DecomposeOptions {
  unsigned workers = default_workers();
  /// Solve identical milp slices once.
  bool memoize = true;
  /// Used for every subproblem when set; the main problem is always a MILP.
  SubproblemPlugin plugin;
  bool check_partition = true;
  std::uint64_t max_subproblems = 10'000'000;
  BuildOptions build;
};

struct DecomposedResult {
  /// Main-problem solve; the objective is that of the full problem.
  SolveResult result;
  Decomposition decomposition;
  std::vector<SubproblemOutcome> outcomes;  // parallel to subproblems
  double split_time_s = 0.0;
  double main_time_s = 0.0;
  double sub_total_time_s = 0.0;
  double sub_max_time_s = 0.0;
  std::size_t unique_subproblems = 0;
};

/// Returns capacity_exceeded when the subproblem ceiling is hit. A failing
/// subproblem raises DomainError naming its main subpath.
DecomposedResult solve_decomposed(const InfluenceDiagram& d, const PartitionPlan& plan,
                                  const DecomposeOptions& opts = {});

/// Delimited timing table.
std::string timing_header();
std::string timing_row(std::size_t n_main, const DecomposedResult& r);

}  // namespace endoid

#endif  // ENDOID_DECOMPOSITION_HPP_

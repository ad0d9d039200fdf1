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
 * @file solver.hpp
 *
 * Exact solution of decision models.
 *
 * solve_enumerate() is the reference: it visits local strategies exhaustively.
 * solve_bnb() works on a MilpModel only. It branches on z-groups (decisions
 * by id, information states in order) with groups tied by C-NAC equalities
 * branched together, and bounds each node by the perfect-recall relaxation:
 * decisions whose group is unassigned may choose differently after every
 * history. The bound is exact at leaves and never below any completion.
 */

#ifndef ENDOID_SOLVER_HPP_
#define ENDOID_SOLVER_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "endoid/diagram.hpp"
#include "endoid/model.hpp"
#include "endoid/paths.hpp"

namespace endoid {

/// Absolute tolerance on objective comparisons.
inline constexpr double kObjectiveTolerance = 1e-9;

enum class SolveStatus { optimal, capacity_exceeded, infeasible };

std::string_view to_string(SolveStatus status) noexcept;

struct Solution {
  double objective = 0.0;
  Strategy strategy;
  std::vector<double> pi;  // per active path, in table order
};

struct SolveStats {
  std::uint64_t nodes_explored = 0;
  double wall_time_s = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<Solution> solution;
  SolveStats stats;
  std::string message;
};

struct EnumerateSolveOptions {
  /// Ceiling on the number of strategies visited.
  std::uint64_t limit = 10'000'000;
};

/// Exhaustive search. Information states made indistinguishable by
/// conditional arcs are merged first. The decision with the most strategies
/// is optimized per information state inside each visit, which is exact
/// because expected utility is separable in it once the others are fixed;
/// `limit` applies to the product over the remaining decisions.
SolveResult solve_enumerate(const InfluenceDiagram& d, const PathTable& table,
                            const EnumerateSolveOptions& opts = {});

struct BnbOptions {
  /// Checks at every node that the bound dominates each leaf found below it;
  /// throws std::logic_error otherwise.
  bool check_bound = false;
  /// Ceiling on explored nodes; 0 means none.
  std::uint64_t node_limit = 0;
};

SolveResult solve_bnb(const MilpModel& model, const BnbOptions& opts = {});

/// Column names in MPS files.
std::string mps_column_name(const MilpModel& model, std::size_t var);

/// Fixed-format MPS. Maximization is written as minimization of the negated
/// objective. With `map` non-null, one "name<TAB>label" line per column and
/// row is written there. Throws DomainError when a name does not fit in 8
/// characters.
void export_mps(const MilpModel& model, std::ostream& mps, std::ostream* map = nullptr);

/// Writes `path` and `path` + ".map". Throws IoError on failure.
void write_mps(const MilpModel& model, const std::filesystem::path& path);

}  // namespace endoid

#endif  // ENDOID_SOLVER_HPP_

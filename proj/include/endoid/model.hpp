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
 * @file model.hpp
 *
 * Mixed-integer linear program over a diagram and its active paths.
 *
 * Variables: one binary z(s_j | s_I(j), s_Ic(j)) per decision node, combined
 * information state and choice; one continuous pi(s) in [0, p(s)] per active
 * path. Rows:
 *
 *  - z_sum:    sum over s_j of z(s_j | info) = 1, one per (decision, info);
 *  - pi_upper: pi(s) <= z(s_j | info(s)), one per (decision, path);
 *  - pi_lower: pi(s) >= p(s) + sum_j z(s_j | info(s)) - |D|, one per path,
 *              omitted under the positive-utility shift;
 *  - cnac:     z(s_j | s_I, s_Ic) = z(s_j | s_I, s'_Ic) for indistinguishable
 *              pairs of conditional information states.
 *
 * The objective maximizes sum of pi(s) * (U(s) + shift) plus
 * `objective_offset` (= -shift), so reported values are unshifted.
 */

#ifndef ENDOID_MODEL_HPP_
#define ENDOID_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "endoid/diagram.hpp"
#include "endoid/paths.hpp"

namespace endoid {

enum class VarKind { binary, continuous };
enum class Sense { le, ge, eq };
enum class RowRole { z_sum, pi_upper, pi_lower, cnac };

struct Variable {
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = 1.0;
  double objective = 0.0;
  std::string label;  // diagram entity, e.g. "z[D2|(C1=win)]=play"
};

struct Term {
  std::size_t var;
  double coef;
};

struct Row {
  RowRole role = RowRole::z_sum;
  Sense sense = Sense::eq;
  std::vector<Term> terms;
  double rhs = 0.0;
};

/// The z-variables of one (decision, combined information state) pair:
/// variables first_var .. first_var + count - 1, one per choice.
struct ZGroup {
  NodeId node{};
  std::size_t info_index = 0;
  std::size_t first_var = 0;
  std::size_t count = 0;
};

struct PathRecord {
  std::size_t var = 0;             // pi variable
  double p = 0.0;
  double u = 0.0;                  // unshifted
  std::vector<std::size_t> z;      // z variable selected per decision ordinal
};

/// Two combined information states of `node` whose z-variables must agree
/// for every choice. index_a < index_b.
struct CnacPair {
  NodeId node{};
  std::size_t index_a = 0;
  std::size_t index_b = 0;

  friend bool operator==(const CnacPair&, const CnacPair&) = default;
};

struct BuildOptions {
  bool positive_utility_shift = false;
  bool cnacs = true;
};

struct MilpModel {
  std::vector<Variable> vars;   // z-variables first, then pi
  std::vector<Row> rows;
  std::size_t num_z = 0;
  std::vector<ZGroup> groups;   // by decision id, then information index
  std::vector<std::size_t> group_offset;  // first group per decision ordinal
  std::vector<PathRecord> paths;           // parallel to `table`
  PathTable table;
  std::vector<NodeId> decisions;
  std::vector<std::size_t> decision_slot;  // position within a path
  double shift = 0.0;
  double objective_offset = 0.0;
  bool has_pi_lower = false;

  std::size_t num_rows(RowRole role) const;
  const ZGroup& group(std::size_t ordinal, std::size_t info_index) const {
    return groups[group_offset[ordinal] + info_index];
  }
};

/// Throws DomainError for an invalid diagram, a table of the wrong width,
/// or conditional arcs with cnacs=false.
MilpModel build_milp(const InfluenceDiagram& d, const PathTable& table,
                     const BuildOptions& opts = {});

/// Indistinguishable pairs, sorted by (node, index_a, index_b). Throws
/// DomainError when a distinguishability set is not inside I(target).
std::vector<CnacPair> generate_cnacs(const InfluenceDiagram& d);

/// z_values holds at least num_z entries. Throws DomainError when a group
/// does not sum to 1 within 1e-6 or has no entry above 1/2.
Strategy decode_strategy(const MilpModel& model, const std::vector<double>& z_values);

/// Inverse of decode_strategy: num_z binary values.
std::vector<double> encode_strategy(const MilpModel& model, const Strategy& z);

/// Full variable vector for binary z: pi(s) = p(s) when every z-factor of s
/// is 1, else 0.
std::vector<double> induced_solution(const MilpModel& model, const std::vector<double>& z_values);

/// Objective including objective_offset.
double objective_value(const MilpModel& model, const std::vector<double>& x);

/// Largest violation of any row or bound.
double max_violation(const MilpModel& model, const std::vector<double>& x);

}  // namespace endoid

#endif  // ENDOID_MODEL_HPP_

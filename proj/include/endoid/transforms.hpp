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
 * @file transforms.hpp
 *
 * Diagram rewrites and graph analyses.
 *
 * The directed graph used for d-separation has an edge i -> j for every
 * member i of I(j) and of I_c(j); value nodes appear as sinks.
 */

#ifndef ENDOID_TRANSFORMS_HPP_
#define ENDOID_TRANSFORMS_HPP_

#include <string_view>
#include <vector>

#include "endoid/diagram.hpp"

namespace endoid {

inline constexpr std::string_view kNoObservation = "no_observation";

struct ObservationTransform {
  InfluenceDiagram diagram;
  std::vector<NodeId> old_to_new;          // indexed by old id
  std::vector<NodeId> observation_nodes;   // new ids, one per conditional arc
};

/// Replaces every conditional arc (i, j, T, F) by a chance node o placed
/// immediately before j, with I(o) = {i} and T, states S_i plus
/// "no_observation" (last), and P(o = s_i) = 1 when F holds, else
/// P(o = no_observation) = 1. o joins I(j); i does not.
ObservationTransform to_observation_nodes(const InfluenceDiagram& d);

/// CPT of the deterministic observation node for the arc (source, target),
/// rows over I(o) = {source} and T in id order.
std::vector<double> deterministic_observation_cpt(const InfluenceDiagram& d, NodeId source,
                                                  NodeId target);

/// As to_observation_nodes, but the node for the arc (source, target) uses
/// `observation_cpt`. Throws DomainError when the arc does not exist or the
/// CPT has the wrong size, a negative entry, or a row not summing to 1.
ObservationTransform with_imperfect_observation(const InfluenceDiagram& d, NodeId source,
                                                NodeId target,
                                                const std::vector<double>& observation_cpt);

/// Whether every trail between X and Y is blocked given Z. Throws
/// DomainError when the sets overlap or reference unknown nodes.
bool d_separated(const InfluenceDiagram& d, const std::vector<NodeId>& x,
                 const std::vector<NodeId>& y, const std::vector<NodeId>& z);

/// Value nodes reachable from `j` by directed edges.
std::vector<NodeId> value_descendants(const InfluenceDiagram& d, NodeId j);

/// False when i is d-separated from the value descendants of decision j
/// given I(j) and j. Throws DomainError when i is in I(j), i == j, or j is
/// not a decision node.
bool is_requisite(const InfluenceDiagram& d, NodeId i, NodeId j);

enum class Evidence { arc_exists, nonrequisite, requisite };

std::string_view to_string(Evidence e) noexcept;

struct PairEvidence {
  NodeId main{};
  NodeId sub{};
  Evidence evidence = Evidence::arc_exists;
};

struct PartitionPlan {
  std::vector<NodeId> main_nodes;  // sorted
  std::vector<NodeId> sub_nodes;   // sorted
  /// One entry per (chance or decision node in main, decision in sub).
  std::vector<PairEvidence> evidence;
};

/// Sub nodes are the complement of `main_nodes`. A value node goes to the
/// subproblem when its information set meets it and to the main problem
/// otherwise, regardless of whether it appears in `main_nodes`. Evidence is
/// computed for every required pair.
PartitionPlan plan_partition(const InfluenceDiagram& d, std::vector<NodeId> main_nodes);

/// Codes: partition-cover, partition-value-node (a main value node reading a
/// subproblem node), partition-back-arc, partition-requisite (one per
/// offending pair, naming both nodes).
ValidationReport validate_partition(const InfluenceDiagram& d, const PartitionPlan& plan);

}  // namespace endoid

#endif  // ENDOID_TRANSFORMS_HPP_

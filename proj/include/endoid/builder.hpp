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

#ifndef ENDOID_BUILDER_HPP_
#define ENDOID_BUILDER_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "endoid/diagram.hpp"

namespace endoid {

/// Incremental construction of an InfluenceDiagram. Nodes receive ids in
/// insertion order.
///
/// Tables are given with respect to the information set *as passed*; the
/// builder sorts every information set by id and permutes the table to match.
class DiagramBuilder {
 public:
  /// Row function: states of `info` (in the order passed) -> probability row.
  using RowFn = std::function<std::vector<double>(std::span<const int>)>;
  /// Utility function: states of `info` (in the order passed) -> utility.
  using UtilityFn = std::function<double(std::span<const int>)>;

  NodeId chance(std::string name, std::vector<std::string> states, std::vector<NodeId> info,
                std::vector<double> cpt);
  NodeId chance(std::string name, std::vector<std::string> states, std::vector<NodeId> info,
                const RowFn& row);

  NodeId decision(std::string name, std::vector<std::string> states, std::vector<NodeId> info,
                  std::vector<NodeId> cond_info = {});

  NodeId value(std::string name, std::vector<NodeId> info, std::vector<double> utility);
  NodeId value(std::string name, std::vector<NodeId> info, const UtilityFn& utility);

  void conditional_arc(NodeId source, NodeId target, std::vector<NodeId> dist_set,
                       Condition condition);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(index_of(id)); }

  InfluenceDiagram build() const;

 private:
  std::size_t product_of_states(const std::vector<NodeId>& info) const;
  void sort_info(Node& n, std::size_t row_width);

  std::vector<Node> nodes_;
  std::vector<ConditionalArc> arcs_;
};

}  // namespace endoid

#endif  // ENDOID_BUILDER_HPP_

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

#include "endoid/builder.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "endoid/error.hpp"

namespace endoid {

std::size_t DiagramBuilder::product_of_states(const std::vector<NodeId>& info) const {
  std::size_t size = 1;
  for (NodeId i : info) {
    if (index_of(i) >= nodes_.size()) {
      throw DomainError(fmt::format("information set references node {} before it exists",
                                    index_of(i)));
    }
    size *= std::max<std::size_t>(nodes_[index_of(i)].states.size(), 1);
  }
  return size;
}

void DiagramBuilder::sort_info(Node& n, std::size_t row_width) {
  const auto& info = n.info_set;
  std::vector<std::size_t> order(info.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return info[a] < info[b]; });
  if (std::is_sorted(info.begin(), info.end())) return;

  std::vector<std::size_t> radices;
  for (NodeId i : info) radices.push_back(nodes_[index_of(i)].states.size());
  const InfoStateSpace given(info, radices);

  std::vector<NodeId> sorted;
  std::vector<std::size_t> sorted_radices;
  for (std::size_t k : order) {
    sorted.push_back(info[k]);
    sorted_radices.push_back(radices[k]);
  }
  const InfoStateSpace target(sorted, sorted_radices);

  std::vector<double> table(n.table.size());
  std::vector<int> given_states(info.size());
  for (std::size_t k = 0; k < target.size(); ++k) {
    const auto states = target.decode(k);
    for (std::size_t p = 0; p < order.size(); ++p) given_states[order[p]] = states[p];
    const std::size_t from = given.encode(given_states);
    std::copy_n(n.table.begin() + static_cast<std::ptrdiff_t>(from * row_width), row_width,
                table.begin() + static_cast<std::ptrdiff_t>(k * row_width));
  }
  n.info_set = std::move(sorted);
  n.table = std::move(table);
}

NodeId DiagramBuilder::chance(std::string name, std::vector<std::string> states,
                              std::vector<NodeId> info, std::vector<double> cpt) {
  Node n;
  n.id = node_id(nodes_.size());
  n.name = std::move(name);
  n.kind = NodeKind::chance;
  n.states = std::move(states);
  n.info_set = std::move(info);
  n.table = std::move(cpt);
  const std::size_t rows = product_of_states(n.info_set);
  if (n.table.size() != rows * n.states.size()) {
    throw DomainError(fmt::format("CPT of '{}' has {} entries, expected {}", n.name, n.table.size(),
                                  rows * n.states.size()));
  }
  sort_info(n, n.states.size());
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

NodeId DiagramBuilder::chance(std::string name, std::vector<std::string> states,
                              std::vector<NodeId> info, const RowFn& row) {
  std::vector<std::size_t> radices;
  product_of_states(info);
  for (NodeId i : info) radices.push_back(nodes_[index_of(i)].states.size());
  const InfoStateSpace space(info, radices);
  std::vector<double> cpt;
  cpt.reserve(space.size() * states.size());
  for (std::size_t k = 0; k < space.size(); ++k) {
    const auto given = space.decode(k);
    const auto r = row(given);
    if (r.size() != states.size()) {
      throw DomainError(fmt::format("CPT row of '{}' has {} entries, expected {}", name, r.size(),
                                    states.size()));
    }
    cpt.insert(cpt.end(), r.begin(), r.end());
  }
  return chance(std::move(name), std::move(states), std::move(info), std::move(cpt));
}

NodeId DiagramBuilder::decision(std::string name, std::vector<std::string> states,
                                std::vector<NodeId> info, std::vector<NodeId> cond_info) {
  Node n;
  n.id = node_id(nodes_.size());
  n.name = std::move(name);
  n.kind = NodeKind::decision;
  n.states = std::move(states);
  product_of_states(info);
  product_of_states(cond_info);
  std::sort(info.begin(), info.end());
  std::sort(cond_info.begin(), cond_info.end());
  n.info_set = std::move(info);
  n.cond_info_set = std::move(cond_info);
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

NodeId DiagramBuilder::value(std::string name, std::vector<NodeId> info,
                             std::vector<double> utility) {
  Node n;
  n.id = node_id(nodes_.size());
  n.name = std::move(name);
  n.kind = NodeKind::value;
  n.info_set = std::move(info);
  n.table = std::move(utility);
  const std::size_t rows = product_of_states(n.info_set);
  if (n.table.size() != rows) {
    throw DomainError(fmt::format("utility table of '{}' has {} entries, expected {}", n.name,
                                  n.table.size(), rows));
  }
  sort_info(n, 1);
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

NodeId DiagramBuilder::value(std::string name, std::vector<NodeId> info,
                             const UtilityFn& utility) {
  std::vector<std::size_t> radices;
  product_of_states(info);
  for (NodeId i : info) radices.push_back(nodes_[index_of(i)].states.size());
  const InfoStateSpace space(info, radices);
  std::vector<double> table(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) table[k] = utility(space.decode(k));
  return value(std::move(name), std::move(info), std::move(table));
}

void DiagramBuilder::conditional_arc(NodeId source, NodeId target, std::vector<NodeId> dist_set,
                                     Condition condition) {
  std::sort(dist_set.begin(), dist_set.end());
  arcs_.push_back({source, target, std::move(dist_set), std::move(condition)});
}

InfluenceDiagram DiagramBuilder::build() const { return InfluenceDiagram(nodes_, arcs_); }

}  // namespace endoid

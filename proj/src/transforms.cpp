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

#include "endoid/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <set>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "endoid/error.hpp"

namespace endoid {

namespace {

const ConditionalArc& find_arc(const InfluenceDiagram& d, NodeId source, NodeId target) {
  for (const ConditionalArc& a : d.cond_arcs()) {
    if (a.source == source && a.target == target) return a;
  }
  throw DomainError(fmt::format("no conditional arc from node {} to node {}", index_of(source),
                                index_of(target)));
}

std::vector<NodeId> observation_parents(const ConditionalArc& a) {
  std::vector<NodeId> parents = a.dist_set;
  parents.push_back(a.source);
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
  return parents;
}

std::string unique_name(const InfluenceDiagram& d, std::set<std::string>& taken,
                        const std::string& base) {
  std::string name = base;
  for (int k = 2; d.find(name).has_value() || taken.count(name); ++k) {
    name = fmt::format("{}_{}", base, k);
  }
  taken.insert(name);
  return name;
}

ObservationTransform transform(const InfluenceDiagram& d,
                               const std::optional<std::pair<const ConditionalArc*,
                                                             const std::vector<double>*>>& custom) {
  require_valid(d);
  const std::size_t n = d.size();
  const auto arcs = d.cond_arcs();

  // New position of every old node and of every observation node.
  std::vector<std::vector<std::size_t>> arcs_before(n);
  for (std::size_t a = 0; a < arcs.size(); ++a) arcs_before[index_of(arcs[a].target)].push_back(a);

  ObservationTransform out;
  out.old_to_new.resize(n);
  std::vector<NodeId> obs_id(arcs.size());
  std::size_t next = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a : arcs_before[k]) obs_id[a] = node_id(next++);
    out.old_to_new[k] = node_id(next++);
  }
  auto remap = [&](NodeId id) { return out.old_to_new[index_of(id)]; };
  auto remap_all = [&](const std::vector<NodeId>& ids) {
    std::vector<NodeId> r;
    for (NodeId i : ids) r.push_back(remap(i));
    return r;
  };

  std::set<std::string> taken;
  std::vector<Node> nodes(next);
  for (std::size_t k = 0; k < n; ++k) {
    const Node& old = d.node(node_id(k));
    for (std::size_t a : arcs_before[k]) {
      const ConditionalArc& arc = arcs[a];
      const Node& src = d.node(arc.source);
      Node o;
      o.id = obs_id[a];
      o.name = unique_name(d, taken, fmt::format("O_{}_{}", src.name, old.name));
      o.kind = NodeKind::chance;
      o.states = src.states;
      o.states.emplace_back(kNoObservation);
      const auto parents = observation_parents(arc);
      o.info_set = remap_all(parents);
      if (custom && custom->first == &arc) {
        o.table = *custom->second;
      } else {
        o.table = deterministic_observation_cpt(d, arc.source, arc.target);
      }
      out.observation_nodes.push_back(o.id);
      nodes[index_of(o.id)] = std::move(o);
    }
    Node copy = old;
    copy.id = remap(old.id);
    copy.info_set = remap_all(old.info_set);
    copy.cond_info_set.clear();
    for (std::size_t a : arcs_before[k]) copy.info_set.push_back(obs_id[a]);
    std::sort(copy.info_set.begin(), copy.info_set.end());
    nodes[index_of(copy.id)] = std::move(copy);
  }
  std::sort(out.observation_nodes.begin(), out.observation_nodes.end());
  out.diagram = InfluenceDiagram(std::move(nodes), {});
  return out;
}

}  // namespace

std::vector<double> deterministic_observation_cpt(const InfluenceDiagram& d, NodeId source,
                                                  NodeId target) {
  const ConditionalArc& arc = find_arc(d, source, target);
  const auto parents = observation_parents(arc);
  std::vector<std::size_t> radices;
  for (NodeId p : parents) radices.push_back(d.num_states(p));
  const InfoStateSpace space(parents, radices);
  const std::size_t width = d.num_states(source) + 1;
  const auto src_pos = static_cast<std::size_t>(
      std::find(parents.begin(), parents.end(), source) - parents.begin());

  std::vector<double> cpt(space.size() * width, 0.0);
  for (std::size_t k = 0; k < space.size(); ++k) {
    const auto states = space.decode(k);
    const bool revealed = arc.condition.evaluate([&](NodeId node) {
      const auto p = std::find(parents.begin(), parents.end(), node);
      return states[static_cast<std::size_t>(p - parents.begin())];
    });
    const std::size_t s = revealed ? static_cast<std::size_t>(states[src_pos]) : width - 1;
    cpt[k * width + s] = 1.0;
  }
  return cpt;
}

ObservationTransform to_observation_nodes(const InfluenceDiagram& d) {
  return transform(d, std::nullopt);
}

ObservationTransform with_imperfect_observation(const InfluenceDiagram& d, NodeId source,
                                                NodeId target,
                                                const std::vector<double>& observation_cpt) {
  const ConditionalArc& arc = find_arc(d, source, target);
  const std::size_t width = d.num_states(source) + 1;
  std::size_t rows = 1;
  for (NodeId p : observation_parents(arc)) rows *= d.num_states(p);
  if (observation_cpt.size() != rows * width) {
    throw DomainError(fmt::format("observation CPT has {} entries, expected {}",
                                  observation_cpt.size(), rows * width));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t s = 0; s < width; ++s) {
      const double v = observation_cpt[r * width + s];
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError(fmt::format("observation CPT row {} has an invalid entry {}", r, v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      throw DomainError(fmt::format("observation CPT row {} sums to {}", r, sum));
    }
  }
  return transform(d, std::pair{&arc, &observation_cpt});
}

namespace {

struct Graph {
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::vector<std::size_t>> children;

  explicit Graph(const InfluenceDiagram& d) : parents(d.size()), children(d.size()) {
    for (const Node& n : d.nodes()) {
      const std::size_t j = index_of(n.id);
      for (NodeId i : n.info_set) parents[j].push_back(index_of(i));
      for (NodeId i : n.cond_info_set) parents[j].push_back(index_of(i));
      for (std::size_t i : parents[j]) children[i].push_back(j);
    }
  }
};

void check_ids(const InfluenceDiagram& d, const std::vector<NodeId>& ids) {
  for (NodeId i : ids) {
    if (index_of(i) >= d.size()) throw DomainError(fmt::format("unknown node id {}", index_of(i)));
  }
}

}  // namespace

bool d_separated(const InfluenceDiagram& d, const std::vector<NodeId>& x,
                 const std::vector<NodeId>& y, const std::vector<NodeId>& z) {
  check_ids(d, x);
  check_ids(d, y);
  check_ids(d, z);
  std::vector<int> owner(d.size(), -1);
  int set_index = 0;
  for (const auto* set : {&x, &y, &z}) {
    for (NodeId i : *set) {
      if (owner[index_of(i)] >= 0 && owner[index_of(i)] != set_index) {
        throw DomainError(fmt::format("node '{}' appears in more than one set", d.node(i).name));
      }
      owner[index_of(i)] = set_index;
    }
    ++set_index;
  }

  const Graph g(d);
  std::vector<bool> in_z(d.size(), false);
  for (NodeId i : z) in_z[index_of(i)] = true;

  // Z and its ancestors.
  std::vector<bool> anc(d.size(), false);
  std::deque<std::size_t> queue;
  for (NodeId i : z) queue.push_back(index_of(i));
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    if (anc[n]) continue;
    anc[n] = true;
    for (std::size_t p : g.parents[n]) queue.push_back(p);
  }

  // Trails: (node, arrived from a child) or (node, arrived from a parent).
  std::vector<bool> seen_up(d.size(), false), seen_down(d.size(), false);
  std::vector<bool> reachable(d.size(), false);
  std::deque<std::pair<std::size_t, bool>> trail;
  for (NodeId i : x) trail.emplace_back(index_of(i), true);
  while (!trail.empty()) {
    const auto [n, up] = trail.front();
    trail.pop_front();
    auto& seen = up ? seen_up : seen_down;
    if (seen[n]) continue;
    seen[n] = true;
    if (!in_z[n]) reachable[n] = true;
    if (up) {
      if (in_z[n]) continue;
      for (std::size_t p : g.parents[n]) trail.emplace_back(p, true);
      for (std::size_t c : g.children[n]) trail.emplace_back(c, false);
    } else {
      if (!in_z[n]) {
        for (std::size_t c : g.children[n]) trail.emplace_back(c, false);
      }
      if (anc[n]) {
        for (std::size_t p : g.parents[n]) trail.emplace_back(p, true);
      }
    }
  }
  return std::none_of(y.begin(), y.end(), [&](NodeId i) { return reachable[index_of(i)]; });
}

std::vector<NodeId> value_descendants(const InfluenceDiagram& d, NodeId j) {
  check_ids(d, {j});
  const Graph g(d);
  std::vector<bool> seen(d.size(), false);
  std::deque<std::size_t> queue{index_of(j)};
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    for (std::size_t c : g.children[n]) {
      if (!seen[c]) {
        seen[c] = true;
        queue.push_back(c);
      }
    }
  }
  std::vector<NodeId> out;
  for (NodeId v : d.value_nodes()) {
    if (seen[index_of(v)]) out.push_back(v);
  }
  return out;
}

bool is_requisite(const InfluenceDiagram& d, NodeId i, NodeId j) {
  check_ids(d, {i, j});
  const Node& dj = d.node(j);
  if (dj.kind != NodeKind::decision) {
    throw DomainError(fmt::format("'{}' is not a decision node", dj.name));
  }
  if (i == j || std::binary_search(dj.info_set.begin(), dj.info_set.end(), i)) {
    throw DomainError(fmt::format("'{}' is already known at '{}'", d.node(i).name, dj.name));
  }
  const auto values = value_descendants(d, j);
  if (values.empty()) return false;
  std::vector<NodeId> given = dj.info_set;
  given.push_back(j);
  return !d_separated(d, {i}, values, given);
}

std::string_view to_string(Evidence e) noexcept {
  switch (e) {
    case Evidence::arc_exists:
      return "arc-exists";
    case Evidence::nonrequisite:
      return "nonrequisite";
    case Evidence::requisite:
      return "requisite";
  }
  return "unknown";
}

PartitionPlan plan_partition(const InfluenceDiagram& d, std::vector<NodeId> main_nodes) {
  check_ids(d, main_nodes);
  std::vector<bool> in_main(d.size(), false);
  for (NodeId i : main_nodes) {
    if (d.node(i).kind != NodeKind::value) in_main[index_of(i)] = true;
  }
  for (NodeId v : d.value_nodes()) {
    const auto& info = d.node(v).info_set;
    in_main[index_of(v)] =
        std::all_of(info.begin(), info.end(), [&](NodeId i) { return in_main[index_of(i)]; });
  }
  PartitionPlan plan;
  for (const Node& n : d.nodes()) {
    (in_main[index_of(n.id)] ? plan.main_nodes : plan.sub_nodes).push_back(n.id);
  }
  for (NodeId i : plan.main_nodes) {
    if (d.node(i).kind == NodeKind::value) continue;
    for (NodeId j : plan.sub_nodes) {
      const Node& dj = d.node(j);
      if (dj.kind != NodeKind::decision) continue;
      Evidence e = Evidence::arc_exists;
      if (!std::binary_search(dj.info_set.begin(), dj.info_set.end(), i)) {
        e = is_requisite(d, i, j) ? Evidence::requisite : Evidence::nonrequisite;
      }
      plan.evidence.push_back({i, j, e});
    }
  }
  return plan;
}

ValidationReport validate_partition(const InfluenceDiagram& d, const PartitionPlan& plan) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message, std::vector<NodeId> nodes) {
    report.violations.push_back({std::move(code), std::move(message), std::move(nodes)});
  };

  std::vector<int> side(d.size(), -1);
  for (int s = 0; s < 2; ++s) {
    for (NodeId i : s == 0 ? plan.main_nodes : plan.sub_nodes) {
      if (index_of(i) >= d.size()) {
        add("partition-cover", fmt::format("unknown node id {}", index_of(i)), {i});
        continue;
      }
      if (side[index_of(i)] >= 0) {
        add("partition-cover", fmt::format("'{}' is assigned twice", d.node(i).name), {i});
      }
      side[index_of(i)] = s;
    }
  }
  for (const Node& n : d.nodes()) {
    if (side[index_of(n.id)] < 0) {
      add("partition-cover", fmt::format("'{}' is not assigned", n.name), {n.id});
    }
  }
  if (!report.empty()) return report;

  for (NodeId v : d.value_nodes()) {
    if (side[index_of(v)] != 0) continue;
    for (NodeId i : d.node(v).info_set) {
      if (side[index_of(i)] == 1) {
        add("partition-value-node",
            fmt::format("main value node '{}' depends on subproblem node '{}'", d.node(v).name,
                        d.node(i).name),
            {v, i});
        break;
      }
    }
  }
  for (const Node& n : d.nodes()) {
    if (side[index_of(n.id)] != 0 || n.kind == NodeKind::value) continue;
    for (const auto* set : {&n.info_set, &n.cond_info_set}) {
      for (NodeId i : *set) {
        if (side[index_of(i)] == 1) {
          add("partition-back-arc",
              fmt::format("arc from subproblem node '{}' to main node '{}'", d.node(i).name,
                          n.name),
              {i, n.id});
        }
      }
    }
  }
  for (NodeId i : plan.main_nodes) {
    if (d.node(i).kind == NodeKind::value) continue;
    for (NodeId j : plan.sub_nodes) {
      const Node& dj = d.node(j);
      if (dj.kind != NodeKind::decision) continue;
      if (std::binary_search(dj.info_set.begin(), dj.info_set.end(), i)) continue;
      if (is_requisite(d, i, j)) {
        add("partition-requisite",
            fmt::format("('{}', '{}'): no arc and '{}' is requisite for '{}'", d.node(i).name,
                        dj.name, d.node(i).name, dj.name),
            {i, j});
      }
    }
  }
  return report;
}

}  // namespace endoid

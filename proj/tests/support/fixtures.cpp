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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "endoid/builder.hpp"

namespace endoid::testing {

InfluenceDiagram play_skip() {
  DiagramBuilder b;
  const NodeId d = b.decision("D", {"play", "skip"}, {});
  const NodeId c = b.chance("C", {"win", "lose"}, {d}, {0.6, 0.4, 0.5, 0.5});
  b.value("V", {d, c}, {10.0, 0.0, 1.0, 1.0});
  return b.build();
}

InfluenceDiagram two_stage(double p_c1, double p_c2) {
  DiagramBuilder b;
  const NodeId c1 = b.chance("C1", {"a", "b"}, {}, {p_c1, 1.0 - p_c1});
  const NodeId d1 = b.decision("D1", {"x", "y"}, {c1});
  const NodeId c2 = b.chance("C2", {"a", "b"}, {d1, c1},
                             [&](std::span<const int>) {
                               return std::vector<double>{p_c2, 1.0 - p_c2};
                             });
  const NodeId d2 = b.decision("D2", {"x", "y"}, {c2});
  b.value("V", {c1, d1, c2, d2}, [](std::span<const int> s) {
    return static_cast<double>(s[0] + 2 * s[1] - s[2] + 3 * (s[3] == s[2]));
  });
  return b.build();
}

InfluenceDiagram conditional_pair() {
  DiagramBuilder b;
  const NodeId k = b.chance("k", {"install", "not_install"}, {}, {0.5, 0.5});
  const NodeId i = b.chance("i", {"good", "bad"}, {}, {0.3, 0.7});
  const NodeId j = b.decision("j", {"go", "stop"}, {k}, {i});
  b.value("V", {i, j}, {5.0, 0.0, -4.0, 0.0});
  b.conditional_arc(i, j, {k}, Condition::atom(k, 0));
  return b.build();
}

namespace {

std::vector<double> random_row(std::mt19937_64& rng, std::size_t n, double zero_probability) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution zero(zero_probability);
  std::vector<double> row(n);
  for (auto& x : row) x = zero(rng) ? 0.0 : u(rng);
  if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) {
    row[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
  }
  double sum = 0.0;
  for (double x : row) sum += x;
  for (auto& x : row) x /= sum;
  return row;
}

std::vector<NodeId> random_parents(std::mt19937_64& rng, const std::vector<NodeId>& pool,
                                   std::size_t max_parents) {
  std::vector<NodeId> out;
  if (pool.empty()) return out;
  const std::size_t n =
      std::uniform_int_distribution<std::size_t>(0, std::min(max_parents, pool.size()))(rng);
  std::vector<NodeId> shuffled = pool;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  out.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(out.begin(), out.end());
  return out;
}

InfluenceDiagram attempt(std::mt19937_64& rng, const RandomDiagramOptions& opts) {
  std::uniform_int_distribution<std::size_t> nc(1, opts.max_chance);
  std::uniform_int_distribution<std::size_t> nd(1, opts.max_decisions);
  std::uniform_int_distribution<std::size_t> nv(1, opts.max_values);
  std::uniform_int_distribution<std::size_t> ns(2, opts.max_states);
  std::uniform_real_distribution<double> util(-10.0, 10.0);

  std::vector<bool> is_decision;
  for (std::size_t k = nc(rng); k > 0; --k) is_decision.push_back(false);
  for (std::size_t k = nd(rng); k > 0; --k) is_decision.push_back(true);
  std::shuffle(is_decision.begin(), is_decision.end(), rng);

  DiagramBuilder b;
  std::vector<NodeId> pool;
  std::vector<NodeId> decisions;
  for (std::size_t k = 0; k < is_decision.size(); ++k) {
    const std::size_t n = ns(rng);
    std::vector<std::string> states;
    for (std::size_t s = 0; s < n; ++s) states.push_back("s" + std::to_string(s));
    auto parents = random_parents(rng, pool, opts.max_parents);
    NodeId id;
    if (is_decision[k]) {
      id = b.decision((is_decision[k] ? "D" : "C") + std::to_string(k), states, parents);
      decisions.push_back(id);
    } else {
      id = b.chance("C" + std::to_string(k), states, parents, [&](std::span<const int>) {
        return random_row(rng, n, opts.zero_probability);
      });
    }
    pool.push_back(id);
  }

  std::vector<std::tuple<NodeId, NodeId, NodeId, int>> arcs;
  std::vector<std::vector<NodeId>> cond_sets(b.size());
  if (opts.conditional_arcs) {
    for (NodeId j : decisions) {
      const Node& n = b.node(j);
      if (n.info_set.empty()) continue;
      std::vector<NodeId> candidates;
      for (NodeId i : pool) {
        if (i < j && !std::binary_search(n.info_set.begin(), n.info_set.end(), i)) {
          candidates.push_back(i);
        }
      }
      if (candidates.empty() || !std::bernoulli_distribution(0.7)(rng)) continue;
      const NodeId src =
          candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
      const NodeId t = n.info_set[std::uniform_int_distribution<std::size_t>(
          0, n.info_set.size() - 1)(rng)];
      const int s = static_cast<int>(
          std::uniform_int_distribution<std::size_t>(0, b.node(t).states.size() - 1)(rng));
      arcs.emplace_back(src, j, t, s);
    }
  }

  // Rebuild with conditional information sets attached to the decisions.
  DiagramBuilder out;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const Node& n = b.node(node_id(k));
    if (n.kind == NodeKind::decision) {
      std::vector<NodeId> cond;
      for (const auto& [src, tgt, t, s] : arcs) {
        if (tgt == n.id) cond.push_back(src);
      }
      out.decision(n.name, n.states, n.info_set, cond);
    } else {
      out.chance(n.name, n.states, n.info_set, n.table);
    }
  }
  for (const auto& [src, tgt, t, s] : arcs) {
    out.conditional_arc(src, tgt, {t}, Condition::atom(t, s));
  }
  for (std::size_t k = nv(rng); k > 0; --k) {
    auto parents = random_parents(rng, pool, opts.max_parents + 1);
    if (parents.empty()) parents.push_back(pool.back());
    out.value("V" + std::to_string(k), parents,
              [&](std::span<const int>) { return std::round(util(rng) * 100.0) / 100.0; });
  }
  return out.build();
}

}  // namespace

InfluenceDiagram random_diagram(std::mt19937_64& rng, const RandomDiagramOptions& opts) {
  for (;;) {
    InfluenceDiagram d = attempt(rng, opts);
    if (strategy_count(d) <= opts.max_strategies) return d;
  }
}

Strategy random_strategy(const InfluenceDiagram& d, std::mt19937_64& rng) {
  Strategy z = constant_strategy(d, 0);
  for (auto& l : z.local) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(d.num_states(l.node)) - 1);
    for (auto& c : l.choice) c = static_cast<std::uint16_t>(pick(rng));
  }
  return z;
}

double strategy_count(const InfluenceDiagram& d) {
  double count = 1.0;
  for (NodeId j : d.decision_nodes()) {
    count *= std::pow(static_cast<double>(d.num_states(j)),
                      static_cast<double>(decision_info_space(d, j).size()));
  }
  return count;
}

std::vector<Path> all_paths(const InfluenceDiagram& d) {
  const auto nodes = d.state_nodes();
  std::vector<std::size_t> radices;
  for (NodeId i : nodes) radices.push_back(d.num_states(i));
  const InfoStateSpace space({nodes.begin(), nodes.end()}, radices);
  std::vector<Path> out;
  out.reserve(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) out.push_back(space.decode(k));
  return out;
}

}  // namespace endoid::testing

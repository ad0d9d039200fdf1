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

#include "endoid/decomposition.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include <fmt/format.h>

#include "endoid/error.hpp"

namespace endoid {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fresh_name(const InfluenceDiagram& d, std::string base) {
  std::string name = base;
  for (int k = 2; d.find(name).has_value(); ++k) name = fmt::format("{}_{}", base, k);
  return name;
}

Node placeholder_value(const InfluenceDiagram& d, std::size_t id) {
  Node v;
  v.id = node_id(id);
  v.name = fresh_name(d, "U_sub");
  v.kind = NodeKind::value;
  v.table = {0.0};
  return v;
}

// Copies the rows of `table` (width `width` per information state) selected
// by the fixed states of the dropped info-set members.
std::vector<double> select_rows(const InfluenceDiagram& d, const Node& n,
                                const std::vector<int>& fixed, const std::vector<bool>& keep,
                                std::size_t width) {
  const InfoStateSpace full = info_state_space(d, n.id);
  std::vector<NodeId> kept;
  std::vector<std::size_t> radices;
  for (NodeId i : n.info_set) {
    if (keep[index_of(i)]) {
      kept.push_back(i);
      radices.push_back(d.num_states(i));
    }
  }
  const InfoStateSpace sliced(kept, radices);
  std::vector<double> out;
  out.reserve(sliced.size() * width);
  std::vector<int> states(n.info_set.size());
  for (std::size_t r = 0; r < sliced.size(); ++r) {
    const auto sub = sliced.decode(r);
    std::size_t k = 0;
    for (std::size_t m = 0; m < n.info_set.size(); ++m) {
      const NodeId i = n.info_set[m];
      states[m] = keep[index_of(i)] ? sub[k++] : fixed[index_of(i)];
    }
    const std::size_t row = full.encode(states);
    out.insert(out.end(), n.table.begin() + static_cast<std::ptrdiff_t>(row * width),
               n.table.begin() + static_cast<std::ptrdiff_t>((row + 1) * width));
  }
  return out;
}

// Diagram over the nodes flagged in `keep`, with every other node fixed to
// `fixed[id]`. Adds a zero value node when none is kept.
std::pair<InfluenceDiagram, std::vector<NodeId>> restrict(const InfluenceDiagram& d,
                                                          const std::vector<bool>& keep,
                                                          const std::vector<int>& fixed) {
  std::vector<NodeId> to_new(d.size(), kNoNode);
  std::vector<NodeId> to_old;
  for (const Node& n : d.nodes()) {
    if (!keep[index_of(n.id)]) continue;
    to_new[index_of(n.id)] = node_id(to_old.size());
    to_old.push_back(n.id);
  }
  auto remap_kept = [&](const std::vector<NodeId>& ids) {
    std::vector<NodeId> r;
    for (NodeId i : ids) {
      if (keep[index_of(i)]) r.push_back(to_new[index_of(i)]);
    }
    return r;
  };
  auto known = [&](NodeId i) -> std::optional<int> {
    if (keep[index_of(i)]) return std::nullopt;
    return fixed[index_of(i)];
  };

  std::vector<Node> nodes;
  nodes.reserve(to_old.size() + 1);
  for (NodeId old : to_old) {
    const Node& n = d.node(old);
    Node c;
    c.id = to_new[index_of(old)];
    c.name = n.name;
    c.kind = n.kind;
    c.states = n.states;
    c.info_set = remap_kept(n.info_set);
    c.cond_info_set = remap_kept(n.cond_info_set);
    if (n.kind == NodeKind::chance) {
      c.table = select_rows(d, n, fixed, keep, n.states.size());
    } else if (n.kind == NodeKind::value) {
      c.table = select_rows(d, n, fixed, keep, 1);
    }
    nodes.push_back(std::move(c));
  }

  std::vector<ConditionalArc> arcs;
  for (const ConditionalArc& a : d.cond_arcs()) {
    if (!keep[index_of(a.target)] || !keep[index_of(a.source)]) continue;
    Node& target = nodes[index_of(to_new[index_of(a.target)])];
    const NodeId source = to_new[index_of(a.source)];
    const Condition f = a.condition.substitute(known);
    if (f.op() == Condition::Op::constant) {
      // The condition is settled by the fixed states.
      auto& ic = target.cond_info_set;
      ic.erase(std::find(ic.begin(), ic.end(), source));
      if (f.value()) {
        auto& info = target.info_set;
        info.insert(std::lower_bound(info.begin(), info.end(), source), source);
      }
      continue;
    }
    arcs.push_back({source, target.id, remap_kept(a.dist_set),
                    f.remap([&](NodeId i) { return to_new[index_of(i)]; })});
  }

  bool has_value = std::any_of(nodes.begin(), nodes.end(),
                               [](const Node& n) { return n.kind == NodeKind::value; });
  if (!has_value) {
    nodes.push_back(placeholder_value(d, nodes.size()));
    to_old.push_back(kNoNode);
  }
  return {InfluenceDiagram(std::move(nodes), std::move(arcs)), std::move(to_old)};
}

bool same_diagram(const InfluenceDiagram& a, const InfluenceDiagram& b) {
  if (a.size() != b.size() || a.cond_arcs().size() != b.cond_arcs().size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Node& x = a.node(node_id(k));
    const Node& y = b.node(node_id(k));
    if (x.kind != y.kind || x.states != y.states || x.info_set != y.info_set ||
        x.cond_info_set != y.cond_info_set || x.table != y.table) {
      return false;
    }
  }
  for (std::size_t k = 0; k < a.cond_arcs().size(); ++k) {
    const auto& x = a.cond_arcs()[k];
    const auto& y = b.cond_arcs()[k];
    if (x.source != y.source || x.target != y.target || x.dist_set != y.dist_set ||
        !(x.condition == y.condition)) {
      return false;
    }
  }
  return true;
}

std::string subpath_label(const InfluenceDiagram& d, const Decomposition& dec,
                          const SubproblemSpec& spec) {
  std::string out = "(";
  bool first = true;
  for (NodeId i : dec.plan.main_nodes) {
    const Node& n = d.node(i);
    if (n.kind == NodeKind::value) continue;
    if (!first) out += ",";
    first = false;
    out += fmt::format("{}={}", n.name, n.states[static_cast<std::size_t>(spec.main_subpath[index_of(i)])]);
  }
  return out + ")";
}

}  // namespace

Decomposition split(const InfluenceDiagram& d, const PartitionPlan& plan,
                    const SplitOptions& opts) {
  require_valid(d);
  const ValidationReport report = validate_partition(d, plan);
  if (report.contains("partition-cover")) {
    throw DomainError("malformed partition:\n" + report.to_string());
  }
  if (opts.check_partition && !report.empty()) {
    throw DomainError("partition violates the partitioning condition:\n" + report.to_string());
  }

  Decomposition dec;
  dec.plan = plan;
  std::vector<bool> in_main(d.size(), false);
  for (NodeId i : plan.main_nodes) in_main[index_of(i)] = true;
  const std::vector<int> none(d.size(), 0);
  auto [main, main_to_original] = restrict(d, in_main, none);
  dec.main_diagram = std::move(main);
  dec.main_to_original = std::move(main_to_original);

  const std::uint64_t count = count_active_paths(dec.main_diagram);
  const bool has_sub = std::any_of(plan.sub_nodes.begin(), plan.sub_nodes.end(), [&](NodeId i) {
    return d.node(i).kind != NodeKind::value;
  });
  if (has_sub && count > opts.max_subproblems) {
    throw CapacityError("subproblem count exceeds the ceiling", count, opts.max_subproblems);
  }
  dec.main_table = enumerate_active_paths(dec.main_diagram);
  if (!has_sub) return dec;

  const auto main_states = dec.main_diagram.state_nodes();
  std::vector<bool> in_sub(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) in_sub[k] = !in_main[k];
  dec.subproblems.reserve(dec.main_table.size());
  std::vector<int> fixed(d.size(), 0);
  for (std::size_t k = 0; k < dec.main_table.size(); ++k) {
    const auto s = dec.main_table.states(k);
    for (std::size_t m = 0; m < main_states.size(); ++m) {
      fixed[index_of(dec.main_to_original[index_of(main_states[m])])] = s[m];
    }
    SubproblemSpec spec;
    spec.main_path = k;
    spec.main_subpath = fixed;
    spec.main_probability = dec.main_table.p(k);
    auto [slice, to_original] = restrict(d, in_sub, fixed);
    spec.diagram_slice = std::move(slice);
    spec.slice_to_original = std::move(to_original);
    spec.solver_kind = opts.kind;
    dec.subproblems.push_back(std::move(spec));
  }
  return dec;
}

int main_state(const Decomposition& dec, const SubproblemSpec& spec, std::string_view name) {
  const auto id = dec.main_diagram.find(name);
  if (!id || dec.main_diagram.node(*id).kind == NodeKind::value) {
    throw DomainError(fmt::format("'{}' is not a main chance or decision node", name));
  }
  return spec.main_subpath[index_of(dec.main_to_original[index_of(*id)])];
}

DecomposedResult solve_decomposed(const InfluenceDiagram& d, const PartitionPlan& plan,
                                  const DecomposeOptions& opts) {
  DecomposedResult out;
  const auto split_start = Clock::now();
  try {
    out.decomposition = split(d, plan,
                              {.kind = opts.plugin ? SubproblemKind::plugin : SubproblemKind::milp,
                               .check_partition = opts.check_partition,
                               .max_subproblems = opts.max_subproblems});
  } catch (const CapacityError& e) {
    out.result.status = SolveStatus::capacity_exceeded;
    out.result.message = e.what();
    return out;
  }
  out.split_time_s = seconds_since(split_start);
  const Decomposition& dec = out.decomposition;
  const auto& subs = dec.subproblems;

  // Representative subproblem for each slot; milp slices are deduplicated.
  std::vector<std::size_t> rep(subs.size());
  std::vector<std::size_t> unique;
  if (opts.memoize && !opts.plugin) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t k = 0; k < subs.size(); ++k) {
      auto& bucket = buckets[diagram_fingerprint(subs[k].diagram_slice)];
      const auto hit = std::find_if(bucket.begin(), bucket.end(), [&](std::size_t u) {
        return same_diagram(subs[u].diagram_slice, subs[k].diagram_slice);
      });
      if (hit != bucket.end()) {
        rep[k] = *hit;
      } else {
        rep[k] = k;
        bucket.push_back(k);
        unique.push_back(k);
      }
    }
  } else {
    for (std::size_t k = 0; k < subs.size(); ++k) unique.push_back(rep[k] = k);
  }
  out.unique_subproblems = unique.size();

  out.outcomes.resize(subs.size());
  parallel_for(unique.size(), opts.workers, [&](std::size_t u) {
    const std::size_t k = unique[u];
    const SubproblemSpec& spec = subs[k];
    SubproblemOutcome& o = out.outcomes[k];
    const auto start = Clock::now();
    try {
      if (opts.plugin) {
        PluginResult r = opts.plugin(spec);
        o.utility = r.utility;
        o.solution = std::move(r.solution);
      } else {
        const auto table = enumerate_active_paths(spec.diagram_slice);
        const auto r = solve_bnb(build_milp(spec.diagram_slice, table, opts.build));
        if (r.status != SolveStatus::optimal) {
          throw DomainError(fmt::format("status {}: {}", to_string(r.status), r.message));
        }
        o.utility = r.solution->objective;
        o.strategy = r.solution->strategy;
        o.nodes_explored = r.stats.nodes_explored;
      }
    } catch (const std::exception& e) {
      throw DomainError(fmt::format("subproblem for main subpath {} failed: {}",
                                    subpath_label(d, dec, spec), e.what()));
    }
    o.time_s = seconds_since(start);
  });
  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (rep[k] == k) continue;
    out.outcomes[k] = out.outcomes[rep[k]];
    out.outcomes[k].time_s = 0.0;
    out.outcomes[k].reused = true;
  }
  for (const auto& o : out.outcomes) {
    out.sub_total_time_s += o.time_s;
    out.sub_max_time_s = std::max(out.sub_max_time_s, o.time_s);
  }

  const auto main_start = Clock::now();
  PathTable table(dec.main_table.width());
  table.reserve(dec.main_table.size());
  for (std::size_t k = 0; k < dec.main_table.size(); ++k) {
    const double sub = subs.empty() ? 0.0 : out.outcomes[k].utility;
    table.push_back(dec.main_table.states(k), dec.main_table.p(k), dec.main_table.u(k) + sub);
  }
  out.result = solve_bnb(build_milp(dec.main_diagram, table, opts.build));
  out.main_time_s = seconds_since(main_start);
  return out;
}

std::string timing_header() {
  return "n_main,main_time_s,sub_total_time_s,sub_max_time_s,n_subproblems,objective";
}

std::string timing_row(std::size_t n_main, const DecomposedResult& r) {
  const double objective = r.result.solution ? r.result.solution->objective : 0.0;
  return fmt::format("{},{:.6f},{:.6f},{:.6f},{},{}", n_main, r.main_time_s, r.sub_total_time_s,
                     r.sub_max_time_s, r.decomposition.subproblems.size(), objective);
}

}  // namespace endoid

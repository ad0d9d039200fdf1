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

#include "endoid/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "endoid/error.hpp"

namespace endoid {

std::size_t MilpModel::num_rows(RowRole role) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const Row& r) { return r.role == role; }));
}

std::vector<CnacPair> generate_cnacs(const InfluenceDiagram& d) {
  std::vector<CnacPair> out;
  for (NodeId j : d.decision_nodes()) {
    const Node& n = d.node(j);
    if (n.cond_info_set.empty()) continue;

    std::vector<std::size_t> radices;
    for (NodeId i : n.info_set) radices.push_back(d.num_states(i));
    const InfoStateSpace info(n.info_set, radices);
    radices.clear();
    for (NodeId i : n.cond_info_set) radices.push_back(d.num_states(i));
    const InfoStateSpace cond(n.cond_info_set, radices);

    // revealed[c][k]: the arc from cond_info_set[c] reveals its source in
    // information state k of I(j).
    std::vector<std::vector<bool>> revealed(n.cond_info_set.size(),
                                            std::vector<bool>(info.size(), false));
    for (const ConditionalArc* arc : d.arcs_into(j)) {
      const auto pos = std::find(n.cond_info_set.begin(), n.cond_info_set.end(), arc->source);
      if (pos == n.cond_info_set.end()) {
        throw DomainError(fmt::format("conditional arc source '{}' is not in I_c('{}')",
                                      d.node(arc->source).name, n.name));
      }
      for (NodeId t : arc->dist_set) {
        if (!std::binary_search(n.info_set.begin(), n.info_set.end(), t)) {
          throw DomainError(fmt::format(
              "distinguishability set of arc '{}' -> '{}' contains '{}', which is not in I('{}')",
              d.node(arc->source).name, n.name, d.node(t).name, n.name));
        }
      }
      const auto c = static_cast<std::size_t>(pos - n.cond_info_set.begin());
      for (std::size_t k = 0; k < info.size(); ++k) {
        const auto states = info.decode(k);
        revealed[c][k] = arc->condition.evaluate([&](NodeId node) {
          const auto p = std::find(n.info_set.begin(), n.info_set.end(), node);
          if (p == n.info_set.end()) {
            throw DomainError(fmt::format("condition of arc into '{}' references '{}' outside I",
                                          n.name, d.node(node).name));
          }
          return states[static_cast<std::size_t>(p - n.info_set.begin())];
        });
      }
    }

    std::vector<std::vector<int>> cond_states(cond.size());
    for (std::size_t a = 0; a < cond.size(); ++a) cond_states[a] = cond.decode(a);

    for (std::size_t k = 0; k < info.size(); ++k) {
      for (std::size_t a = 0; a < cond.size(); ++a) {
        for (std::size_t b = a + 1; b < cond.size(); ++b) {
          bool distinguishable = false;
          for (std::size_t c = 0; c < n.cond_info_set.size() && !distinguishable; ++c) {
            if (cond_states[a][c] != cond_states[b][c]) distinguishable = revealed[c][k];
          }
          if (!distinguishable) out.push_back({j, k * cond.size() + a, k * cond.size() + b});
        }
      }
    }
  }
  return out;
}

MilpModel build_milp(const InfluenceDiagram& d, const PathTable& table, const BuildOptions& opts) {
  require_valid(d);
  if (table.width() != d.state_nodes().size()) {
    throw DomainError(fmt::format("path table width {} does not match the diagram ({})",
                                  table.width(), d.state_nodes().size()));
  }
  if (d.has_conditional_arcs() && !opts.cnacs) {
    throw DomainError(
        "diagram has conditional arcs: enable C-NACs or apply the observation-node transform");
  }

  MilpModel m;
  m.table = table;
  m.decisions.assign(d.decision_nodes().begin(), d.decision_nodes().end());
  for (NodeId j : m.decisions) m.decision_slot.push_back(d.slot(j));

  std::vector<InfoStateSpace> spaces;
  for (NodeId j : m.decisions) {
    const Node& n = d.node(j);
    spaces.push_back(decision_info_space(d, j));
    const InfoStateSpace& space = spaces.back();
    m.group_offset.push_back(m.groups.size());
    for (std::size_t k = 0; k < space.size(); ++k) {
      const std::string info = info_state_label(d, space, k);
      m.groups.push_back({j, k, m.vars.size(), n.states.size()});
      for (const auto& s : n.states) {
        m.vars.push_back({VarKind::binary, 0.0, 1.0, 0.0,
                          fmt::format("z[{}|{}]={}", n.name, info, s)});
      }
    }
  }
  m.num_z = m.vars.size();

  double min_u = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < table.size(); ++k) min_u = std::min(min_u, table.u(k));
  if (opts.positive_utility_shift && table.size() > 0) m.shift = 1.0 - min_u;
  m.objective_offset = m.shift == 0.0 ? 0.0 : -m.shift;
  m.has_pi_lower = !opts.positive_utility_shift;

  const auto state_nodes = d.state_nodes();
  m.paths.reserve(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto s = table.states(k);
    PathRecord rec;
    rec.var = m.vars.size();
    rec.p = table.p(k);
    rec.u = table.u(k);
    for (std::size_t o = 0; o < m.decisions.size(); ++o) {
      const NodeId j = m.decisions[o];
      const ZGroup& g = m.group(o, decision_info_index(d, spaces[o], s));
      rec.z.push_back(g.first_var + s[d.slot(j)]);
    }
    std::string label = "pi[(";
    for (std::size_t p = 0; p < s.size(); ++p) {
      const Node& n = d.node(state_nodes[p]);
      if (p) label += ',';
      label += n.name + "=" + n.states[s[p]];
    }
    label += ")]";
    m.vars.push_back({VarKind::continuous, 0.0, rec.p, rec.u + m.shift, std::move(label)});
    m.paths.push_back(std::move(rec));
  }

  for (const ZGroup& g : m.groups) {
    Row r{RowRole::z_sum, Sense::eq, {}, 1.0};
    for (std::size_t v = 0; v < g.count; ++v) r.terms.push_back({g.first_var + v, 1.0});
    m.rows.push_back(std::move(r));
  }
  for (std::size_t o = 0; o < m.decisions.size(); ++o) {
    for (const PathRecord& rec : m.paths) {
      m.rows.push_back({RowRole::pi_upper, Sense::le, {{rec.var, 1.0}, {rec.z[o], -1.0}}, 0.0});
    }
  }
  if (m.has_pi_lower) {
    const auto nd = static_cast<double>(m.decisions.size());
    for (const PathRecord& rec : m.paths) {
      Row r{RowRole::pi_lower, Sense::ge, {{rec.var, 1.0}}, rec.p - nd};
      for (std::size_t z : rec.z) r.terms.push_back({z, -1.0});
      m.rows.push_back(std::move(r));
    }
  }
  if (opts.cnacs) {
    for (const CnacPair& c : generate_cnacs(d)) {
      const std::size_t o = d.decision_ordinal(c.node);
      const ZGroup& a = m.group(o, c.index_a);
      const ZGroup& b = m.group(o, c.index_b);
      for (std::size_t v = 0; v < a.count; ++v) {
        m.rows.push_back(
            {RowRole::cnac, Sense::eq, {{a.first_var + v, 1.0}, {b.first_var + v, -1.0}}, 0.0});
      }
    }
  }
  return m;
}

Strategy decode_strategy(const MilpModel& model, const std::vector<double>& z_values) {
  if (z_values.size() < model.num_z) {
    throw DomainError(
        fmt::format("expected {} z-values, got {}", model.num_z, z_values.size()));
  }
  Strategy z;
  for (std::size_t o = 0; o < model.decisions.size(); ++o) {
    LocalStrategy l{model.decisions[o], {}};
    const std::size_t end =
        o + 1 < model.decisions.size() ? model.group_offset[o + 1] : model.groups.size();
    for (std::size_t g = model.group_offset[o]; g < end; ++g) {
      const ZGroup& group = model.groups[g];
      double sum = 0.0;
      std::size_t chosen = group.count;
      for (std::size_t v = 0; v < group.count; ++v) {
        const double x = z_values[group.first_var + v];
        sum += x;
        if (chosen == group.count && x > 0.5) chosen = v;
      }
      if (std::abs(sum - 1.0) > 1e-6 || chosen == group.count) {
        throw DomainError(fmt::format("z-group {} of decision {} sums to {}", group.info_index,
                                      index_of(group.node), sum));
      }
      l.choice.push_back(static_cast<std::uint16_t>(chosen));
    }
    z.local.push_back(std::move(l));
  }
  return z;
}

std::vector<double> encode_strategy(const MilpModel& model, const Strategy& z) {
  if (z.local.size() != model.decisions.size()) {
    throw DomainError("strategy does not match the model's decision nodes");
  }
  std::vector<double> out(model.num_z, 0.0);
  for (std::size_t o = 0; o < model.decisions.size(); ++o) {
    const auto& choice = z.local[o].choice;
    for (std::size_t k = 0; k < choice.size(); ++k) {
      const ZGroup& g = model.group(o, k);
      if (choice[k] >= g.count) throw DomainError("strategy chooses an unknown state");
      out[g.first_var + choice[k]] = 1.0;
    }
  }
  return out;
}

std::vector<double> induced_solution(const MilpModel& model, const std::vector<double>& z_values) {
  std::vector<double> x(model.vars.size(), 0.0);
  std::copy_n(z_values.begin(), model.num_z, x.begin());
  for (const PathRecord& rec : model.paths) {
    const bool on = std::all_of(rec.z.begin(), rec.z.end(),
                                [&](std::size_t v) { return z_values[v] > 0.5; });
    x[rec.var] = on ? rec.p : 0.0;
  }
  return x;
}

double objective_value(const MilpModel& model, const std::vector<double>& x) {
  double obj = 0.0;
  for (std::size_t v = 0; v < model.vars.size(); ++v) obj += model.vars[v].objective * x[v];
  return obj + model.objective_offset;
}

double max_violation(const MilpModel& model, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const Variable& var = model.vars[v];
    worst = std::max({worst, var.lower - x[v], x[v] - var.upper});
    if (var.kind == VarKind::binary) worst = std::max(worst, std::min(x[v], std::abs(1.0 - x[v])));
  }
  for (const Row& r : model.rows) {
    double lhs = 0.0;
    for (const Term& t : r.terms) lhs += t.coef * x[t.var];
    switch (r.sense) {
      case Sense::le:
        worst = std::max(worst, lhs - r.rhs);
        break;
      case Sense::ge:
        worst = std::max(worst, r.rhs - lhs);
        break;
      case Sense::eq:
        worst = std::max(worst, std::abs(lhs - r.rhs));
        break;
    }
  }
  return worst;
}

}  // namespace endoid

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

#include "endoid/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "endoid/error.hpp"

namespace endoid {

std::string_view to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::capacity_exceeded:
      return "capacity_exceeded";
    case SolveStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // The smaller root survives, so every class is named by its first member.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Dense class numbering (in order of first member) from a union-find.
std::vector<std::size_t> dense_classes(UnionFind& uf, std::size_t n, std::size_t& count) {
  std::vector<std::size_t> id(n, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> out(n);
  count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = uf.find(k);
    if (id[r] == std::numeric_limits<std::size_t>::max()) id[r] = count++;
    out[k] = id[r];
  }
  return out;
}

// ---------------------------------------------------------------- enumerate

class Enumerator {
 public:
  Enumerator(const InfluenceDiagram& d, const PathTable& table) : d_(d), table_(table) {
    const auto decisions = d.decision_nodes();
    nd_ = decisions.size();
    std::vector<CnacPair> pairs;
    if (d.has_conditional_arcs()) pairs = generate_cnacs(d);

    for (std::size_t o = 0; o < nd_; ++o) {
      const NodeId j = decisions[o];
      Dec dec;
      dec.space = decision_info_space(d, j);
      dec.radix = d.num_states(j);
      UnionFind uf(dec.space.size());
      for (const CnacPair& c : pairs) {
        if (c.node == j) uf.unite(c.index_a, c.index_b);
      }
      dec.class_of = dense_classes(uf, dec.space.size(), dec.classes);
      dec.log_count = static_cast<double>(dec.classes) * std::log(static_cast<double>(dec.radix));
      decs_.push_back(std::move(dec));
    }

    cls_.resize(table.size() * nd_);
    st_.resize(table.size() * nd_);
    for (std::size_t k = 0; k < table.size(); ++k) {
      const auto s = table.states(k);
      for (std::size_t o = 0; o < nd_; ++o) {
        cls_[k * nd_ + o] = decs_[o].class_of[decision_info_index(d, decs_[o].space, s)];
        st_[k * nd_ + o] = s[d.slot(decisions[o])];
      }
    }
  }

  SolveResult run(const EnumerateSolveOptions& opts) {
    const auto start = Clock::now();
    SolveResult r;
    if (nd_ == 0) {
      r.stats.nodes_explored = 1;
      finish(r, {});
      r.stats.wall_time_s = seconds_since(start);
      return r;
    }

    free_ = 0;
    for (std::size_t o = 1; o < nd_; ++o) {
      if (decs_[o].log_count > decs_[free_].log_count) free_ = o;
    }
    double log_total = 0.0;
    for (std::size_t o = 0; o < nd_; ++o) {
      if (o != free_) {
        order_.push_back(o);
        log_total += decs_[o].log_count;
      }
    }
    if (log_total > std::log(static_cast<double>(opts.limit)) + 1e-12) {
      r.status = SolveStatus::capacity_exceeded;
      r.message = fmt::format("enumeration would visit about {:.3g} strategies, limit {}",
                              std::exp(log_total), opts.limit);
      r.stats.wall_time_s = seconds_since(start);
      return r;
    }

    choice_.resize(nd_);
    for (std::size_t o = 0; o < nd_; ++o) choice_[o].assign(decs_[o].classes, 0);
    best_ = -std::numeric_limits<double>::infinity();
    score_.resize(decs_[free_].classes * decs_[free_].radix);

    std::vector<std::size_t> all(table_.size());
    std::iota(all.begin(), all.end(), 0);
    descend(0, all);

    r.stats.nodes_explored = visited_;
    finish(r, best_choice_);
    r.stats.wall_time_s = seconds_since(start);
    return r;
  }

 private:
  struct Dec {
    InfoStateSpace space;
    std::size_t radix = 0;
    std::vector<std::size_t> class_of;
    std::size_t classes = 0;
    double log_count = 0.0;
  };

  void descend(std::size_t level, const std::vector<std::size_t>& alive) {
    if (level == order_.size()) {
      evaluate_free(alive);
      return;
    }
    const std::size_t o = order_[level];
    const Dec& dec = decs_[o];
    auto& choice = choice_[o];
    std::fill(choice.begin(), choice.end(), 0);
    std::vector<std::size_t> next;
    next.reserve(alive.size());
    for (;;) {
      next.clear();
      for (std::size_t k : alive) {
        if (choice[cls_[k * nd_ + o]] == st_[k * nd_ + o]) next.push_back(k);
      }
      descend(level + 1, next);
      std::size_t c = 0;
      while (c < choice.size() && ++choice[c] == dec.radix) choice[c++] = 0;
      if (c == choice.size()) break;
    }
  }

  void evaluate_free(const std::vector<std::size_t>& alive) {
    ++visited_;
    const Dec& dec = decs_[free_];
    std::fill(score_.begin(), score_.end(), 0.0);
    for (std::size_t k : alive) {
      score_[cls_[k * nd_ + free_] * dec.radix + st_[k * nd_ + free_]] +=
          table_.p(k) * table_.u(k);
    }
    double eu = 0.0;
    auto& choice = choice_[free_];
    for (std::size_t c = 0; c < dec.classes; ++c) {
      std::size_t arg = 0;
      for (std::size_t s = 1; s < dec.radix; ++s) {
        if (score_[c * dec.radix + s] > score_[c * dec.radix + arg]) arg = s;
      }
      choice[c] = arg;
      eu += score_[c * dec.radix + arg];
    }
    if (eu > best_) {
      best_ = eu;
      best_choice_ = choice_;
    }
  }

  void finish(SolveResult& r, const std::vector<std::vector<std::size_t>>& classes) {
    Solution sol;
    for (std::size_t o = 0; o < nd_; ++o) {
      LocalStrategy l{d_.decision_nodes()[o], {}};
      for (std::size_t k = 0; k < decs_[o].space.size(); ++k) {
        l.choice.push_back(static_cast<std::uint16_t>(classes[o][decs_[o].class_of[k]]));
      }
      sol.strategy.local.push_back(std::move(l));
    }
    sol.objective = expected_utility(d_, table_, sol.strategy);
    sol.pi.resize(table_.size());
    for (std::size_t k = 0; k < table_.size(); ++k) {
      bool ok = true;
      for (std::size_t o = 0; o < nd_ && ok; ++o) {
        ok = classes[o][cls_[k * nd_ + o]] == st_[k * nd_ + o];
      }
      sol.pi[k] = ok ? table_.p(k) : 0.0;
    }
    r.status = SolveStatus::optimal;
    r.solution = std::move(sol);
  }

  const InfluenceDiagram& d_;
  const PathTable& table_;
  std::size_t nd_ = 0;
  std::vector<Dec> decs_;
  std::vector<std::size_t> cls_;
  std::vector<std::size_t> st_;
  std::size_t free_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> choice_;
  std::vector<std::vector<std::size_t>> best_choice_;
  std::vector<double> score_;
  double best_ = 0.0;
  std::uint64_t visited_ = 0;
};

// ---------------------------------------------------------------------- bnb

struct TrieNode {
  std::size_t first_child = 0;
  std::size_t num_children = 0;
  std::size_t group = 0;         // decision nodes only
  std::uint16_t state = 0;       // label of the edge from the parent
  bool decision = false;
  bool leaf = false;
  double leaf_value = 0.0;
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& m, const BnbOptions& opts) : m_(m), opts_(opts) {
    group_of_var_.assign(m.num_z, 0);
    choice_of_var_.assign(m.num_z, 0);
    for (std::size_t g = 0; g < m.groups.size(); ++g) {
      for (std::size_t v = 0; v < m.groups[g].count; ++v) {
        group_of_var_[m.groups[g].first_var + v] = g;
        choice_of_var_[m.groups[g].first_var + v] = v;
      }
    }
    UnionFind uf(m.groups.size());
    for (const Row& r : m.rows) {
      if (r.role != RowRole::cnac) continue;
      if (r.terms.size() != 2 || r.terms[0].var >= m.num_z || r.terms[1].var >= m.num_z ||
          choice_of_var_[r.terms[0].var] != choice_of_var_[r.terms[1].var] ||
          m.groups[group_of_var_[r.terms[0].var]].count !=
              m.groups[group_of_var_[r.terms[1].var]].count) {
        contradictory_ = true;
        continue;
      }
      uf.unite(group_of_var_[r.terms[0].var], group_of_var_[r.terms[1].var]);
    }
    class_of_group_ = dense_classes(uf, m.groups.size(), num_classes_);
    class_radix_.assign(num_classes_, 0);
    class_groups_.resize(num_classes_);
    for (std::size_t g = 0; g < m.groups.size(); ++g) {
      class_radix_[class_of_group_[g]] = m.groups[g].count;
      class_groups_[class_of_group_[g]].push_back(g);
    }
    assigned_.assign(num_classes_, -1);

    slot_decision_.assign(m.table.width(), -1);
    for (std::size_t o = 0; o < m.decisions.size(); ++o) {
      slot_decision_[m.decision_slot[o]] = static_cast<int>(o);
    }
    trie_.push_back({});
    build(0, 0, m.table.size(), 0);
    value_.resize(trie_.size());

    // Classes no active path reaches cannot change the objective.
    std::vector<bool> used(num_classes_, false);
    for (const TrieNode& t : trie_) {
      if (t.decision) used[class_of_group_[t.group]] = true;
    }
    for (std::size_t cls = 0; cls < num_classes_; ++cls) {
      if (used[cls]) {
        branch_order_.push_back(cls);
      } else {
        assigned_[cls] = 0;
      }
    }
  }

  SolveResult run() {
    const auto start = Clock::now();
    SolveResult r;
    if (contradictory_) {
      r.status = SolveStatus::infeasible;
      r.message = "C-NAC equalities contradict the z-group structure";
      r.stats.wall_time_s = seconds_since(start);
      return r;
    }
    best_ = -std::numeric_limits<double>::infinity();
    try {
      search(0, bound());
    } catch (const NodeLimit&) {
      r.status = SolveStatus::capacity_exceeded;
      r.message = fmt::format("node limit {} reached", opts_.node_limit);
    }
    r.stats.nodes_explored = nodes_;
    if (r.status != SolveStatus::capacity_exceeded) {
      if (best_x_.empty()) {
        r.status = SolveStatus::infeasible;
        r.message = "no assignment satisfies the model's z-constraints";
      } else {
        Solution sol;
        sol.objective = best_;
        std::vector<double> z(best_x_.begin(),
                              best_x_.begin() + static_cast<std::ptrdiff_t>(m_.num_z));
        sol.strategy = decode_strategy(m_, z);
        for (const PathRecord& rec : m_.paths) sol.pi.push_back(best_x_[rec.var]);
        r.status = SolveStatus::optimal;
        r.solution = std::move(sol);
      }
    }
    r.stats.wall_time_s = seconds_since(start);
    return r;
  }

 private:
  struct NodeLimit {};

  void build(std::size_t node, std::size_t lo, std::size_t hi, std::size_t depth) {
    if (depth == m_.table.width()) {
      trie_[node].leaf = true;
      double v = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        const double c = m_.vars[m_.paths[k].var].objective;
        v += m_.paths[k].p * (m_.has_pi_lower ? c : std::max(c, 0.0));
      }
      trie_[node].leaf_value = v;
      return;
    }
    const int o = slot_decision_[depth];
    if (o >= 0) {
      trie_[node].decision = true;
      trie_[node].group = group_of_var_[m_.paths[lo].z[static_cast<std::size_t>(o)]];
    }
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t k = lo; k < hi;) {
      std::size_t e = k + 1;
      const auto s = m_.table.states(k)[depth];
      while (e < hi && m_.table.states(e)[depth] == s) ++e;
      runs.emplace_back(k, e);
      k = e;
    }
    const std::size_t first = trie_.size();
    trie_[node].first_child = first;
    trie_[node].num_children = runs.size();
    for (const auto& [a, b] : runs) {
      TrieNode child;
      child.state = m_.table.states(a)[depth];
      trie_.push_back(child);
    }
    for (std::size_t c = 0; c < runs.size(); ++c) build(first + c, runs[c].first, runs[c].second, depth + 1);
  }

  // Perfect-recall relaxation value under the current assignment.
  double bound() {
    for (std::size_t n = trie_.size(); n-- > 0;) {
      const TrieNode& t = trie_[n];
      if (t.leaf) {
        value_[n] = t.leaf_value;
        continue;
      }
      const std::size_t end = t.first_child + t.num_children;
      if (!t.decision) {
        double v = 0.0;
        for (std::size_t c = t.first_child; c < end; ++c) v += value_[c];
        value_[n] = v;
        continue;
      }
      const int a = assigned_[class_of_group_[t.group]];
      if (a >= 0) {
        double v = 0.0;
        for (std::size_t c = t.first_child; c < end; ++c) {
          if (trie_[c].state == a) v = value_[c];
        }
        value_[n] = v;
      } else {
        double v = value_[t.first_child];
        for (std::size_t c = t.first_child + 1; c < end; ++c) v = std::max(v, value_[c]);
        if (t.num_children < m_.groups[t.group].count) v = std::max(v, 0.0);
        value_[n] = v;
      }
    }
    return value_[0] + m_.objective_offset;
  }

  // Returns the best leaf objective found below this node. Branches on the
  // unassigned class whose best child bound is lowest; that bound also
  // tightens the node's own.
  double search(std::size_t depth, double node_bound) {
    ++nodes_;
    if (opts_.node_limit != 0 && nodes_ > opts_.node_limit) throw NodeLimit{};
    if (depth == branch_order_.size()) return leaf();

    constexpr double kNone = -std::numeric_limits<double>::infinity();
    std::size_t pick = 0;
    double pick_bound = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, int>> children, trial;
    for (std::size_t cls : branch_order_) {
      if (assigned_[cls] >= 0) continue;
      trial.clear();
      double best_child = kNone;
      for (std::size_t c = 0; c < class_radix_[cls]; ++c) {
        assigned_[cls] = static_cast<int>(c);
        trial.emplace_back(bound(), static_cast<int>(c));
        best_child = std::max(best_child, trial.back().first);
      }
      assigned_[cls] = -1;
      if (best_child < pick_bound) {
        pick_bound = best_child;
        pick = cls;
        children.swap(trial);
      }
      if (!(pick_bound > best_ + kObjectiveTolerance)) return kNone;
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    double found = kNone;
    for (const auto& [b, c] : children) {
      if (!(b > best_ + kObjectiveTolerance)) break;
      assigned_[pick] = c;
      found = std::max(found, search(depth + 1, b));
    }
    assigned_[pick] = -1;
    if (opts_.check_bound &&
        found > node_bound + kObjectiveTolerance * std::max(1.0, std::abs(node_bound))) {
      throw std::logic_error(fmt::format(
          "inadmissible bound {} below descendant objective {} at depth {}", node_bound, found,
          depth));
    }
    return found;
  }

  double leaf() {
    std::vector<double> z(m_.num_z, 0.0);
    for (std::size_t cls = 0; cls < num_classes_; ++cls) {
      for (std::size_t g : class_groups_[cls]) {
        z[m_.groups[g].first_var + static_cast<std::size_t>(assigned_[cls])] = 1.0;
      }
    }
    std::vector<double> x = induced_solution(m_, z);
    if (max_violation(m_, x) > 1e-6) return -std::numeric_limits<double>::infinity();
    const double obj = objective_value(m_, x);
    if (obj > best_ || best_x_.empty()) {
      best_ = obj;
      best_x_ = std::move(x);
    }
    return obj;
  }

  const MilpModel& m_;
  BnbOptions opts_;
  std::vector<std::size_t> group_of_var_;
  std::vector<std::size_t> choice_of_var_;
  std::vector<std::size_t> class_of_group_;
  std::vector<std::size_t> class_radix_;
  std::vector<std::vector<std::size_t>> class_groups_;
  std::vector<std::size_t> branch_order_;
  std::size_t num_classes_ = 0;
  bool contradictory_ = false;
  std::vector<int> assigned_;
  std::vector<int> slot_decision_;
  std::vector<TrieNode> trie_;
  std::vector<double> value_;
  double best_ = 0.0;
  std::vector<double> best_x_;
  std::uint64_t nodes_ = 0;
};

// ---------------------------------------------------------------------- mps

std::string base36(std::size_t v) {
  static constexpr char kDigits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string out;
  do {
    out.insert(out.begin(), kDigits[v % 36]);
    v /= 36;
  } while (v != 0);
  return out;
}

std::string checked(std::string name) {
  if (name.size() > 8) {
    throw DomainError(fmt::format("MPS name '{}' exceeds 8 characters", name));
  }
  return name;
}

std::string row_name(std::size_t r) { return checked("R" + base36(r)); }

char sense_code(Sense s) {
  switch (s) {
    case Sense::le:
      return 'L';
    case Sense::ge:
      return 'G';
    case Sense::eq:
      return 'E';
  }
  return 'E';
}

std::string_view role_name(RowRole role) {
  switch (role) {
    case RowRole::z_sum:
      return "z_sum";
    case RowRole::pi_upper:
      return "pi_upper";
    case RowRole::pi_lower:
      return "pi_lower";
    case RowRole::cnac:
      return "cnac";
  }
  return "row";
}

}  // namespace

SolveResult solve_enumerate(const InfluenceDiagram& d, const PathTable& table,
                            const EnumerateSolveOptions& opts) {
  require_valid(d);
  if (table.width() != d.state_nodes().size()) {
    throw DomainError("path table does not match the diagram");
  }
  Enumerator e(d, table);
  return e.run(opts);
}

SolveResult solve_bnb(const MilpModel& model, const BnbOptions& opts) {
  BranchAndBound b(model, opts);
  return b.run();
}

std::string mps_column_name(const MilpModel& model, std::size_t var) {
  if (var < model.num_z) {
    const auto g = std::upper_bound(model.groups.begin(), model.groups.end(), var,
                                    [](std::size_t v, const ZGroup& grp) {
                                      return v < grp.first_var;
                                    }) -
                   1;
    return checked(fmt::format("Z_{}_{}_{}", base36(index_of(g->node)), base36(g->info_index),
                               base36(var - g->first_var)));
  }
  return checked("PI_" + base36(var - model.num_z));
}

void export_mps(const MilpModel& model, std::ostream& mps, std::ostream* map) {
  std::vector<std::string> cols(model.vars.size());
  for (std::size_t v = 0; v < model.vars.size(); ++v) cols[v] = mps_column_name(model, v);

  // Column-major view of the rows.
  std::vector<std::vector<std::pair<std::size_t, double>>> entries(model.vars.size());
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    for (const Term& t : model.rows[r].terms) entries[t.var].emplace_back(r, t.coef);
  }

  auto line = [&](std::string_view a, std::string_view b, std::string_view c) {
    fmt::print(mps, "    {:<8}  {:<8}  {}\n", a, b, c);
  };

  fmt::print(mps, "* endoid decision model\n");
  fmt::print(mps, "* objective sense: MAX, written as MIN of the negated objective\n");
  fmt::print(mps, "* objective offset: {}\n", model.objective_offset);
  fmt::print(mps, "NAME          ENDOID\n");
  fmt::print(mps, "ROWS\n");
  fmt::print(mps, " N  OBJ\n");
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    fmt::print(mps, " {}  {}\n", sense_code(model.rows[r].sense), row_name(r));
  }
  fmt::print(mps, "COLUMNS\n");
  bool in_int = false;
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const bool is_int = model.vars[v].kind == VarKind::binary;
    if (is_int != in_int) {
      fmt::print(mps, "    MARKER                 'MARKER'                 '{}'\n",
                 is_int ? "INTORG" : "INTEND");
      in_int = is_int;
    }
    if (model.vars[v].objective != 0.0) {
      line(cols[v], "OBJ", fmt::format("{}", -model.vars[v].objective));
    }
    for (const auto& [r, coef] : entries[v]) line(cols[v], row_name(r), fmt::format("{}", coef));
    if (model.vars[v].objective == 0.0 && entries[v].empty()) line(cols[v], "OBJ", "0");
  }
  if (in_int) fmt::print(mps, "    MARKER                 'MARKER'                 'INTEND'\n");
  fmt::print(mps, "RHS\n");
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    if (model.rows[r].rhs != 0.0) line("RHS", row_name(r), fmt::format("{}", model.rows[r].rhs));
  }
  fmt::print(mps, "BOUNDS\n");
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const Variable& var = model.vars[v];
    if (var.lower != 0.0) fmt::print(mps, " LO BND       {:<8}  {}\n", cols[v], var.lower);
    fmt::print(mps, " UP BND       {:<8}  {}\n", cols[v], var.upper);
  }
  fmt::print(mps, "ENDATA\n");

  if (map != nullptr) {
    for (std::size_t v = 0; v < model.vars.size(); ++v) {
      fmt::print(*map, "{}\t{}\n", cols[v], model.vars[v].label);
    }
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
      fmt::print(*map, "{}\t{}\n", row_name(r), role_name(model.rows[r].role));
    }
  }
}

void write_mps(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream mps(path, std::ios::binary | std::ios::trunc);
  if (!mps) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  auto map_path = path;
  map_path += ".map";
  std::ofstream map(map_path, std::ios::binary | std::ios::trunc);
  if (!map) throw IoError(fmt::format("cannot open '{}' for writing", map_path.string()));
  export_mps(model, mps, &map);
  mps.flush();
  map.flush();
  if (!mps || !map) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace endoid

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

#include "endoid/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "endoid/error.hpp"

namespace endoid {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::chance:
      return "chance";
    case NodeKind::decision:
      return "decision";
    case NodeKind::value:
      return "value";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Condition

Condition Condition::atom(NodeId node, int state) {
  Condition c;
  c.op_ = Op::atom;
  c.node_ = node;
  c.state_ = state;
  return c;
}

Condition Condition::all_of(std::vector<Condition> terms) {
  Condition c;
  c.op_ = Op::all_of;
  c.terms_ = std::move(terms);
  return c;
}

Condition Condition::any_of(std::vector<Condition> terms) {
  Condition c;
  c.op_ = Op::any_of;
  c.terms_ = std::move(terms);
  return c;
}

Condition Condition::negate(Condition term) {
  Condition c;
  c.op_ = Op::negate;
  c.terms_.push_back(std::move(term));
  return c;
}

Condition Condition::constant(bool value) {
  Condition c;
  c.op_ = Op::constant;
  c.value_ = value;
  return c;
}

namespace {

void collect_nodes(const Condition& c, std::vector<NodeId>& out) {
  if (c.op() == Condition::Op::atom) out.push_back(c.node());
  for (const auto& t : c.terms()) collect_nodes(t, out);
}

}  // namespace

std::vector<NodeId> Condition::nodes() const {
  std::vector<NodeId> out;
  collect_nodes(*this, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Condition Condition::substitute(
    const std::function<std::optional<int>(NodeId)>& known) const {
  switch (op_) {
    case Op::atom: {
      if (auto s = known(node_)) return constant(*s == state_);
      return *this;
    }
    case Op::constant:
      return *this;
    case Op::negate: {
      Condition inner = terms_.front().substitute(known);
      if (inner.op_ == Op::constant) return constant(!inner.value_);
      return negate(std::move(inner));
    }
    case Op::all_of:
    case Op::any_of: {
      // all_of: a false term decides; any_of: a true term decides.
      const bool decisive = op_ == Op::any_of;
      std::vector<Condition> kept;
      for (const auto& t : terms_) {
        Condition s = t.substitute(known);
        if (s.op_ == Op::constant) {
          if (s.value_ == decisive) return constant(decisive);
          continue;
        }
        kept.push_back(std::move(s));
      }
      if (kept.empty()) return constant(!decisive);
      if (kept.size() == 1) return std::move(kept.front());
      return op_ == Op::all_of ? all_of(std::move(kept)) : any_of(std::move(kept));
    }
  }
  return *this;
}

Condition Condition::remap(const std::function<NodeId(NodeId)>& rename) const {
  Condition c = *this;
  if (op_ == Op::atom) c.node_ = rename(node_);
  for (auto& t : c.terms_) t = t.remap(rename);
  return c;
}

// ---------------------------------------------------------------------------
// InfluenceDiagram

InfluenceDiagram::InfluenceDiagram(std::vector<Node> nodes, std::vector<ConditionalArc> cond_arcs)
    : nodes_(std::move(nodes)), cond_arcs_(std::move(cond_arcs)) {
  slot_.assign(nodes_.size(), npos);
  decision_ordinal_.assign(nodes_.size(), npos);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const NodeId id = node_id(i);
    switch (nodes_[i].kind) {
      case NodeKind::chance:
        chance_.push_back(id);
        break;
      case NodeKind::decision:
        decision_ordinal_[i] = decisions_.size();
        decisions_.push_back(id);
        break;
      case NodeKind::value:
        values_.push_back(id);
        break;
    }
    if (nodes_[i].kind != NodeKind::value) {
      slot_[i] = state_nodes_.size();
      state_nodes_.push_back(id);
    }
  }
  std::stable_sort(cond_arcs_.begin(), cond_arcs_.end(),
                   [](const ConditionalArc& a, const ConditionalArc& b) {
                     return std::pair(a.target, a.source) < std::pair(b.target, b.source);
                   });
}

std::optional<NodeId> InfluenceDiagram::find(std::string_view name) const {
  for (const auto& n : nodes_) {
    if (n.name == name) return n.id;
  }
  return std::nullopt;
}

NodeId InfluenceDiagram::id_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw DomainError(fmt::format("unknown node '{}'", name));
}

std::vector<const ConditionalArc*> InfluenceDiagram::arcs_into(NodeId j) const {
  std::vector<const ConditionalArc*> out;
  for (const auto& a : cond_arcs_) {
    if (a.target == j) out.push_back(&a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Information states

InfoStateSpace::InfoStateSpace(std::vector<NodeId> nodes, std::vector<std::size_t> radices)
    : nodes_(std::move(nodes)), radices_(std::move(radices)), strides_(radices_.size(), 1) {
  size_ = 1;
  for (std::size_t i = radices_.size(); i-- > 0;) {
    strides_[i] = size_;
    size_ *= radices_[i];
  }
}

std::vector<int> InfoStateSpace::decode(std::size_t k) const {
  std::vector<int> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out[i] = static_cast<int>((k / strides_[i]) % radices_[i]);
  }
  return out;
}

std::size_t InfoStateSpace::encode(std::span<const int> states) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    k += static_cast<std::size_t>(states[i]) * strides_[i];
  }
  return k;
}

namespace {

InfoStateSpace space_over(const InfluenceDiagram& d, std::vector<NodeId> members) {
  std::vector<std::size_t> radices;
  radices.reserve(members.size());
  for (NodeId m : members) {
    if (index_of(m) >= d.size()) {
      throw DomainError(fmt::format("information set references unknown node {}", index_of(m)));
    }
    radices.push_back(d.num_states(m));
  }
  return InfoStateSpace(std::move(members), std::move(radices));
}

}  // namespace

InfoStateSpace info_state_space(const InfluenceDiagram& d, NodeId j) {
  if (index_of(j) >= d.size()) {
    throw DomainError(fmt::format("unknown node id {}", index_of(j)));
  }
  return space_over(d, d.node(j).info_set);
}

InfoStateSpace decision_info_space(const InfluenceDiagram& d, NodeId j) {
  if (index_of(j) >= d.size() || d.node(j).kind != NodeKind::decision) {
    throw DomainError(fmt::format("node {} is not a decision node", index_of(j)));
  }
  const Node& n = d.node(j);
  std::vector<NodeId> members = n.info_set;
  members.insert(members.end(), n.cond_info_set.begin(), n.cond_info_set.end());
  return space_over(d, std::move(members));
}

std::string info_state_label(const InfluenceDiagram& d, const InfoStateSpace& space,
                             std::size_t k) {
  const auto states = space.decode(k);
  std::string out = "(";
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) out += ',';
    const Node& n = d.node(space.nodes()[i]);
    out += n.name;
    out += '=';
    out += n.states.at(static_cast<std::size_t>(states[i]));
  }
  out += ')';
  return out;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::contains(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    std::vector<std::size_t> ids;
    for (NodeId n : v.nodes) ids.push_back(index_of(n));
    out += fmt::format("[{}] {} (nodes: {})\n", v.code, v.message, fmt::join(ids, ","));
  }
  return out;
}

namespace {

class Validator {
 public:
  explicit Validator(const InfluenceDiagram& d) : d_(d) {}

  ValidationReport run() {
    check_nodes();
    check_arcs();
    if (d_.value_nodes().empty()) add("no-value-node", "diagram has no value node", {});
    return std::move(report_);
  }

 private:
  void add(std::string code, std::string message, std::vector<NodeId> nodes) {
    report_.violations.push_back({std::move(code), std::move(message), std::move(nodes)});
  }

  bool known(NodeId id) const { return index_of(id) < d_.size(); }

  bool check_member_list(const Node& n, const std::vector<NodeId>& members, const char* what) {
    bool ok = true;
    if (!std::is_sorted(members.begin(), members.end()) ||
        std::adjacent_find(members.begin(), members.end()) != members.end()) {
      add("info-set-unsorted", fmt::format("{} of '{}' must be sorted without duplicates", what, n.name),
          {n.id});
      ok = false;
    }
    for (NodeId m : members) {
      if (!known(m)) {
        add("info-set-unknown", fmt::format("{} of '{}' references unknown node {}", what, n.name,
                                            index_of(m)),
            {n.id});
        ok = false;
        continue;
      }
      if (index_of(m) >= index_of(n.id)) {
        add("arc-order", fmt::format("arc {} -> {} violates the topological order",
                                     d_.node(m).name, n.name),
            {m, n.id});
        ok = false;
      }
      if (d_.node(m).kind == NodeKind::value) {
        add("info-set-value-node",
            fmt::format("value node '{}' cannot inform '{}'", d_.node(m).name, n.name), {m, n.id});
        ok = false;
      }
    }
    return ok;
  }

  void check_nodes() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      const Node& n = d_.nodes()[i];
      const NodeId self = node_id(i);
      if (n.id != self) {
        add("node-id", fmt::format("node '{}' at position {} has id {}", n.name, i, index_of(n.id)),
            {self});
      }
      if (n.name.empty()) add("node-name", fmt::format("node {} has no name", i), {self});
      if (!names.insert(n.name).second) {
        add("duplicate-name", fmt::format("node name '{}' is not unique", n.name), {self});
      }
      if (n.name == "and" || n.name == "or" || n.name == "not") {
        add("reserved-name", fmt::format("node name '{}' is reserved", n.name), {self});
      }
      if (n.kind == NodeKind::value) {
        if (!n.states.empty()) {
          add("value-node-states", fmt::format("value node '{}' must not have states", n.name), {self});
        }
      } else if (n.states.empty()) {
        add("empty-states", fmt::format("node '{}' has no states", n.name), {self});
      } else {
        std::set<std::string> labels(n.states.begin(), n.states.end());
        if (labels.size() != n.states.size()) {
          add("duplicate-state", fmt::format("node '{}' has duplicate state labels", n.name), {self});
        }
      }
      if (n.kind != NodeKind::decision && !n.cond_info_set.empty()) {
        add("cond-info-set-kind",
            fmt::format("only decision nodes have a conditional information set ('{}')", n.name),
            {self});
      }

      bool members_ok = check_member_list(n, n.info_set, "information set");
      if (n.kind == NodeKind::decision) {
        members_ok = check_member_list(n, n.cond_info_set, "conditional information set") && members_ok;
        for (NodeId m : n.cond_info_set) {
          if (std::binary_search(n.info_set.begin(), n.info_set.end(), m)) {
            add("cond-info-overlap",
                fmt::format("node {} is in both I and I_c of '{}'", index_of(m), n.name), {m, self});
          }
        }
      }
      if (!members_ok) continue;
      check_table(n);
    }
  }

  void check_table(const Node& n) {
    if (n.kind == NodeKind::decision) {
      if (!n.table.empty()) {
        add("decision-table", fmt::format("decision node '{}' must not carry a table", n.name), {n.id});
      }
      return;
    }
    const InfoStateSpace space = info_state_space(d_, n.id);
    if (n.kind == NodeKind::value) {
      if (n.table.size() != space.size()) {
        add("utility-size",
            fmt::format("utility table of '{}' has {} entries, expected {}", n.name, n.table.size(),
                        space.size()),
            {n.id});
        return;
      }
      for (std::size_t k = 0; k < n.table.size(); ++k) {
        if (!std::isfinite(n.table[k])) {
          add("utility-nonfinite", fmt::format("utility of '{}' at {} is not finite", n.name,
                                               info_state_label(d_, space, k)),
              {n.id});
        }
      }
      return;
    }
    const std::size_t width = n.states.size();
    if (width == 0) return;
    if (n.table.size() != space.size() * width) {
      add("cpt-size",
          fmt::format("CPT of '{}' has {} entries, expected {}", n.name, n.table.size(),
                      space.size() * width),
          {n.id});
      return;
    }
    for (std::size_t k = 0; k < space.size(); ++k) {
      double sum = 0.0;
      bool negative = false;
      bool finite = true;
      for (std::size_t s = 0; s < width; ++s) {
        const double p = n.table[k * width + s];
        finite = finite && std::isfinite(p);
        negative = negative || p < 0.0;
        sum += p;
      }
      const std::string label = info_state_label(d_, space, k);
      if (!finite) {
        add("cpt-nonfinite", fmt::format("CPT row {} of '{}' is not finite", label, n.name), {n.id});
        continue;
      }
      if (negative) {
        add("cpt-negative", fmt::format("CPT row {} of '{}' has a negative entry", label, n.name),
            {n.id});
      }
      if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        add("cpt-normalization",
            fmt::format("CPT row {} of '{}': probability vector sums to {}", label, n.name, sum),
            {n.id});
      }
    }
  }

  void check_arcs() {
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const auto& a : d_.cond_arcs()) {
      if (!known(a.source) || !known(a.target)) {
        add("cond-arc-unknown", "conditional arc references an unknown node", {});
        continue;
      }
      const Node& src = d_.node(a.source);
      const Node& dst = d_.node(a.target);
      const std::vector<NodeId> pair{a.source, a.target};
      if (!seen.insert({a.source, a.target}).second) {
        add("cond-arc-duplicate",
            fmt::format("duplicate conditional arc {} -> {}", src.name, dst.name), pair);
      }
      if (dst.kind != NodeKind::decision) {
        add("cond-arc-target", fmt::format("conditional arc target '{}' is not a decision", dst.name),
            pair);
      }
      if (src.kind == NodeKind::value) {
        add("cond-arc-source", fmt::format("conditional arc source '{}' is a value node", src.name),
            pair);
      }
      if (index_of(a.source) >= index_of(a.target)) {
        add("arc-order", fmt::format("conditional arc {} -> {} violates the topological order",
                                     src.name, dst.name),
            pair);
      }
      if (std::binary_search(dst.info_set.begin(), dst.info_set.end(), a.source)) {
        add("cond-arc-source-in-info-set",
            fmt::format("source '{}' is already in I('{}'); the arc would be unconditional",
                        src.name, dst.name),
            pair);
      }
      if (!std::binary_search(dst.cond_info_set.begin(), dst.cond_info_set.end(), a.source)) {
        add("cond-info-arc-mismatch",
            fmt::format("source '{}' of a conditional arc is missing from I_c('{}')", src.name,
                        dst.name),
            pair);
      }
      if (a.dist_set.empty()) {
        add("cond-arc-empty-dist-set",
            fmt::format("conditional arc {} -> {} has an empty distinguishability set", src.name,
                        dst.name),
            pair);
      }
      for (NodeId t : a.dist_set) {
        if (!known(t)) {
          add("cond-arc-unknown", "distinguishability set references an unknown node", pair);
          continue;
        }
        if (!std::binary_search(dst.info_set.begin(), dst.info_set.end(), t)) {
          add("dist-set-outside-info-set",
              fmt::format("distinguishability node '{}' of arc {} -> {} is not in I('{}')",
                          d_.node(t).name, src.name, dst.name, dst.name),
              {a.source, a.target, t});
        }
      }
      check_condition(a, a.condition);
    }
    // Every member of I_c(j) needs exactly one arc.
    for (NodeId j : d_.decision_nodes()) {
      for (NodeId m : d_.node(j).cond_info_set) {
        const auto count = std::count_if(d_.cond_arcs().begin(), d_.cond_arcs().end(),
                                         [&](const ConditionalArc& a) {
                                           return a.source == m && a.target == j;
                                         });
        if (count != 1 && known(m)) {
          add("cond-info-arc-mismatch",
              fmt::format("member '{}' of I_c('{}') has {} conditional arcs, expected 1",
                          d_.node(m).name, d_.node(j).name, count),
              {m, j});
        }
      }
    }
  }

  void check_condition(const ConditionalArc& a, const Condition& c) {
    if (c.op() == Condition::Op::atom) {
      if (!std::binary_search(a.dist_set.begin(), a.dist_set.end(), c.node())) {
        add("condition-atom", fmt::format("condition atom on node {} outside the distinguishability set",
                                          index_of(c.node())),
            {a.source, a.target});
      } else if (known(c.node()) &&
                 (c.state() < 0 ||
                  static_cast<std::size_t>(c.state()) >= d_.num_states(c.node()))) {
        add("condition-atom", fmt::format("condition atom state {} out of range for '{}'", c.state(),
                                          d_.node(c.node()).name),
            {a.source, a.target});
      }
    }
    if (c.op() == Condition::Op::negate && c.terms().size() != 1) {
      add("condition-shape", "negation must have exactly one operand", {a.source, a.target});
    }
    for (const auto& t : c.terms()) check_condition(a, t);
  }

  const InfluenceDiagram& d_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const InfluenceDiagram& d) { return Validator(d).run(); }

void require_valid(const InfluenceDiagram& d) {
  auto report = validate(d);
  if (!report.empty()) throw DomainError("invalid influence diagram:\n" + report.to_string());
}

}  // namespace endoid

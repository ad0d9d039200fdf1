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
 * @file diagram.hpp
 *
 * Limited-memory influence diagrams with conditional arcs.
 *
 * Nodes are numbered 0..n-1 in a topological order: every arc, plain or
 * conditional, goes from a lower to a higher id. Chance and decision nodes
 * carry a finite list of states; value nodes carry a utility table. Tables
 * are indexed by information state, enumerated lexicographically over the
 * information set sorted by id (the last member varies fastest).
 */

#ifndef ENDOID_DIAGRAM_HPP_
#define ENDOID_DIAGRAM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace endoid {

enum class NodeId : std::uint32_t {};

constexpr std::size_t index_of(NodeId id) noexcept { return static_cast<std::size_t>(id); }
constexpr NodeId node_id(std::size_t i) noexcept { return static_cast<NodeId>(i); }

enum class NodeKind { chance, decision, value };

std::string_view to_string(NodeKind kind) noexcept;

/// Absolute tolerance on probability-vector normalization.
inline constexpr double kProbabilityTolerance = 1e-9;

/// Boolean expression over node states (a distinguishability condition).
class Condition {
 public:
  enum class Op { atom, all_of, any_of, negate, constant };

  Condition() = default;  // constant false

  static Condition atom(NodeId node, int state);
  static Condition all_of(std::vector<Condition> terms);
  static Condition any_of(std::vector<Condition> terms);
  static Condition negate(Condition term);
  static Condition constant(bool value);

  Op op() const noexcept { return op_; }
  NodeId node() const noexcept { return node_; }
  int state() const noexcept { return state_; }
  bool value() const noexcept { return value_; }
  const std::vector<Condition>& terms() const noexcept { return terms_; }

  /// `state_of(node)` must return the state index of every atom's node.
  template <class StateOf>
  bool evaluate(StateOf&& state_of) const {
    switch (op_) {
      case Op::atom:
        return state_of(node_) == state_;
      case Op::all_of:
        for (const auto& t : terms_) {
          if (!t.evaluate(state_of)) return false;
        }
        return true;
      case Op::any_of:
        for (const auto& t : terms_) {
          if (t.evaluate(state_of)) return true;
        }
        return false;
      case Op::negate:
        return !terms_.front().evaluate(state_of);
      case Op::constant:
        return value_;
    }
    return false;
  }

  /// Nodes referenced by atoms, sorted and unique.
  std::vector<NodeId> nodes() const;

  /// Replaces atoms whose node has a known state by constants and folds the
  /// result. Atoms on nodes for which `known` returns nullopt are kept.
  Condition substitute(const std::function<std::optional<int>(NodeId)>& known) const;

  /// Renames atom nodes. Every atom node must map to a value.
  Condition remap(const std::function<NodeId(NodeId)>& rename) const;

  friend bool operator==(const Condition&, const Condition&) = default;

 private:
  Op op_ = Op::constant;
  NodeId node_{};
  int state_ = 0;
  bool value_ = false;
  std::vector<Condition> terms_;
};

struct Node {
  NodeId id{};
  std::string name;
  NodeKind kind = NodeKind::chance;
  std::vector<std::string> states;     // empty for value nodes
  std::vector<NodeId> info_set;        // I(j), sorted ascending
  std::vector<NodeId> cond_info_set;   // I_c(j), decisions only, sorted ascending
  // chance: |S_I(j)| rows of |states| probabilities; value: |S_I(j)| utilities;
  // decision: empty.
  std::vector<double> table;
};

/// Information about `source` reaches decision `target` only when `condition`
/// holds on the states of `dist_set`.
struct ConditionalArc {
  NodeId source{};
  NodeId target{};
  std::vector<NodeId> dist_set;  // sorted ascending
  Condition condition;
};

/// Immutable after construction; safe to share across threads.
class InfluenceDiagram {
 public:
  InfluenceDiagram() = default;
  InfluenceDiagram(std::vector<Node> nodes, std::vector<ConditionalArc> cond_arcs);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(index_of(id)); }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const ConditionalArc> cond_arcs() const noexcept { return cond_arcs_; }

  std::optional<NodeId> find(std::string_view name) const;
  /// Throws DomainError when no node has this name.
  NodeId id_of(std::string_view name) const;

  std::span<const NodeId> chance_nodes() const noexcept { return chance_; }
  std::span<const NodeId> decision_nodes() const noexcept { return decisions_; }
  std::span<const NodeId> value_nodes() const noexcept { return values_; }
  /// Chance and decision nodes in id order; the positions of a Path.
  std::span<const NodeId> state_nodes() const noexcept { return state_nodes_; }

  std::size_t num_states(NodeId id) const { return node(id).states.size(); }

  /// Position of a chance or decision node within a Path.
  std::size_t slot(NodeId id) const { return slot_.at(index_of(id)); }

  /// Ordinal of a decision node within decision_nodes().
  std::size_t decision_ordinal(NodeId id) const { return decision_ordinal_.at(index_of(id)); }

  /// Conditional arcs whose target is `j`, ordered by source id.
  std::vector<const ConditionalArc*> arcs_into(NodeId j) const;

  bool has_conditional_arcs() const noexcept { return !cond_arcs_.empty(); }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<Node> nodes_;
  std::vector<ConditionalArc> cond_arcs_;
  std::vector<NodeId> chance_;
  std::vector<NodeId> decisions_;
  std::vector<NodeId> values_;
  std::vector<NodeId> state_nodes_;
  std::vector<std::size_t> slot_;
  std::vector<std::size_t> decision_ordinal_;
};

/// Cartesian product of the state spaces of a list of nodes, enumerated
/// lexicographically (last node fastest).
class InfoStateSpace {
 public:
  InfoStateSpace() = default;
  InfoStateSpace(std::vector<NodeId> nodes, std::vector<std::size_t> radices);

  std::span<const NodeId> nodes() const noexcept { return nodes_; }
  std::span<const std::size_t> radices() const noexcept { return radices_; }
  std::span<const std::size_t> strides() const noexcept { return strides_; }
  std::size_t size() const noexcept { return size_; }

  /// States of nodes() for the k-th information state.
  std::vector<int> decode(std::size_t k) const;
  std::size_t encode(std::span<const int> states) const;

  /// Index of the information state embedded in a full path.
  template <class StateOf>
  std::size_t index_in(StateOf&& state_of) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      k += static_cast<std::size_t>(state_of(nodes_[i])) * strides_[i];
    }
    return k;
  }

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> radices_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// S_I(j) for any node. Throws DomainError for an unknown id.
InfoStateSpace info_state_space(const InfluenceDiagram& d, NodeId j);

/// S_I(j) x S_Ic(j) for a decision node: I(j) members first, then I_c(j).
InfoStateSpace decision_info_space(const InfluenceDiagram& d, NodeId j);

/// Human-readable label of an information state, e.g. "(C1=win,P2=low)".
std::string info_state_label(const InfluenceDiagram& d, const InfoStateSpace& space,
                             std::size_t k);

struct Violation {
  std::string code;
  std::string message;
  std::vector<NodeId> nodes;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const noexcept { return violations.empty(); }
  bool contains(std::string_view code) const;
  std::string to_string() const;

  friend bool operator==(const ValidationReport&, const ValidationReport&);
};

inline bool operator==(const Violation& a, const Violation& b) {
  return a.code == b.code && a.message == b.message && a.nodes == b.nodes;
}
inline bool operator==(const ValidationReport& a, const ValidationReport& b) {
  return a.violations == b.violations;
}

/// Every violated structural or numerical invariant, with node ids. Never
/// throws on malformed content.
ValidationReport validate(const InfluenceDiagram& d);

/// Throws DomainError carrying the report when validate() is non-empty.
void require_valid(const InfluenceDiagram& d);

}  // namespace endoid

#endif  // ENDOID_DIAGRAM_HPP_

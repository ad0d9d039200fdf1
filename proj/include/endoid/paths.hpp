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
 * @file paths.hpp
 *
 * Paths, strategies, and the table of active paths.
 *
 * A path assigns a state to every chance and decision node; its entries are
 * ordered by node id (see InfluenceDiagram::state_nodes). Its probability is
 * the product of the chance-node CPT entries it selects and its utility is
 * the sum of the value-node utilities. Only paths of positive probability
 * are active; a zero CPT entry prunes every path that extends the prefix.
 */

#ifndef ENDOID_PATHS_HPP_
#define ENDOID_PATHS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "endoid/diagram.hpp"

namespace endoid {

using Path = std::vector<int>;

/// Choice of one decision node per element of decision_info_space(d, node).
struct LocalStrategy {
  NodeId node{};
  std::vector<std::uint16_t> choice;

  friend bool operator==(const LocalStrategy&, const LocalStrategy&) = default;
};

/// One local strategy per decision node, in decision_nodes() order.
struct Strategy {
  std::vector<LocalStrategy> local;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Every decision picks `state` in every information state.
Strategy constant_strategy(const InfluenceDiagram& d, int state = 0);

/// Throws DomainError when the strategy does not fit the diagram.
void check_strategy(const InfluenceDiagram& d, const Strategy& z);

/// Active paths in lexicographic order.
class PathTable {
 public:
  PathTable() = default;
  explicit PathTable(std::size_t width) : width_(width) {}

  std::size_t size() const noexcept { return p_.size(); }
  std::size_t width() const noexcept { return width_; }

  std::span<const std::uint16_t> states(std::size_t k) const {
    return {states_.data() + k * width_, width_};
  }
  double p(std::size_t k) const { return p_[k]; }
  double u(std::size_t k) const { return u_[k]; }
  std::span<const double> probabilities() const noexcept { return p_; }
  std::span<const double> utilities() const noexcept { return u_; }

  void reserve(std::size_t n);
  void push_back(std::span<const std::uint16_t> states, double p, double u);
  void append(const PathTable& other);

  friend bool operator==(const PathTable&, const PathTable&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<std::uint16_t> states_;
  std::vector<double> p_;
  std::vector<double> u_;
};

/// ENDOID_PATH_LIMIT if set to a positive integer, else 10^8.
std::uint64_t default_path_limit();

struct EnumerateOptions {
  std::uint64_t limit = default_path_limit();
  /// Enumeration is split into prefix blocks over this many threads. The
  /// result does not depend on the value.
  unsigned workers = 1;
};

/// Number of active paths, without materializing them.
std::uint64_t count_active_paths(const InfluenceDiagram& d);

/// Throws CapacityError carrying the exact active-path count when it
/// exceeds `opts.limit`.
PathTable enumerate_active_paths(const InfluenceDiagram& d, const EnumerateOptions& opts = {});

/// Throws DomainError for a malformed path.
double path_probability(const InfluenceDiagram& d, std::span<const int> s);
double path_utility(const InfluenceDiagram& d, std::span<const int> s);

/// Index into decision_info_space(d, j) selected by a path.
template <class T>
std::size_t decision_info_index(const InfluenceDiagram& d, const InfoStateSpace& space,
                                std::span<const T> s) {
  return space.index_in([&](NodeId i) { return static_cast<int>(s[d.slot(i)]); });
}

bool compatible(const InfluenceDiagram& d, const Strategy& z, std::span<const int> s);
bool compatible(const InfluenceDiagram& d, const Strategy& z, std::span<const std::uint16_t> s);

double conditional_path_probability(const InfluenceDiagram& d, std::span<const int> s,
                                    const Strategy& z);

/// Sum of p(s)U(s) over the active paths compatible with z.
double expected_utility(const InfluenceDiagram& d, const PathTable& table, const Strategy& z);
/// Same quantity by direct recursion over the diagram.
double expected_utility(const InfluenceDiagram& d, const Strategy& z);

/// 64-bit fingerprint of node order, state spaces, information sets and
/// tables.
std::uint64_t diagram_fingerprint(const InfluenceDiagram& d);

/// Binary cache: magic, format version, diagram fingerprint, then the table
/// with little-endian integers and IEEE-754 doubles.
void save_path_table(const InfluenceDiagram& d, const PathTable& table,
                     const std::filesystem::path& path);
/// nullopt when the file is absent, of another version, or was written for a
/// different diagram. Throws IoError on a truncated file.
std::optional<PathTable> load_path_table(const InfluenceDiagram& d,
                                         const std::filesystem::path& path);

}  // namespace endoid

#endif  // ENDOID_PATHS_HPP_

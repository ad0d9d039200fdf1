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

#include "endoid/paths.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "endoid/error.hpp"
#include "endoid/parallel.hpp"

namespace endoid {

void PathTable::reserve(std::size_t n) {
  states_.reserve(n * width_);
  p_.reserve(n);
  u_.reserve(n);
}

void PathTable::push_back(std::span<const std::uint16_t> states, double p, double u) {
  states_.insert(states_.end(), states.begin(), states.end());
  p_.push_back(p);
  u_.push_back(u);
}

void PathTable::append(const PathTable& other) {
  states_.insert(states_.end(), other.states_.begin(), other.states_.end());
  p_.insert(p_.end(), other.p_.begin(), other.p_.end());
  u_.insert(u_.end(), other.u_.begin(), other.u_.end());
}

std::uint64_t default_path_limit() {
  constexpr std::uint64_t kDefault = 100'000'000;
  const char* env = std::getenv("ENDOID_PATH_LIMIT");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) return kDefault;
  return v;
}

Strategy constant_strategy(const InfluenceDiagram& d, int state) {
  Strategy z;
  for (NodeId j : d.decision_nodes()) {
    const auto space = decision_info_space(d, j);
    z.local.push_back({j, std::vector<std::uint16_t>(space.size(), static_cast<std::uint16_t>(state))});
  }
  return z;
}

void check_strategy(const InfluenceDiagram& d, const Strategy& z) {
  const auto decisions = d.decision_nodes();
  if (z.local.size() != decisions.size()) {
    throw DomainError(fmt::format("strategy has {} local strategies, diagram has {} decisions",
                                  z.local.size(), decisions.size()));
  }
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    const LocalStrategy& l = z.local[k];
    const Node& n = d.node(decisions[k]);
    if (l.node != n.id) {
      throw DomainError(fmt::format("local strategy {} is for node {}, expected '{}'", k,
                                    index_of(l.node), n.name));
    }
    const auto space = decision_info_space(d, n.id);
    if (l.choice.size() != space.size()) {
      throw DomainError(fmt::format("local strategy of '{}' has {} entries, expected {}", n.name,
                                    l.choice.size(), space.size()));
    }
    for (auto c : l.choice) {
      if (c >= n.states.size()) {
        throw DomainError(fmt::format("local strategy of '{}' chooses state {}", n.name, c));
      }
    }
  }
}

namespace {

struct Term {
  std::size_t slot;
  std::size_t stride;
};

// Table lookup over an information set expressed as path slots.
struct Lookup {
  std::vector<Term> terms;
  const double* table = nullptr;

  template <class T>
  std::size_t row(const T* s) const {
    std::size_t k = 0;
    for (const Term& t : terms) k += static_cast<std::size_t>(s[t.slot]) * t.stride;
    return k;
  }
};

Lookup make_lookup(const InfluenceDiagram& d, const InfoStateSpace& space, const double* table) {
  Lookup l;
  l.table = table;
  for (std::size_t p = 0; p < space.nodes().size(); ++p) {
    l.terms.push_back({d.slot(space.nodes()[p]), space.strides()[p]});
  }
  return l;
}

struct Level {
  NodeKind kind = NodeKind::chance;
  std::size_t radix = 0;
  Lookup cpt;     // chance
  Lookup choice;  // decision, used only with a strategy
  std::size_t ordinal = 0;
};

struct Plan {
  std::vector<Level> levels;
  std::vector<Lookup> values;

  explicit Plan(const InfluenceDiagram& d) {
    for (NodeId id : d.state_nodes()) {
      const Node& n = d.node(id);
      Level l;
      l.kind = n.kind;
      l.radix = n.states.size();
      if (n.kind == NodeKind::chance) {
        l.cpt = make_lookup(d, info_state_space(d, id), n.table.data());
      } else {
        l.choice = make_lookup(d, decision_info_space(d, id), nullptr);
        l.ordinal = d.decision_ordinal(id);
      }
      levels.push_back(std::move(l));
    }
    for (NodeId id : d.value_nodes()) {
      values.push_back(make_lookup(d, info_state_space(d, id), d.node(id).table.data()));
    }
  }

  template <class T>
  double utility(const T* s) const {
    double u = 0.0;
    for (const Lookup& v : values) u += v.table[v.row(s)];
    return u;
  }
};

// Depth-first enumeration of active extensions of s[0..depth).
template <class Leaf>
void walk(const Plan& plan, std::size_t depth, std::uint16_t* s, double p, Leaf& leaf) {
  if (depth == plan.levels.size()) {
    leaf(s, p);
    return;
  }
  const Level& l = plan.levels[depth];
  if (l.kind == NodeKind::decision) {
    for (std::size_t st = 0; st < l.radix; ++st) {
      s[depth] = static_cast<std::uint16_t>(st);
      walk(plan, depth + 1, s, p, leaf);
    }
    return;
  }
  const double* row = l.cpt.table + l.cpt.row(s) * l.radix;
  for (std::size_t st = 0; st < l.radix; ++st) {
    if (!(row[st] > 0.0)) continue;
    s[depth] = static_cast<std::uint16_t>(st);
    walk(plan, depth + 1, s, p * row[st], leaf);
  }
}

struct Prefix {
  std::vector<std::uint16_t> states;
  double p;
};

// Active prefixes of the smallest depth yielding at least `want` blocks.
std::vector<Prefix> prefixes(const Plan& plan, std::size_t want) {
  std::vector<Prefix> out{{{}, 1.0}};
  std::size_t depth = 0;
  while (out.size() < want && depth < plan.levels.size()) {
    std::vector<Prefix> next;
    const Level& l = plan.levels[depth];
    for (const Prefix& pre : out) {
      std::vector<std::uint16_t> s = pre.states;
      s.push_back(0);
      const double* row = l.kind == NodeKind::chance ? l.cpt.table + l.cpt.row(s.data()) * l.radix
                                                     : nullptr;
      for (std::size_t st = 0; st < l.radix; ++st) {
        if (row != nullptr && !(row[st] > 0.0)) continue;
        s.back() = static_cast<std::uint16_t>(st);
        next.push_back({s, row != nullptr ? pre.p * row[st] : pre.p});
      }
    }
    out = std::move(next);
    ++depth;
  }
  return out;
}

template <class T>
void check_path(const InfluenceDiagram& d, std::span<const T> s) {
  const auto nodes = d.state_nodes();
  if (s.size() != nodes.size()) {
    throw DomainError(fmt::format("path has {} entries, expected {}", s.size(), nodes.size()));
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (s[k] < 0 || static_cast<std::size_t>(s[k]) >= d.num_states(nodes[k])) {
      throw DomainError(fmt::format("path entry {} for '{}' is out of range", s[k],
                                    d.node(nodes[k]).name));
    }
  }
}

template <class T>
bool compatible_impl(const InfluenceDiagram& d, const Strategy& z, std::span<const T> s) {
  const auto decisions = d.decision_nodes();
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    const NodeId j = decisions[k];
    const auto space = decision_info_space(d, j);
    const std::size_t idx = decision_info_index(d, space, s);
    if (static_cast<int>(z.local[k].choice[idx]) != static_cast<int>(s[d.slot(j)])) return false;
  }
  return true;
}

}  // namespace

std::uint64_t count_active_paths(const InfluenceDiagram& d) {
  const Plan plan(d);
  std::vector<std::uint16_t> s(plan.levels.size());
  std::uint64_t count = 0;
  auto leaf = [&](const std::uint16_t*, double) { ++count; };
  walk(plan, 0, s.data(), 1.0, leaf);
  return count;
}

PathTable enumerate_active_paths(const InfluenceDiagram& d, const EnumerateOptions& opts) {
  const Plan plan(d);
  const std::size_t width = plan.levels.size();
  const std::vector<Prefix> blocks =
      opts.workers <= 1 ? std::vector<Prefix>{{{}, 1.0}} : prefixes(plan, 4 * opts.workers);

  std::atomic<std::uint64_t> total{0};
  std::vector<PathTable> parts(blocks.size(), PathTable(width));
  parallel_for(blocks.size(), opts.workers, [&](std::size_t b) {
    PathTable& part = parts[b];
    std::vector<std::uint16_t> s(width);
    std::copy(blocks[b].states.begin(), blocks[b].states.end(), s.begin());
    bool storing = true;
    auto leaf = [&](const std::uint16_t* states, double p) {
      const std::uint64_t n = total.fetch_add(1, std::memory_order_relaxed) + 1;
      if (!storing) return;
      if (n > opts.limit) {
        storing = false;
        part = PathTable(width);
        return;
      }
      part.push_back({states, width}, p, plan.utility(states));
    };
    walk(plan, blocks[b].states.size(), s.data(), blocks[b].p, leaf);
  });

  const std::uint64_t count = total.load();
  if (count > opts.limit) {
    throw CapacityError(
        fmt::format("diagram has {} active paths, above the limit of {}", count, opts.limit), count,
        opts.limit);
  }
  if (parts.size() == 1) return std::move(parts.front());
  PathTable table(width);
  table.reserve(static_cast<std::size_t>(count));
  for (const PathTable& part : parts) table.append(part);
  return table;
}

double path_probability(const InfluenceDiagram& d, std::span<const int> s) {
  check_path(d, s);
  double p = 1.0;
  for (NodeId j : d.chance_nodes()) {
    const Node& n = d.node(j);
    const auto space = info_state_space(d, j);
    const std::size_t row = space.index_in([&](NodeId i) { return s[d.slot(i)]; });
    p *= n.table[row * n.states.size() + static_cast<std::size_t>(s[d.slot(j)])];
  }
  return p;
}

double path_utility(const InfluenceDiagram& d, std::span<const int> s) {
  check_path(d, s);
  double u = 0.0;
  for (NodeId v : d.value_nodes()) {
    const auto space = info_state_space(d, v);
    u += d.node(v).table[space.index_in([&](NodeId i) { return s[d.slot(i)]; })];
  }
  return u;
}

bool compatible(const InfluenceDiagram& d, const Strategy& z, std::span<const int> s) {
  return compatible_impl(d, z, s);
}

bool compatible(const InfluenceDiagram& d, const Strategy& z, std::span<const std::uint16_t> s) {
  return compatible_impl(d, z, s);
}

double conditional_path_probability(const InfluenceDiagram& d, std::span<const int> s,
                                    const Strategy& z) {
  check_strategy(d, z);
  const double p = path_probability(d, s);
  return compatible(d, z, s) ? p : 0.0;
}

double expected_utility(const InfluenceDiagram& d, const PathTable& table, const Strategy& z) {
  check_strategy(d, z);
  const Plan plan(d);
  double eu = 0.0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const std::uint16_t* s = table.states(k).data();
    bool ok = true;
    for (std::size_t depth = 0; depth < plan.levels.size() && ok; ++depth) {
      const Level& l = plan.levels[depth];
      if (l.kind != NodeKind::decision) continue;
      ok = z.local[l.ordinal].choice[l.choice.row(s)] == s[depth];
    }
    if (ok) eu += table.p(k) * table.u(k);
  }
  return eu;
}

double expected_utility(const InfluenceDiagram& d, const Strategy& z) {
  check_strategy(d, z);
  const Plan plan(d);
  std::vector<std::uint16_t> s(plan.levels.size());
  double eu = 0.0;
  auto rec = [&](auto&& self, std::size_t depth, double p) -> void {
    if (depth == plan.levels.size()) {
      eu += p * plan.utility(s.data());
      return;
    }
    const Level& l = plan.levels[depth];
    if (l.kind == NodeKind::decision) {
      s[depth] = z.local[l.ordinal].choice[l.choice.row(s.data())];
      self(self, depth + 1, p);
      return;
    }
    const double* row = l.cpt.table + l.cpt.row(s.data()) * l.radix;
    for (std::size_t st = 0; st < l.radix; ++st) {
      if (!(row[st] > 0.0)) continue;
      s[depth] = static_cast<std::uint16_t>(st);
      self(self, depth + 1, p * row[st]);
    }
  };
  rec(rec, 0, 1.0);
  return eu;
}

namespace {

class Fnv {
 public:
  void byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= 0x100000001b3ULL;
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) byte(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

constexpr char kMagic[4] = {'E', 'P', 'T', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return v;
}

}  // namespace

std::uint64_t diagram_fingerprint(const InfluenceDiagram& d) {
  Fnv h;
  h.u64(d.size());
  for (const Node& n : d.nodes()) {
    h.u64(static_cast<std::uint64_t>(n.kind));
    h.u64(n.states.size());
    h.u64(n.info_set.size());
    for (NodeId i : n.info_set) h.u64(index_of(i));
    h.u64(n.cond_info_set.size());
    for (NodeId i : n.cond_info_set) h.u64(index_of(i));
    h.u64(n.table.size());
    for (double v : n.table) h.f64(v);
  }
  return h.value();
}

void save_path_table(const InfluenceDiagram& d, const PathTable& table,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(kMagic, 4);
  const std::uint32_t v = kCacheVersion;
  for (int k = 0; k < 4; ++k) out.put(static_cast<char>((v >> (8 * k)) & 0xff));
  put_u64(out, diagram_fingerprint(d));
  put_u64(out, table.width());
  put_u64(out, table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    for (std::uint16_t s : table.states(k)) {
      out.put(static_cast<char>(s & 0xff));
      out.put(static_cast<char>(s >> 8));
    }
    put_u64(out, std::bit_cast<std::uint64_t>(table.p(k)));
    put_u64(out, std::bit_cast<std::uint64_t>(table.u(k)));
  }
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

std::optional<PathTable> load_path_table(const InfluenceDiagram& d,
                                         const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4] = {};
  in.read(magic, 4);
  unsigned char vb[4] = {};
  in.read(reinterpret_cast<char*>(vb), 4);
  if (!in || !std::equal(magic, magic + 4, kMagic)) return std::nullopt;
  const std::uint32_t version = vb[0] | (vb[1] << 8) | (vb[2] << 16) | (std::uint32_t{vb[3]} << 24);
  if (version != kCacheVersion) return std::nullopt;
  if (get_u64(in) != diagram_fingerprint(d)) return std::nullopt;
  const std::uint64_t width = get_u64(in);
  const std::uint64_t count = get_u64(in);
  if (!in || width != d.state_nodes().size()) return std::nullopt;

  PathTable table(width);
  std::vector<std::uint16_t> s(width);
  for (std::uint64_t k = 0; k < count; ++k) {
    for (auto& x : s) {
      unsigned char b[2];
      in.read(reinterpret_cast<char*>(b), 2);
      x = static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    const double p = std::bit_cast<double>(get_u64(in));
    const double u = std::bit_cast<double>(get_u64(in));
    if (!in) throw IoError(fmt::format("truncated path cache '{}'", path.string()));
    table.push_back(s, p, u);
  }
  return table;
}

}  // namespace endoid

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

#include "endoid/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "endoid/error.hpp"
#include "json.hpp"

namespace endoid {

using json = nlohmann::json;

namespace {

struct Header {
  std::string name;
  NodeKind kind = NodeKind::chance;
  std::vector<std::string> states;
  const json* body = nullptr;
};

class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  InfluenceDiagram read() {
    if (!doc_.is_object()) throw ParseError("diagram document must be a JSON object");
    for (const auto& [key, _] : doc_.items()) {
      if (key != "chance" && key != "decision" && key != "value" && key != "conditional_arcs") {
        throw ParseError(fmt::format("unknown top-level key '{}'", key));
      }
    }
    collect("chance", NodeKind::chance);
    collect("decision", NodeKind::decision);
    collect("value", NodeKind::value);

    for (std::size_t i = 0; i < headers_.size(); ++i) {
      if (!headers_[i]) throw ParseError(fmt::format("node ids are not contiguous: {} missing", i));
    }

    std::vector<Node> nodes;
    nodes.reserve(headers_.size());
    for (std::size_t i = 0; i < headers_.size(); ++i) nodes.push_back(read_node(i));

    std::vector<ConditionalArc> arcs;
    if (doc_.contains("conditional_arcs")) {
      const json& list = doc_.at("conditional_arcs");
      if (!list.is_array()) throw ParseError("'conditional_arcs' must be an array");
      for (const json& a : list) arcs.push_back(read_arc(a));
    }
    return InfluenceDiagram(std::move(nodes), std::move(arcs));
  }

 private:
  void collect(const char* key, NodeKind kind) {
    if (!doc_.contains(key)) return;
    const json& list = doc_.at(key);
    if (!list.is_array()) throw ParseError(fmt::format("'{}' must be an array", key));
    for (const json& n : list) {
      if (!n.is_object()) throw ParseError(fmt::format("entries of '{}' must be objects", key));
      const auto id = n.at("id").get<std::int64_t>();
      if (id < 0) throw ParseError(fmt::format("negative node id {}", id));
      const auto idx = static_cast<std::size_t>(id);
      if (idx >= headers_.size()) headers_.resize(idx + 1);
      if (headers_[idx]) throw ParseError(fmt::format("duplicate node id {}", id));
      Header h;
      h.name = n.at("name").get<std::string>();
      h.kind = kind;
      if (kind != NodeKind::value) {
        h.states = n.at("states").get<std::vector<std::string>>();
      } else if (n.contains("states") && !n.at("states").empty()) {
        throw ParseError(fmt::format("value node '{}' must not have states", h.name));
      }
      h.body = &n;
      if (!by_name_.emplace(h.name, idx).second) {
        throw ParseError(fmt::format("duplicate node name '{}'", h.name));
      }
      headers_[idx] = std::move(h);
    }
  }

  NodeId resolve(const json& ref) const {
    if (ref.is_string()) {
      const auto it = by_name_.find(ref.get<std::string>());
      if (it == by_name_.end()) {
        throw ParseError(fmt::format("unknown node '{}'", ref.get<std::string>()));
      }
      return node_id(it->second);
    }
    if (ref.is_number_integer()) {
      const auto id = ref.get<std::int64_t>();
      if (id < 0 || static_cast<std::size_t>(id) >= headers_.size()) {
        throw ParseError(fmt::format("unknown node id {}", id));
      }
      return node_id(static_cast<std::size_t>(id));
    }
    throw ParseError(fmt::format("node reference must be a name or id, got {}", ref.dump()));
  }

  int resolve_state(NodeId node, const json& ref) const {
    const Header& h = *headers_[index_of(node)];
    if (ref.is_number_integer()) {
      const auto s = ref.get<std::int64_t>();
      if (s < 0 || static_cast<std::size_t>(s) >= h.states.size()) {
        throw ParseError(fmt::format("state index {} out of range for '{}'", s, h.name));
      }
      return static_cast<int>(s);
    }
    const auto label = ref.get<std::string>();
    const auto it = std::find(h.states.begin(), h.states.end(), label);
    if (it == h.states.end()) {
      throw ParseError(fmt::format("'{}' has no state '{}'", h.name, label));
    }
    return static_cast<int>(it - h.states.begin());
  }

  std::vector<NodeId> read_set(const json& n, const char* key) const {
    std::vector<NodeId> ids;
    if (!n.contains(key)) return ids;
    const json& list = n.at(key);
    if (!list.is_array()) throw ParseError(fmt::format("'{}' must be an array", key));
    for (const json& r : list) ids.push_back(resolve(r));
    return ids;
  }

  // Rows of a table keyed by information-state labels, reordered into
  // lexicographic order over the sorted information set.
  std::vector<double> read_table(const Header& h, const std::vector<NodeId>& given_order,
                                 const json& table, const char* entry, std::size_t width) const {
    std::vector<NodeId> sorted = given_order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> radices;
    for (NodeId i : sorted) radices.push_back(headers_[index_of(i)].value().states.size());
    const InfoStateSpace space(sorted, radices);

    if (!table.is_array()) throw ParseError(fmt::format("table of '{}' must be an array", h.name));
    if (table.empty() || table.front().is_number()) {
      std::vector<double> flat;
      for (const json& v : table) flat.push_back(number(v, h.name));
      if (!std::is_sorted(given_order.begin(), given_order.end())) {
        throw ParseError(fmt::format("flat table of '{}' requires info_set in id order", h.name));
      }
      return flat;
    }

    std::vector<double> out(space.size() * width);
    std::vector<bool> seen(space.size(), false);
    std::vector<int> states(sorted.size());
    for (const json& row : table) {
      const json& given = row.at("given");
      if (!given.is_array() || given.size() != given_order.size()) {
        throw ParseError(fmt::format("row of '{}' must give {} labels", h.name, given_order.size()));
      }
      for (std::size_t p = 0; p < given_order.size(); ++p) {
        const auto pos = static_cast<std::size_t>(
            std::find(sorted.begin(), sorted.end(), given_order[p]) - sorted.begin());
        states[pos] = resolve_state(given_order[p], given[p]);
      }
      const std::size_t k = space.encode(states);
      if (seen[k]) throw ParseError(fmt::format("duplicate row {} in '{}'", given.dump(), h.name));
      seen[k] = true;
      const json& values = row.at(entry);
      if (width == 1 && values.is_number()) {
        out[k] = number(values, h.name);
        continue;
      }
      if (!values.is_array() || values.size() != width) {
        throw ParseError(fmt::format("row {} of '{}' must have {} entries", given.dump(), h.name,
                                     width));
      }
      for (std::size_t s = 0; s < width; ++s) out[k * width + s] = number(values[s], h.name);
    }
    for (std::size_t k = 0; k < space.size(); ++k) {
      if (!seen[k]) {
        throw ParseError(fmt::format("table of '{}' lacks row {}", h.name, label(space, k)));
      }
    }
    return out;
  }

  std::string label(const InfoStateSpace& space, std::size_t k) const {
    const auto states = space.decode(k);
    std::string out = "(";
    for (std::size_t p = 0; p < states.size(); ++p) {
      const Header& h = *headers_[index_of(space.nodes()[p])];
      if (p) out += ',';
      out += h.name + "=" + h.states[static_cast<std::size_t>(states[p])];
    }
    return out + ")";
  }

  static double number(const json& v, const std::string& owner) {
    if (!v.is_number()) throw ParseError(fmt::format("non-numeric table entry in '{}'", owner));
    return v.get<double>();
  }

  Node read_node(std::size_t idx) const {
    const Header& h = *headers_[idx];
    const json& n = *h.body;
    Node node;
    node.id = node_id(idx);
    node.name = h.name;
    node.kind = h.kind;
    node.states = h.states;
    const auto given_order = read_set(n, "info_set");
    node.info_set = given_order;
    std::sort(node.info_set.begin(), node.info_set.end());
    switch (h.kind) {
      case NodeKind::chance:
        node.table = read_table(h, given_order, n.at("cpt"), "probs", h.states.size());
        break;
      case NodeKind::value:
        node.table = read_table(h, given_order, n.at("utility"), "value", 1);
        break;
      case NodeKind::decision:
        node.cond_info_set = read_set(n, "cond_info_set");
        std::sort(node.cond_info_set.begin(), node.cond_info_set.end());
        break;
    }
    return node;
  }

  Condition read_condition(const json& c) const {
    if (c.is_boolean()) return Condition::constant(c.get<bool>());
    if (!c.is_array() || c.empty()) {
      throw ParseError(fmt::format("malformed condition {}", c.dump()));
    }
    if (c.front().is_string()) {
      const auto head = c.front().get<std::string>();
      if (head == "and" || head == "or" || head == "not") {
        std::vector<Condition> terms;
        for (std::size_t k = 1; k < c.size(); ++k) terms.push_back(read_condition(c[k]));
        if (head == "and") return Condition::all_of(std::move(terms));
        if (head == "or") return Condition::any_of(std::move(terms));
        if (terms.size() != 1) throw ParseError("'not' takes exactly one operand");
        return Condition::negate(std::move(terms.front()));
      }
    }
    if (c.size() != 2) throw ParseError(fmt::format("malformed condition atom {}", c.dump()));
    const NodeId node = resolve(c[0]);
    return Condition::atom(node, resolve_state(node, c[1]));
  }

  ConditionalArc read_arc(const json& a) const {
    ConditionalArc arc;
    arc.source = resolve(a.at("source"));
    arc.target = resolve(a.at("target"));
    arc.dist_set = read_set(a, "dist_set");
    std::sort(arc.dist_set.begin(), arc.dist_set.end());
    arc.condition = read_condition(a.at("condition"));
    return arc;
  }

  const json& doc_;
  std::vector<std::optional<Header>> headers_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
};

json names_of(const InfluenceDiagram& d, std::span<const NodeId> ids) {
  json out = json::array();
  for (NodeId i : ids) out.push_back(d.node(i).name);
  return out;
}

json write_condition(const InfluenceDiagram& d, const Condition& c) {
  switch (c.op()) {
    case Condition::Op::constant:
      return c.value();
    case Condition::Op::atom: {
      const Node& n = d.node(c.node());
      json state = c.state();
      if (c.state() >= 0 && static_cast<std::size_t>(c.state()) < n.states.size()) {
        state = n.states[static_cast<std::size_t>(c.state())];
      }
      return json::array({n.name, state});
    }
    case Condition::Op::all_of:
    case Condition::Op::any_of:
    case Condition::Op::negate: {
      json out = json::array();
      out.push_back(c.op() == Condition::Op::all_of   ? "and"
                    : c.op() == Condition::Op::any_of ? "or"
                                                      : "not");
      for (const auto& t : c.terms()) out.push_back(write_condition(d, t));
      return out;
    }
  }
  return false;
}

json write_rows(const InfluenceDiagram& d, const Node& n, const char* entry, std::size_t width) {
  const InfoStateSpace space = info_state_space(d, n.id);
  json rows = json::array();
  for (std::size_t k = 0; k < space.size(); ++k) {
    const auto states = space.decode(k);
    json given = json::array();
    for (std::size_t p = 0; p < states.size(); ++p) {
      given.push_back(d.node(space.nodes()[p]).states[static_cast<std::size_t>(states[p])]);
    }
    json row = {{"given", given}};
    if (width == 1) {
      row[entry] = n.table.at(k);
    } else {
      json values = json::array();
      for (std::size_t s = 0; s < width; ++s) values.push_back(n.table.at(k * width + s));
      row[entry] = values;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

InfluenceDiagram parse_diagram(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("invalid JSON: {}", e.what()));
  }
  try {
    return Reader(doc).read();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed diagram: {}", e.what()));
  }
}

InfluenceDiagram load_diagram(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_diagram(text);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string dump_diagram(const InfluenceDiagram& d) {
  json doc = {{"chance", json::array()},
              {"decision", json::array()},
              {"value", json::array()},
              {"conditional_arcs", json::array()}};
  for (const Node& n : d.nodes()) {
    json out = {{"id", index_of(n.id)}, {"name", n.name}};
    if (n.kind != NodeKind::value) out["states"] = n.states;
    out["info_set"] = names_of(d, n.info_set);
    switch (n.kind) {
      case NodeKind::chance:
        out["cpt"] = write_rows(d, n, "probs", n.states.size());
        doc["chance"].push_back(std::move(out));
        break;
      case NodeKind::decision:
        out["cond_info_set"] = names_of(d, n.cond_info_set);
        doc["decision"].push_back(std::move(out));
        break;
      case NodeKind::value:
        out["utility"] = write_rows(d, n, "value", 1);
        doc["value"].push_back(std::move(out));
        break;
    }
  }
  for (const ConditionalArc& a : d.cond_arcs()) {
    doc["conditional_arcs"].push_back({{"source", d.node(a.source).name},
                                       {"target", d.node(a.target).name},
                                       {"dist_set", names_of(d, a.dist_set)},
                                       {"condition", write_condition(d, a.condition)}});
  }
  return doc.dump(2) + "\n";
}

void save_diagram(const InfluenceDiagram& d, const std::filesystem::path& path) {
  write_text_file(path, dump_diagram(d));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace endoid

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
 * @file io.hpp
 *
 * JSON diagram documents.
 *
 * @code{.json}
 * {
 *   "chance":   [{"id": 1, "name": "C1", "states": ["win", "lose"],
 *                 "info_set": ["D1"],
 *                 "cpt": [{"given": ["play"], "probs": [0.6, 0.4]},
 *                         {"given": ["skip"], "probs": [0.0, 1.0]}]}],
 *   "decision": [{"id": 0, "name": "D1", "states": ["play", "skip"],
 *                 "info_set": [], "cond_info_set": []}],
 *   "value":    [{"id": 2, "name": "V1", "info_set": ["C1"],
 *                 "utility": [{"given": ["win"], "value": 10},
 *                             {"given": ["lose"], "value": 0}]}],
 *   "conditional_arcs": [{"source": "P2", "target": "D2",
 *                         "dist_set": ["O2"],
 *                         "condition": ["and", ["O2", "observe"]]}]
 * }
 * @endcode
 *
 * Node references are names or integer ids. `cpt` and `utility` may also be
 * flat arrays in information-state order. Conditions are prefix expressions:
 * `["and", c...]`, `["or", c...]`, `["not", c]`, `true`, `false`, or an atom
 * `[node, state]` with a state label or index.
 */

#ifndef ENDOID_IO_HPP_
#define ENDOID_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "endoid/diagram.hpp"

namespace endoid {

/// Throws ParseError on malformed text or unresolved references.
InfluenceDiagram parse_diagram(std::string_view text);

/// Throws IoError when the file cannot be read.
InfluenceDiagram load_diagram(const std::filesystem::path& path);

/// Canonical document: nodes by id, CPT rows keyed by labels. parse_diagram
/// of the result reproduces the diagram exactly.
std::string dump_diagram(const InfluenceDiagram& d);

void save_diagram(const InfluenceDiagram& d, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace endoid

#endif  // ENDOID_IO_HPP_

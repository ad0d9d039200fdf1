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

#ifndef ENDOID_TESTS_SUPPORT_FIXTURES_HPP_
#define ENDOID_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "endoid/diagram.hpp"
#include "endoid/paths.hpp"

namespace endoid::testing {

/// D (play, skip) -> C (win, lose) -> V. P(win | play) = 0.6; utilities
/// win 10, lose 0, skip 1.
InfluenceDiagram play_skip();

/// C1 -> D1 -> C2 -> D2 -> V with I(C2) = {D1, C1}, two states each.
InfluenceDiagram two_stage(double p_c1 = 0.4, double p_c2 = 0.5);

/// Conditional-arc topology: k (install, not_install) and i (two states) are
/// chance nodes, j a decision with I(j) = {k} and I_c(j) = {i}, T = {k},
/// F = [k = install].
InfluenceDiagram conditional_pair();

struct RandomDiagramOptions {
  std::size_t max_chance = 3;
  std::size_t max_decisions = 3;
  std::size_t max_values = 2;
  std::size_t max_states = 3;
  std::size_t max_parents = 2;
  double zero_probability = 0.15;
  bool conditional_arcs = false;
  double max_strategies = 1e4;
};

InfluenceDiagram random_diagram(std::mt19937_64& rng, const RandomDiagramOptions& opts = {});

Strategy random_strategy(const InfluenceDiagram& d, std::mt19937_64& rng);

/// Number of total strategies, as a double.
double strategy_count(const InfluenceDiagram& d);

/// Every path of the product space, active or not.
std::vector<Path> all_paths(const InfluenceDiagram& d);

}  // namespace endoid::testing

#endif  // ENDOID_TESTS_SUPPORT_FIXTURES_HPP_

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
 * @file coins.hpp
 *
 * The unfair-coins game family.
 *
 * Period 1 has D1 {play, skip}, C1 {win, lose, skip} and V1. Each later
 * period i adds the coin P_i {low, mid, high} drawn given C_{i-1}, the
 * decision D_i with I = {C_{i-1}, P_i}, the outcome C_i given (P_i, D_i) and
 * V_i reading C_i. Period 1 plays the mid coin.
 *
 * The conditional variant adds D_i^o {observe, ignore} (named Do<i>) with
 * cost node Vo<i>, and replaces P_i in I(D_i) by a conditional arc with
 * T = {Do<i>} and F = [Do<i> = observe].
 */

#ifndef ENDOID_COINS_HPP_
#define ENDOID_COINS_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "endoid/diagram.hpp"
#include "endoid/transforms.hpp"

namespace endoid {

struct CoinsConfig {
  int periods = 4;
  std::array<double, 3> coin_win_probs{0.4, 0.5, 0.6};  // low, mid, high
  /// Coin distribution after the previous outcome win, lose, skip.
  std::array<std::array<double, 3>, 3> transition{{{0.2, 0.3, 0.5},
                                                   {0.5, 0.3, 0.2},
                                                   {0.25, 0.5, 0.25}}};
  double stake = 1.0;
  double observation_cost = 0.1;
  std::uint64_t seed = 0;
};

/// Throws DomainError naming the offending field.
void validate_coins_config(const CoinsConfig& config);

enum class CoinsVariant { always_observed, conditional };

struct CoinsOptions {
  CoinsVariant variant = CoinsVariant::always_observed;
  /// When > 1, P_k is left out of I(D_k) for this period k.
  int hidden_coin_period = 0;
};

InfluenceDiagram coins_diagram(const CoinsConfig& config, const CoinsOptions& opts = {});

/// Default config with win probabilities drawn uniformly from [0.2, 0.8]
/// and sorted ascending.
CoinsConfig random_coins_config(int periods, std::mt19937_64& rng);

/// Period of a node named by the coins generator.
int coins_period(const Node& node);

/// Main-problem nodes for a split after period n_main (0 <= n_main <= periods).
std::vector<NodeId> coins_main_nodes(const InfluenceDiagram& d, int n_main);

/// Partition for a split after period n_main.
PartitionPlan coins_split(const InfluenceDiagram& d, int n_main);

/// Split after period k - 1 with P_k kept in the main problem.
PartitionPlan coins_split_keeping_coin(const InfluenceDiagram& d, int k);

CoinsConfig parse_coins_config(const std::string& text);
std::string dump_coins_config(const CoinsConfig& config);

}  // namespace endoid

#endif  // ENDOID_COINS_HPP_

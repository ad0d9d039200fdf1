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

#include "endoid/coins.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "endoid/builder.hpp"
#include "endoid/error.hpp"
#include "json.hpp"

namespace endoid {

namespace {

constexpr int kWin = 0, kLose = 1, kSkip = 2;
constexpr int kPlay = 0;
constexpr int kMidCoin = 1;
constexpr int kObserve = 0;

void check_distribution(const std::array<double, 3>& p, const std::string& field) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      throw DomainError(fmt::format("{} has an invalid probability {}", field, x));
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw DomainError(fmt::format("{} sums to {}", field, sum));
  }
}

std::vector<double> outcome_row(double win, int decision) {
  if (decision != kPlay) return {0.0, 0.0, 1.0};
  return {win, 1.0 - win, 0.0};
}

}  // namespace

void validate_coins_config(const CoinsConfig& config) {
  if (config.periods < 1) throw DomainError("periods must be at least 1");
  for (double p : config.coin_win_probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError(fmt::format("coin_win_probs has an invalid probability {}", p));
    }
  }
  static constexpr const char* kRows[] = {"win", "lose", "skip"};
  for (int r = 0; r < 3; ++r) {
    check_distribution(config.transition[r], fmt::format("transition.{}", kRows[r]));
  }
  if (!(config.stake > 0.0)) throw DomainError("stake must be positive");
  if (!(config.observation_cost >= 0.0)) throw DomainError("observation_cost must be >= 0");
}

InfluenceDiagram coins_diagram(const CoinsConfig& config, const CoinsOptions& opts) {
  validate_coins_config(config);
  const bool conditional = opts.variant == CoinsVariant::conditional;
  if (opts.hidden_coin_period != 0 &&
      (conditional || opts.hidden_coin_period < 2 || opts.hidden_coin_period > config.periods)) {
    throw DomainError(fmt::format("hidden_coin_period {} does not name a coin of an "
                                  "always-observed game",
                                  opts.hidden_coin_period));
  }

  DiagramBuilder b;
  const std::vector<std::string> decisions{"play", "skip"};
  const std::vector<std::string> outcomes{"win", "lose", "skip"};
  const std::vector<std::string> coins{"low", "mid", "high"};
  const double stake = config.stake;
  auto payoff = [stake](std::span<const int> s) {
    return s[0] == kWin ? stake : s[0] == kLose ? -stake : 0.0;
  };

  const NodeId d1 = b.decision("D1", decisions, {});
  NodeId previous = b.chance("C1", outcomes, {d1}, [&](std::span<const int> s) {
    return outcome_row(config.coin_win_probs[kMidCoin], s[0]);
  });
  b.value("V1", {previous}, payoff);

  for (int i = 2; i <= config.periods; ++i) {
    const NodeId p = b.chance(fmt::format("P{}", i), coins, {previous},
                              [&](std::span<const int> s) {
                                const auto& row = config.transition[static_cast<std::size_t>(s[0])];
                                return std::vector<double>(row.begin(), row.end());
                              });
    NodeId d{};
    if (conditional) {
      const NodeId o = b.decision(fmt::format("Do{}", i), {"observe", "ignore"}, {});
      const double cost = config.observation_cost;
      b.value(fmt::format("Vo{}", i), {o}, [cost](std::span<const int> s) {
        return s[0] == kObserve ? -cost : 0.0;
      });
      d = b.decision(fmt::format("D{}", i), decisions, {previous, o}, {p});
      b.conditional_arc(p, d, {o}, Condition::atom(o, kObserve));
    } else if (opts.hidden_coin_period == i) {
      d = b.decision(fmt::format("D{}", i), decisions, {previous});
    } else {
      d = b.decision(fmt::format("D{}", i), decisions, {previous, p});
    }
    const NodeId c = b.chance(fmt::format("C{}", i), outcomes, {p, d},
                              [&](std::span<const int> s) {
                                return outcome_row(
                                    config.coin_win_probs[static_cast<std::size_t>(s[0])], s[1]);
                              });
    b.value(fmt::format("V{}", i), {c}, payoff);
    previous = c;
  }
  return b.build();
}

CoinsConfig random_coins_config(int periods, std::mt19937_64& rng) {
  CoinsConfig config;
  config.periods = periods;
  std::uniform_real_distribution<double> u(0.2, 0.8);
  for (double& p : config.coin_win_probs) p = u(rng);
  std::sort(config.coin_win_probs.begin(), config.coin_win_probs.end());
  return config;
}

int coins_period(const Node& node) {
  const std::string& name = node.name;
  std::size_t k = name.size();
  while (k > 0 && std::isdigit(static_cast<unsigned char>(name[k - 1]))) --k;
  if (k == name.size()) throw DomainError(fmt::format("'{}' is not a coins node", name));
  return std::stoi(name.substr(k));
}

std::vector<NodeId> coins_main_nodes(const InfluenceDiagram& d, int n_main) {
  std::vector<NodeId> out;
  for (const Node& n : d.nodes()) {
    if (coins_period(n) <= n_main) out.push_back(n.id);
  }
  return out;
}

PartitionPlan coins_split(const InfluenceDiagram& d, int n_main) {
  return plan_partition(d, coins_main_nodes(d, n_main));
}

PartitionPlan coins_split_keeping_coin(const InfluenceDiagram& d, int k) {
  auto main = coins_main_nodes(d, k - 1);
  const auto coin = d.find(fmt::format("P{}", k));
  if (!coin) throw DomainError(fmt::format("the game has no coin node P{}", k));
  main.push_back(*coin);
  return plan_partition(d, main);
}

CoinsConfig parse_coins_config(const std::string& text) {
  using nlohmann::json;
  CoinsConfig c;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw ParseError("coins config must be an object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "periods") {
        c.periods = value.get<int>();
      } else if (key == "coin_win_probs") {
        c.coin_win_probs = value.get<std::array<double, 3>>();
      } else if (key == "transition") {
        for (const char* row : {"win", "lose", "skip"}) {
          if (!value.contains(row)) {
            throw ParseError(fmt::format("transition is missing the row '{}'", row));
          }
        }
        c.transition[kWin] = value.at("win").get<std::array<double, 3>>();
        c.transition[kLose] = value.at("lose").get<std::array<double, 3>>();
        c.transition[kSkip] = value.at("skip").get<std::array<double, 3>>();
      } else if (key == "stake") {
        c.stake = value.get<double>();
      } else if (key == "observation_cost") {
        c.observation_cost = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else {
        throw ParseError(fmt::format("unknown coins config key '{}'", key));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("coins config: {}", e.what()));
  }
  validate_coins_config(c);
  return c;
}

std::string dump_coins_config(const CoinsConfig& c) {
  nlohmann::ordered_json doc;
  doc["periods"] = c.periods;
  doc["coin_win_probs"] = c.coin_win_probs;
  doc["transition"] = {{"win", c.transition[kWin]},
                       {"lose", c.transition[kLose]},
                       {"skip", c.transition[kSkip]}};
  doc["stake"] = c.stake;
  doc["observation_cost"] = c.observation_cost;
  doc["seed"] = c.seed;
  return doc.dump(2) + "\n";
}

}  // namespace endoid

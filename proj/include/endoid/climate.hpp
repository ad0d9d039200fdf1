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
 * @file climate.hpp
 *
 * Climate cost-benefit case study: R&D decisions on damages, climate
 * sensitivity and abatement technology, followed by three abatement stages
 * (2030, 2050, 2070) solved as a continuous scenario-tree problem.
 *
 * Level arrays are ordered high, medium, low. R&D effort arrays are ordered
 * low, medium, high. Money is in billions of dollars, abatement in GtCO2 per
 * year and marginal cost in dollars per tonne.
 */

#ifndef ENDOID_CLIMATE_HPP_
#define ENDOID_CLIMATE_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "endoid/decomposition.hpp"
#include "endoid/diagram.hpp"

namespace endoid {

inline constexpr int kHigh = 0, kMedium = 1, kLow = 2;
inline constexpr std::array<int, 3> kStageYears{2030, 2050, 2070};
inline constexpr int kBaseYear = 2020;
inline constexpr int kDamageYear = 2100;

/// Two-step lattice for one parameter. The first branching keeps
/// {low, medium} (not_high) or {medium, high} (not_low).
struct LatticeProbs {
  double not_high = 0.5;
  double low_given_not_high = 0.5;
  double high_given_not_low = 0.5;

  bool operator==(const LatticeProbs&) const = default;
};

struct RndCosts {
  double damage = 0.0;
  double sensitivity = 0.0;
  double tech_medium_2020 = 0.0;
  double tech_medium_2030 = 0.0;
  double tech_high_2030 = 0.0;

  bool operator==(const RndCosts&) const = default;
};

/// Inputs that the source tables do not provide. All are mandatory.
struct ClimateCalibration {
  std::optional<double> damage_scale;  // a
  std::optional<double> output;        // Y at the damage year
  std::array<std::optional<double>, 4> k;
  std::optional<std::array<double, 3>> baseline_emissions;  // per stage
  std::optional<double> research_success_prob;
  std::optional<double> promising_prob;
  std::optional<RndCosts> rnd_costs;

  bool operator==(const ClimateCalibration&) const = default;
};

struct ClimateConfig {
  /// [stage][level]
  std::array<std::array<double, 3>, 3> mac_alpha{{{3.57, 3.57, 3.57},
                                                  {11.2, 13.3, 16.7},
                                                  {21.1, 24.3, 29.3}}};
  std::array<double, 3> mac_beta{0.340, 0.250, 0.203};
  /// [effort][level]: probability of each cost level given R&D effort.
  std::array<std::array<double, 3>, 3> rnd_cost_probs{{{0.73, 0.27, 0.00},
                                                       {0.31, 0.64, 0.05},
                                                       {0.09, 0.73, 0.18}}};
  std::array<double, 3> climate_sensitivity{6.0, 3.0, 1.5};
  std::array<double, 3> damage_exponent{4.0, 2.0, 1.0};
  LatticeProbs damage_lattice{0.5, 0.5, 0.5};
  LatticeProbs sensitivity_lattice{0.5, 0.21, 0.23};
  double discount_rate = 0.05;
  /// Marginal cost at the upper end of the abatement box.
  double max_marginal_cost = 300.0;
  /// Years each stage's abatement lasts.
  std::array<double, 3> stage_years{20.0, 20.0, 30.0};
  /// Fractions of the abatement box used by the discretized diagram.
  std::vector<double> abatement_levels{0.0, 0.5, 1.0};
  ClimateCalibration calibration;

  bool operator==(const ClimateConfig&) const = default;
};

/// Documented placeholder calibration; not derived from any published model.
ClimateCalibration placeholder_calibration();

/// Throws DomainError; missing calibration fields are listed by name.
void validate_climate_config(const ClimateConfig& config);

ClimateConfig parse_climate_config(const std::string& text);
std::string dump_climate_config(const ClimateConfig& config);

// Formulas. All throw DomainError outside their domain.
double mac_marginal_cost(double r, double alpha, double beta);
double mac_total_cost(double r, double alpha, double beta);
double damage_cost(double delta_t, double output, double a, double b);
double delta_temperature(double c, double m, const std::array<double, 4>& k);

/// (1 + rate)^-(year - base year).
double discount_factor(double rate, int year);

/// Probabilities of {high, medium, low} after both branchings.
std::array<double, 3> lattice_marginals(const LatticeProbs& p);

/// Upper end of the abatement box for a stage and cost level.
double max_abatement(const ClimateConfig& config, int stage, int level);

/// Full diagram with discretized abatement decisions D_E1..D_E3.
InfluenceDiagram climate_main_diagram(const ClimateConfig& config);

/// D_Dmg, D_T1, D_CS, C_T1, D_T2.
std::vector<NodeId> climate_main_nodes(const InfluenceDiagram& d);
PartitionPlan climate_plan(const InfluenceDiagram& d);

/// Parameter outcome after the second branching.
struct ClimateOutcome {
  double probability = 0.0;  // conditional on the leaf
  double sensitivity = 0.0;
  double damage_exponent = 0.0;
};

struct ClimateLeaf {
  std::size_t node_2050 = 0;
  double probability = 0.0;
  std::vector<ClimateOutcome> outcomes;
  std::string label;
};

/// Variables are x = [R_2030, R_2050 per node, R_2070 per leaf].
struct ClimateTree {
  std::vector<int> level_2050;  // cost level per 2050 node
  std::vector<std::string> label_2050;
  std::vector<ClimateLeaf> leaves;

  std::size_t num_variables() const noexcept { return 1 + level_2050.size() + leaves.size(); }
  std::size_t var_2050(std::size_t node) const noexcept { return 1 + node; }
  std::size_t var_2070(std::size_t leaf) const noexcept {
    return 1 + level_2050.size() + leaf;
  }
};

/// Tree of one subproblem slice; reads the slice CPTs of C_Dmg, C_CS, C_T2,
/// O_Dmg and O_CS. Zero-probability branches are pruned.
ClimateTree climate_tree(const ClimateConfig& config, const InfluenceDiagram& slice);

std::vector<double> climate_upper_bounds(const ClimateConfig& config, const ClimateTree& tree);

struct ClimateCost {
  double abatement = 0.0;  // expected discounted
  double damage = 0.0;     // expected discounted
  std::vector<double> abatement_grad;
  std::vector<double> damage_grad;
  std::vector<double> leaf_cost;  // discounted, not weighted by probability

  double total() const noexcept { return abatement + damage; }
};

ClimateCost climate_tree_cost(const ClimateConfig& config, const ClimateTree& tree,
                              const std::vector<double>& x);

struct ClimateSolveOptions {
  double tolerance = 1e-8;  // on the projected-gradient norm
  int max_iterations = 100'000;
};

struct ClimateSolution {
  std::vector<double> abatement;  // x
  double cost = 0.0;
  double residual = 0.0;
  int iterations = 0;
  ClimateTree tree;
};

/// Projected gradient with Barzilai-Borwein steps and nonmonotone Armijo
/// backtracking on the abatement box, in coordinates u with
/// R = R_max * u^beta. The tolerance applies to the projected-gradient norm
/// in u. Throws DomainError with the residual when the iteration cap is hit.
ClimateSolution solve_climate_tree(const ClimateConfig& config, ClimateTree tree,
                                   const ClimateSolveOptions& opts = {});

/// Subproblem plugin; the utility is the negated expected cost and the
/// solution a ClimateSolution.
SubproblemPlugin climate_plugin(ClimateConfig config, ClimateSolveOptions opts = {});

struct ClimateBranchRow {
  std::string main;    // main-problem chance outcome
  std::string branch;  // subproblem branch without the cost level
  int year = 0;
  int cost_level = -1;  // none in 2030
  double probability = 0.0;  // of the branch on the optimal strategy
  double abatement = 0.0;
  double cost = 0.0;  // discounted abatement cost of the stage
};

struct ClimateLevelSummary {
  int cost_level = kMedium;
  double probability = 0.0;
  double expected_cost = 0.0;  // conditional on the level, R&D included
};

struct ClimateReport {
  double expected_cost = 0.0;
  /// Decision name -> chosen state, one entry per decision and information
  /// state reached on the optimal strategy.
  std::vector<std::pair<std::string, std::string>> rnd_strategy;
  std::vector<ClimateBranchRow> branches;
  std::vector<ClimateLevelSummary> levels;
  DecomposedResult run;
};

struct ClimateRunOptions {
  unsigned workers = default_workers();
  ClimateSolveOptions solve;
};

ClimateReport solve_climate(const ClimateConfig& config, const ClimateRunOptions& opts = {});

/// Pairs of branches, equal apart from the cost level, whose abatement falls
/// as the cost level drops (beyond `tolerance` relative). Empty when
/// abatement is monotone.
std::vector<std::string> abatement_monotonicity_violations(const ClimateReport& report,
                                                           double tolerance = 1e-6);

std::string climate_branch_table(const ClimateReport& report);
std::string climate_level_table(const ClimateReport& report);

}  // namespace endoid

#endif  // ENDOID_CLIMATE_HPP_

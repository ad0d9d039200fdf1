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

#include "endoid/climate.hpp"

#include <algorithm>
#include <any>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "endoid/builder.hpp"
#include "endoid/error.hpp"
#include "json.hpp"

namespace endoid {

namespace {

constexpr const char* kLevelNames[] = {"high", "medium", "low"};
constexpr const char* kEffortNames[] = {"low", "medium", "high"};
constexpr const char* kStageNames[] = {"2030", "2050", "2070"};
constexpr int kSuccess = 0, kFailure = 1;
constexpr int kNotHigh = 0, kNotLow = 1;
constexpr int kEffortLow = 0, kEffortMedium = 1, kEffortHigh = 2;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void check_probability(double p, const std::string& field) {
  if (!is_probability(p)) throw DomainError(fmt::format("{} is not a probability: {}", field, p));
}

void check_positive(double v, const std::string& field) {
  if (!(std::isfinite(v) && v > 0.0)) throw DomainError(fmt::format("{} must be > 0: {}", field, v));
}

void check_nonnegative(double v, const std::string& field) {
  if (!(std::isfinite(v) && v >= 0.0)) {
    throw DomainError(fmt::format("{} must be >= 0: {}", field, v));
  }
}

std::array<double, 4> k_of(const ClimateConfig& c) {
  return {*c.calibration.k[0], *c.calibration.k[1], *c.calibration.k[2], *c.calibration.k[3]};
}

// Outcomes {high, medium, low} with probabilities after a first branching.
std::array<double, 3> second_branching(const LatticeProbs& p, int first) {
  if (first == kNotHigh) return {0.0, 1.0 - p.low_given_not_high, p.low_given_not_high};
  return {p.high_given_not_low, 1.0 - p.high_given_not_low, 0.0};
}

std::vector<ClimateOutcome> leaf_outcomes(const ClimateConfig& c, int o_dmg, int o_cs) {
  const auto pd = second_branching(c.damage_lattice, o_dmg);
  const auto pc = second_branching(c.sensitivity_lattice, o_cs);
  std::vector<ClimateOutcome> out;
  for (int b = 0; b < 3; ++b) {
    for (int s = 0; s < 3; ++s) {
      const double p = pd[static_cast<std::size_t>(b)] * pc[static_cast<std::size_t>(s)];
      if (p <= 0.0) continue;
      out.push_back({p, c.climate_sensitivity[static_cast<std::size_t>(s)],
                     c.damage_exponent[static_cast<std::size_t>(b)]});
    }
  }
  return out;
}

double stage_weight(const ClimateConfig& c, int stage) {
  return discount_factor(c.discount_rate, kStageYears[static_cast<std::size_t>(stage)]) *
         c.stage_years[static_cast<std::size_t>(stage)];
}

double rnd_cost(const ClimateConfig& c, int d_dmg, int d_t1, int d_cs, int d_t2) {
  const RndCosts& r = *c.calibration.rnd_costs;
  double now = 0.0, later = 0.0;
  if (d_dmg == 1) now += r.damage;
  if (d_cs == 1) now += r.sensitivity;
  if (d_t1 == 1) {
    now += r.tech_medium_2020;
    later += d_t2 == 0 ? r.tech_medium_2030 : r.tech_high_2030;
  }
  return discount_factor(c.discount_rate, kBaseYear) * now +
         discount_factor(c.discount_rate, kStageYears[0]) * later;
}

// Expected discounted damage for abatement r and the leaf outcomes, with its
// derivative in cumulative emissions.
std::pair<double, double> expected_damage(const ClimateConfig& c,
                                          const std::vector<ClimateOutcome>& outcomes,
                                          double m) {
  const auto k = k_of(c);
  const double scale = discount_factor(c.discount_rate, kDamageYear) *
                       *c.calibration.output * *c.calibration.damage_scale;
  double v = 0.0, dv = 0.0;
  for (const ClimateOutcome& o : outcomes) {
    const double dt = delta_temperature(o.sensitivity, m, k);
    if (dt <= 0.0) continue;
    const double slope = k[0] * o.sensitivity + k[2];
    v += o.probability * scale * std::pow(dt, o.damage_exponent);
    dv += o.probability * scale * o.damage_exponent * std::pow(dt, o.damage_exponent - 1.0) *
          slope;
  }
  return {v, dv};
}

double cumulative_emissions(const ClimateConfig& c, const std::array<double, 3>& r) {
  const auto& base = *c.calibration.baseline_emissions;
  double m = 0.0;
  for (std::size_t t = 0; t < 3; ++t) m += c.stage_years[t] * (base[t] - r[t]);
  return m;
}

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!obj.is_object()) throw ParseError(fmt::format("{} must be an object", where));
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) ==
        keys.end()) {
      throw ParseError(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <typename Names>
std::array<double, 3> read_triple(const json& obj, const Names& names, const std::string& where) {
  reject_unknown(obj, {names[0], names[1], names[2]}, where);
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!obj.contains(names[i])) {
      throw ParseError(fmt::format("{} is missing '{}'", where, names[i]));
    }
    out[i] = obj.at(names[i]).template get<double>();
  }
  return out;
}

template <typename Names>
ordered_json write_triple(const std::array<double, 3>& v, const Names& names) {
  ordered_json o;
  for (std::size_t i = 0; i < 3; ++i) o[names[i]] = v[i];
  return o;
}

LatticeProbs read_lattice(const json& obj, const std::string& where) {
  reject_unknown(obj, {"not_high", "low_given_not_high", "high_given_not_low"}, where);
  return {obj.at("not_high").get<double>(), obj.at("low_given_not_high").get<double>(),
          obj.at("high_given_not_low").get<double>()};
}

ordered_json write_lattice(const LatticeProbs& p) {
  ordered_json o;
  o["not_high"] = p.not_high;
  o["low_given_not_high"] = p.low_given_not_high;
  o["high_given_not_low"] = p.high_given_not_low;
  return o;
}

}  // namespace

// ------------------------------------------------------------------ config

ClimateCalibration placeholder_calibration() {
  ClimateCalibration c;
  c.damage_scale = 0.00236;
  c.output = 1.2e7;
  c.k = {3e-4, 0.1, 1e-4, 0.5};
  c.baseline_emissions = std::array<double, 3>{40.0, 45.0, 50.0};
  c.research_success_prob = 0.5;
  c.promising_prob = 0.5;
  c.rnd_costs = RndCosts{50.0, 50.0, 100.0, 100.0, 300.0};
  return c;
}

void validate_climate_config(const ClimateConfig& c) {
  std::vector<std::string> missing;
  const ClimateCalibration& cal = c.calibration;
  if (!cal.damage_scale) missing.emplace_back("damage_scale");
  if (!cal.output) missing.emplace_back("output");
  for (std::size_t i = 0; i < 4; ++i) {
    if (!cal.k[i]) missing.push_back(fmt::format("k{}", i + 1));
  }
  if (!cal.baseline_emissions) missing.emplace_back("baseline_emissions");
  if (!cal.research_success_prob) missing.emplace_back("research_success_prob");
  if (!cal.promising_prob) missing.emplace_back("promising_prob");
  if (!cal.rnd_costs) missing.emplace_back("rnd_costs");
  if (!missing.empty()) {
    throw DomainError(fmt::format("missing calibration fields: {}", fmt::join(missing, ", ")));
  }

  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t l = 0; l < 3; ++l) {
      check_positive(c.mac_alpha[t][l],
                     fmt::format("mac_alpha.{}.{}", kStageNames[t], kLevelNames[l]));
    }
    check_positive(c.mac_beta[t], fmt::format("mac_beta.{}", kStageNames[t]));
    check_positive(c.stage_years[t], fmt::format("stage_years[{}]", t));
  }
  for (std::size_t e = 0; e < 3; ++e) {
    double sum = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
      const auto field = fmt::format("rnd_cost_probs.{}.{}", kEffortNames[e], kLevelNames[l]);
      check_probability(c.rnd_cost_probs[e][l], field);
      sum += c.rnd_cost_probs[e][l];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DomainError(fmt::format("rnd_cost_probs.{} sums to {}", kEffortNames[e], sum));
    }
  }
  for (std::size_t l = 0; l < 3; ++l) {
    check_positive(c.climate_sensitivity[l], fmt::format("climate_sensitivity.{}", kLevelNames[l]));
    if (!(c.damage_exponent[l] >= 1.0 && std::isfinite(c.damage_exponent[l]))) {
      throw DomainError(fmt::format("damage_exponent.{} must be >= 1: {}", kLevelNames[l],
                                    c.damage_exponent[l]));
    }
  }
  for (const auto& [lattice, name] : {std::pair{&c.damage_lattice, "damage_lattice"},
                                      std::pair{&c.sensitivity_lattice, "sensitivity_lattice"}}) {
    check_probability(lattice->not_high, fmt::format("{}.not_high", name));
    check_probability(lattice->low_given_not_high, fmt::format("{}.low_given_not_high", name));
    check_probability(lattice->high_given_not_low, fmt::format("{}.high_given_not_low", name));
  }
  if (!(std::isfinite(c.discount_rate) && c.discount_rate > -1.0)) {
    throw DomainError(fmt::format("discount_rate must be > -1: {}", c.discount_rate));
  }
  check_positive(c.max_marginal_cost, "max_marginal_cost");
  if (c.abatement_levels.empty()) throw DomainError("abatement_levels is empty");
  for (std::size_t i = 0; i < c.abatement_levels.size(); ++i) {
    if (!is_probability(c.abatement_levels[i]) ||
        (i > 0 && !(c.abatement_levels[i] > c.abatement_levels[i - 1]))) {
      throw DomainError("abatement_levels must be increasing fractions in [0, 1]");
    }
  }
  check_nonnegative(*cal.damage_scale, "damage_scale");
  check_nonnegative(*cal.output, "output");
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(*cal.k[i])) throw DomainError(fmt::format("k{} is not finite", i + 1));
  }
  for (std::size_t t = 0; t < 3; ++t) {
    if (!std::isfinite((*cal.baseline_emissions)[t])) {
      throw DomainError(fmt::format("baseline_emissions[{}] is not finite", t));
    }
  }
  check_probability(*cal.research_success_prob, "research_success_prob");
  check_probability(*cal.promising_prob, "promising_prob");
  const RndCosts& r = *cal.rnd_costs;
  check_nonnegative(r.damage, "rnd_costs.damage");
  check_nonnegative(r.sensitivity, "rnd_costs.sensitivity");
  check_nonnegative(r.tech_medium_2020, "rnd_costs.tech_medium_2020");
  check_nonnegative(r.tech_medium_2030, "rnd_costs.tech_medium_2030");
  check_nonnegative(r.tech_high_2030, "rnd_costs.tech_high_2030");
}

ClimateConfig parse_climate_config(const std::string& text) {
  ClimateConfig c;
  try {
    const json doc = json::parse(text);
    reject_unknown(doc,
                   {"mac_alpha", "mac_beta", "rnd_cost_probs", "climate_sensitivity",
                    "damage_exponent", "damage_lattice", "sensitivity_lattice", "discount_rate",
                    "max_marginal_cost", "stage_years", "abatement_levels", "calibration"},
                   "climate config");
    if (doc.contains("mac_alpha")) {
      const json& a = doc.at("mac_alpha");
      reject_unknown(a, {"2030", "2050", "2070"}, "mac_alpha");
      for (std::size_t t = 0; t < 3; ++t) {
        c.mac_alpha[t] = read_triple(a.at(kStageNames[t]), kLevelNames,
                                     fmt::format("mac_alpha.{}", kStageNames[t]));
      }
    }
    if (doc.contains("mac_beta")) c.mac_beta = read_triple(doc.at("mac_beta"), kStageNames, "mac_beta");
    if (doc.contains("rnd_cost_probs")) {
      const json& p = doc.at("rnd_cost_probs");
      reject_unknown(p, {"low", "medium", "high"}, "rnd_cost_probs");
      for (std::size_t e = 0; e < 3; ++e) {
        c.rnd_cost_probs[e] = read_triple(p.at(kEffortNames[e]), kLevelNames,
                                          fmt::format("rnd_cost_probs.{}", kEffortNames[e]));
      }
    }
    if (doc.contains("climate_sensitivity")) {
      c.climate_sensitivity =
          read_triple(doc.at("climate_sensitivity"), kLevelNames, "climate_sensitivity");
    }
    if (doc.contains("damage_exponent")) {
      c.damage_exponent = read_triple(doc.at("damage_exponent"), kLevelNames, "damage_exponent");
    }
    if (doc.contains("damage_lattice")) {
      c.damage_lattice = read_lattice(doc.at("damage_lattice"), "damage_lattice");
    }
    if (doc.contains("sensitivity_lattice")) {
      c.sensitivity_lattice = read_lattice(doc.at("sensitivity_lattice"), "sensitivity_lattice");
    }
    if (doc.contains("discount_rate")) c.discount_rate = doc.at("discount_rate").get<double>();
    if (doc.contains("max_marginal_cost")) {
      c.max_marginal_cost = doc.at("max_marginal_cost").get<double>();
    }
    if (doc.contains("stage_years")) {
      c.stage_years = doc.at("stage_years").get<std::array<double, 3>>();
    }
    if (doc.contains("abatement_levels")) {
      c.abatement_levels = doc.at("abatement_levels").get<std::vector<double>>();
    }
    if (doc.contains("calibration")) {
      const json& cal = doc.at("calibration");
      reject_unknown(cal,
                     {"damage_scale", "output", "k1", "k2", "k3", "k4", "baseline_emissions",
                      "research_success_prob", "promising_prob", "rnd_costs"},
                     "calibration");
      ClimateCalibration& out = c.calibration;
      if (cal.contains("damage_scale")) out.damage_scale = cal.at("damage_scale").get<double>();
      if (cal.contains("output")) out.output = cal.at("output").get<double>();
      for (std::size_t i = 0; i < 4; ++i) {
        const auto key = fmt::format("k{}", i + 1);
        if (cal.contains(key)) out.k[i] = cal.at(key).get<double>();
      }
      if (cal.contains("baseline_emissions")) {
        out.baseline_emissions = cal.at("baseline_emissions").get<std::array<double, 3>>();
      }
      if (cal.contains("research_success_prob")) {
        out.research_success_prob = cal.at("research_success_prob").get<double>();
      }
      if (cal.contains("promising_prob")) {
        out.promising_prob = cal.at("promising_prob").get<double>();
      }
      if (cal.contains("rnd_costs")) {
        const json& r = cal.at("rnd_costs");
        reject_unknown(r,
                       {"damage", "sensitivity", "tech_medium_2020", "tech_medium_2030",
                        "tech_high_2030"},
                       "rnd_costs");
        out.rnd_costs = RndCosts{r.at("damage").get<double>(), r.at("sensitivity").get<double>(),
                                 r.at("tech_medium_2020").get<double>(),
                                 r.at("tech_medium_2030").get<double>(),
                                 r.at("tech_high_2030").get<double>()};
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("climate config: {}", e.what()));
  }
  return c;
}

std::string dump_climate_config(const ClimateConfig& c) {
  ordered_json doc;
  ordered_json alpha;
  for (std::size_t t = 0; t < 3; ++t) alpha[kStageNames[t]] = write_triple(c.mac_alpha[t], kLevelNames);
  doc["mac_alpha"] = alpha;
  doc["mac_beta"] = write_triple(c.mac_beta, kStageNames);
  ordered_json probs;
  for (std::size_t e = 0; e < 3; ++e) {
    probs[kEffortNames[e]] = write_triple(c.rnd_cost_probs[e], kLevelNames);
  }
  doc["rnd_cost_probs"] = probs;
  doc["climate_sensitivity"] = write_triple(c.climate_sensitivity, kLevelNames);
  doc["damage_exponent"] = write_triple(c.damage_exponent, kLevelNames);
  doc["damage_lattice"] = write_lattice(c.damage_lattice);
  doc["sensitivity_lattice"] = write_lattice(c.sensitivity_lattice);
  doc["discount_rate"] = c.discount_rate;
  doc["max_marginal_cost"] = c.max_marginal_cost;
  doc["stage_years"] = c.stage_years;
  doc["abatement_levels"] = c.abatement_levels;
  ordered_json cal = ordered_json::object();
  const ClimateCalibration& in = c.calibration;
  if (in.damage_scale) cal["damage_scale"] = *in.damage_scale;
  if (in.output) cal["output"] = *in.output;
  for (std::size_t i = 0; i < 4; ++i) {
    if (in.k[i]) cal[fmt::format("k{}", i + 1)] = *in.k[i];
  }
  if (in.baseline_emissions) cal["baseline_emissions"] = *in.baseline_emissions;
  if (in.research_success_prob) cal["research_success_prob"] = *in.research_success_prob;
  if (in.promising_prob) cal["promising_prob"] = *in.promising_prob;
  if (in.rnd_costs) {
    const RndCosts& r = *in.rnd_costs;
    ordered_json o;
    o["damage"] = r.damage;
    o["sensitivity"] = r.sensitivity;
    o["tech_medium_2020"] = r.tech_medium_2020;
    o["tech_medium_2030"] = r.tech_medium_2030;
    o["tech_high_2030"] = r.tech_high_2030;
    cal["rnd_costs"] = o;
  }
  doc["calibration"] = cal;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- formulas

double mac_marginal_cost(double r, double alpha, double beta) {
  if (!(r >= 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
    throw DomainError(fmt::format("mac_marginal_cost: need R >= 0, alpha > 0, beta > 0 "
                                  "(R={}, alpha={}, beta={})",
                                  r, alpha, beta));
  }
  return std::pow(r / alpha, 1.0 / beta);
}

double mac_total_cost(double r, double alpha, double beta) {
  if (!(r >= 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
    throw DomainError(fmt::format("mac_total_cost: need R >= 0, alpha > 0, beta > 0 "
                                  "(R={}, alpha={}, beta={})",
                                  r, alpha, beta));
  }
  return beta / (1.0 + beta) * r * std::pow(r / alpha, 1.0 / beta);
}

double damage_cost(double delta_t, double output, double a, double b) {
  if (!(delta_t >= 0.0) || !(a >= 0.0) || !(b >= 1.0) || !(output >= 0.0)) {
    throw DomainError(fmt::format("damage_cost: need delta_T >= 0, Y >= 0, a >= 0, b >= 1 "
                                  "(delta_T={}, Y={}, a={}, b={})",
                                  delta_t, output, a, b));
  }
  return output * a * std::pow(delta_t, b);
}

double delta_temperature(double c, double m, const std::array<double, 4>& k) {
  return k[0] * c * m + k[1] * c + k[2] * m + k[3];
}

double discount_factor(double rate, int year) {
  return std::pow(1.0 + rate, -static_cast<double>(year - kBaseYear));
}

std::array<double, 3> lattice_marginals(const LatticeProbs& p) {
  return {(1.0 - p.not_high) * p.high_given_not_low,
          p.not_high * (1.0 - p.low_given_not_high) +
              (1.0 - p.not_high) * (1.0 - p.high_given_not_low),
          p.not_high * p.low_given_not_high};
}

double max_abatement(const ClimateConfig& c, int stage, int level) {
  const auto t = static_cast<std::size_t>(stage);
  return c.mac_alpha[t][static_cast<std::size_t>(level)] *
         std::pow(c.max_marginal_cost, c.mac_beta[t]);
}

// ----------------------------------------------------------------- diagram

InfluenceDiagram climate_main_diagram(const ClimateConfig& config) {
  validate_climate_config(config);
  const ClimateConfig c = config;
  const double success = *c.calibration.research_success_prob;
  const double promising = *c.calibration.promising_prob;

  DiagramBuilder b;
  const std::vector<std::string> research{"no_rnd", "rnd"};
  const std::vector<std::string> outcome{"success", "failure"};
  const std::vector<std::string> levels{"high", "medium", "low"};
  const std::vector<std::string> first{"not_high", "not_low"};
  std::vector<std::string> abatement;
  for (double f : c.abatement_levels) abatement.push_back(fmt::format("{}", f));

  const NodeId d_dmg = b.decision("D_Dmg", research, {});
  const NodeId d_t1 = b.decision("D_T1", {"low", "medium"}, {});
  const NodeId d_cs = b.decision("D_CS", research, {});
  const NodeId c_t1 = b.chance("C_T1", {"none", "promising", "not_promising"}, {d_t1},
                               [promising](std::span<const int> s) {
                                 if (s[0] == 0) return std::vector<double>{1.0, 0.0, 0.0};
                                 return std::vector<double>{0.0, promising, 1.0 - promising};
                               });
  const NodeId d_t2 = b.decision("D_T2", {"medium", "high"}, {c_t1});
  const std::vector<NodeId> main{d_dmg, d_t1, d_cs, c_t1, d_t2};

  const NodeId d_e1 = b.decision("D_E1", abatement, main);
  auto research_row = [success](std::span<const int> s) {
    if (s[0] == 0) return std::vector<double>{0.0, 1.0};
    return std::vector<double>{success, 1.0 - success};
  };
  const NodeId c_dmg = b.chance("C_Dmg", outcome, {d_dmg}, research_row);
  const NodeId c_cs = b.chance("C_CS", outcome, {d_cs}, research_row);
  const NodeId c_t2 = b.chance("C_T2", levels, {c_t1, d_t2}, [&c](std::span<const int> s) {
    const int effort = s[0] == 0 ? kEffortLow : s[1] == 0 ? kEffortMedium : kEffortHigh;
    const auto& row = c.rnd_cost_probs[static_cast<std::size_t>(effort)];
    return std::vector<double>(row.begin(), row.end());
  });
  const NodeId o_dmg = b.chance("O_Dmg", first, {},
                                {c.damage_lattice.not_high, 1.0 - c.damage_lattice.not_high});
  const NodeId o_cs = b.chance(
      "O_CS", first, {}, {c.sensitivity_lattice.not_high, 1.0 - c.sensitivity_lattice.not_high});

  std::vector<NodeId> before_e2 = main;
  before_e2.insert(before_e2.end(), {d_e1, c_dmg, c_cs, c_t2});
  const NodeId d_e2 = b.decision("D_E2", abatement, before_e2, {o_dmg, o_cs});
  b.conditional_arc(o_dmg, d_e2, {c_dmg}, Condition::atom(c_dmg, kSuccess));
  b.conditional_arc(o_cs, d_e2, {c_cs}, Condition::atom(c_cs, kSuccess));
  std::vector<NodeId> before_e3 = before_e2;
  before_e3.insert(before_e3.end(), {o_dmg, o_cs, d_e2});
  const NodeId d_e3 = b.decision("D_E3", abatement, before_e3);

  b.value("V_RnD", {d_dmg, d_t1, d_cs, d_t2}, [&c](std::span<const int> s) {
    return -rnd_cost(c, s[0], s[1], s[2], s[3]);
  });
  auto abatement_of = [&c](int level, std::span<const int> e) {
    std::array<double, 3> r{};
    for (int t = 0; t < 3; ++t) {
      const double top = t == 0 ? std::max({max_abatement(c, 0, kHigh), max_abatement(c, 0, kMedium),
                                            max_abatement(c, 0, kLow)})
                                : max_abatement(c, t, level);
      r[static_cast<std::size_t>(t)] =
          c.abatement_levels[static_cast<std::size_t>(e[static_cast<std::size_t>(t)])] * top;
    }
    return r;
  };
  b.value("V_Abate", {c_t2, d_e1, d_e2, d_e3}, [&c, abatement_of](std::span<const int> s) {
    const auto r = abatement_of(s[0], s.subspan(1, 3));
    double cost = 0.0;
    for (std::size_t t = 0; t < 3; ++t) {
      cost += stage_weight(c, static_cast<int>(t)) *
              mac_total_cost(r[t], c.mac_alpha[t][static_cast<std::size_t>(s[0])], c.mac_beta[t]);
    }
    return -cost;
  });
  b.value("V_Dmg", {c_t2, d_e1, d_e2, d_e3, o_dmg, o_cs},
          [&c, abatement_of](std::span<const int> s) {
            const auto r = abatement_of(s[0], s.subspan(1, 3));
            return -expected_damage(c, leaf_outcomes(c, s[4], s[5]), cumulative_emissions(c, r))
                        .first;
          });
  return b.build();
}

std::vector<NodeId> climate_main_nodes(const InfluenceDiagram& d) {
  return {d.id_of("D_Dmg"), d.id_of("D_T1"), d.id_of("D_CS"), d.id_of("C_T1"), d.id_of("D_T2")};
}

PartitionPlan climate_plan(const InfluenceDiagram& d) {
  return plan_partition(d, climate_main_nodes(d));
}

// -------------------------------------------------------------------- tree

ClimateTree climate_tree(const ClimateConfig& c, const InfluenceDiagram& slice) {
  auto table = [&slice](const char* name, std::size_t n) {
    const Node& node = slice.node(slice.id_of(name));
    if (!node.info_set.empty() || node.table.size() != n) {
      throw DomainError(fmt::format("climate subproblem: '{}' is not fixed by the main path", name));
    }
    return node.table;
  };
  const auto p_dmg = table("C_Dmg", 2);
  const auto p_cs = table("C_CS", 2);
  const auto p_level = table("C_T2", 3);
  const auto p_odmg = table("O_Dmg", 2);
  const auto p_ocs = table("O_CS", 2);

  static constexpr const char* kOutcome[] = {"success", "failure"};
  static constexpr const char* kFirst[] = {"not_high", "not_low"};
  ClimateTree tree;
  std::map<std::array<int, 5>, std::size_t> nodes;
  for (int l = 0; l < 3; ++l) {
    for (int sd = 0; sd < 2; ++sd) {
      for (int sc = 0; sc < 2; ++sc) {
        for (int od = 0; od < 2; ++od) {
          for (int oc = 0; oc < 2; ++oc) {
            const auto u = [](int i) { return static_cast<std::size_t>(i); };
            const double p = p_level[u(l)] * p_dmg[u(sd)] * p_cs[u(sc)] * p_odmg[u(od)] *
                             p_ocs[u(oc)];
            if (p <= 0.0) continue;
            const int seen_d = sd == kSuccess ? od : -1;
            const int seen_c = sc == kSuccess ? oc : -1;
            const std::array<int, 5> key{l, sd, sc, seen_d, seen_c};
            auto [it, fresh] = nodes.try_emplace(key, tree.level_2050.size());
            if (fresh) {
              tree.level_2050.push_back(l);
              tree.label_2050.push_back(fmt::format("Dmg={};CS={};ODmg={};OCS={}",
                                                    kOutcome[sd], kOutcome[sc],
                                                    seen_d < 0 ? "?" : kFirst[seen_d],
                                                    seen_c < 0 ? "?" : kFirst[seen_c]));
            }
            tree.leaves.push_back({it->second, p, leaf_outcomes(c, od, oc),
                                   fmt::format("Dmg={};CS={};ODmg={};OCS={}", kOutcome[sd],
                                               kOutcome[sc], kFirst[od], kFirst[oc])});
          }
        }
      }
    }
  }
  return tree;
}

std::vector<double> climate_upper_bounds(const ClimateConfig& c, const ClimateTree& tree) {
  std::vector<double> ub(tree.num_variables());
  ub[0] = std::max({max_abatement(c, 0, kHigh), max_abatement(c, 0, kMedium),
                    max_abatement(c, 0, kLow)});
  for (std::size_t n = 0; n < tree.level_2050.size(); ++n) {
    ub[tree.var_2050(n)] = max_abatement(c, 1, tree.level_2050[n]);
  }
  for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
    ub[tree.var_2070(l)] = max_abatement(c, 2, tree.level_2050[tree.leaves[l].node_2050]);
  }
  return ub;
}

ClimateCost climate_tree_cost(const ClimateConfig& c, const ClimateTree& tree,
                              const std::vector<double>& x) {
  if (x.size() != tree.num_variables()) {
    throw DomainError(fmt::format("expected {} abatement values, got {}", tree.num_variables(),
                                  x.size()));
  }
  ClimateCost out;
  out.abatement_grad.assign(x.size(), 0.0);
  out.damage_grad.assign(x.size(), 0.0);
  out.leaf_cost.reserve(tree.leaves.size());
  const std::array<double, 3> w{stage_weight(c, 0), stage_weight(c, 1), stage_weight(c, 2)};
  for (std::size_t li = 0; li < tree.leaves.size(); ++li) {
    const ClimateLeaf& leaf = tree.leaves[li];
    const auto level = static_cast<std::size_t>(tree.level_2050[leaf.node_2050]);
    const std::array<std::size_t, 3> var{0, tree.var_2050(leaf.node_2050), tree.var_2070(li)};
    std::array<double, 3> r{};
    double abate = 0.0;
    for (std::size_t t = 0; t < 3; ++t) {
      r[t] = x[var[t]];
      const double alpha = c.mac_alpha[t][level], beta = c.mac_beta[t];
      abate += w[t] * mac_total_cost(r[t], alpha, beta);
      out.abatement_grad[var[t]] += leaf.probability * w[t] * mac_marginal_cost(r[t], alpha, beta);
    }
    const auto [damage, d_damage] = expected_damage(c, leaf.outcomes, cumulative_emissions(c, r));
    for (std::size_t t = 0; t < 3; ++t) {
      out.damage_grad[var[t]] -= leaf.probability * d_damage * c.stage_years[t];
    }
    out.abatement += leaf.probability * abate;
    out.damage += leaf.probability * damage;
    out.leaf_cost.push_back(abate + damage);
  }
  return out;
}

// ------------------------------------------------------------------ solver

ClimateSolution solve_climate_tree(const ClimateConfig& c, ClimateTree tree,
                                   const ClimateSolveOptions& opts) {
  // Iterates on u in [0, 1]^n with R = ub * u^beta, a monotone map onto the
  // abatement box. KKT points coincide with those of the convex cost in R,
  // and the cost is no longer flat in u near zero abatement.
  const std::vector<double> ub = climate_upper_bounds(c, tree);
  const std::size_t n = ub.size();
  std::vector<double> beta(n, c.mac_beta[2]);
  beta[0] = c.mac_beta[0];
  for (std::size_t i = 0; i < tree.level_2050.size(); ++i) beta[tree.var_2050(i)] = c.mac_beta[1];

  auto to_abatement = [&](const std::vector<double>& u) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = ub[i] * std::pow(u[i], beta[i]);
    return r;
  };
  auto evaluate = [&](const std::vector<double>& u, std::vector<double>& g) {
    const ClimateCost k = climate_tree_cost(c, tree, to_abatement(u));
    g.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double slope = beta[i] * ub[i] * std::pow(std::max(u[i], 1e-12), beta[i] - 1.0);
      const double gr = k.abatement_grad[i] + k.damage_grad[i];
      g[i] = gr == 0.0 ? 0.0 : gr * slope;
    }
    return k.total();
  };
  auto residual = [&](const std::vector<double>& u, const std::vector<double>& g) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r = std::max(r, std::abs(std::clamp(u[i] - g[i], 0.0, 1.0) - u[i]));
    }
    return r;
  };

  std::vector<double> u(n, 0.25), g;
  double f = evaluate(u, g);
  std::deque<double> recent{f};
  constexpr std::size_t kMemory = 10;
  constexpr double kSufficient = 1e-4;

  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  double step = gmax > 0.0 ? 0.25 / gmax : 1.0;
  double res = residual(u, g);
  int it = 0;
  std::vector<double> trial(n), g_next;
  for (; it < opts.max_iterations && res >= opts.tolerance; ++it) {
    const double f_ref = *std::max_element(recent.begin(), recent.end());
    double lambda = 1.0, f_next = 0.0;
    for (int back = 0;; ++back) {
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = std::clamp(u[i] - lambda * step * g[i], 0.0, 1.0);
        slope += g[i] * (trial[i] - u[i]);
      }
      f_next = evaluate(trial, g_next);
      if (f_next <= f_ref + kSufficient * slope || back == 60) break;
      lambda *= 0.5;
    }
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = trial[i] - u[i];
      ss += s * s;
      sy += s * (g_next[i] - g[i]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : std::min(1e12, 2.0 * lambda * step);
    u.swap(trial);
    g.swap(g_next);
    f = f_next;
    recent.push_back(f);
    if (recent.size() > kMemory) recent.pop_front();
    res = residual(u, g);
  }
  if (res >= opts.tolerance) {
    throw DomainError(fmt::format(
        "climate subproblem did not converge in {} iterations (projected-gradient residual {:.3e})",
        opts.max_iterations, res));
  }
  ClimateSolution sol;
  sol.abatement = to_abatement(u);
  sol.cost = f;
  sol.residual = res;
  sol.iterations = it;
  sol.tree = std::move(tree);
  return sol;
}

SubproblemPlugin climate_plugin(ClimateConfig config, ClimateSolveOptions opts) {
  validate_climate_config(config);
  return [config = std::move(config), opts](const SubproblemSpec& spec) {
    ClimateSolution sol = solve_climate_tree(config, climate_tree(config, spec.diagram_slice), opts);
    const double utility = -sol.cost;
    return PluginResult{utility, std::move(sol)};
  };
}

// ------------------------------------------------------------------ report

ClimateReport solve_climate(const ClimateConfig& config, const ClimateRunOptions& opts) {
  const InfluenceDiagram d = climate_main_diagram(config);
  DecomposeOptions dopts;
  dopts.workers = opts.workers;
  dopts.plugin = climate_plugin(config, opts.solve);
  ClimateReport report;
  report.run = solve_decomposed(d, climate_plan(d), dopts);
  const DecomposedResult& run = report.run;
  if (run.result.status != SolveStatus::optimal) {
    throw DomainError(fmt::format("climate main problem: {} {}", to_string(run.result.status),
                                  run.result.message));
  }
  const Solution& sol = *run.result.solution;
  report.expected_cost = -sol.objective;

  const Decomposition& dec = run.decomposition;
  const NodeId c_t1 = d.id_of("C_T1");
  std::map<std::string, std::string> seen;
  std::array<double, 3> level_p{}, level_cost{};
  for (std::size_t k = 0; k < dec.subproblems.size(); ++k) {
    if (!(sol.pi[k] > 0.0)) continue;
    const SubproblemSpec& spec = dec.subproblems[k];
    auto state_name = [&](NodeId id) {
      return d.node(id).states[static_cast<std::size_t>(spec.main_subpath[index_of(id)])];
    };
    for (const char* name : {"D_Dmg", "D_T1", "D_CS"}) seen[name] = state_name(d.id_of(name));
    if (spec.main_subpath[index_of(d.id_of("D_T1"))] == 1) {
      seen[fmt::format("D_T2 (C_T1={})", state_name(c_t1))] = state_name(d.id_of("D_T2"));
    }
    const std::string main = fmt::format("C_T1={}", state_name(c_t1));
    const double pm = spec.main_probability;
    const double rnd = -dec.main_table.u(k);
    const auto& cs = std::any_cast<const ClimateSolution&>(run.outcomes[k].solution);
    const ClimateTree& tree = cs.tree;
    const ClimateCost cost = climate_tree_cost(config, tree, cs.abatement);

    report.branches.push_back({main, "-", kStageYears[0], -1, pm, cs.abatement[0],
                               stage_weight(config, 0) *
                                   mac_total_cost(cs.abatement[0], config.mac_alpha[0][kMedium],
                                                  config.mac_beta[0])});
    std::vector<double> node_p(tree.level_2050.size(), 0.0);
    for (const ClimateLeaf& leaf : tree.leaves) node_p[leaf.node_2050] += leaf.probability;
    for (std::size_t nd = 0; nd < tree.level_2050.size(); ++nd) {
      const auto level = static_cast<std::size_t>(tree.level_2050[nd]);
      const double r = cs.abatement[tree.var_2050(nd)];
      report.branches.push_back(
          {main, tree.label_2050[nd], kStageYears[1], tree.level_2050[nd], pm * node_p[nd], r,
           stage_weight(config, 1) * mac_total_cost(r, config.mac_alpha[1][level],
                                                    config.mac_beta[1])});
    }
    for (std::size_t li = 0; li < tree.leaves.size(); ++li) {
      const ClimateLeaf& leaf = tree.leaves[li];
      const int level = tree.level_2050[leaf.node_2050];
      const auto lu = static_cast<std::size_t>(level);
      const double r = cs.abatement[tree.var_2070(li)];
      report.branches.push_back(
          {main, leaf.label, kStageYears[2], level, pm * leaf.probability, r,
           stage_weight(config, 2) * mac_total_cost(r, config.mac_alpha[2][lu],
                                                    config.mac_beta[2])});
      level_p[lu] += pm * leaf.probability;
      level_cost[lu] += pm * leaf.probability * (cost.leaf_cost[li] + rnd);
    }
  }
  for (const auto& [name, choice] : seen) report.rnd_strategy.emplace_back(name, choice);
  for (int l = 0; l < 3; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    if (level_p[lu] <= 0.0) continue;
    report.levels.push_back({l, level_p[lu], level_cost[lu] / level_p[lu]});
  }
  return report;
}

std::vector<std::string> abatement_monotonicity_violations(const ClimateReport& report,
                                                           double tolerance) {
  std::map<std::tuple<std::string, std::string, int>, std::array<std::optional<double>, 3>>
      groups;
  for (const ClimateBranchRow& row : report.branches) {
    if (row.cost_level < 0) continue;
    groups[{row.main, row.branch, row.year}][static_cast<std::size_t>(row.cost_level)] =
        row.abatement;
  }
  std::vector<std::string> out;
  for (const auto& [key, by_level] : groups) {
    // Cheaper levels come later in the high, medium, low order.
    for (std::size_t hi = 0; hi < 3; ++hi) {
      for (std::size_t lo = hi + 1; lo < 3; ++lo) {
        if (!by_level[hi] || !by_level[lo]) continue;
        const double a = *by_level[hi], b = *by_level[lo];
        if (b < a - tolerance * std::max(1.0, std::abs(a))) {
          out.push_back(fmt::format("{} {} {}: {} cost abates {} < {} cost {}", std::get<0>(key),
                                    std::get<1>(key), std::get<2>(key), kLevelNames[lo], b,
                                    kLevelNames[hi], a));
        }
      }
    }
  }
  return out;
}

std::string climate_branch_table(const ClimateReport& report) {
  std::string out = "main,branch,cost_level,year,probability,abatement,stage_cost\n";
  for (const ClimateBranchRow& r : report.branches) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.main, r.branch,
                       r.cost_level < 0 ? "-" : kLevelNames[r.cost_level], r.year, r.probability,
                       r.abatement, r.cost);
  }
  return out;
}

std::string climate_level_table(const ClimateReport& report) {
  std::string out = "cost_level,probability,expected_cost\n";
  for (const ClimateLevelSummary& l : report.levels) {
    out += fmt::format("{},{},{}\n", kLevelNames[l.cost_level], l.probability, l.expected_cost);
  }
  return out;
}

}  // namespace endoid

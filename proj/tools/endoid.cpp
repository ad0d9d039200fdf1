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

// endoid command-line front end.
//
// Exit status: 0 success, 1 domain violation, 2 I/O or parse failure.
// Every command given --out also writes <out>.manifest.json.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "endoid/climate.hpp"
#include "endoid/coins.hpp"
#include "endoid/decomposition.hpp"
#include "endoid/error.hpp"
#include "endoid/io.hpp"
#include "endoid/model.hpp"
#include "endoid/paths.hpp"
#include "endoid/solver.hpp"
#include "endoid/transforms.hpp"
#include "endoid/version.hpp"
#include "json.hpp"

namespace {

using namespace endoid;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_objective(double x) { return fmt::format("{:.12g}", x == 0.0 ? 0.0 : x); }

/// Collects the manifest of one run.
struct Manifest {
  Json doc;

  explicit Manifest(std::string command) {
    doc["command"] = std::move(command);
    doc["version"] = kVersion;
    doc["inputs"] = Json::array();
    doc["options"] = Json::object();
    doc["seed"] = nullptr;
    doc["wall_time_s"] = Json::object();
    doc["result"] = Json::object();
  }

  void write_beside(const std::string& out) const {
    if (out.empty()) return;
    write_text_file(out + ".manifest.json", doc.dump(2) + "\n");
  }
};

void emit(const std::string& text, const std::string& out) {
  std::cout << text;
  if (!out.empty()) write_text_file(out, text);
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string strategy_table(const InfluenceDiagram& d, const Strategy& z) {
  std::string out = "decision,information_state,choice\n";
  for (const LocalStrategy& ls : z.local) {
    const Node& node = d.node(ls.node);
    const InfoStateSpace space = decision_info_space(d, ls.node);
    for (std::size_t k = 0; k < ls.choice.size(); ++k) {
      out += fmt::format("{},{},{}\n", node.name, quoted(info_state_label(d, space, k)),
                         node.states[ls.choice[k]]);
    }
  }
  return out;
}

std::vector<NodeId> resolve_nodes(const InfluenceDiagram& d, const std::vector<std::string>& names) {
  std::vector<NodeId> out;
  for (const std::string& name : names) {
    const auto id = d.find(name);
    if (!id) throw DomainError(fmt::format("unknown node '{}'", name));
    out.push_back(*id);
  }
  return out;
}

bool is_coins_diagram(const InfluenceDiagram& d) {
  static const std::regex kName("(D|C|P|V|Do|Vo)[1-9][0-9]*");
  for (const Node& n : d.nodes()) {
    if (!std::regex_match(n.name, kName)) return false;
  }
  if (!d.find("D1") || !d.find("C1")) return false;
  int periods = 0;
  for (const Node& n : d.nodes()) periods = std::max(periods, coins_period(n));
  for (int i = 2; i <= periods; ++i) {
    if (!d.find(fmt::format("P{}", i))) return false;
  }
  return true;
}

int coins_periods(const InfluenceDiagram& d) {
  int periods = 0;
  for (const Node& n : d.nodes()) periods = std::max(periods, coins_period(n));
  return periods;
}

std::pair<int, int> parse_range(const std::string& text) {
  static const std::regex kRange("([0-9]+)(?:\\.\\.([0-9]+))?");
  std::smatch m;
  if (!std::regex_match(text, m, kRange)) {
    throw ParseError(fmt::format("'{}' is not a period range like 2..4", text));
  }
  const int lo = std::stoi(m[1]);
  const int hi = m[2].matched ? std::stoi(m[2]) : lo;
  if (lo < 1 || hi < lo) throw DomainError(fmt::format("empty period range '{}'", text));
  return {lo, hi};
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string diagram;
};

int cmd_validate(const ValidateArgs& a) {
  const InfluenceDiagram d = load_diagram(a.diagram);
  const ValidationReport report = validate(d);
  if (report.empty()) {
    fmt::print("valid: {} nodes, {} conditional arcs\n", d.size(), d.cond_arcs().size());
    return 0;
  }
  fmt::print("{}\n", report.to_string());
  return kExitDomain;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string diagram;
  std::string mode = "cnac";
  std::string solver = "builtin";
  bool positive_shift = false;
  std::string out;
};

InfluenceDiagram check_valid(const InfluenceDiagram& d) {
  const ValidationReport report = validate(d);
  if (!report.empty()) throw DomainError(report.to_string());
  return d;
}

int cmd_solve(const SolveArgs& a) {
  Manifest manifest("solve");
  manifest.doc["inputs"].push_back(a.diagram);
  manifest.doc["options"] = {{"mode", a.mode},
                             {"solver", a.solver},
                             {"positive_shift", a.positive_shift}};

  const auto t0 = Clock::now();
  InfluenceDiagram d = check_valid(load_diagram(a.diagram));
  if (a.mode == "obs-nodes") d = to_observation_nodes(d).diagram;

  const auto t_paths = Clock::now();
  PathTable table;
  try {
    table = enumerate_active_paths(d);
  } catch (const CapacityError& e) {
    throw DomainError(fmt::format("capacity exceeded: {} active paths, limit {} (ENDOID_PATH_LIMIT)",
                                  e.count(), e.limit()));
  }
  const MilpModel model =
      build_milp(d, table, {.positive_utility_shift = a.positive_shift, .cnacs = true});
  const double build_time = seconds_since(t_paths);

  std::string report = fmt::format("paths: {}\nvariables: {}\nconstraints: {}\n",
                                   model.table.size(), model.vars.size(), model.rows.size());
  manifest.doc["result"] = {{"paths", model.table.size()},
                            {"variables", model.vars.size()},
                            {"constraints", model.rows.size()}};
  manifest.doc["wall_time_s"]["build"] = build_time;

  if (a.solver == "mps-export") {
    if (a.out.empty()) throw DomainError("--solver mps-export needs --out");
    write_mps(model, a.out);
    report += fmt::format("mps: {}\n", a.out);
    std::cout << report;
    manifest.doc["result"]["mps"] = a.out;
    manifest.doc["wall_time_s"]["total"] = seconds_since(t0);
    manifest.write_beside(a.out);
    return 0;
  }

  const SolveResult r = solve_bnb(model);
  if (r.status != SolveStatus::optimal) {
    throw DomainError(fmt::format("solve failed: {} {}", to_string(r.status), r.message));
  }
  report = fmt::format("objective: {}\n", fmt_objective(r.solution->objective)) + report +
           fmt::format("nodes_explored: {}\n\n", r.stats.nodes_explored) +
           strategy_table(d, r.solution->strategy);
  emit(report, a.out);

  manifest.doc["result"]["objective"] = r.solution->objective;
  manifest.doc["result"]["nodes_explored"] = r.stats.nodes_explored;
  manifest.doc["wall_time_s"]["solve"] = r.stats.wall_time_s;
  manifest.doc["wall_time_s"]["total"] = seconds_since(t0);
  manifest.write_beside(a.out);
  return 0;
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string diagram;
  std::vector<std::string> main_nodes;
  std::optional<int> split_at;
  unsigned workers = default_workers();
  bool serial = false;
  std::string timing_out;
  std::string out;
};

std::string accounting_table(const DecomposedResult& r) {
  const double serial = r.split_time_s + r.main_time_s + r.sub_total_time_s;
  const double parallel = r.split_time_s + r.main_time_s + r.sub_max_time_s;
  return fmt::format("accounting,time_s\nsplit,{:.6f}\nserial,{:.6f}\nparallel,{:.6f}\n",
                     r.split_time_s, serial, parallel);
}

int cmd_decompose(const DecomposeArgs& a) {
  Manifest manifest("decompose");
  manifest.doc["inputs"].push_back(a.diagram);
  const unsigned workers = a.serial ? 1u : std::max(1u, a.workers);
  manifest.doc["options"] = {{"main_nodes", a.main_nodes},
                             {"split_at", a.split_at ? Json(*a.split_at) : Json(nullptr)},
                             {"workers", workers}};

  const auto t0 = Clock::now();
  const InfluenceDiagram d = check_valid(load_diagram(a.diagram));
  PartitionPlan plan;
  std::size_t n_main = 0;
  if (a.split_at) {
    if (!is_coins_diagram(d)) {
      throw DomainError("--split-at applies to coins diagrams only; use --main-nodes");
    }
    if (*a.split_at < 0 || *a.split_at > coins_periods(d)) {
      throw DomainError(fmt::format("--split-at {} is outside 0..{}", *a.split_at, coins_periods(d)));
    }
    plan = coins_split(d, *a.split_at);
    n_main = static_cast<std::size_t>(*a.split_at);
  } else {
    plan = plan_partition(d, resolve_nodes(d, a.main_nodes));
    n_main = a.main_nodes.size();
  }

  const ValidationReport violations = validate_partition(d, plan);
  if (!violations.empty()) {
    fmt::print("partition violations:\n{}\n", violations.to_string());
    return kExitDomain;
  }

  DecomposeOptions opts;
  opts.workers = workers;
  const DecomposedResult r = solve_decomposed(d, plan, opts);
  if (r.result.status != SolveStatus::optimal) {
    throw DomainError(fmt::format("decomposed solve failed: {} {}", to_string(r.result.status),
                                  r.result.message));
  }
  const std::string timing = timing_header() + "\n" + timing_row(n_main, r) + "\n";
  const std::string report =
      fmt::format("objective: {}\nsubproblems: {}\nunique_subproblems: {}\nworkers: {}\n\n",
                  fmt_objective(r.result.solution->objective),
                  r.decomposition.subproblems.size(), r.unique_subproblems, workers) +
      timing + "\n" + accounting_table(r);
  emit(report, a.out);
  if (!a.timing_out.empty()) write_text_file(a.timing_out, timing);

  manifest.doc["result"] = {{"objective", r.result.solution->objective},
                            {"subproblems", r.decomposition.subproblems.size()},
                            {"unique_subproblems", r.unique_subproblems}};
  manifest.doc["wall_time_s"] = {{"split", r.split_time_s},
                                 {"main", r.main_time_s},
                                 {"sub_total", r.sub_total_time_s},
                                 {"sub_max", r.sub_max_time_s},
                                 {"total", seconds_since(t0)}};
  manifest.write_beside(a.out);
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string family;
  std::string periods = "2..4";
  int replications = 3;
  std::uint64_t seed = 1;
  unsigned workers = default_workers();
  bool serial = false;
  std::string out;
};

struct SplitCell {
  int periods = 0;
  int n_main = 0;
  double main = 0.0, per_sub = 0.0, parallel = 0.0;
  int count = 0;
};

/// Trend lines over n_main, averaged over replications. Flags only.
std::string coins_trend_report(const std::vector<SplitCell>& cells) {
  std::map<int, std::vector<const SplitCell*>> by_period;
  for (const SplitCell& c : cells) by_period[c.periods].push_back(&c);
  std::string out = "trend\n";
  for (const auto& [periods, row] : by_period) {
    std::vector<int> main_drops, sub_rises;
    const SplitCell* best = row.front();
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i]->main < row[i - 1]->main) main_drops.push_back(row[i]->n_main);
      if (row[i]->n_main < periods && row[i - 1]->per_sub > 0.0 &&
          row[i]->per_sub > row[i - 1]->per_sub) {
        sub_rises.push_back(row[i]->n_main);
      }
      if (row[i]->parallel < best->parallel) best = row[i];
    }
    out += fmt::format(
        "periods {}: main time nondecreasing in n_main: {}; per-subproblem time nonincreasing: "
        "{}; parallel-accounted minimum at n_main={} ({})\n",
        periods, main_drops.empty() ? "yes" : fmt::format("no (drops at {})", fmt::join(main_drops, ",")),
        sub_rises.empty() ? "yes" : fmt::format("no (rises at {})", fmt::join(sub_rises, ",")),
        best->n_main, best->n_main > 0 && best->n_main < periods ? "interior" : "boundary");
  }
  return out;
}

int cmd_bench(const BenchArgs& a) {
  Manifest manifest("bench");
  const unsigned workers = a.serial ? 1u : std::max(1u, a.workers);
  manifest.doc["options"] = {{"family", a.family},
                             {"periods", a.periods},
                             {"replications", a.replications},
                             {"workers", workers}};
  manifest.doc["seed"] = a.seed;
  if (a.replications < 1) throw DomainError("--replications must be at least 1");
  const auto [lo, hi] = parse_range(a.periods);
  std::mt19937_64 rng(a.seed);
  DecomposeOptions opts;
  opts.workers = workers;
  const auto t0 = Clock::now();

  std::string table;
  std::string trend;
  Json summary = Json::array();
  if (a.family == "coins") {
    table =
        "periods,replication,n_main,status,main_time_s,sub_total_time_s,sub_max_time_s,"
        "serial_time_s,parallel_time_s,n_subproblems,objective\n";
    std::vector<SplitCell> cells;
    for (int periods = lo; periods <= hi; ++periods) {
      std::vector<SplitCell> acc(static_cast<std::size_t>(periods) + 1);
      for (int rep = 0; rep < a.replications; ++rep) {
        const InfluenceDiagram d = coins_diagram(random_coins_config(periods, rng));
        for (int n = 0; n <= periods; ++n) {
          DecomposedResult r;
          std::string status;
          try {
            r = solve_decomposed(d, coins_split(d, n), opts);
            status = std::string(to_string(r.result.status));
          } catch (const CapacityError& e) {
            status = fmt::format("capacity_exceeded({})", e.count());
          }
          const double serial = r.split_time_s + r.main_time_s + r.sub_total_time_s;
          const double parallel = r.split_time_s + r.main_time_s + r.sub_max_time_s;
          const std::size_t subs = r.decomposition.subproblems.size();
          const double objective = r.result.solution ? r.result.solution->objective : 0.0;
          table += fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", periods,
                               rep, n, status, r.main_time_s, r.sub_total_time_s,
                               r.sub_max_time_s, serial, parallel, subs, fmt_objective(objective));
          summary.push_back({{"periods", periods},
                             {"replication", rep},
                             {"n_main", n},
                             {"status", status},
                             {"objective", objective}});
          SplitCell& c = acc[static_cast<std::size_t>(n)];
          c.periods = periods;
          c.n_main = n;
          c.main += r.main_time_s;
          c.per_sub += subs > 0 ? r.sub_total_time_s / static_cast<double>(subs) : 0.0;
          c.parallel += parallel;
          ++c.count;
        }
      }
      for (SplitCell& c : acc) {
        c.main /= c.count;
        c.per_sub /= c.count;
        c.parallel /= c.count;
        cells.push_back(c);
      }
    }
    trend = coins_trend_report(cells);
  } else if (a.family == "coins-t3") {
    table =
        "periods,replication,mode,status,paths,variables,constraints,build_time_s,solve_time_s,"
        "objective\n";
    std::map<std::string, double> total_time;
    for (int periods = lo; periods <= hi; ++periods) {
      for (int rep = 0; rep < a.replications; ++rep) {
        const InfluenceDiagram d = coins_diagram(random_coins_config(periods, rng),
                                                 {.variant = CoinsVariant::conditional});
        for (const std::string mode : {"obs-nodes", "cnac"}) {
          const InfluenceDiagram m = mode == "cnac" ? d : to_observation_nodes(d).diagram;
          std::string status;
          std::size_t paths = 0, vars = 0, rows = 0;
          double build = 0.0, solve = 0.0, objective = 0.0;
          try {
            const auto t = Clock::now();
            const MilpModel model = build_milp(m, enumerate_active_paths(m));
            build = seconds_since(t);
            paths = model.table.size();
            vars = model.vars.size();
            rows = model.rows.size();
            const SolveResult r = solve_bnb(model);
            status = std::string(to_string(r.status));
            solve = r.stats.wall_time_s;
            if (r.solution) objective = r.solution->objective;
          } catch (const CapacityError& e) {
            status = fmt::format("capacity_exceeded({})", e.count());
          }
          total_time[mode] += build + solve;
          table += fmt::format("{},{},{},{},{},{},{},{:.6f},{:.6f},{}\n", periods, rep, mode,
                               status, paths, vars, rows, build, solve, fmt_objective(objective));
          summary.push_back({{"periods", periods},
                             {"replication", rep},
                             {"mode", mode},
                             {"status", status},
                             {"objective", objective}});
        }
      }
    }
    trend = fmt::format("trend\ntotal time obs-nodes {:.6f} s, cnac {:.6f} s\n",
                        total_time["obs-nodes"], total_time["cnac"]);
  } else {
    throw DomainError(fmt::format("unknown family '{}'", a.family));
  }

  std::cout << table << "\n" << trend;
  if (!a.out.empty()) write_text_file(a.out, table);
  manifest.doc["result"] = summary;
  manifest.doc["wall_time_s"]["total"] = seconds_since(t0);
  manifest.write_beside(a.out);
  return 0;
}

// ---------------------------------------------------------------- climate

struct ClimateArgs {
  std::string config;
  unsigned workers = default_workers();
  std::string out;
};

int cmd_climate(const ClimateArgs& a) {
  Manifest manifest("climate");
  manifest.doc["inputs"].push_back(a.config);
  manifest.doc["options"] = {{"workers", a.workers}};
  const auto t0 = Clock::now();
  const ClimateConfig config = parse_climate_config(read_text_file(a.config));
  validate_climate_config(config);
  ClimateRunOptions opts;
  opts.workers = std::max(1u, a.workers);
  const ClimateReport report = solve_climate(config, opts);

  std::string text = fmt::format("expected_cost: {}\n", fmt_objective(report.expected_cost));
  if (config.calibration == placeholder_calibration()) {
    text += "calibration: placeholder, not authoritative\n";
  }
  text += "\ndecision,choice\n";
  for (const auto& [decision, choice] : report.rnd_strategy) {
    text += fmt::format("{},{}\n", quoted(decision), choice);
  }
  text += "\n" + climate_branch_table(report) + "\n" + climate_level_table(report);
  const auto violations = abatement_monotonicity_violations(report);
  text += fmt::format("\nabatement monotone in cost level: {}\n", violations.empty() ? "yes" : "no");
  for (const std::string& v : violations) text += v + "\n";
  emit(text, a.out);

  Json strategy = Json::object();
  for (const auto& [decision, choice] : report.rnd_strategy) strategy[decision] = choice;
  manifest.doc["result"] = {{"expected_cost", report.expected_cost},
                            {"rnd_strategy", strategy},
                            {"branches", report.branches.size()}};
  manifest.doc["wall_time_s"] = {{"main", report.run.main_time_s},
                                 {"sub_total", report.run.sub_total_time_s},
                                 {"total", seconds_since(t0)}};
  manifest.write_beside(a.out);
  return 0;
}

// ---------------------------------------------------------------- coins

struct CoinsArgs {
  int periods = 4;
  std::string variant = "always";
  std::optional<std::uint64_t> seed;
  std::string config;
  int hidden_coin = 0;
  std::string out;
};

int cmd_coins(const CoinsArgs& a) {
  Manifest manifest("coins");
  CoinsConfig config;
  if (!a.config.empty()) {
    manifest.doc["inputs"].push_back(a.config);
    config = parse_coins_config(read_text_file(a.config));
  } else if (a.seed) {
    std::mt19937_64 rng(*a.seed);
    config = random_coins_config(a.periods, rng);
    config.seed = *a.seed;
    manifest.doc["seed"] = *a.seed;
  } else {
    config.periods = a.periods;
  }
  if (a.variant != "always" && a.variant != "conditional") {
    throw DomainError(fmt::format("unknown variant '{}'", a.variant));
  }
  manifest.doc["options"] = {{"periods", config.periods},
                             {"variant", a.variant},
                             {"hidden_coin", a.hidden_coin}};
  const InfluenceDiagram d = coins_diagram(
      config, {.variant = a.variant == "conditional" ? CoinsVariant::conditional
                                                     : CoinsVariant::always_observed,
               .hidden_coin_period = a.hidden_coin});
  emit(dump_diagram(d), a.out);
  manifest.doc["result"] = {{"nodes", d.size()}, {"fingerprint", diagram_fingerprint(d)}};
  manifest.write_beside(a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{fmt::format("endoid {}: influence diagrams with conditional arcs as MILPs",
                           kVersion)};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer("Exit status: 0 success, 1 domain violation, 2 I/O or parse failure.\n"
             "ENDOID_PATH_LIMIT caps the number of enumerated active paths.");

  ValidateArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Check a diagram file");
  validate_cmd->add_option("diagram", va.diagram, "Diagram file")->required();

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a diagram as one MILP");
  solve_cmd->add_option("diagram", sa.diagram, "Diagram file")->required();
  solve_cmd->add_option("--mode", sa.mode, "Conditional arc handling")
      ->check(CLI::IsMember({"obs-nodes", "cnac"}))
      ->capture_default_str();
  solve_cmd->add_option("--solver", sa.solver, "builtin solves; mps-export writes --out and stops")
      ->check(CLI::IsMember({"builtin", "mps-export"}))
      ->capture_default_str();
  solve_cmd->add_flag("--positive-shift", sa.positive_shift,
                      "Shift utilities positive and drop the lower pi bounds");
  solve_cmd->add_option("--out", sa.out, "Report file, or the MPS file with mps-export");

  DecomposeArgs da;
  auto* decompose_cmd = app.add_subcommand("decompose", "Solve by main problem and subproblems");
  decompose_cmd->add_option("diagram", da.diagram, "Diagram file")->required();
  auto* main_opt = decompose_cmd->add_option("--main-nodes", da.main_nodes, "Main node names")
                       ->delimiter(',');
  auto* split_opt =
      decompose_cmd->add_option("--split-at", da.split_at, "Periods in the main problem (coins)");
  main_opt->excludes(split_opt);
  decompose_cmd->add_option("--workers", da.workers, "Subproblem threads")->capture_default_str();
  decompose_cmd->add_flag("--serial", da.serial, "One worker");
  decompose_cmd->add_option("--timing-out", da.timing_out, "Timing table file");
  decompose_cmd->add_option("--out", da.out, "Report file");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Timing grids for the coins families");
  bench_cmd->add_option("family", ba.family, "coins or coins-t3")
      ->required()
      ->check(CLI::IsMember({"coins", "coins-t3"}));
  bench_cmd->add_option("--periods", ba.periods, "Period range, e.g. 2..4")->capture_default_str();
  bench_cmd->add_option("--replications", ba.replications, "Random instances per period")
      ->capture_default_str();
  bench_cmd->add_option("--seed", ba.seed, "Instance seed")->capture_default_str();
  bench_cmd->add_option("--workers", ba.workers, "Subproblem threads")->capture_default_str();
  bench_cmd->add_flag("--serial", ba.serial, "One worker");
  bench_cmd->add_option("--out", ba.out, "Timing table file");

  ClimateArgs ca;
  auto* climate_cmd = app.add_subcommand("climate", "Climate cost-benefit case study");
  climate_cmd->add_option("config", ca.config, "Climate config file")->required();
  climate_cmd->add_option("--workers", ca.workers, "Subproblem threads")->capture_default_str();
  climate_cmd->add_option("--out", ca.out, "Report file");

  CoinsArgs ga;
  auto* coins_cmd = app.add_subcommand("coins", "Write a coins game diagram");
  coins_cmd->add_option("--periods", ga.periods, "Number of periods")->capture_default_str();
  coins_cmd->add_option("--variant", ga.variant, "always or conditional")
      ->check(CLI::IsMember({"always", "conditional"}))
      ->capture_default_str();
  auto* seed_opt = coins_cmd->add_option("--seed", ga.seed, "Draw random win probabilities");
  coins_cmd->add_option("--config", ga.config, "Coins config file")->excludes(seed_opt);
  coins_cmd->add_option("--hidden-coin", ga.hidden_coin, "Leave P_k out of I(D_k)");
  coins_cmd->add_option("--out", ga.out, "Diagram file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitIo;
  }

  try {
    if (*validate_cmd) return cmd_validate(va);
    if (*solve_cmd) return cmd_solve(sa);
    if (*decompose_cmd) {
      if (da.main_nodes.empty() && !da.split_at) {
        throw DomainError("decompose needs --main-nodes or --split-at");
      }
      return cmd_decompose(da);
    }
    if (*bench_cmd) return cmd_bench(ba);
    if (*climate_cmd) return cmd_climate(ca);
    if (*coins_cmd) return cmd_coins(ga);
  } catch (const ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return kExitIo;
  } catch (const IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kExitIo;
  } catch (const DomainError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitDomain;
  }
  return 0;
}

// Copyright 2026 The Bowser Routing Authors
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

// Command-line entry point: instance validation, deterministic and
// stochastic planning, dynamic programming, plan simulation, test-bed
// generation, benchmarking and telemetry fitting.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bowser/benchgen.hpp"
#include "bowser/core.hpp"
#include "bowser/dbrp.hpp"
#include "bowser/errors.hpp"
#include "bowser/io.hpp"
#include "bowser/milp.hpp"
#include "bowser/sbrp.hpp"
#include "bowser/sdp.hpp"
#include "bowser/sim.hpp"
#include "bowser/telemetry.hpp"

namespace {

using namespace bowser;

constexpr const char* kTimeLimitEnv = "BOWSER_TIME_LIMIT";
constexpr std::uint64_t kDefaultSeed = 12345;

double DefaultTimeLimit() {
  if (const char* v = std::getenv(kTimeLimitEnv)) {
    char* end = nullptr;
    const double t = std::strtod(v, &end);
    if (end != v && *end == '\0' && t > 0) return t;
    throw InvalidArgumentError(fmt::format("{} must be a positive number of seconds, got '{}'", kTimeLimitEnv, v));
  }
  return 600.0;
}

void PrintEvaluation(const PlanEvaluation& ev) {
  double liters = 0.0;
  for (const auto& row : ev.shortages) {
    for (double s : row) liters += s;
  }
  fmt::print("travel cost      {:.4f}\n", ev.travel_cost);
  fmt::print("shortage         {:.4f} liters\n", liters);
  fmt::print("shortage cost    {:.4f}\n", ev.shortage_cost);
  fmt::print("total cost       {:.4f}\n", ev.total);
}

void PrintMonteCarlo(const std::string& label, const sim::MonteCarloResult& mc) {
  if (mc.has_interval) {
    fmt::print("{} {:.4f}  95% CI ({:.4f}, {:.4f})  [{} replications]\n", label, mc.mean, mc.interval.low,
               mc.interval.high, mc.replications);
  } else {
    fmt::print("{} {:.4f}  [{} replication]\n", label, mc.mean, mc.replications);
  }
}

void EmitPlan(const Plan& plan, const std::string& out) {
  if (out.empty()) {
    fmt::print("\n{}", FormatPlan(plan));
  } else {
    SavePlan(plan, out);
    fmt::print("plan written to {}\n", out);
  }
}

int Validate(const std::string& path) {
  const Instance inst = LoadInstance(path);
  const auto problems = ValidateInstance(inst);
  if (!problems.empty()) {
    for (const auto& p : problems) fmt::print("invalid: {}\n", p);
    return 1;
  }
  fmt::print("valid: {} ({} nodes, {} assets, {} periods, {} consumption, {} locations)\n", inst.name,
             inst.graph.node_count(), inst.asset_count(), inst.horizon,
             inst.is_deterministic() ? "deterministic" : "stochastic",
             inst.has_deterministic_locations() ? "deterministic" : "stochastic");
  return 0;
}

int SolveDet(const std::string& path, bool vi, double time_limit, const std::string& mps, const std::string& out) {
  const Instance inst = LoadInstance(path);
  dbrp::BuildOptions options;
  options.with_valid_inequalities = vi;
  const dbrp::DbrpModel m = dbrp::BuildModel(inst, options);
  if (!mps.empty()) {
    WriteFile(mps, milp::ExportMps(m.model, inst.name.empty() ? "BOWSER" : inst.name));
    fmt::print("model written to {}\n", mps);
  }
  milp::SolveOptions so;
  so.time_limit_seconds = time_limit;
  const milp::Solution sol = milp::Solve(m.model, so);
  fmt::print("status           {}\n", milp::StatusName(sol.status));
  fmt::print("nodes            {}\n", sol.stats.nodes);
  fmt::print("simplex iters    {}\n", sol.stats.simplex_iterations);
  fmt::print("root bound       {:.6f}\n", sol.stats.root_bound);
  fmt::print("seconds          {:.3f}\n", sol.stats.wall_seconds);
  if (!sol.has_incumbent()) {
    fmt::print(stderr, "error: no feasible plan found\n");
    return 1;
  }
  fmt::print("objective        {:.6g}\n", sol.objective);
  fmt::print("gap              {:.6g}\n", sol.gap);
  const Plan plan = dbrp::ExtractPlan(m.index, sol);
  PrintEvaluation(sim::EvaluatePlanDeterministic(inst, plan));
  fmt::print("\n{}", FormatRouteTable(plan));
  EmitPlan(plan, out);
  return 0;
}

int SolveSto(const std::string& path, int segments, const std::string& mode, long reps, std::uint64_t seed,
             double time_limit, const std::string& out) {
  const Instance inst = LoadInstance(path);
  sbrp::BuildOptions options;
  options.segments = segments;
  milp::SolveOptions so;
  so.time_limit_seconds = time_limit;
  if (mode == "hn") {
    const sbrp::HereAndNow hn = sbrp::SolveHereAndNow(inst, options, so);
    fmt::print("status           {}\n", milp::StatusName(hn.solution.status));
    fmt::print("nodes            {}\n", hn.solution.stats.nodes);
    fmt::print("routing cost     {:.4f}\n", hn.routing_cost);
    fmt::print("expected short   {:.4f} liters\n", hn.expected_shortage);
    fmt::print("predicted total  {:.4f}\n", hn.predicted_total);
    PrintMonteCarlo("simulated total ", sim::EvaluatePlanMonteCarlo(inst, hn.plan, reps, seed));
    fmt::print("\n{}", FormatRouteTable(hn.plan));
    EmitPlan(hn.plan, out);
    return 0;
  }
  // Receding horizon: one re-planning run per simulated consumption path.
  std::vector<double> totals;
  std::optional<sbrp::RecedingHorizonResult> first;
  for (long r = 0; r < reps; ++r) {
    auto rh = sbrp::RunRecedingHorizon(inst, sim::SampleConsumption(inst, seed, static_cast<std::uint64_t>(r)),
                                       options, so);
    totals.push_back(rh.realized.total);
    if (!first) first = std::move(rh);
  }
  fmt::print("predicted total  {:.4f}  (first-stage model)\n", first->stage_objectives.front());
  PrintMonteCarlo("simulated total ", sim::Summarize(totals));
  fmt::print("\nreplication 0 decisions\n{}", FormatRouteTable(first->plan));
  EmitPlan(first->plan, out);
  return 0;
}

int Sdp(const std::string& path, const std::string& variant, double budget, const std::string& policy_out, long reps,
        std::uint64_t seed) {
  const Instance inst = LoadInstance(path);
  sdp::Options options;
  options.budget = budget;
  const sdp::Result res = sdp::Solve(inst, sdp::ParseVariant(variant), options);
  fmt::print("variant          {}\n", sdp::VariantName(res.variant));
  fmt::print("expected cost    {:.6f}\n", res.expected_cost);
  fmt::print("states           {}\n", res.reachable_states);
  fmt::print("state-actions    {}\n", res.state_action_pairs);
  fmt::print("seconds          {:.3f}\n", res.wall_seconds);
  if (reps > 0) PrintMonteCarlo("simulated total ", sdp::SimulatePolicy(inst, res.policy, reps, seed));
  if (policy_out == "-") {
    fmt::print("\n{}", sdp::FormatPolicy(res.policy));
  } else if (!policy_out.empty()) {
    WriteFile(policy_out, sdp::FormatPolicy(res.policy));
    fmt::print("policy written to {}\n", policy_out);
  }
  return 0;
}

int Simulate(const std::string& inst_path, const std::string& plan_path, long reps, std::uint64_t seed) {
  const Instance inst = LoadInstance(inst_path);
  const Plan plan = LoadPlan(plan_path);
  const sim::MonteCarloResult mc = sim::EvaluatePlanMonteCarlo(inst, plan, reps, seed);
  PrintMonteCarlo("mean total", mc);
  fmt::print("mean travel {:.4f}\nmean shortage {:.4f} liters\n", mc.mean_travel, mc.mean_shortage);
  return 0;
}

int GenTestbed(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed) {
  benchgen::TestbedConfig cfg = benchgen::LoadConfig(config_path);
  if (seed) cfg.seed = *seed;
  const auto testbed = benchgen::GenerateTestbed(cfg);
  benchgen::WriteTestbed(testbed, out);
  fmt::print("{} {} instances written to {}\n", testbed.size(), benchgen::KindName(cfg.kind), out);
  return 0;
}

int Bench(const std::string& dir, const std::vector<std::string>& methods, const benchgen::BenchLimits& limits,
          const std::string& rows_out, std::vector<std::string> by) {
  const auto instances = benchgen::ReadTestbed(dir);
  if (instances.empty()) throw InvalidArgumentError("no instances found in " + dir);
  std::vector<benchgen::KpiRow> rows;
  for (const auto& m : methods) {
    auto r = benchgen::RunBenchmark(instances, benchgen::ParseMethod(m), limits);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (by.empty()) {
    // Group by every factor except the test-bed kind.
    for (const auto& [k, v] : instances.front().factors) {
      if (k != "kind") by.push_back(k);
    }
  }
  if (!rows_out.empty()) {
    WriteFile(rows_out, benchgen::FormatRows(rows));
    fmt::print("per-instance rows written to {}\n", rows_out);
  }
  fmt::print("{}", benchgen::FormatPivot(rows, by));
  return 0;
}

int Fit(const std::vector<std::string>& files, int bucket, int max_gap, const std::string& window_text,
        const std::string& series_dir) {
  std::vector<telemetry::EquipmentSnapshot> all;
  for (const auto& f : files) {
    auto s = telemetry::ParseAempFleet(ReadFile(f));
    all.insert(all.end(), s.begin(), s.end());
  }
  int flagged = 0;
  for (const auto& s : all) flagged += s.missing_fuel ? 1 : 0;
  if (flagged > 0) fmt::print(stderr, "note: {} snapshot(s) without a fuel reading ignored\n", flagged);
  all = telemetry::Deduplicate(std::move(all));
  const telemetry::ActivityWindow window = telemetry::ParseActivityWindow(window_text);
  telemetry::BucketOptions options;
  options.minutes = bucket;
  options.max_gap_minutes = max_gap;
  std::vector<std::pair<telemetry::EquipmentSnapshot, telemetry::AssetFit>> fits;
  int failures = 0;
  for (const auto& id : telemetry::EquipmentIds(all)) {
    std::vector<telemetry::EquipmentSnapshot> mine;
    for (const auto& s : all) {
      if (s.equipment_id == id) mine.push_back(s);
    }
    try {
      const auto buckets = telemetry::BucketConsumption(mine, options);
      if (!series_dir.empty()) {
        std::filesystem::create_directories(series_dir);
        WriteFile((std::filesystem::path(series_dir) / (id + ".tsv")).string(), telemetry::FormatBuckets(buckets));
      }
      fits.emplace_back(mine.front(), telemetry::FitAssetDistribution(buckets, window));
    } catch (const Error& e) {
      fmt::print(stderr, "equipment {}: {}\n", id, e.what());
      ++failures;
    }
  }
  fmt::print("{}", telemetry::FormatFitReport(fits));
  return fits.empty() || failures > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bowser routing toolkit: deterministic and stochastic fuel-bowser routing"};
  app.require_subcommand(1);

  std::string instance;
  std::string plan_path;
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> time_limit;
  long reps = 500;

  auto* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("instance", instance, "Instance file")->required()->check(CLI::ExistingFile);

  auto* solve_det = app.add_subcommand("solve-det", "Solve a deterministic instance exactly");
  bool vi = false;
  std::string mps;
  solve_det->add_option("instance", instance, "Instance file")->required()->check(CLI::ExistingFile);
  solve_det->add_flag("--vi", vi, "Add the valid inequalities");
  solve_det->add_option("--time-limit", time_limit, "Seconds (default $BOWSER_TIME_LIMIT or 600)");
  solve_det->add_option("--export", mps, "Write the model in MPS format");
  solve_det->add_option("--out", out, "Write the plan here instead of standard output");

  auto* solve_sto = app.add_subcommand("solve-sto", "Plan under stochastic consumption");
  int segments = 8;
  std::string mode = "hn";
  solve_sto->add_option("instance", instance, "Instance file")->required()->check(CLI::ExistingFile);
  solve_sto->add_option("--segments", segments, "Linearization segments")->check(CLI::PositiveNumber);
  solve_sto->add_option("--mode", mode, "hn (here-and-now) or rh (receding horizon)")
      ->check(CLI::IsMember({"hn", "rh"}));
  solve_sto->add_option("--reps", reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  solve_sto->add_option("--seed", seed, "Random seed");
  solve_sto->add_option("--time-limit", time_limit, "Seconds per solve (default $BOWSER_TIME_LIMIT or 600)");
  solve_sto->add_option("--out", out, "Write the plan here instead of standard output");

  auto* sdp_cmd = app.add_subcommand("sdp", "Solve the stochastic dynamic program");
  std::string variant = "fuel";
  double budget = 5e7;
  std::string policy_out = "-";
  long sdp_reps = 0;
  sdp_cmd->add_option("instance", instance, "Instance file")->required()->check(CLI::ExistingFile);
  sdp_cmd->add_option("--variant", variant, "fuel, location or det")
      ->check(CLI::IsMember({"fuel", "location", "det", "deterministic"}));
  sdp_cmd->add_option("--budget", budget, "Maximum state-action pairs");
  sdp_cmd->add_option("--policy", policy_out, "Policy dump destination ('-' = standard output, '' = none)");
  sdp_cmd->add_option("--reps", sdp_reps, "Also simulate the policy with this many replications");
  sdp_cmd->add_option("--seed", seed, "Random seed for the policy simulation");

  auto* simulate = app.add_subcommand("simulate", "Evaluate a plan by Monte Carlo simulation");
  simulate->add_option("instance", instance, "Instance file")->required()->check(CLI::ExistingFile);
  simulate->add_option("plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Random seed");

  auto* gen = app.add_subcommand("gen-testbed", "Generate a test bed from a JSON configuration");
  std::string config;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Override the configuration's master seed");

  auto* bench = app.add_subcommand("bench", "Run methods over a test bed and print KPI pivots");
  std::string dir;
  std::vector<std::string> methods;
  std::vector<std::string> by;
  std::string rows_out;
  benchgen::BenchLimits limits;
  limits.seed = kDefaultSeed;
  bench->add_option("dir", dir, "Test-bed directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--method", methods, "mp, mpvi, hn, rh or sdp (repeatable)")->required();
  bench->add_option("--time-limit", time_limit, "Seconds per solve (default $BOWSER_TIME_LIMIT or 600)");
  bench->add_option("--reps", limits.replications, "Monte Carlo replications")->check(CLI::PositiveNumber);
  bench->add_option("--segments", limits.segments, "Linearization segments")->check(CLI::PositiveNumber);
  bench->add_option("--budget", limits.sdp_budget, "Maximum dynamic-programming state-action pairs");
  bench->add_option("--seed", limits.seed, "Random seed");
  bench->add_option("--jobs", limits.jobs, "Instances solved in parallel")->check(CLI::PositiveNumber);
  bench->add_option("--by", by, "Pivot factors (default: all factors)");
  bench->add_option("--rows", rows_out, "Write per-instance rows here");

  auto* fit = app.add_subcommand("fit", "Fit compound-Poisson consumption to AEMP telemetry");
  std::vector<std::string> files;
  int bucket = 15;
  int max_gap = 0;
  std::string window;
  std::string series_dir;
  fit->add_option("files", files, "AEMP v1.2 XML files")->required()->check(CLI::ExistingFile);
  fit->add_option("--bucket", bucket, "Bucket length in minutes")->check(CLI::PositiveNumber);
  fit->add_option("--window", window, "Activity window, e.g. 'days=mon-fri;hours=07:00-17:00'");
  fit->add_option("--max-gap", max_gap, "Minutes of silence beyond which buckets are missing (0 = off)");
  fit->add_option("--series", series_dir, "Write per-asset bucket series into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const double limit = time_limit.value_or(DefaultTimeLimit());
    if (*validate) return Validate(instance);
    if (*solve_det) return SolveDet(instance, vi, limit, mps, out);
    if (*solve_sto) return SolveSto(instance, segments, mode, reps, seed, limit, out);
    if (*sdp_cmd) return Sdp(instance, variant == "det" ? "deterministic" : variant, budget, policy_out, sdp_reps, seed);
    if (*simulate) return Simulate(instance, plan_path, reps, seed);
    if (*gen) return GenTestbed(config, out, gen_seed);
    if (*bench) {
      limits.time_limit_seconds = limit;
      return Bench(dir, methods, limits, rows_out, by);
    }
    if (*fit) return Fit(files, bucket, max_gap, window, series_dir);
  } catch (const std::exception& e) {
    std::cout.flush();
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}

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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "bowser/benchgen.hpp"
#include "bowser/dbrp.hpp"
#include "bowser/errors.hpp"
#include "bowser/milp.hpp"
#include "bowser/sbrp.hpp"
#include "bowser/sdp.hpp"
#include "bowser/sim.hpp"

namespace bowser::benchgen {
namespace {

bool HasStochasticConsumption(const Instance& inst) {
  return std::any_of(inst.assets.begin(), inst.assets.end(),
                     [](const AssetSpec& a) { return !a.has_deterministic_consumption(); });
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string MilpStatus(milp::Status s) {
  switch (s) {
    case milp::Status::kOptimal:
      return "optimal";
    case milp::Status::kFeasibleGap:
      return "gap";
    case milp::Status::kInfeasible:
      return "infeasible";
    case milp::Status::kTimeLimitNoIncumbent:
      return "timeout";
  }
  return "error";
}

void FillMonteCarlo(KpiRow& row, const sim::MonteCarloResult& mc) {
  row.simulated = mc.mean;
  row.ci_low = mc.has_interval ? mc.interval.low : mc.mean;
  row.ci_high = mc.has_interval ? mc.interval.high : mc.mean;
}

void RunMilp(const Instance& inst, bool with_vi, const BenchLimits& limits, KpiRow& row) {
  if (HasStochasticConsumption(inst)) {
    row.status = "skipped";
    row.message = "stochastic consumption";
    return;
  }
  dbrp::BuildOptions options;
  options.with_valid_inequalities = with_vi;
  const dbrp::DbrpModel m = dbrp::BuildModel(inst, options);
  milp::SolveOptions so;
  so.time_limit_seconds = limits.time_limit_seconds;
  const milp::Solution sol = milp::Solve(m.model, so);
  row.status = MilpStatus(sol.status);
  row.nodes = static_cast<double>(sol.stats.nodes);
  row.iterations = static_cast<double>(sol.stats.simplex_iterations);
  row.root_bound = sol.stats.root_bound;
  if (sol.has_incumbent()) {
    row.objective = sol.objective;
    row.gap = sol.gap;
  }
}

void RunHereAndNow(const Instance& inst, const BenchLimits& limits, KpiRow& row) {
  if (!HasStochasticConsumption(inst)) {
    row.status = "skipped";
    row.message = "deterministic consumption";
    return;
  }
  sbrp::BuildOptions options;
  options.segments = limits.segments;
  milp::SolveOptions so;
  so.time_limit_seconds = limits.time_limit_seconds;
  const sbrp::HereAndNow hn = sbrp::SolveHereAndNow(inst, options, so);
  row.status = MilpStatus(hn.solution.status);
  row.nodes = static_cast<double>(hn.solution.stats.nodes);
  row.iterations = static_cast<double>(hn.solution.stats.simplex_iterations);
  row.root_bound = hn.solution.stats.root_bound;
  row.objective = hn.predicted_total;
  row.gap = hn.solution.gap;
  row.predicted = hn.predicted_total;
  FillMonteCarlo(row, sim::EvaluatePlanMonteCarlo(inst, hn.plan, limits.replications, limits.seed));
}

void RunRecedingHorizonMethod(const Instance& inst, const BenchLimits& limits, KpiRow& row) {
  if (!HasStochasticConsumption(inst)) {
    row.status = "skipped";
    row.message = "deterministic consumption";
    return;
  }
  sbrp::BuildOptions options;
  options.segments = limits.segments;
  milp::SolveOptions so;
  so.time_limit_seconds = limits.time_limit_seconds;
  std::vector<double> totals;
  for (long r = 0; r < limits.replications; ++r) {
    const auto path = sim::SampleConsumption(inst, limits.seed, static_cast<std::uint64_t>(r));
    const sbrp::RecedingHorizonResult rh = sbrp::RunRecedingHorizon(inst, path, options, so);
    totals.push_back(rh.realized.total);
    row.nodes += static_cast<double>(rh.nodes);
  }
  row.status = "optimal";
  row.nodes /= static_cast<double>(limits.replications);
  const sim::MonteCarloResult mc = sim::Summarize(totals);
  row.objective = mc.mean;
  FillMonteCarlo(row, mc);
}

void RunSdp(const Instance& inst, const BenchLimits& limits, KpiRow& row) {
  const sdp::Variant variant = !inst.has_deterministic_locations() ? sdp::Variant::kStochasticLocation
                               : HasStochasticConsumption(inst)    ? sdp::Variant::kStochasticFuel
                                                                   : sdp::Variant::kDeterministic;
  sdp::Options options;
  options.budget = limits.sdp_budget;
  try {
    const sdp::Result res = sdp::Solve(inst, variant, options);
    row.status = "optimal";
    row.objective = res.expected_cost;
    row.predicted = res.expected_cost;
    row.nodes = static_cast<double>(res.reachable_states);
    row.iterations = static_cast<double>(res.state_action_pairs);
    FillMonteCarlo(row, sdp::SimulatePolicy(inst, res.policy, limits.replications, limits.seed));
  } catch (const BudgetExceededError& e) {
    row.status = "skipped";
    row.message = e.what();
  }
}

// Natural ordering for factor levels: numeric levels compare by value.
bool LevelLess(const std::string& a, const std::string& b) {
  char* ea = nullptr;
  char* eb = nullptr;
  const double da = std::strtod(a.c_str(), &ea);
  const double db = std::strtod(b.c_str(), &eb);
  const bool na = ea != a.c_str() && *ea == '\0';
  const bool nb = eb != b.c_str() && *eb == '\0';
  if (na && nb) return da < db;
  if (na != nb) return na;
  return a < b;
}

std::string Cell(const std::vector<double>& values, double scale = 1.0) {
  if (values.empty()) return "-";
  double s = 0.0;
  for (double v : values) s += v;
  return fmt::format("{:.4g}", scale * s / static_cast<double>(values.size()));
}

bool Ran(const KpiRow& r) { return r.status != "skipped" && r.status != "error"; }
bool HasResult(const KpiRow& r) { return r.status == "optimal" || r.status == "gap"; }

}  // namespace

std::string MethodName(Method m) {
  switch (m) {
    case Method::kMp:
      return "mp";
    case Method::kMpvi:
      return "mpvi";
    case Method::kHereAndNow:
      return "hn";
    case Method::kRecedingHorizon:
      return "rh";
    case Method::kSdp:
      return "sdp";
  }
  return "?";
}

Method ParseMethod(const std::string& name) {
  if (name == "mp" || name == "MP") return Method::kMp;
  if (name == "mpvi" || name == "MPVI") return Method::kMpvi;
  if (name == "hn" || name == "HN" || name == "SBRP_HN") return Method::kHereAndNow;
  if (name == "rh" || name == "RH" || name == "SBRP_RH") return Method::kRecedingHorizon;
  if (name == "sdp" || name == "SDP") return Method::kSdp;
  throw InvalidArgumentError("unknown method '" + name + "' (expected mp, mpvi, hn, rh or sdp)");
}

std::vector<KpiRow> RunBenchmark(const std::vector<TestbedInstance>& instances, Method method,
                                 const BenchLimits& limits) {
  if (limits.replications < 1) throw InvalidArgumentError("benchmark needs at least one replication");
  std::vector<KpiRow> rows(instances.size());
  auto run_one = [&](std::size_t i) {
    const TestbedInstance& ti = instances[i];
    KpiRow& row = rows[i];
    row.instance = ti.instance.name;
    row.factors = ti.factors;
    row.method = method;
    const auto start = std::chrono::steady_clock::now();
    try {
      switch (method) {
        case Method::kMp:
          RunMilp(ti.instance, false, limits, row);
          break;
        case Method::kMpvi:
          RunMilp(ti.instance, true, limits, row);
          break;
        case Method::kHereAndNow:
          RunHereAndNow(ti.instance, limits, row);
          break;
        case Method::kRecedingHorizon:
          RunRecedingHorizonMethod(ti.instance, limits, row);
          break;
        case Method::kSdp:
          RunSdp(ti.instance, limits, row);
          break;
      }
    } catch (const sbrp::RecedingHorizonTimeout& e) {
      row.status = "timeout";
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = "error";
      row.message = e.what();
    }
    row.seconds = Seconds(start);
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(limits.jobs, 1)), 1, std::max<std::size_t>(1, rows.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_one(i);
  } else {
    // Instances are handed out in order from a shared counter; every row is
    // written by exactly one worker.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) run_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<GapRow> ComputeGaps(const std::vector<KpiRow>& rows) {
  std::vector<GapRow> out;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (std::find(order.begin(), order.end(), r.instance) == order.end()) order.push_back(r.instance);
  }
  for (const auto& name : order) {
    const KpiRow* hn = nullptr;
    const KpiRow* rh = nullptr;
    const KpiRow* opt = nullptr;
    GapRow g;
    g.instance = name;
    for (const auto& r : rows) {
      if (r.instance != name) continue;
      g.factors = r.factors;
      if (!HasResult(r)) continue;
      if (r.method == Method::kHereAndNow) hn = &r;
      if (r.method == Method::kRecedingHorizon) rh = &r;
      if (r.method == Method::kSdp) opt = &r;
    }
    if (hn && hn->simulated != 0.0) {
      g.has_linearization = true;
      g.linearization = std::abs(hn->predicted - hn->simulated) / hn->simulated;
    }
    if (opt && opt->simulated != 0.0) {
      if (hn) {
        g.has_hn = true;
        g.hn = (hn->simulated - opt->simulated) / opt->simulated;
      }
      if (rh) {
        g.has_rh = true;
        g.rh = (rh->simulated - opt->simulated) / opt->simulated;
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::string FormatRows(const std::vector<KpiRow>& rows) {
  std::vector<std::string> keys;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.factors) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  std::sort(keys.begin(), keys.end());
  std::string out = "instance\tmethod";
  for (const auto& k : keys) out += "\t" + k;
  out += "\tstatus\tseconds\tnodes\titerations\tobjective\tmip_gap\troot_bound\tpredicted\tsimulated\tci_low\tci_high"
         "\tmessage\n";
  for (const auto& r : rows) {
    out += r.instance + "\t" + MethodName(r.method);
    for (const auto& k : keys) {
      const auto it = r.factors.find(k);
      out += "\t" + (it == r.factors.end() ? std::string("-") : it->second);
    }
    out += fmt::format("\t{}\t{:.3f}\t{}\t{}\t{:.6g}\t{:.6g}\t{:.6g}\t{:.6g}\t{:.6g}\t{:.6g}\t{:.6g}\t{}\n", r.status,
                       r.seconds, r.nodes, r.iterations, r.objective, r.gap, r.root_bound, r.predicted, r.simulated,
                       r.ci_low, r.ci_high, r.message.empty() ? "-" : r.message);
  }
  return out;
}

std::string FormatPivot(const std::vector<KpiRow>& rows, const std::vector<std::string>& factors) {
  std::vector<Method> methods;
  for (const auto& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  const std::vector<GapRow> gaps = ComputeGaps(rows);
  const bool any_lin = std::any_of(gaps.begin(), gaps.end(), [](const GapRow& g) { return g.has_linearization; });
  const bool any_opt = std::any_of(gaps.begin(), gaps.end(), [](const GapRow& g) { return g.has_hn || g.has_rh; });

  std::string out = "factor\tlevel\tinstances";
  for (Method m : methods) {
    const std::string n = MethodName(m);
    out += fmt::format("\t{0}_seconds\t{0}_nodes\t{0}_iterations\t{0}_objective\t{0}_mip_gap_pct\t{0}_simulated", n);
  }
  if (any_lin) out += "\tlinearization_gap_pct";
  if (any_opt) out += "\thn_gap_pct\trh_gap_pct";
  out += "\n";

  auto block = [&](const std::string& factor, const std::string& level,
                   const std::function<bool(const std::map<std::string, std::string>&)>& select) {
    std::vector<std::string> names;
    for (const auto& r : rows) {
      if (select(r.factors) && std::find(names.begin(), names.end(), r.instance) == names.end()) {
        names.push_back(r.instance);
      }
    }
    std::string line = fmt::format("{}\t{}\t{}", factor, level, names.size());
    for (Method m : methods) {
      std::vector<double> secs, nodes, iters, obj, mipgap, simulated;
      for (const auto& r : rows) {
        if (r.method != m || !select(r.factors) || !Ran(r)) continue;
        secs.push_back(r.seconds);
        nodes.push_back(r.nodes);
        iters.push_back(r.iterations);
        if (HasResult(r)) {
          obj.push_back(r.objective);
          if (r.status == "gap") mipgap.push_back(r.gap);
          if (m == Method::kHereAndNow || m == Method::kRecedingHorizon || m == Method::kSdp) {
            simulated.push_back(r.simulated);
          }
        }
      }
      line += "\t" + Cell(secs) + "\t" + Cell(nodes) + "\t" + Cell(iters) + "\t" + Cell(obj) + "\t" +
              Cell(mipgap, 100.0) + "\t" + Cell(simulated);
    }
    std::vector<double> lin, hn, rh;
    for (const auto& g : gaps) {
      if (!select(g.factors)) continue;
      if (g.has_linearization) lin.push_back(g.linearization);
      if (g.has_hn) hn.push_back(g.hn);
      if (g.has_rh) rh.push_back(g.rh);
    }
    if (any_lin) line += "\t" + Cell(lin, 100.0);
    if (any_opt) line += "\t" + Cell(hn, 100.0) + "\t" + Cell(rh, 100.0);
    out += line + "\n";
  };

  block("all", "*", [](const auto&) { return true; });
  for (const auto& factor : factors) {
    std::vector<std::string> levels;
    for (const auto& r : rows) {
      const auto it = r.factors.find(factor);
      if (it != r.factors.end() && std::find(levels.begin(), levels.end(), it->second) == levels.end()) {
        levels.push_back(it->second);
      }
    }
    std::sort(levels.begin(), levels.end(), LevelLess);
    for (const auto& level : levels) {
      block(factor, level, [&](const std::map<std::string, std::string>& f) {
        const auto it = f.find(factor);
        return it != f.end() && it->second == level;
      });
    }
  }
  return out;
}

}  // namespace bowser::benchgen

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

#include "bowser/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/rng.hpp"

namespace bowser::sim {
namespace {

void RequireFeasible(const Instance& inst, const Plan& plan) {
  const auto violations = CheckPlanFeasibility(inst, plan);
  if (!violations.empty()) throw InvalidArgumentError("infeasible plan: " + violations.front());
}

}  // namespace

AssetStep StepAsset(double level, double refuel, double capacity, double consumption) {
  AssetStep s;
  s.available = std::min(level + refuel, capacity);
  s.shortage = std::max(consumption - s.available, 0.0);
  s.level = std::max(s.available - consumption, 0.0);
  return s;
}

ConsumptionPath SampleConsumption(const Instance& inst, std::uint64_t seed, std::uint64_t replication) {
  ConsumptionPath path(inst.asset_count(), std::vector<double>(inst.horizon, 0.0));
  for (int a = 0; a < inst.asset_count(); ++a) {
    const AssetSpec& asset = inst.assets[a];
    for (int t = 0; t < inst.horizon; ++t) {
      if (asset.has_deterministic_consumption()) {
        path[a][t] = asset.consumption[t];
      } else {
        const double u = KeyedUniform(seed, DrawLane::kConsumption, replication, a, t);
        path[a][t] = asset.consumption_dist[t].Quantile(u);
      }
    }
  }
  return path;
}

PlanEvaluation EvaluateOnPath(const Instance& inst, const Plan& plan, const ConsumptionPath& path) {
  PlanEvaluation ev;
  ev.travel_cost = RouteDistance(inst, plan.route);
  ev.shortages.assign(inst.asset_count(), std::vector<double>(inst.horizon, 0.0));
  double short_total = 0.0;
  for (int a = 0; a < inst.asset_count(); ++a) {
    const AssetSpec& asset = inst.assets[a];
    double level = asset.initial_level;
    for (int t = 0; t < inst.horizon; ++t) {
      const AssetStep s = StepAsset(level, plan.refuels[a][t], asset.tank_capacity, path[a][t]);
      ev.shortages[a][t] = s.shortage;
      short_total += s.shortage;
      level = s.level;
    }
  }
  ev.shortage_cost = inst.penalty * short_total;
  ev.total = ev.travel_cost + ev.shortage_cost;
  return ev;
}

PlanEvaluation EvaluatePlanDeterministic(const Instance& inst, const Plan& plan) {
  if (!inst.is_deterministic()) {
    throw ModelKindError("deterministic evaluation needs deterministic consumption; use Monte Carlo evaluation");
  }
  RequireFeasible(inst, plan);
  ConsumptionPath path;
  for (const auto& asset : inst.assets) path.push_back(asset.consumption);
  return EvaluateOnPath(inst, plan, path);
}

Interval StudentInterval95(const std::vector<double>& values) {
  if (values.size() < 2) throw InvalidArgumentError("a confidence interval needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  const boost::math::students_t dist(n - 1.0);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean - q * se, mean + q * se};
}

MonteCarloResult Summarize(std::vector<double> totals) {
  MonteCarloResult r;
  r.replications = static_cast<long>(totals.size());
  if (totals.empty()) return r;
  const double n = static_cast<double>(totals.size());
  r.mean = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
  if (totals.size() >= 2) {
    double ss = 0.0;
    for (double v : totals) ss += (v - r.mean) * (v - r.mean);
    r.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    r.interval = StudentInterval95(totals);
    r.has_interval = true;
  }
  r.totals = std::move(totals);
  return r;
}

MonteCarloResult EvaluatePlanMonteCarlo(const Instance& inst, const Plan& plan, long replications,
                                        std::uint64_t seed, int jobs) {
  if (replications < 1) throw InvalidArgumentError("need at least one replication");
  if (!inst.has_deterministic_locations()) {
    throw ModelKindError("plan evaluation needs deterministic asset locations");
  }
  RequireFeasible(inst, plan);
  std::vector<double> totals(replications, 0.0);
  std::vector<double> travel(replications, 0.0);
  std::vector<double> shortage(replications, 0.0);
  auto work = [&](long begin, long end) {
    for (long r = begin; r < end; ++r) {
      const PlanEvaluation ev = EvaluateOnPath(inst, plan, SampleConsumption(inst, seed, r));
      totals[r] = ev.total;
      travel[r] = ev.travel_cost;
      double s = 0.0;
      for (const auto& row : ev.shortages) s += std::accumulate(row.begin(), row.end(), 0.0);
      shortage[r] = s;
    }
  };
  const long workers = std::clamp<long>(jobs, 1, replications);
  if (workers == 1) {
    work(0, replications);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (replications + workers - 1) / workers;
    for (long w = 0; w < workers; ++w) {
      const long begin = w * chunk;
      const long end = std::min(replications, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  MonteCarloResult r = Summarize(totals);
  r.mean_travel = std::accumulate(travel.begin(), travel.end(), 0.0) / replications;
  r.mean_shortage = std::accumulate(shortage.begin(), shortage.end(), 0.0) / replications;
  return r;
}

}  // namespace bowser::sim

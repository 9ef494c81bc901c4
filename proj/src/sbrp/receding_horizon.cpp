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

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/sbrp.hpp"
#include "bowser/sim.hpp"

namespace bowser::sbrp {
namespace {

// Remaining-horizon instance starting at period `from` with the observed
// bowser and asset state.
Instance StageInstance(const Instance& inst, int from, int bowser_node, double bowser_level,
                       const std::vector<double>& levels) {
  Instance sub;
  sub.name = fmt::format("{}@{}", inst.name, from + 1);
  sub.horizon = inst.horizon - from;
  sub.graph = inst.graph;
  sub.bowser_capacity = inst.bowser_capacity;
  sub.bowser_initial = std::clamp(bowser_level, 0.0, inst.bowser_capacity);
  sub.penalty = inst.penalty;
  sub.bowser_start = bowser_node;
  sub.bowser_end = inst.bowser_end;
  for (int a = 0; a < inst.asset_count(); ++a) {
    const AssetSpec& src = inst.assets[a];
    AssetSpec asset;
    asset.label = src.label;
    asset.tank_capacity = src.tank_capacity;
    asset.initial_level = std::clamp(levels[a], 0.0, src.tank_capacity);
    asset.location.assign(src.location.begin() + from, src.location.end());
    asset.consumption_dist.assign(src.consumption_dist.begin() + from, src.consumption_dist.end());
    sub.assets.push_back(std::move(asset));
  }
  return sub;
}

}  // namespace

RecedingHorizonTimeout::RecedingHorizonTimeout(int stage, Plan partial)
    : Error(fmt::format("receding horizon: stage {} ended without a proven optimum", stage)),
      stage_(stage),
      partial_(std::move(partial)) {}

RecedingHorizonResult RunRecedingHorizon(const Instance& inst, const std::vector<std::vector<double>>& scenario,
                                         const BuildOptions& options, const milp::SolveOptions& solve) {
  const int horizon = inst.horizon;
  const int assets = inst.asset_count();
  if (static_cast<int>(scenario.size()) != assets) {
    throw DimensionError(fmt::format("scenario has {} asset rows, expected {}", scenario.size(), assets));
  }
  for (const auto& row : scenario) {
    if (static_cast<int>(row.size()) != horizon) {
      throw DimensionError(fmt::format("scenario row has {} periods, expected {}", row.size(), horizon));
    }
  }

  RecedingHorizonResult out;
  Plan& plan = out.plan;
  plan.route.assign(horizon, inst.bowser_start);
  plan.refills.assign(horizon, 0.0);
  plan.refuels.assign(assets, std::vector<double>(horizon, 0.0));

  int node = inst.bowser_start;
  double bowser = inst.bowser_initial;
  std::vector<double> levels(assets);
  for (int a = 0; a < assets; ++a) levels[a] = inst.assets[a].initial_level;

  for (int t = 0; t < horizon; ++t) {
    const Instance stage = StageInstance(inst, t, node, bowser, levels);
    const SbrpModel m = BuildModel(stage, options);
    const milp::Solution sol = milp::Solve(m.model, solve);
    out.nodes += sol.stats.nodes;
    if (sol.status != milp::Status::kOptimal) {
      Plan partial = plan;
      partial.route.resize(t);
      partial.refills.resize(t);
      for (auto& row : partial.refuels) row.resize(t);
      throw RecedingHorizonTimeout(t + 1, std::move(partial));
    }
    out.stage_objectives.push_back(sol.objective);
    const Plan sub = dbrp::ExtractPlan(m.index, sol);

    // Implement the period-t decisions, then observe consumption.
    plan.route[t] = node;
    plan.refills[t] = sub.refills[0];
    bowser += sub.refills[0];
    for (int a = 0; a < assets; ++a) {
      const double q = sub.refuels[a][0];
      plan.refuels[a][t] = q;
      bowser -= q;
      levels[a] = sim::StepAsset(levels[a], q, inst.assets[a].tank_capacity, scenario[a][t]).level;
    }
    if (t + 1 < horizon) node = sub.route[1];
  }
  out.realized = sim::EvaluateOnPath(inst, plan, scenario);
  return out;
}

}  // namespace bowser::sbrp

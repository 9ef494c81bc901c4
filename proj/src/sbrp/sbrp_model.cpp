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
#include <numeric>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/sbrp.hpp"
#include "bowser/stochproc.hpp"

namespace bowser::sbrp {
namespace {

using milp::Sense;
using milp::Term;
using milp::VarKind;

}  // namespace

SbrpModel BuildModel(const Instance& inst, const BuildOptions& options) {
  const auto violations = ValidateInstance(inst);
  if (!violations.empty()) throw InvalidArgumentError("invalid instance: " + violations.front());
  if (options.segments < 1) {
    throw InvalidArgumentError(fmt::format("segment count must be at least 1, got {}", options.segments));
  }
  for (int a = 0; a < inst.asset_count(); ++a) {
    if (inst.assets[a].has_deterministic_consumption()) {
      throw ModelKindError(fmt::format(
          "asset {} has deterministic consumption; use the deterministic model builder", a + 1));
    }
  }
  if (!inst.has_deterministic_locations()) {
    throw ModelKindError("instance has stochastic asset locations; use the dynamic program");
  }

  SbrpModel out;
  out.index = dbrp::BuildRoutingCore(inst, out.model);
  milp::Model& model = out.model;
  const int horizon = inst.horizon;
  const int assets = inst.asset_count();

  std::vector<std::vector<DiscreteDist>> cumulative(assets);
  for (int a = 0; a < assets; ++a) cumulative[a] = stochproc::PrefixConvolutions(inst.assets[a].consumption_dist);

  out.shortage.resize(static_cast<std::size_t>(assets) * horizon);
  out.surplus.resize(out.shortage.size());
  out.spill.resize(out.shortage.size());
  for (int a = 0; a < assets; ++a) {
    const AssetSpec& asset = inst.assets[a];
    // Generous bound on every recourse quantity; keeps the LP bounded.
    const double bound =
        10.0 * (asset.initial_level + horizon * asset.tank_capacity + cumulative[a].back().max_support() + 1.0);
    for (int t = 0; t < horizon; ++t) {
      const std::size_t k = static_cast<std::size_t>(a) * horizon + t;
      out.shortage[k] = model.AddVariable(fmt::format("Im_{}_{}", a + 1, t + 1), 0.0, bound, VarKind::kContinuous,
                                          inst.penalty);
      out.surplus[k] = model.AddVariable(fmt::format("Ip_{}_{}", a + 1, t + 1), 0.0, bound, VarKind::kContinuous);
      out.spill[k] = model.AddVariable(fmt::format("E_{}_{}", a + 1, t + 1), 0.0, bound, VarKind::kContinuous);
    }
  }

  const dbrp::RoutingIndex& idx = out.index;
  for (int a = 0; a < assets; ++a) {
    const AssetSpec& asset = inst.assets[a];
    for (int t = 0; t < horizon; ++t) {
      const DiscreteDist& g = cumulative[a][t];
      const stochproc::PiecewiseLinear comp = stochproc::LinearizeComplementaryLoss(g, options.segments);
      const stochproc::PiecewiseLinear loss = stochproc::LossFromComplementary(comp, g.mean());

      // Terms of the stock argument X without the constant s_a.
      auto argument_terms = [&](double scale) {
        std::vector<Term> terms;
        for (int k = 0; k <= t; ++k) {
          terms.push_back({idx.Refuel(a, k), scale});
          terms.push_back({out.Spill(a, k), -scale});
        }
        for (int k = 0; k < t; ++k) terms.push_back({out.Shortage(a, k), scale});
        return terms;
      };

      // Im >= slope * X + intercept for every loss piece.
      for (std::size_t s = 0; s < loss.segments.size(); ++s) {
        const auto& seg = loss.segments[s];
        std::vector<Term> terms = argument_terms(-seg.slope);
        terms.push_back({out.Shortage(a, t), 1.0});
        model.AddConstraint(fmt::format("short_{}_{}_{}", a + 1, t + 1, s + 1), std::move(terms),
                            Sense::kGreaterEqual, seg.slope * asset.initial_level + seg.intercept);
      }
      // Ip >= slope * X + intercept for every complementary-loss piece; the
      // zero piece is the variable's lower bound.
      for (std::size_t s = 0; s < comp.segments.size(); ++s) {
        const auto& seg = comp.segments[s];
        if (seg.slope == 0.0 && seg.intercept <= 0.0) continue;
        std::vector<Term> terms = argument_terms(-seg.slope);
        terms.push_back({out.Surplus(a, t), 1.0});
        model.AddConstraint(fmt::format("surp_{}_{}_{}", a + 1, t + 1, s + 1), std::move(terms),
                            Sense::kGreaterEqual, seg.slope * asset.initial_level + seg.intercept);
      }
      // Spill: E >= Ip_{t-1} + Q_t - c_a, with the initial level before period 1.
      std::vector<Term> spill = {{out.Spill(a, t), 1.0}, {idx.Refuel(a, t), -1.0}};
      double rhs = -asset.tank_capacity;
      if (t == 0) {
        rhs += asset.initial_level;
      } else {
        spill.push_back({out.Surplus(a, t - 1), -1.0});
      }
      model.AddConstraint(fmt::format("spill_{}_{}", a + 1, t + 1), std::move(spill), Sense::kGreaterEqual, rhs);
    }
  }
  return out;
}

HereAndNow SolveHereAndNow(const Instance& inst, const BuildOptions& options, const milp::SolveOptions& solve) {
  const SbrpModel m = BuildModel(inst, options);
  HereAndNow out;
  out.solution = milp::Solve(m.model, solve);
  out.plan = dbrp::ExtractPlan(m.index, out.solution);
  out.routing_cost = RouteDistance(inst, out.plan.route);
  for (int v : m.shortage) out.expected_shortage += out.solution.values[v];
  out.predicted_total = out.solution.objective;
  return out;
}

}  // namespace bowser::sbrp

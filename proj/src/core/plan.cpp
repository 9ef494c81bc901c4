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
#include <cmath>

#include <fmt/format.h>

#include "bowser/core.hpp"
#include "bowser/errors.hpp"

namespace bowser {
namespace {

double Tol(double scale) { return kPlanTolerance * std::max(1.0, std::abs(scale)); }

}  // namespace

double RouteDistance(const Instance& inst, const std::vector<int>& route) {
  double d = 0.0;
  for (std::size_t t = 1; t < route.size(); ++t) d += inst.graph.Distance(route[t - 1], route[t]);
  return d;
}

std::vector<std::string> CheckPlanFeasibility(const Instance& inst, const Plan& plan) {
  const int horizon = inst.horizon;
  const int assets = inst.asset_count();
  if (static_cast<int>(plan.route.size()) != horizon || static_cast<int>(plan.refills.size()) != horizon ||
      static_cast<int>(plan.refuels.size()) != assets) {
    throw DimensionError(fmt::format("plan dimensions (route {}, refills {}, refuel rows {}) do not match T={}, A={}",
                                     plan.route.size(), plan.refills.size(), plan.refuels.size(), horizon, assets));
  }
  for (int a = 0; a < assets; ++a) {
    if (static_cast<int>(plan.refuels[a].size()) != horizon) {
      throw DimensionError(fmt::format("refuel row of asset {} has {} entries, expected {}", a + 1,
                                       plan.refuels[a].size(), horizon));
    }
  }

  std::vector<std::string> v;
  const int n = inst.graph.node_count();
  bool route_ok = true;
  for (int t = 0; t < horizon; ++t) {
    if (plan.route[t] < 0 || plan.route[t] >= n) {
      v.push_back(fmt::format("route: period {} visits unknown node {}", t + 1, plan.route[t] + 1));
      route_ok = false;
    }
  }
  if (route_ok) {
    if (plan.route.front() != inst.bowser_start) {
      v.push_back(fmt::format("route: period 1 must start at node {}, found {}", inst.bowser_start + 1,
                              plan.route.front() + 1));
    }
    if (inst.bowser_end && plan.route.back() != *inst.bowser_end) {
      v.push_back(fmt::format("route: period {} must end at node {}, found {}", horizon, *inst.bowser_end + 1,
                              plan.route.back() + 1));
    }
    for (int t = 1; t < horizon; ++t) {
      if (!inst.graph.HasTransit(plan.route[t - 1], plan.route[t])) {
        v.push_back(fmt::format("route: no arc {} -> {} between periods {} and {}", plan.route[t - 1] + 1,
                                plan.route[t] + 1, t, t + 1));
      }
    }
  }

  const double tol = kPlanTolerance;
  for (int t = 0; t < horizon; ++t) {
    const double b = plan.refills[t];
    if (!std::isfinite(b) || b < -tol) v.push_back(fmt::format("refill: period {} has negative amount {}", t + 1, b));
    if (b > tol && route_ok && plan.route[t] != kCistern) {
      v.push_back(fmt::format("refill: period {} refills {} away from the cistern", t + 1, b));
    }
    for (int a = 0; a < assets; ++a) {
      const double q = plan.refuels[a][t];
      if (!std::isfinite(q) || q < -tol) {
        v.push_back(fmt::format("refuel: asset {} period {} has negative amount {}", a + 1, t + 1, q));
      }
      const AssetSpec& asset = inst.assets[a];
      if (q > tol && route_ok && asset.has_deterministic_location() && plan.route[t] != asset.location[t]) {
        v.push_back(fmt::format("co-location: asset {} refuelled in period {} at node {} but located at node {}",
                                a + 1, t + 1, plan.route[t] + 1, asset.location[t] + 1));
      }
      if (q > asset.tank_capacity + Tol(asset.tank_capacity)) {
        v.push_back(fmt::format("refuel: asset {} period {} delivers {} above tank capacity {}", a + 1, t + 1, q,
                                asset.tank_capacity));
      }
    }
  }

  // Bowser inventory: after the period's refill the tank must hold the
  // refill (capacity), and after the period's deliveries it must be
  // nonnegative.
  double level = inst.bowser_initial;
  for (int t = 0; t < horizon; ++t) {
    level += plan.refills[t];
    if (level > inst.bowser_capacity + Tol(inst.bowser_capacity)) {
      v.push_back(fmt::format("bowser inventory: level {} after refill in period {} exceeds capacity {}", level, t + 1,
                              inst.bowser_capacity));
    }
    for (int a = 0; a < assets; ++a) level -= plan.refuels[a][t];
    if (level < -Tol(inst.bowser_capacity)) {
      v.push_back(fmt::format("bowser inventory: deliveries exceed available fuel in period {} (level {})", t + 1,
                              level));
    }
  }

  // Asset tanks under deterministic consumption: deliveries may not overflow.
  for (int a = 0; a < assets; ++a) {
    const AssetSpec& asset = inst.assets[a];
    if (!asset.has_deterministic_consumption()) continue;
    double tank = asset.initial_level;
    for (int t = 0; t < horizon; ++t) {
      const double available = tank + plan.refuels[a][t];
      if (available > asset.tank_capacity + Tol(asset.tank_capacity)) {
        v.push_back(fmt::format("asset tank: asset {} holds {} after refuel in period {}, capacity {}", a + 1,
                                available, t + 1, asset.tank_capacity));
      }
      tank = std::max(available - asset.consumption[t], 0.0);
    }
  }
  return v;
}

}  // namespace bowser

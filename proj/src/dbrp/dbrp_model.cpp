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
#include <numeric>

#include <fmt/format.h>

#include "bowser/dbrp.hpp"
#include "bowser/errors.hpp"

namespace bowser::dbrp {
namespace {

using milp::Sense;
using milp::Term;
using milp::VarKind;

constexpr double kSnap = 1e-6;

void RequireValid(const Instance& inst) {
  const auto violations = ValidateInstance(inst);
  if (!violations.empty()) throw InvalidArgumentError("invalid instance: " + violations.front());
}

// Prefix sums of deterministic consumption: cum[t] = f_0 + ... + f_{t-1}.
std::vector<double> PrefixConsumption(const AssetSpec& asset) {
  std::vector<double> cum(asset.consumption.size() + 1, 0.0);
  for (std::size_t t = 0; t < asset.consumption.size(); ++t) cum[t + 1] = cum[t] + asset.consumption[t];
  return cum;
}

}  // namespace

std::string FamilyTag(Family f) {
  switch (f) {
    case Family::kMinimumVisits:
      return "L1";
    case Family::kNoVisitNoDelivery:
      return "L2";
    case Family::kLevelWithoutVisits:
      return "L3";
  }
  return "?";
}

Family ParseFamily(const std::string& tag) {
  if (tag == "L1" || tag == "l1") return Family::kMinimumVisits;
  if (tag == "L2" || tag == "l2") return Family::kNoVisitNoDelivery;
  if (tag == "L3" || tag == "l3") return Family::kLevelWithoutVisits;
  throw InvalidArgumentError("unknown valid-inequality family '" + tag + "' (expected L1, L2 or L3)");
}

RoutingIndex BuildRoutingCore(const Instance& inst, milp::Model& model) {
  RoutingIndex idx;
  idx.nodes = inst.graph.node_count();
  idx.horizon = inst.horizon;
  idx.assets = inst.asset_count();
  const int n = idx.nodes;
  const int horizon = idx.horizon;
  const double cb = inst.bowser_capacity;
  const double sb = inst.bowser_initial;

  for (int i = 0; i < n; ++i) {
    for (int j : inst.graph.Successors(i)) idx.transit_arcs.emplace_back(i, j);
  }
  std::sort(idx.transit_arcs.begin(), idx.transit_arcs.end());
  const int arc_count = static_cast<int>(idx.transit_arcs.size());

  // Visit binaries; the start node and the optional end node are pinned
  // through their bounds.
  for (int t = 0; t < horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      double lo = 0.0;
      if (t == 0 && i == inst.bowser_start) lo = 1.0;
      if (t == horizon - 1 && inst.bowser_end && *inst.bowser_end == i) lo = 1.0;
      idx.visit.push_back(model.AddVariable(fmt::format("V_{}_{}", i + 1, t + 1), lo, 1.0, VarKind::kBinary));
    }
  }
  for (int t = 0; t + 1 < horizon; ++t) {
    for (const auto& [i, j] : idx.transit_arcs) {
      idx.transit.push_back(model.AddVariable(fmt::format("T_{}_{}_{}", i + 1, j + 1, t + 1), 0.0, 1.0,
                                              VarKind::kBinary, inst.graph.Distance(i, j)));
    }
  }
  for (int a = 0; a < idx.assets; ++a) {
    for (int t = 0; t < horizon; ++t) {
      idx.refuel.push_back(model.AddVariable(fmt::format("Q_{}_{}", a + 1, t + 1), 0.0,
                                             inst.assets[a].tank_capacity, VarKind::kContinuous));
    }
  }
  for (int t = 0; t < horizon; ++t) {
    idx.refill.push_back(model.AddVariable(fmt::format("B_{}", t + 1), 0.0, cb, VarKind::kContinuous));
  }

  for (int t = 0; t < horizon; ++t) {
    // Refills only while at the cistern.
    model.AddConstraint(fmt::format("refill_{}", t + 1), {{idx.Refill(t), 1.0}, {idx.Visit(kCistern, t), -cb}},
                        Sense::kLessEqual, 0.0);
    // Bowser capacity after the period's refill.
    std::vector<Term> cap;
    for (int k = 0; k <= t; ++k) cap.push_back({idx.Refill(k), 1.0});
    for (int k = 0; k < t; ++k) {
      for (int a = 0; a < idx.assets; ++a) cap.push_back({idx.Refuel(a, k), -1.0});
    }
    model.AddConstraint(fmt::format("bcap_{}", t + 1), std::move(cap), Sense::kLessEqual, cb - sb);
    // Bowser inventory never negative.
    std::vector<Term> inv;
    for (int k = 0; k <= t; ++k) {
      inv.push_back({idx.Refill(k), 1.0});
      for (int a = 0; a < idx.assets; ++a) inv.push_back({idx.Refuel(a, k), -1.0});
    }
    model.AddConstraint(fmt::format("binv_{}", t + 1), std::move(inv), Sense::kGreaterEqual, -sb);
    // Exactly one position per period.
    std::vector<Term> where;
    for (int i = 0; i < n; ++i) where.push_back({idx.Visit(i, t), 1.0});
    model.AddConstraint(fmt::format("where_{}", t + 1), std::move(where), Sense::kEqual, 1.0);
  }

  for (int t = 0; t + 1 < horizon; ++t) {
    // Leaving node i means using one of its transits.
    for (int i = 0; i < n; ++i) {
      std::vector<Term> out;
      for (int k = 0; k < arc_count; ++k) {
        if (idx.transit_arcs[k].first == i) out.push_back({idx.Transit(k, t), 1.0});
      }
      out.push_back({idx.Visit(i, t), -1.0});
      model.AddConstraint(fmt::format("move_{}_{}", i + 1, t + 1), std::move(out), Sense::kEqual, 0.0);
    }
    for (int k = 0; k < arc_count; ++k) {
      const auto [i, j] = idx.transit_arcs[k];
      const int tr = idx.Transit(k, t);
      model.AddConstraint(fmt::format("link_{}_{}_{}", i + 1, j + 1, t + 1),
                          {{tr, 1.0}, {idx.Visit(i, t), -1.0}, {idx.Visit(j, t + 1), -1.0}}, Sense::kGreaterEqual,
                          -1.0);
      model.AddConstraint(fmt::format("from_{}_{}_{}", i + 1, j + 1, t + 1), {{tr, 1.0}, {idx.Visit(i, t), -1.0}},
                          Sense::kLessEqual, 0.0);
      model.AddConstraint(fmt::format("to_{}_{}_{}", i + 1, j + 1, t + 1), {{tr, 1.0}, {idx.Visit(j, t + 1), -1.0}},
                          Sense::kLessEqual, 0.0);
    }
  }

  // Refuel only when co-located.
  for (int a = 0; a < idx.assets; ++a) {
    const AssetSpec& asset = inst.assets[a];
    if (!asset.has_deterministic_location()) {
      throw ModelKindError(fmt::format("asset {} has a stochastic location; only the dynamic program handles it", a + 1));
    }
    for (int t = 0; t < horizon; ++t) {
      model.AddConstraint(fmt::format("coloc_{}_{}", a + 1, t + 1),
                          {{idx.Refuel(a, t), 1.0}, {idx.Visit(asset.location[t], t), -asset.tank_capacity}},
                          Sense::kLessEqual, 0.0);
    }
  }
  return idx;
}

DbrpModel BuildModel(const Instance& inst, const BuildOptions& options) {
  RequireValid(inst);
  if (!inst.is_deterministic()) {
    throw ModelKindError("instance has stochastic consumption; use the stochastic model builder");
  }
  if (!inst.has_deterministic_locations()) {
    throw ModelKindError("instance has stochastic asset locations; use the dynamic program");
  }
  if (options.with_valid_inequalities && options.families.empty()) {
    throw InvalidArgumentError("valid inequalities requested without any family");
  }

  DbrpModel out;
  out.index = BuildRoutingCore(inst, out.model);
  const RoutingIndex& idx = out.index;
  const int horizon = idx.horizon;

  for (int a = 0; a < idx.assets; ++a) {
    for (int t = 0; t < horizon; ++t) {
      out.shortage.push_back(out.model.AddVariable(fmt::format("S_{}_{}", a + 1, t + 1), 0.0,
                                                   inst.assets[a].consumption[t], VarKind::kContinuous,
                                                   inst.penalty));
    }
  }

  for (int a = 0; a < idx.assets; ++a) {
    const AssetSpec& asset = inst.assets[a];
    const std::vector<double> cum = PrefixConsumption(asset);
    for (int t = 0; t < horizon; ++t) {
      // Fuel level at the end of period t is nonnegative.
      std::vector<Term> low;
      for (int k = 0; k <= t; ++k) {
        low.push_back({idx.Refuel(a, k), 1.0});
        low.push_back({out.Shortage(a, k), 1.0});
      }
      out.model.AddConstraint(fmt::format("lvlmin_{}_{}", a + 1, t + 1), std::move(low), Sense::kGreaterEqual,
                              cum[t + 1] - asset.initial_level);
      // Fuel level after the period-t refuel fits in the tank.
      std::vector<Term> high;
      for (int k = 0; k <= t; ++k) high.push_back({idx.Refuel(a, k), 1.0});
      for (int k = 0; k < t; ++k) high.push_back({out.Shortage(a, k), 1.0});
      out.model.AddConstraint(fmt::format("lvlmax_{}_{}", a + 1, t + 1), std::move(high), Sense::kLessEqual,
                              asset.tank_capacity - asset.initial_level + cum[t]);
    }
  }

  if (options.with_valid_inequalities) AddValidInequalities(inst, out, options.families);
  return out;
}

void AddValidInequalities(const Instance& inst, DbrpModel& dbrp, const std::vector<Family>& families) {
  const RoutingIndex& idx = dbrp.index;
  if (idx.horizon != inst.horizon || idx.assets != inst.asset_count() || idx.nodes != inst.graph.node_count()) {
    throw DimensionError("model was built for a different instance");
  }
  auto wants = [&](Family f) { return std::find(families.begin(), families.end(), f) != families.end(); };
  milp::Model& model = dbrp.model;
  const int horizon = idx.horizon;

  for (int a = 0; a < idx.assets; ++a) {
    const AssetSpec& asset = inst.assets[a];
    const std::vector<double> cum = PrefixConsumption(asset);
    auto visit = [&](int t) { return idx.Visit(asset.location[t], t); };

    if (wants(Family::kMinimumVisits)) {
      // Each visit delivers at most min(c_a, c_b); uncovered net demand is
      // either visited for or declared short.
      const double m = std::min(asset.tank_capacity, inst.bowser_capacity);
      for (int t = 0; t < horizon; ++t) {
        std::vector<Term> terms;
        for (int k = 0; k <= t; ++k) {
          terms.push_back({visit(k), 1.0});
          terms.push_back({dbrp.Shortage(a, k), 1.0 / m});
        }
        model.AddConstraint(fmt::format("vi1_{}_{}", a + 1, t + 1), std::move(terms), Sense::kGreaterEqual,
                            (cum[t + 1] - asset.initial_level) / m);
      }
    }
    if (wants(Family::kNoVisitNoDelivery)) {
      // No visit within a window means no delivery within it.
      const double big_m = cum[horizon];
      for (int i = 0; i < horizon; ++i) {
        for (int j = i; j < horizon; ++j) {
          std::vector<Term> terms;
          for (int k = i; k <= j; ++k) {
            terms.push_back({visit(k), big_m});
            terms.push_back({idx.Refuel(a, k), -1.0});
          }
          model.AddConstraint(fmt::format("vi2_{}_{}_{}", a + 1, i + 1, j + 1), std::move(terms),
                              Sense::kGreaterEqual, 0.0);
        }
      }
    }
    if (wants(Family::kLevelWithoutVisits)) {
      // Without visits in periods j..t, the level at t depends only on
      // deliveries before j.
      for (int t = 0; t < horizon; ++t) {
        const double big_m = cum[t + 1];
        for (int j = 0; j <= t; ++j) {
          std::vector<Term> terms;
          for (int k = 0; k < j; ++k) terms.push_back({idx.Refuel(a, k), 1.0});
          for (int k = 0; k <= t; ++k) terms.push_back({dbrp.Shortage(a, k), 1.0});
          for (int k = j; k <= t; ++k) terms.push_back({visit(k), big_m});
          model.AddConstraint(fmt::format("vi3_{}_{}_{}", a + 1, j + 1, t + 1), std::move(terms),
                              Sense::kGreaterEqual, cum[t + 1] - asset.initial_level);
        }
      }
    }
  }
}

Plan ExtractPlan(const RoutingIndex& idx, const milp::Solution& solution) {
  if (!solution.has_incumbent() || solution.values.empty()) {
    throw InvalidArgumentError("solution has no incumbent assignment (status " + milp::StatusName(solution.status) +
                               ")");
  }
  const auto& x = solution.values;
  // Quantities within solver tolerance of a whole liter are reported as that
  // liter; everything else is kept as computed.
  auto snap = [](double v) {
    const double r = std::round(v);
    return std::abs(v - r) < kSnap ? r : v;
  };
  Plan plan;
  plan.route.resize(idx.horizon);
  plan.refills.resize(idx.horizon);
  plan.refuels.assign(idx.assets, std::vector<double>(idx.horizon, 0.0));
  for (int t = 0; t < idx.horizon; ++t) {
    int where = -1;
    int count = 0;
    for (int i = 0; i < idx.nodes; ++i) {
      if (x.at(idx.Visit(i, t)) > 0.5) {
        where = i;
        ++count;
      }
    }
    if (count != 1) {
      throw IntegrityError(fmt::format("period {} has {} visited nodes in the solution", t + 1, count));
    }
    plan.route[t] = where;
    plan.refills[t] = snap(x.at(idx.Refill(t)));
    for (int a = 0; a < idx.assets; ++a) plan.refuels[a][t] = snap(x.at(idx.Refuel(a, t)));
  }
  return plan;
}

}  // namespace bowser::dbrp

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

#include <numeric>
#include <random>

#include <doctest.h>

#include "bowser/dbrp.hpp"
#include "bowser/errors.hpp"
#include "bowser/io.hpp"
#include "bowser/sim.hpp"
#include "property_suites.hpp"
#include "test_support.hpp"

using namespace bowser;
using namespace bowser::testing;

namespace {

// Fixes the integer and delivery decisions of `plan` in a built model.
void FixPlan(dbrp::DbrpModel& m, const Plan& plan) {
  const auto& idx = m.index;
  for (int t = 0; t < idx.horizon; ++t) {
    for (int i = 0; i < idx.nodes; ++i) {
      const double v = plan.route[t] == i ? 1.0 : 0.0;
      m.model.SetBounds(idx.Visit(i, t), v, v);
    }
    m.model.SetBounds(idx.Refill(t), plan.refills[t], plan.refills[t]);
    for (int a = 0; a < idx.assets; ++a) m.model.SetBounds(idx.Refuel(a, t), plan.refuels[a][t], plan.refuels[a][t]);
  }
}

double TotalConsumption(const AssetSpec& a) { return std::accumulate(a.consumption.begin(), a.consumption.end(), 0.0); }

}  // namespace

TEST_CASE("the deterministic model rejects stochastic instances") {
  CHECK_THROWS_AS(dbrp::BuildModel(WorkedExamplePoisson()), ModelKindError);
  CHECK_THROWS_AS(dbrp::BuildModel(WorkedExample(), dbrp::BuildOptions{true, {}}), InvalidArgumentError);
  CHECK(dbrp::ParseFamily("L2") == dbrp::Family::kNoVisitNoDelivery);
  CHECK(dbrp::FamilyTag(dbrp::Family::kLevelWithoutVisits) == "L3");
  CHECK_THROWS_AS(dbrp::ParseFamily("L4"), InvalidArgumentError);
}

TEST_CASE("model optimum equals the exhaustive optimum on tiny instances") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const Instance inst = TinyInstance(rng());
    CAPTURE(FormatInstance(inst));
    const double oracle = BruteForceOptimum(inst);
    const auto mp = dbrp::BuildModel(inst);
    const auto vi = dbrp::BuildModel(inst, dbrp::BuildOptions{true});
    const milp::Solution s_mp = milp::Solve(mp.model);
    const milp::Solution s_vi = milp::Solve(vi.model);
    REQUIRE(s_mp.status == milp::Status::kOptimal);
    REQUIRE(s_vi.status == milp::Status::kOptimal);
    CHECK(s_mp.objective == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(s_vi.objective == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(s_vi.stats.root_bound >= s_mp.stats.root_bound - 1e-6);

    // The extracted plan is feasible and its simulated cost is the optimum.
    const Plan plan = dbrp::ExtractPlan(mp.index, s_mp);
    CHECK(CheckPlanFeasibility(inst, plan).empty());
    CHECK(sim::EvaluatePlanDeterministic(inst, plan).total == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("valid inequalities keep plans that deliver at most total demand") {
  // Each family is checked on its own: a feasible plan whose deliveries to
  // each asset do not exceed its total consumption must stay feasible for
  // the strengthened model, with the same optimal completion cost.
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 3000 && checked < 300; ++trial) {
    const Instance inst = TinyInstance(rng());
    const Plan plan = RandomPlan(inst, rng);
    if (!CheckPlanFeasibility(inst, plan).empty()) continue;
    bool within = true;
    for (int a = 0; a < inst.asset_count(); ++a) {
      const double q = std::accumulate(plan.refuels[a].begin(), plan.refuels[a].end(), 0.0);
      within = within && q <= TotalConsumption(inst.assets[a]);
    }
    if (!within) continue;
    ++checked;
    auto base = dbrp::BuildModel(inst);
    FixPlan(base, plan);
    const milp::LpResult ref = milp::SolveLpRelaxation(base.model);
    REQUIRE(ref.status == milp::LpStatus::kOptimal);
    CHECK(ref.objective == doctest::Approx(sim::EvaluatePlanDeterministic(inst, plan).total));
    for (auto family : {dbrp::Family::kMinimumVisits, dbrp::Family::kNoVisitNoDelivery,
                        dbrp::Family::kLevelWithoutVisits}) {
      CAPTURE(dbrp::FamilyTag(family));
      auto strong = dbrp::BuildModel(inst, dbrp::BuildOptions{true, {family}});
      FixPlan(strong, plan);
      const milp::LpResult r = milp::SolveLpRelaxation(strong.model);
      REQUIRE(r.status == milp::LpStatus::kOptimal);
      CHECK(r.objective == doctest::Approx(ref.objective));
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("worked example: route, deliveries and cost are consistent") {
  const Instance inst = WorkedExample();
  const auto m = dbrp::BuildModel(inst, dbrp::BuildOptions{true});
  const milp::Solution s = milp::Solve(m.model);
  REQUIRE(s.status == milp::Status::kOptimal);
  const Plan plan = dbrp::ExtractPlan(m.index, s);
  CHECK(CheckPlanFeasibility(inst, plan).empty());
  const PlanEvaluation ev = sim::EvaluatePlanDeterministic(inst, plan);
  CHECK(ev.total == doctest::Approx(s.objective));
  CHECK(ev.travel_cost == doctest::Approx(RouteDistance(inst, plan.route)));
  // Forbidding shortage can only raise the optimum; the shortage-free plan
  // delivers every liter consumed.
  auto strict = dbrp::BuildModel(inst, dbrp::BuildOptions{true});
  for (int a = 0; a < inst.asset_count(); ++a) {
    for (int t = 0; t < inst.horizon; ++t) strict.model.SetBounds(strict.Shortage(a, t), 0.0, 0.0);
  }
  const milp::Solution no_short = milp::Solve(strict.model);
  REQUIRE(no_short.status == milp::Status::kOptimal);
  CHECK(no_short.objective >= s.objective - 1e-6);
  const PlanEvaluation ev2 = sim::EvaluatePlanDeterministic(inst, dbrp::ExtractPlan(strict.index, no_short));
  CHECK(ev2.shortage_cost == doctest::Approx(0.0));
  CHECK(ev2.total == doctest::Approx(no_short.objective));
}

TEST_CASE("plan extraction rejects malformed solutions") {
  const Instance inst = WorkedExample();
  const auto m = dbrp::BuildModel(inst);
  milp::Solution empty;
  CHECK_THROWS_AS(dbrp::ExtractPlan(m.index, empty), InvalidArgumentError);
  milp::Solution zeros;
  zeros.status = milp::Status::kOptimal;
  zeros.values.assign(m.model.num_variables(), 0.0);
  CHECK_THROWS_AS(dbrp::ExtractPlan(m.index, zeros), IntegrityError);
}

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

#include <cmath>
#include <numeric>

#include <doctest.h>

#include "bowser/errors.hpp"
#include "bowser/sim.hpp"
#include "test_support.hpp"

using namespace bowser;
using namespace bowser::testing;

namespace {

Plan IdlePlan(const Instance& inst) {
  Plan p;
  p.route.assign(inst.horizon, kCistern);
  p.refills.assign(inst.horizon, 0.0);
  p.refuels.assign(inst.asset_count(), std::vector<double>(inst.horizon, 0.0));
  return p;
}

}  // namespace

TEST_CASE("one asset period: refuel, consume, lose the rest") {
  auto s = sim::StepAsset(3.0, 4.0, 10.0, 5.0);
  CHECK(s.available == 7.0);
  CHECK(s.shortage == 0.0);
  CHECK(s.level == 2.0);
  s = sim::StepAsset(1.0, 2.0, 10.0, 5.0);
  CHECK(s.shortage == 2.0);
  CHECK(s.level == 0.0);
  s = sim::StepAsset(8.0, 5.0, 10.0, 1.0);  // capped at the tank
  CHECK(s.available == 10.0);
  CHECK(s.level == 9.0);
}

TEST_CASE("idle plan on the worked example charges every unmet liter") {
  const Instance inst = WorkedExample();
  const Plan idle = IdlePlan(inst);
  const PlanEvaluation ev = sim::EvaluatePlanDeterministic(inst, idle);
  CHECK(ev.travel_cost == 0.0);
  // Each asset starts with 10 liters; totals consumed are 29, 31 and 21.
  const double short_liters = (29 - 10) + (31 - 10) + (21 - 10);
  CHECK(ev.shortage_cost == doctest::Approx(100.0 * short_liters));
  CHECK(ev.total == doctest::Approx(ev.shortage_cost));
  // Asset 1 runs dry in period 3: 10 - 4 - 4 = 2 left, then consumes 2.
  CHECK(ev.shortages[0][2] == 0.0);
  CHECK(ev.shortages[0][3] == 1.0);
}

TEST_CASE("evaluation on a given path follows the event order by hand") {
  const Instance inst = WorkedExample();
  Plan p = IdlePlan(inst);
  // Asset 2 is at the cistern in period 2; give it 4 liters there.
  p.refuels[1][1] = 4.0;
  sim::ConsumptionPath path(3, std::vector<double>(10, 0.0));
  path[1] = {4, 8, 0, 0, 0, 0, 0, 0, 0, 0};
  const PlanEvaluation ev = sim::EvaluateOnPath(inst, p, path);
  // Period 1: 10 - 4 = 6. Period 2: 6 + 4 = 10 available, 8 consumed.
  CHECK(ev.shortages[1][1] == 0.0);
  CHECK(ev.total == 0.0);
  path[1][1] = 13.0;
  CHECK(sim::EvaluateOnPath(inst, p, path).shortages[1][1] == 3.0);
  CHECK(sim::EvaluateOnPath(inst, p, path).total == 300.0);
}

TEST_CASE("Student interval matches the tabulated quantile") {
  // Two values 0 and 2: mean 1, sd sqrt(2), se 1, t(0.975, 1) = 12.706.
  const sim::Interval i = sim::StudentInterval95({0.0, 2.0});
  CHECK(i.low == doctest::Approx(1.0 - 12.7062).epsilon(1e-4));
  CHECK(i.high == doctest::Approx(1.0 + 12.7062).epsilon(1e-4));
  // Ten values 1..10: mean 5.5, sd 3.02765, se 0.957427, t(0.975, 9) = 2.26216.
  std::vector<double> v(10);
  std::iota(v.begin(), v.end(), 1.0);
  const sim::Interval j = sim::StudentInterval95(v);
  CHECK(j.high - 5.5 == doctest::Approx(2.26216 * 0.957427).epsilon(1e-4));
  CHECK_THROWS_AS(sim::StudentInterval95({1.0}), InvalidArgumentError);
}

TEST_CASE("Monte Carlo on a deterministic instance has a zero-width interval") {
  const Instance inst = WorkedExample();
  const auto mc = sim::EvaluatePlanMonteCarlo(inst, IdlePlan(inst), 10, 3);
  CHECK(mc.mean == doctest::Approx(sim::EvaluatePlanDeterministic(inst, IdlePlan(inst)).total));
  CHECK(mc.interval.low == doctest::Approx(mc.mean));
  CHECK(mc.interval.high == doctest::Approx(mc.mean));
}

TEST_CASE("Monte Carlo mean of the idle plan matches the exact expectation") {
  // Idle plan on one asset: the exact expected shortage follows from the
  // lost-sales recursion over the level distribution.
  const Instance inst = TinyStochastic(4);
  const Plan idle = IdlePlan(inst);
  double exact = 0.0;
  for (const auto& asset : inst.assets) {
    std::vector<double> level(static_cast<int>(asset.tank_capacity) + 1, 0.0);
    level[static_cast<int>(asset.initial_level)] = 1.0;
    for (const auto& d : asset.consumption_dist) {
      std::vector<double> next(level.size(), 0.0);
      for (std::size_t y = 0; y < level.size(); ++y) {
        for (int k = 0; k <= d.max_support(); ++k) {
          const double p = level[y] * d.pmf(k);
          exact += p * inst.penalty * std::max<double>(k - static_cast<double>(y), 0.0);
          next[std::max<int>(static_cast<int>(y) - k, 0)] += p;
        }
      }
      level = next;
    }
  }
  const auto mc = sim::EvaluatePlanMonteCarlo(inst, idle, 20000, 99);
  CHECK(std::abs(mc.mean - exact) <= 4.0 * mc.std_error + 1e-9);
}

TEST_CASE("plans are checked before evaluation") {
  const Instance inst = WorkedExample();
  Plan p = IdlePlan(inst);
  p.route[1] = 2;
  CHECK_THROWS_AS(sim::EvaluatePlanDeterministic(inst, p), InvalidArgumentError);
  CHECK_THROWS_AS(sim::EvaluatePlanMonteCarlo(inst, p, 10, 1), InvalidArgumentError);
  CHECK_THROWS_AS(sim::EvaluatePlanMonteCarlo(inst, IdlePlan(inst), 0, 1), InvalidArgumentError);
  CHECK_THROWS_AS(sim::EvaluatePlanDeterministic(WorkedExamplePoisson(), IdlePlan(inst)), ModelKindError);
}

TEST_CASE("sampled consumption follows the distribution frequencies") {
  const Instance inst = WorkedExamplePoisson();
  std::vector<int> counts(40, 0);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) ++counts[static_cast<int>(sim::SampleConsumption(inst, 5, r)[0][0])];
  const DiscreteDist& d = inst.assets[0].consumption_dist[0];
  for (int k = 0; k <= 8; ++k) {
    const double se = std::sqrt(d.pmf(k) * (1 - d.pmf(k)) / reps);
    CHECK(std::abs(counts[k] / static_cast<double>(reps) - d.pmf(k)) <= 4.0 * se + 1e-12);
  }
}

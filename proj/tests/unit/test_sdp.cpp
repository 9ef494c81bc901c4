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
#include <random>

#include <doctest.h>

#include "bowser/dbrp.hpp"
#include "bowser/errors.hpp"
#include "bowser/io.hpp"
#include "bowser/sdp.hpp"
#include "bowser/sim.hpp"
#include "test_support.hpp"

using namespace bowser;
using namespace bowser::testing;

namespace {

TinyOptions Small() {
  TinyOptions o;
  o.max_nodes = 3;
  o.max_horizon = 3;
  o.max_bowser = 6;
  o.max_tank = 4;
  return o;
}

// Re-encodes known locations as one-hot pmfs.
Instance WithOneHotLocations(Instance inst) {
  for (auto& asset : inst.assets) {
    for (int node : asset.location) {
      std::vector<double> pmf(inst.graph.node_count(), 0.0);
      pmf[node] = 1.0;
      asset.location_pmf.push_back(pmf);
    }
    asset.location.clear();
  }
  return inst;
}

}  // namespace

TEST_CASE("deterministic dynamic program equals the exhaustive optimum and the MILP") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const Instance inst = TinyInstance(rng(), Small());
    CAPTURE(FormatInstance(inst));
    const double oracle = BruteForceOptimum(inst);
    const sdp::Result r = sdp::Solve(inst, sdp::Variant::kDeterministic);
    CHECK(r.expected_cost == doctest::Approx(oracle).epsilon(1e-9));
    const milp::Solution s = milp::Solve(dbrp::BuildModel(inst).model);
    REQUIRE(s.status == milp::Status::kOptimal);
    CHECK(r.expected_cost == doctest::Approx(s.objective).epsilon(1e-7));
  }
}

TEST_CASE("fuel variant equals exhaustive expectimax") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 25; ++trial) {
    TinyOptions o = Small();
    o.max_consumption = 2;
    const Instance inst = TinyStochastic(rng(), o);
    CAPTURE(FormatInstance(inst));
    const sdp::Result r = sdp::Solve(inst, sdp::Variant::kStochasticFuel);
    CHECK(r.expected_cost == doctest::Approx(BruteForceOptimum(inst)).epsilon(1e-9));
    CHECK(r.reachable_states > 0);
    CHECK(r.state_action_pairs >= r.reachable_states);
  }
}

TEST_CASE("location variant equals exhaustive expectimax over placements") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    TinyOptions o = Small();
    o.max_assets = 2;
    const Instance inst = TinyRandomLocations(rng(), o);
    CAPTURE(FormatInstance(inst));
    CHECK(ValidateInstance(inst).empty());
    const sdp::Result r = sdp::Solve(inst, sdp::Variant::kStochasticLocation);
    CHECK(r.expected_cost == doctest::Approx(BruteForceOptimum(inst)).epsilon(1e-9));
  }
}

TEST_CASE("one-hot location pmfs reproduce the fuel variant") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = TinyStochastic(rng(), Small());
    const double fuel = sdp::Solve(inst, sdp::Variant::kStochasticFuel).expected_cost;
    const double loc = sdp::Solve(WithOneHotLocations(inst), sdp::Variant::kStochasticLocation).expected_cost;
    CHECK(loc == doctest::Approx(fuel).epsilon(1e-9));
  }
}

TEST_CASE("simulating the optimal policy reproduces its value") {
  const Instance inst = TinyStochastic(1234, Small());
  const sdp::Result r = sdp::Solve(inst, sdp::Variant::kStochasticFuel);
  const sim::MonteCarloResult mc = sdp::SimulatePolicy(inst, r.policy, 4000, 7);
  REQUIRE(mc.has_interval);
  // Four standard errors around the mean keep this check stable.
  CHECK(std::abs(mc.mean - r.expected_cost) <= 4.0 * mc.std_error + 1e-9);
  // Same seed, different thread count: identical totals.
  CHECK(sdp::SimulatePolicy(inst, r.policy, 200, 7, 3).totals == sdp::SimulatePolicy(inst, r.policy, 200, 7, 1).totals);
}

TEST_CASE("deterministic policy simulation has zero variance") {
  const Instance inst = TinyInstance(8, Small());
  const sdp::Result r = sdp::Solve(inst, sdp::Variant::kDeterministic);
  const sim::MonteCarloResult mc = sdp::SimulatePolicy(inst, r.policy, 5, 1);
  CHECK(mc.mean == doctest::Approx(r.expected_cost));
  CHECK(mc.interval.high - mc.interval.low == doctest::Approx(0.0));
}

TEST_CASE("policy lookup, formatting and errors") {
  const Instance inst = TinyInstance(10, Small());
  const sdp::Result r = sdp::Solve(inst, sdp::Variant::kDeterministic);
  CHECK(r.policy.horizon() == inst.horizon);
  CHECK(r.policy.size() == r.reachable_states);
  sdp::State s0;
  s0.period = 0;
  s0.bowser_level = static_cast<int>(inst.bowser_initial);
  s0.bowser_node = inst.bowser_start;
  for (const auto& a : inst.assets) s0.asset_levels.push_back(static_cast<int>(a.initial_level));
  const auto e = r.policy.Lookup(s0);
  REQUIRE(e.has_value());
  CHECK(e->value == doctest::Approx(r.expected_cost));
  CHECK(inst.graph.HasTransit(s0.bowser_node, e->action.next_node));
  const std::string text = sdp::FormatPolicy(r.policy);
  CHECK(text.rfind("# period", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == r.policy.size() + 1);

  CHECK_THROWS_AS(sdp::Solve(WorkedExamplePoisson(), sdp::Variant::kDeterministic), ModelKindError);
  CHECK_THROWS_AS(sdp::Solve(inst, sdp::Variant::kStochasticLocation), ModelKindError);
  CHECK_THROWS_AS(sdp::Solve(WorkedExample(), sdp::Variant::kDeterministic, sdp::Options{1e3}), BudgetExceededError);
  Instance fractional = inst;
  fractional.assets[0].tank_capacity += 0.5;
  CHECK_THROWS_AS(sdp::Solve(fractional, sdp::Variant::kDeterministic), InvalidArgumentError);
  CHECK(sdp::ParseVariant("fuel") == sdp::Variant::kStochasticFuel);
  CHECK(sdp::VariantName(sdp::Variant::kStochasticLocation) == "location");
  CHECK_THROWS_AS(sdp::ParseVariant("nope"), InvalidArgumentError);
}

TEST_CASE("reduced action sets keep the optimum on tiny instances") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 15; ++trial) {
    const Instance inst = TinyStochastic(rng(), Small());
    sdp::Options reduced;
    reduced.reduced_actions = true;
    const double full = sdp::Solve(inst, sdp::Variant::kStochasticFuel).expected_cost;
    const double fast = sdp::Solve(inst, sdp::Variant::kStochasticFuel, reduced).expected_cost;
    // Restricting actions can only raise the cost.
    CHECK(fast >= full - 1e-9);
  }
}

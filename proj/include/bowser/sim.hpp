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

// Lost-sales evaluation of fixed plans. Within a period the order of events
// is: bowser refill at the cistern, refuelling of co-located assets,
// consumption, shortage penalty, move. Unmet demand is lost, never carried.
//
// Monte Carlo draws use common random numbers: the consumption of asset a
// in period t of replication r is a pure function of (seed, r, a, t), so
// two plans evaluated with the same seed see identical consumption paths,
// independent of thread count or evaluation order.

#ifndef BOWSER_SIM_HPP_
#define BOWSER_SIM_HPP_

#include <cstdint>
#include <vector>

#include "bowser/core.hpp"

namespace bowser::sim {

// Consumption matrix [asset][period].
using ConsumptionPath = std::vector<std::vector<double>>;

struct AssetStep {
  double available = 0.0;  // fuel in the tank after refuelling
  double shortage = 0.0;   // unmet consumption (lost)
  double level = 0.0;      // fuel carried into the next period
};

// One period of one asset: refuel (capped at the tank), consume, lose the
// unmet part.
AssetStep StepAsset(double level, double refuel, double capacity, double consumption);

// Consumption of replication `replication` drawn from the instance's
// distributions by inverse transform of keyed uniforms. Deterministic
// consumption is returned as is.
ConsumptionPath SampleConsumption(const Instance& inst, std::uint64_t seed, std::uint64_t replication);

// Lost-sales cost of `plan` on a given consumption path. The plan is not
// checked for feasibility.
PlanEvaluation EvaluateOnPath(const Instance& inst, const Plan& plan, const ConsumptionPath& path);

// Exact evaluation on a deterministic instance. Throws ModelKindError for
// stochastic consumption and InvalidArgumentError for infeasible plans.
PlanEvaluation EvaluatePlanDeterministic(const Instance& inst, const Plan& plan);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Student-t 95% interval for the mean of `values`; requires >= 2 values.
Interval StudentInterval95(const std::vector<double>& values);

struct MonteCarloResult {
  long replications = 0;
  double mean = 0.0;
  double std_error = 0.0;
  bool has_interval = false;  // false when replications < 2
  Interval interval;
  double mean_travel = 0.0;
  double mean_shortage = 0.0;  // liters per replication
  std::vector<double> totals;  // per replication, in replication order
};

// Mean and 95% Student interval of the plan's cost over `replications`
// common-random-number paths. Replications are spread over `jobs` threads;
// the reduction is in replication order so results do not depend on jobs.
// Throws InvalidArgumentError for infeasible plans or replications < 1.
MonteCarloResult EvaluatePlanMonteCarlo(const Instance& inst, const Plan& plan, long replications,
                                        std::uint64_t seed, int jobs = 1);

// Summary statistics of per-replication totals.
MonteCarloResult Summarize(std::vector<double> totals);

}  // namespace bowser::sim

#endif  // BOWSER_SIM_HPP_

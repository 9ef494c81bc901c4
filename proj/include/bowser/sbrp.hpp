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

// Stochastic-consumption bowser routing MILP. The routing core is shared
// with the deterministic model; the asset fuel balance is replaced by
// recourse variables bounded below by piecewise linear approximations of the
// expected shortage and surplus of the cumulative consumption, and by spill
// variables for deliveries that overflow the tank.
//
// Per asset a and period t the model carries
//   Im[a][t] >= expected lost demand in period t (penalized),
//   Ip[a][t] >= expected fuel left at the end of period t,
//   E[a][t]  >= Ip[a][t-1] + Q[a][t] - c_a and E[a][t] >= 0 (spill),
// with the loss arguments taken at
//   X[a][t] = s_a + sum_{k<=t} Q[a][k] + sum_{k<t} Im[a][k] - sum_{k<=t} E[a][k],
// so that earlier expected lost sales are credited back to the stock. The
// max-type definitions are epigraph inequalities; minimization makes the
// shortage rows bind and the surplus rows are pushed down through the spill.

#ifndef BOWSER_SBRP_HPP_
#define BOWSER_SBRP_HPP_

#include <cstdint>
#include <vector>

#include "bowser/core.hpp"
#include "bowser/dbrp.hpp"
#include "bowser/errors.hpp"
#include "bowser/milp.hpp"

namespace bowser::sbrp {

struct BuildOptions {
  int segments = 8;  // linearization partitions per cumulative distribution
  // Shared routing options; valid-inequality families are deterministic
  // constructs and are not added to the stochastic model.
  dbrp::BuildOptions deterministic;
};

struct SbrpModel {
  milp::Model model;
  dbrp::RoutingIndex index;
  std::vector<int> shortage;  // Im, [a * horizon + t]
  std::vector<int> surplus;   // Ip, [a * horizon + t]
  std::vector<int> spill;     // E,  [a * horizon + t]

  int Shortage(int a, int t) const { return shortage[static_cast<std::size_t>(a) * index.horizon + t]; }
  int Surplus(int a, int t) const { return surplus[static_cast<std::size_t>(a) * index.horizon + t]; }
  int Spill(int a, int t) const { return spill[static_cast<std::size_t>(a) * index.horizon + t]; }
};

// Builds the stochastic model. Throws ModelKindError for deterministic
// consumption or stochastic locations, InvalidArgumentError for invalid
// instances or segments < 1.
SbrpModel BuildModel(const Instance& inst, const BuildOptions& options = {});

struct HereAndNow {
  Plan plan;
  milp::Solution solution;
  double routing_cost = 0.0;        // travel along the extracted route
  double expected_shortage = 0.0;   // predicted liters short, summed
  double predicted_total = 0.0;     // model objective
};

// Builds, solves and extracts the here-and-now plan. Throws
// InvalidArgumentError when the solve ends without an incumbent.
HereAndNow SolveHereAndNow(const Instance& inst, const BuildOptions& options = {},
                           const milp::SolveOptions& solve = {});

struct RecedingHorizonResult {
  Plan plan;                              // implemented decisions
  PlanEvaluation realized;                // realized travel and shortage cost
  std::vector<double> stage_objectives;   // model objective at each stage
  long nodes = 0;                         // branch-and-bound nodes, all stages
};

// Thrown when a stage solve ends without a proven optimum. Carries the
// decisions implemented before the failing stage.
class RecedingHorizonTimeout : public Error {
 public:
  RecedingHorizonTimeout(int stage, Plan partial);
  int stage() const { return stage_; }  // 1-based stage that failed
  const Plan& partial_plan() const { return partial_; }

 private:
  int stage_;
  Plan partial_;
};

// Re-plans at every period over the remaining horizon, implements only the
// current period's refill, refuels and next move, then observes the
// realized consumption scenario[a][t]. Asset levels follow lost-sales
// dynamics (floored at zero).
RecedingHorizonResult RunRecedingHorizon(const Instance& inst, const std::vector<std::vector<double>>& scenario,
                                         const BuildOptions& options = {},
                                         const milp::SolveOptions& solve = {});

}  // namespace bowser::sbrp

#endif  // BOWSER_SBRP_HPP_

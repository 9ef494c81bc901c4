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

// Deterministic bowser routing MILP: model construction, the three
// valid-inequality families, and conversion of solutions back into plans.
//
// The routing core (visit and transit binaries, bowser refills, asset
// refuels, bowser inventory, movement channeling and co-location rows) is
// shared with the stochastic model in module sbrp through
// BuildRoutingCore().

#ifndef BOWSER_DBRP_HPP_
#define BOWSER_DBRP_HPP_

#include <string>
#include <utility>
#include <vector>

#include "bowser/core.hpp"
#include "bowser/milp.hpp"

namespace bowser::dbrp {

enum class Family { kMinimumVisits, kNoVisitNoDelivery, kLevelWithoutVisits };

// Short family tags used on the command line and in reports: L1, L2, L3.
std::string FamilyTag(Family f);
Family ParseFamily(const std::string& tag);

struct BuildOptions {
  bool with_valid_inequalities = false;
  std::vector<Family> families = {Family::kMinimumVisits, Family::kNoVisitNoDelivery,
                                  Family::kLevelWithoutVisits};
};

// Variable indices of the routing core. Periods and nodes are 0-based.
struct RoutingIndex {
  int nodes = 0;
  int horizon = 0;
  int assets = 0;
  std::vector<std::pair<int, int>> transit_arcs;  // explicit arcs and self-loops, sorted
  std::vector<int> visit;                         // [t * nodes + i]
  std::vector<int> transit;                       // [t * arcs + k], t < horizon - 1
  std::vector<int> refuel;                        // [a * horizon + t]
  std::vector<int> refill;                        // [t]

  int Visit(int i, int t) const { return visit[static_cast<std::size_t>(t) * nodes + i]; }
  int Transit(int k, int t) const { return transit[static_cast<std::size_t>(t) * transit_arcs.size() + k]; }
  int Refuel(int a, int t) const { return refuel[static_cast<std::size_t>(a) * horizon + t]; }
  int Refill(int t) const { return refill[t]; }
};

struct DbrpModel {
  milp::Model model;
  RoutingIndex index;
  std::vector<int> shortage;  // [a * horizon + t]

  int Shortage(int a, int t) const { return shortage[static_cast<std::size_t>(a) * index.horizon + t]; }
};

// Adds the routing core to `model` and returns its variable indices. Asset
// locations must be deterministic. Transit costs enter the objective.
RoutingIndex BuildRoutingCore(const Instance& inst, milp::Model& model);

// Builds the deterministic model. Throws ModelKindError for stochastic
// consumption or locations, InvalidArgumentError for invalid instances or
// an empty family list with inequalities requested.
DbrpModel BuildModel(const Instance& inst, const BuildOptions& options = {});

// Appends the requested valid-inequality families to a model built by
// BuildModel on the same instance.
void AddValidInequalities(const Instance& inst, DbrpModel& dbrp, const std::vector<Family>& families);

// Route, refills and refuels from a solution of a model built on `index`.
// Values within 1e-6 of a whole number are snapped to it. Throws
// IntegrityError when a period does not have exactly one visited node and
// InvalidArgumentError when the solution carries no assignment.
Plan ExtractPlan(const RoutingIndex& index, const milp::Solution& solution);

}  // namespace bowser::dbrp

#endif  // BOWSER_DBRP_HPP_

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

// Shared domain model: site graph, assets, instances, plans and plan
// evaluations. Nodes are 0-based internally and node 0 is the cistern; all
// text formats use 1-based labels.

#ifndef BOWSER_CORE_HPP_
#define BOWSER_CORE_HPP_

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bowser/distribution.hpp"

namespace bowser {

inline constexpr int kCistern = 0;

struct Arc {
  int from = 0;
  int to = 0;
  double distance = 0.0;
};

// Directed site graph with implicit zero-length self-loops.
class SiteGraph {
 public:
  SiteGraph() = default;
  explicit SiteGraph(int node_count);

  int node_count() const { return node_count_; }

  // Adds an explicit arc. Throws InvalidArgumentError on self-loops, unknown
  // nodes, duplicates or non-positive distances.
  void AddArc(int from, int to, double distance);

  // True for explicit arcs and for every self-loop.
  bool HasTransit(int from, int to) const;
  // Distance of an allowed transit (0 for self-loops); NaN when forbidden.
  double Distance(int from, int to) const;

  // Explicit arcs in (from, to) lexicographic order.
  std::vector<Arc> Arcs() const;
  // Allowed successors of `from` (explicit arcs plus the self-loop), sorted.
  const std::vector<int>& Successors(int from) const { return successors_[from]; }

  // Every node reachable from the cistern and able to reach it.
  bool IsStronglyConnected() const;
  // Nodes that cannot be reached from the cistern or cannot reach it.
  std::vector<int> DisconnectedNodes() const;

 private:
  int node_count_ = 0;
  std::vector<double> distance_;  // row-major, NaN = no explicit arc
  std::vector<std::vector<int>> successors_;
};

struct AssetSpec {
  std::string label;
  double tank_capacity = 0.0;
  double initial_level = 0.0;
  // Exactly one of the two location encodings is populated.
  std::vector<int> location;                        // per period
  std::vector<std::vector<double>> location_pmf;    // per period, over nodes
  // Exactly one of the two consumption encodings is populated.
  std::vector<double> consumption;                  // per period, liters
  std::vector<DiscreteDist> consumption_dist;       // per period

  bool has_deterministic_location() const { return !location.empty(); }
  bool has_deterministic_consumption() const { return !consumption.empty(); }
};

struct Instance {
  std::string name;
  int horizon = 0;
  SiteGraph graph;
  std::vector<AssetSpec> assets;
  double bowser_capacity = 0.0;
  double bowser_initial = 0.0;
  double penalty = 0.0;
  // Node occupied by the bowser in the first period.
  int bowser_start = kCistern;
  // Node the bowser must occupy in the last period, if constrained.
  std::optional<int> bowser_end;

  int asset_count() const { return static_cast<int>(assets.size()); }
  bool is_deterministic() const;             // all consumption deterministic
  bool has_deterministic_locations() const;  // all locations deterministic
};

struct Plan {
  std::vector<int> route;                  // node per period
  std::vector<double> refills;             // B_t
  std::vector<std::vector<double>> refuels;  // Q[a][t]
};

struct PlanEvaluation {
  double travel_cost = 0.0;
  double shortage_cost = 0.0;
  double total = 0.0;
  std::vector<std::vector<double>> shortages;  // [a][t]
};

// Violations of the instance invariants; empty iff the instance is valid.
std::vector<std::string> ValidateInstance(const Instance& inst);

// Violations of the plan invariants against `inst`; empty iff feasible.
// Throws DimensionError when the plan arrays do not match (A, T).
std::vector<std::string> CheckPlanFeasibility(const Instance& inst, const Plan& plan);

// Travel distance along the route (sum of transit distances).
double RouteDistance(const Instance& inst, const std::vector<int>& route);

// Total deterministic consumption of an asset over periods [0, t].
double CumulativeConsumption(const AssetSpec& asset, int t);

// Per-period mean consumption (point values for deterministic assets).
std::vector<double> MeanConsumption(const AssetSpec& asset);

// Per-period consumption distributions; deterministic integral values
// become point masses. Throws InvalidArgumentError for fractional values.
std::vector<DiscreteDist> ConsumptionDistributions(const AssetSpec& asset);

// Copy of a deterministic instance whose consumption values are re-encoded
// as point-mass distributions (requires integral consumption).
Instance WithPointMassConsumption(const Instance& inst);

inline constexpr double kPlanTolerance = 1e-6;

}  // namespace bowser

#endif  // BOWSER_CORE_HPP_

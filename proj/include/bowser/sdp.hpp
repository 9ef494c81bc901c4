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

// Exact finite-horizon stochastic dynamic program for bowser routing on
// integer fuel grids. A state is (period, bowser level, bowser node, asset
// levels, asset nodes); an action is (bowser refill, next bowser node, asset
// refuels). The immediate cost is the travel distance of the move plus the
// expected shortage penalty of the period; the terminal value is zero.
//
// The reachable state space is built by a forward pass from the initial
// state, then values are computed by backward recursion. Expectations are
// taken through post-decision states (bowser level, next node, asset levels
// after refuelling), which are shared by many actions.

#ifndef BOWSER_SDP_HPP_
#define BOWSER_SDP_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bowser/core.hpp"
#include "bowser/sim.hpp"

namespace bowser::sdp {

// kStochasticFuel: random consumption, known asset locations.
// kStochasticLocation: asset locations drawn independently per asset and
//   period from their pmfs, revealed at the start of the period.
// kDeterministic: known consumption and locations.
enum class Variant { kStochasticFuel, kStochasticLocation, kDeterministic };

std::string VariantName(Variant v);  // "fuel", "location", "deterministic"
Variant ParseVariant(const std::string& name);

struct State {
  int period = 0;  // 0-based
  int bowser_level = 0;
  int bowser_node = 0;
  std::vector<int> asset_levels;
  std::vector<int> asset_nodes;
};

struct Action {
  int bowser_refill = 0;
  int next_node = 0;
  std::vector<int> refuels;

  bool operator==(const Action& other) const = default;
};

struct Options {
  // Largest number of state-action pairs the solver may enumerate.
  double budget = 5e7;
  // Enumerate only dominant refuel amounts (fill the tank, cover the
  // remaining demand bound, empty the bowser) instead of every integer.
  bool reduced_actions = false;
  int jobs = 1;
};

class Policy {
 public:
  struct Entry {
    Action action;
    double value = 0.0;  // expected cost-to-go including the period's cost
  };

  Policy();
  ~Policy();
  Policy(const Policy&);
  Policy& operator=(const Policy&);
  Policy(Policy&&) noexcept;
  Policy& operator=(Policy&&) noexcept;

  int horizon() const;
  bool stochastic_locations() const;
  // Number of states with an entry, over all periods.
  long long size() const;
  // Optimal decision for a state; nullopt for unreached states. Asset nodes
  // are ignored when locations are known in advance.
  std::optional<Entry> Lookup(const State& s) const;
  // All entries of a period, in state order.
  std::vector<std::pair<State, Entry>> Entries(int period) const;

  struct Impl;

 private:
  explicit Policy(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
  friend class Solver;
};

struct Result {
  Variant variant = Variant::kStochasticFuel;
  double expected_cost = 0.0;  // optimal value from the initial state
  Policy policy;
  long long reachable_states = 0;
  long long state_action_pairs = 0;
  double wall_seconds = 0.0;
};

// Solves the dynamic program. Throws ModelKindError when the instance does
// not match the variant, InvalidArgumentError for non-integral capacities,
// levels or consumption, or when the end node cannot be reached, and
// BudgetExceededError when the state space exceeds options.budget.
Result Solve(const Instance& inst, Variant variant, const Options& options = {});

// Text table of the policy: one line per state with its action and value.
std::string FormatPolicy(const Policy& policy);

// Monte Carlo cost of following the policy. Consumption paths are the same
// common-random-number paths used by plan evaluation; asset locations are
// drawn from their own keyed stream. Throws IntegrityError when a visited
// state has no policy entry.
sim::MonteCarloResult SimulatePolicy(const Instance& inst, const Policy& policy, long replications,
                                     std::uint64_t seed, int jobs = 1);

}  // namespace bowser::sdp

#endif  // BOWSER_SDP_HPP_

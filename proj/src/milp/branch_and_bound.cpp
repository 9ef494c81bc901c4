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

// LP-based branch and bound with a single warm-started simplex engine.
//
// Nodes store the binary fixings along their path. Processing a node
// resets the binary bounds to the node's fixings and re-optimizes from the
// previous basis; only binary bounds ever change, so the basis stays dual
// feasible up to bound flips and the dual simplex applies.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/milp.hpp"
#include "simplex.hpp"

namespace bowser::milp {
namespace {

using internal::LpOutcome;
using internal::SimplexEngine;
using Clock = std::chrono::steady_clock;

constexpr double kIntegralityTol = 1e-6;
constexpr double kFeasibilityTol = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  double bound = 0.0;
  int depth = 0;
  long id = 0;
  std::vector<std::pair<int, signed char>> fixings;  // (binary var, value)
};

struct NodeOrder {
  // Priority queue pops the "largest" element: lowest bound first, then the
  // deeper node, then the earlier-created node.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

void ValidateOrThrow(const Model& model) {
  const auto violations = model.Validate();
  if (!violations.empty()) throw InvalidArgumentError("invalid model: " + violations.front());
}

double GapOf(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInf;
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

class BranchAndBound {
 public:
  BranchAndBound(const Model& model, const SolveOptions& options)
      : model_(model), options_(options), engine_(model), start_(Clock::now()) {
    deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(std::max(0.0, options.time_limit_seconds)));
    engine_.set_deadline(deadline_);
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variable(j).kind == VarKind::kBinary) binaries_.push_back(j);
    }
    applied_.assign(model.num_variables(), -1);
  }

  Solution Run() {
    Solution out;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{-kInf, 0, next_id_++, {}});
    bool timed_out = false;
    bool root = true;
    double open_bound = kInf;

    while (!open.empty()) {
      if (Clock::now() > deadline_ || (options_.node_limit >= 0 && nodes_ >= options_.node_limit)) {
        timed_out = true;
        break;
      }
      // Stop when the best open bound proves the incumbent within tolerance.
      if (std::isfinite(incumbent_) && GapOf(incumbent_, open.top().bound) <= options_.gap_tolerance) break;

      Node node = open.top();
      open.pop();
      if (std::isfinite(incumbent_) && Prunable(node.bound)) continue;

      ApplyFixings(node);
      const LpOutcome outcome = engine_.Optimize();
      ++nodes_;
      if (outcome == LpOutcome::kTimeLimit) {
        open.push(node);
        timed_out = true;
        break;
      }
      if (outcome == LpOutcome::kUnbounded) {
        throw UnboundedError("LP relaxation is unbounded");
      }
      if (outcome == LpOutcome::kInfeasible) {
        if (root) root_bound_ = kInf;
        root = false;
        continue;
      }
      const double bound = std::max(engine_.Objective(), node.bound);
      if (root) {
        root_bound_ = bound;
        root = false;
      }
      if (std::isfinite(incumbent_) && Prunable(bound)) continue;

      const std::vector<double> x = engine_.StructuralValues();
      const int branch_var = MostFractional(x);
      if (branch_var < 0) {
        TryIncumbent(x);
        continue;
      }
      const int depth = node.depth + 1;
      for (signed char value : {static_cast<signed char>(0), static_cast<signed char>(1)}) {
        Node child{bound, depth, next_id_++, node.fixings};
        child.fixings.emplace_back(branch_var, value);
        open.push(std::move(child));
      }
    }

    open_bound = open.empty() ? kInf : open.top().bound;
    out.stats.nodes = nodes_;
    out.stats.simplex_iterations = engine_.iterations();
    out.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    out.stats.root_bound = root_bound_;

    if (std::isfinite(incumbent_)) {
      out.objective = incumbent_;
      out.values = incumbent_values_;
      out.best_bound = std::min(incumbent_, open_bound);
      out.gap = GapOf(incumbent_, out.best_bound);
      out.status = (out.gap <= options_.gap_tolerance) ? Status::kOptimal : Status::kFeasibleGap;
      if (!timed_out && open.empty()) out.status = Status::kOptimal;
    } else {
      out.status = timed_out ? Status::kTimeLimitNoIncumbent : Status::kInfeasible;
      out.best_bound = timed_out ? open_bound : kInf;
      out.gap = kInf;
    }
    return out;
  }

 private:
  bool Prunable(double bound) const {
    return bound >= incumbent_ - options_.gap_tolerance * std::max(1.0, std::abs(incumbent_));
  }

  void ApplyFixings(const Node& node) {
    std::vector<signed char> wanted(model_.num_variables(), -1);
    for (const auto& [var, value] : node.fixings) wanted[var] = value;
    for (int j : binaries_) {
      if (wanted[j] == applied_[j]) continue;
      const Variable& v = model_.variable(j);
      if (wanted[j] < 0) {
        engine_.SetBounds(j, v.lower, v.upper);
      } else {
        const double value = wanted[j];
        engine_.SetBounds(j, std::max(v.lower, value), std::min(v.upper, value));
      }
      applied_[j] = wanted[j];
    }
  }

  int MostFractional(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = kIntegralityTol;
    for (int j : binaries_) {
      const double frac = std::min(x[j] - std::floor(x[j]), std::ceil(x[j]) - x[j]);
      if (frac > best_frac) {
        best_frac = frac;
        best = j;
      }
    }
    return best;
  }

  void TryIncumbent(std::vector<double> x) {
    for (int j : binaries_) x[j] = std::round(x[j]);
    if (model_.MaxViolation(x) > kFeasibilityTol) {
      // Re-solve the continuous part with the rounded binaries fixed.
      for (int j : binaries_) {
        engine_.SetBounds(j, x[j], x[j]);
        applied_[j] = static_cast<signed char>(x[j]);
      }
      if (engine_.Optimize() != LpOutcome::kOptimal) return;
      x = engine_.StructuralValues();
      for (int j : binaries_) x[j] = std::round(x[j]);
      if (model_.MaxViolation(x) > kFeasibilityTol) return;
    }
    const double value = model_.Evaluate(x);
    if (value < incumbent_) {
      incumbent_ = value;
      incumbent_values_ = std::move(x);
    }
  }

  const Model& model_;
  SolveOptions options_;
  SimplexEngine engine_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  std::vector<int> binaries_;
  std::vector<signed char> applied_;
  long nodes_ = 0;
  long next_id_ = 0;
  double incumbent_ = kInf;
  std::vector<double> incumbent_values_;
  double root_bound_ = -kInf;
};

}  // namespace

Solution Solve(const Model& model, const SolveOptions& options) {
  ValidateOrThrow(model);
  BranchAndBound bnb(model, options);
  return bnb.Run();
}

LpResult SolveLpRelaxation(const Model& model) {
  ValidateOrThrow(model);
  SimplexEngine engine(model);
  LpResult result;
  const LpOutcome outcome = engine.Optimize();
  if (outcome == LpOutcome::kUnbounded) throw UnboundedError("LP relaxation is unbounded");
  result.iterations = engine.iterations();
  if (outcome == LpOutcome::kInfeasible) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  result.status = LpStatus::kOptimal;
  result.objective = engine.Objective();
  result.values = engine.StructuralValues();
  return result;
}

}  // namespace bowser::milp

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

// Solver-independent linear model, an exact LP-based branch-and-bound
// solver for desk-scale models, and fixed-column MPS import/export.

#ifndef BOWSER_MILP_HPP_
#define BOWSER_MILP_HPP_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bowser::milp {

enum class VarKind { kContinuous, kBinary };
enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarKind kind = VarKind::kContinuous;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// Minimization model. Objective terms live on the variables.
class Model {
 public:
  int AddVariable(std::string name, double lower, double upper, VarKind kind, double objective = 0.0);
  int AddConstraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  void SetObjective(int var, double coef) { objective_.at(var) = coef; }
  void SetBounds(int var, double lower, double upper);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const Variable& variable(int j) const { return variables_.at(j); }
  const Constraint& constraint(int i) const { return constraints_.at(i); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<double>& objective() const { return objective_; }

  // Index of a named variable, or -1.
  int FindVariable(const std::string& name) const;

  // Violated model invariants (binary bounds, dangling references, names).
  std::vector<std::string> Validate() const;

  // Objective value of an assignment.
  double Evaluate(const std::vector<double>& x) const;

  // Largest bound or row violation of an assignment (absolute).
  double MaxViolation(const std::vector<double>& x) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
  std::unordered_map<std::string, int> var_index_;
};

enum class Status { kOptimal, kFeasibleGap, kInfeasible, kTimeLimitNoIncumbent };
std::string StatusName(Status s);

struct SolveStats {
  long nodes = 0;
  long simplex_iterations = 0;
  double wall_seconds = 0.0;
  double root_bound = 0.0;
};

struct Solution {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
  double best_bound = 0.0;
  double gap = 0.0;
  SolveStats stats;

  bool has_incumbent() const { return status == Status::kOptimal || status == Status::kFeasibleGap; }
};

struct SolveOptions {
  double time_limit_seconds = 600.0;
  double gap_tolerance = 1e-6;  // relative
  long node_limit = -1;         // -1 = unlimited
};

// Exact branch and bound: most-fractional branching (lowest index on ties),
// best-bound node selection (deeper node on ties).
Solution Solve(const Model& model, const SolveOptions& options = {});

enum class LpStatus { kOptimal, kInfeasible };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
  long iterations = 0;
};

// Continuous relaxation (binaries relaxed to [0,1]).
LpResult SolveLpRelaxation(const Model& model);

// Fixed-column MPS document. Names wider than eight characters are
// shortened to their first four characters plus a four-character base-36
// digest; a comment block maps short names back to the originals.
std::string ExportMps(const Model& model, const std::string& name = "BOWSER");
Model ParseMps(std::string_view text);

// "name value" lines for every variable.
std::string FormatSolution(const Model& model, const Solution& solution);

}  // namespace bowser::milp

#endif  // BOWSER_MILP_HPP_

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

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/milp.hpp"

namespace bowser::milp {

int Model::AddVariable(std::string name, double lower, double upper, VarKind kind, double objective) {
  const int index = num_variables();
  if (!var_index_.emplace(name, index).second) {
    throw InvalidArgumentError("duplicate variable name: " + name);
  }
  variables_.push_back({std::move(name), lower, upper, kind});
  objective_.push_back(objective);
  return index;
}

int Model::AddConstraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw InvalidArgumentError(fmt::format("constraint {} references unknown variable {}", name, t.var));
    }
  }
  constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
  return num_constraints() - 1;
}

void Model::SetBounds(int var, double lower, double upper) {
  variables_.at(var).lower = lower;
  variables_.at(var).upper = upper;
}

int Model::FindVariable(const std::string& name) const {
  const auto it = var_index_.find(name);
  return it == var_index_.end() ? -1 : it->second;
}

std::vector<std::string> Model::Validate() const {
  std::vector<std::string> v;
  for (const auto& var : variables_) {
    if (std::isnan(var.lower) || std::isnan(var.upper)) v.push_back("variable " + var.name + ": NaN bound");
    if (var.kind == VarKind::kBinary && (var.lower < 0.0 || var.upper > 1.0)) {
      v.push_back("variable " + var.name + ": binary bounds must lie within [0, 1]");
    }
  }
  std::unordered_set<std::string> names;
  for (const auto& c : constraints_) {
    if (!names.insert(c.name).second) v.push_back("constraint " + c.name + ": duplicate name");
    for (const auto& t : c.terms) {
      if (t.var < 0 || t.var >= num_variables()) v.push_back("constraint " + c.name + ": dangling variable reference");
      if (!std::isfinite(t.coef)) v.push_back("constraint " + c.name + ": non-finite coefficient");
    }
    if (!std::isfinite(c.rhs)) v.push_back("constraint " + c.name + ": non-finite right-hand side");
  }
  return v;
}

double Model::Evaluate(const std::vector<double>& x) const {
  double z = 0.0;
  for (int j = 0; j < num_variables(); ++j) z += objective_[j] * x[j];
  return z;
}

double Model::MaxViolation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, variables_[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables_[j].upper);
  }
  for (const auto& c : constraints_) {
    double act = 0.0;
    for (const auto& t : c.terms) act += t.coef * x[t.var];
    switch (c.sense) {
      case Sense::kLessEqual:
        worst = std::max(worst, act - c.rhs);
        break;
      case Sense::kGreaterEqual:
        worst = std::max(worst, c.rhs - act);
        break;
      case Sense::kEqual:
        worst = std::max(worst, std::abs(act - c.rhs));
        break;
    }
  }
  return worst;
}

std::string StatusName(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kFeasibleGap:
      return "feasible_gap";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kTimeLimitNoIncumbent:
      return "time_limit_no_incumbent";
  }
  return "unknown";
}

std::string FormatSolution(const Model& model, const Solution& solution) {
  std::string out = fmt::format("# status {}\n# objective {}\n", StatusName(solution.status), solution.objective);
  for (int j = 0; j < model.num_variables() && j < static_cast<int>(solution.values.size()); ++j) {
    out += fmt::format("{} {}\n", model.variable(j).name, solution.values[j]);
  }
  return out;
}

}  // namespace bowser::milp

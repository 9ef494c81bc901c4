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

// Bounded-variable simplex engine on a dense condensed tableau.
//
// The model A x (sense) b is rewritten with one logical variable per row,
// r_i = a_i x, whose bounds encode the row sense. The engine keeps the
// tableau T = B^{-1} N of the current basis so that x_B = -T x_N and the
// objective equals d^T x_N, where the reduced costs d are stored as an extra
// tableau row. A pivot is a Jordan exchange; its inner loop is the SIMD
// axpy kernel. Both a two-phase primal simplex and a dual simplex are
// provided; the branch-and-bound driver re-optimizes child nodes with the
// dual method after tightening binary bounds.

#ifndef BOWSER_SRC_MILP_SIMPLEX_HPP_
#define BOWSER_SRC_MILP_SIMPLEX_HPP_

#include <chrono>
#include <vector>

#include "bowser/milp.hpp"

namespace bowser::milp::internal {

enum class LpOutcome { kOptimal, kInfeasible, kUnbounded, kTimeLimit };

class SimplexEngine {
 public:
  explicit SimplexEngine(const Model& model);

  int num_structurals() const { return n_; }
  int num_rows() const { return m_; }

  // Bounds of structural variable j. Changing bounds invalidates the
  // current primal solution until the next Optimize/Reoptimize.
  void SetBounds(int j, double lower, double upper);
  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }

  // Solves from the current basis, choosing the dual method when the basis
  // is dual feasible and the two-phase primal method otherwise.
  LpOutcome Optimize();

  double Objective() const;
  std::vector<double> StructuralValues() const;
  long iterations() const { return iterations_; }

  void set_deadline(std::chrono::steady_clock::time_point deadline) {
    deadline_ = deadline;
    has_deadline_ = true;
  }

 private:
  enum class Phase { kOne, kTwo };

  double* Row(int i) { return tableau_.data() + static_cast<std::size_t>(i) * stride_; }
  const double* Row(int i) const { return tableau_.data() + static_cast<std::size_t>(i) * stride_; }
  double* Duals() { return Row(m_); }
  const double* Duals() const { return Row(m_); }

  bool IsBasic(int v) const { return where_[v] >= 0; }
  int SlotOf(int v) const { return -where_[v] - 1; }

  void ResetToSlackBasis();
  void PlaceNonbasicAtBound(int v, double d);
  void RecomputeBasics();
  void RecomputeDuals();
  bool Reinvert();
  // Rebuilds the tableau of the current basis from the constraint matrix,
  // falling back to the slack basis when the basis is numerically singular.
  // Returns false when the fallback was taken.
  bool Refresh();
  // Refresh() every few thousand pivots to bound accumulated rounding error.
  bool RefreshIfDue();
  double Residual() const;

  void Pivot(int r, int s);
  // Moves nonbasic column s by delta and updates the basic values.
  void Shift(int s, double delta);

  bool DualFeasible() const;
  bool MakeDualFeasibleByFlips();
  double Infeasibility(int i) const;

  LpOutcome RunDual();
  LpOutcome RunPrimal();
  LpOutcome OptimizeOnce();

  bool TimeUp();
  void CountIteration();

  const Model& model_;
  int n_ = 0;
  int m_ = 0;
  int total_ = 0;
  std::size_t stride_ = 0;

  // Structural columns of A in compressed-column form.
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> values_;

  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  std::vector<double> x_;

  std::vector<int> head_;     // basic variable of each row
  std::vector<int> col_var_;  // nonbasic variable of each column slot
  std::vector<int> where_;    // row index if basic, else -(slot + 1)

  std::vector<double> tableau_;
  std::vector<double> scratch_;

  long iterations_ = 0;
  long pivots_since_reinvert_ = 0;
  bool has_deadline_ = false;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace bowser::milp::internal

#endif  // BOWSER_SRC_MILP_SIMPLEX_HPP_

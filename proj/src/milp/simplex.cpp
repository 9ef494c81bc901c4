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

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bowser/errors.hpp"
#include "bowser/simd.hpp"

namespace bowser::milp::internal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-7;
constexpr double kDropTol = 1e-13;
constexpr double kResidualTol = 1e-7;
constexpr long kReinvertInterval = 3000;
constexpr int kDegenerateLimit = 50;

double Tol(double scale) { return kPrimalTol * std::max(1.0, std::abs(scale)); }

}  // namespace

SimplexEngine::SimplexEngine(const Model& model) : model_(model) {
  n_ = model.num_variables();
  m_ = model.num_constraints();
  total_ = n_ + m_;
  stride_ = (static_cast<std::size_t>(n_) + 7) / 8 * 8;
  if (stride_ == 0) stride_ = 8;

  std::vector<int> counts(n_ + 1, 0);
  for (const auto& c : model.constraints()) {
    for (const auto& t : c.terms) ++counts[t.var + 1];
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j + 1];
  row_index_.resize(col_start_[n_]);
  values_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : model.constraint(i).terms) {
      row_index_[fill[t.var]] = i;
      values_[fill[t.var]] = t.coef;
      ++fill[t.var];
    }
  }

  lower_.assign(total_, 0.0);
  upper_.assign(total_, 0.0);
  cost_.assign(total_, 0.0);
  for (int j = 0; j < n_; ++j) {
    const Variable& v = model.variable(j);
    lower_[j] = v.lower;
    upper_[j] = v.upper;
    cost_[j] = model.objective()[j];
  }
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = model.constraint(i);
    switch (c.sense) {
      case Sense::kLessEqual:
        lower_[n_ + i] = -kInf;
        upper_[n_ + i] = c.rhs;
        break;
      case Sense::kGreaterEqual:
        lower_[n_ + i] = c.rhs;
        upper_[n_ + i] = kInf;
        break;
      case Sense::kEqual:
        lower_[n_ + i] = c.rhs;
        upper_[n_ + i] = c.rhs;
        break;
    }
  }
  x_.assign(total_, 0.0);
  head_.assign(m_, 0);
  col_var_.assign(n_, 0);
  where_.assign(total_, 0);
  scratch_.assign(stride_, 0.0);
  ResetToSlackBasis();
}

void SimplexEngine::ResetToSlackBasis() {
  tableau_.assign(static_cast<std::size_t>(m_ + 1) * stride_, 0.0);
  for (int j = 0; j < n_; ++j) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) Row(row_index_[k])[j] -= values_[k];
    Duals()[j] = cost_[j];
  }
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    where_[n_ + i] = i;
  }
  for (int j = 0; j < n_; ++j) {
    col_var_[j] = j;
    where_[j] = -(j + 1);
    x_[j] = std::isfinite(lower_[j]) ? lower_[j] : 0.0;
    PlaceNonbasicAtBound(j, cost_[j]);
  }
  RecomputeBasics();
  pivots_since_reinvert_ = 0;
}

void SimplexEngine::PlaceNonbasicAtBound(int v, double d) {
  const double lo = lower_[v];
  const double hi = upper_[v];
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (has_lo && has_hi && lo == hi) {
    x_[v] = lo;
  } else if (d > kDualTol && has_lo) {
    x_[v] = lo;
  } else if (d < -kDualTol && has_hi) {
    x_[v] = hi;
  } else if (has_lo && has_hi) {
    x_[v] = (x_[v] == hi) ? hi : lo;
  } else if (has_lo) {
    x_[v] = lo;
  } else if (has_hi) {
    x_[v] = hi;
  } else {
    x_[v] = 0.0;
  }
}

void SimplexEngine::RecomputeBasics() {
  const auto& k = simd::Kernels();
  for (int s = 0; s < n_; ++s) scratch_[s] = x_[col_var_[s]];
  for (int i = 0; i < m_; ++i) x_[head_[i]] = -k.dot(Row(i), scratch_.data(), n_);
}

void SimplexEngine::RecomputeDuals() {
  const auto& k = simd::Kernels();
  double* d = Duals();
  for (int s = 0; s < n_; ++s) d[s] = cost_[col_var_[s]];
  for (int i = 0; i < m_; ++i) {
    const double c = cost_[head_[i]];
    if (c != 0.0) k.axpy(d, Row(i), -c, n_);
  }
}

void SimplexEngine::SetBounds(int j, double lower, double upper) {
  lower_[j] = lower;
  upper_[j] = upper;
  if (!IsBasic(j)) PlaceNonbasicAtBound(j, Duals()[SlotOf(j)]);
}

void SimplexEngine::Pivot(int r, int s) {
  const auto& k = simd::Kernels();
  double* pr = Row(r);
  const double inv = 1.0 / pr[s];
  k.scale(pr, inv, n_);
  pr[s] = inv;
  for (int i = 0; i <= m_; ++i) {
    if (i == r) continue;
    double* ri = Row(i);
    const double f = ri[s];
    if (std::abs(f) <= kDropTol) {
      ri[s] = 0.0;
      continue;
    }
    k.axpy(ri, pr, -f, n_);
    ri[s] = -f * inv;
  }
  const int p = head_[r];
  const int q = col_var_[s];
  head_[r] = q;
  where_[q] = r;
  col_var_[s] = p;
  where_[p] = -(s + 1);
  ++pivots_since_reinvert_;
}

void SimplexEngine::Shift(int s, double delta) {
  if (delta == 0.0) return;
  x_[col_var_[s]] += delta;
  for (int i = 0; i < m_; ++i) {
    const double t = Row(i)[s];
    if (t != 0.0) x_[head_[i]] -= t * delta;
  }
}

double SimplexEngine::Infeasibility(int i) const {
  const int v = head_[i];
  const double x = x_[v];
  if (x < lower_[v] - Tol(lower_[v])) return lower_[v] - x;
  if (x > upper_[v] + Tol(upper_[v])) return x - upper_[v];
  return 0.0;
}

bool SimplexEngine::DualFeasible() const {
  const double* d = Duals();
  for (int s = 0; s < n_; ++s) {
    const int v = col_var_[s];
    if (lower_[v] == upper_[v]) continue;
    const bool at_lo = x_[v] == lower_[v];
    const bool at_hi = x_[v] == upper_[v];
    if (at_lo && d[s] < -kDualTol) return false;
    if (at_hi && d[s] > kDualTol) return false;
    if (!at_lo && !at_hi && std::abs(d[s]) > kDualTol) return false;
  }
  return true;
}

bool SimplexEngine::MakeDualFeasibleByFlips() {
  const double* d = Duals();
  bool ok = true;
  for (int s = 0; s < n_; ++s) {
    const int v = col_var_[s];
    const double lo = lower_[v];
    const double hi = upper_[v];
    if (lo == hi) {
      x_[v] = lo;
      continue;
    }
    if (d[s] > kDualTol) {
      if (std::isfinite(lo)) {
        x_[v] = lo;
      } else {
        ok = false;
      }
    } else if (d[s] < -kDualTol) {
      if (std::isfinite(hi)) {
        x_[v] = hi;
      } else {
        ok = false;
      }
    } else if (x_[v] != lo && x_[v] != hi) {
      x_[v] = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    }
  }
  return ok;
}

double SimplexEngine::Residual() const {
  std::vector<double> activity(m_, 0.0);
  std::vector<double> scale(m_, 1.0);
  for (int j = 0; j < n_; ++j) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      const double term = values_[k] * x_[j];
      activity[row_index_[k]] += term;
      scale[row_index_[k]] = std::max(scale[row_index_[k]], std::abs(term));
    }
  }
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    worst = std::max(worst, std::abs(activity[i] - x_[n_ + i]) / scale[i]);
  }
  return worst;
}

bool SimplexEngine::Reinvert() {
  std::vector<char> target(total_, 0);
  for (int i = 0; i < m_; ++i) target[head_[i]] = 1;
  tableau_.assign(static_cast<std::size_t>(m_ + 1) * stride_, 0.0);
  for (int j = 0; j < n_; ++j) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) Row(row_index_[k])[j] -= values_[k];
    Duals()[j] = cost_[j];
    col_var_[j] = j;
    where_[j] = -(j + 1);
  }
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    where_[n_ + i] = i;
  }
  for (int q = 0; q < n_; ++q) {
    if (!target[q]) continue;
    const int s = SlotOf(q);
    int best = -1;
    double best_abs = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int v = head_[i];
      if (v < n_ || target[v]) continue;
      const double a = std::abs(Row(i)[s]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0 || best_abs < 1e-11) return false;
    Pivot(best, s);
  }
  RecomputeBasics();
  RecomputeDuals();
  pivots_since_reinvert_ = 0;
  return true;
}

bool SimplexEngine::Refresh() {
  if (Reinvert()) return true;
  ResetToSlackBasis();
  return false;
}

bool SimplexEngine::RefreshIfDue() {
  if (pivots_since_reinvert_ < kReinvertInterval) return true;
  return Refresh();
}

bool SimplexEngine::TimeUp() {
  if (!has_deadline_ || (iterations_ & 31) != 0) return false;
  return std::chrono::steady_clock::now() > deadline_;
}

void SimplexEngine::CountIteration() { ++iterations_; }

double SimplexEngine::Objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
  return z;
}

std::vector<double> SimplexEngine::StructuralValues() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

LpOutcome SimplexEngine::Optimize() {
  for (int attempt = 0; attempt < 3; ++attempt) {
    const LpOutcome outcome = OptimizeOnce();
    if (outcome != LpOutcome::kOptimal) return outcome;
    if (Residual() <= kResidualTol) return outcome;
    if (!Reinvert()) ResetToSlackBasis();
  }
  throw NumericalError("simplex solution failed the residual check after reinversion");
}

LpOutcome SimplexEngine::OptimizeOnce() {
  for (int j = 0; j < n_; ++j) {
    if (lower_[j] > upper_[j] + Tol(upper_[j])) return LpOutcome::kInfeasible;
  }
  if (pivots_since_reinvert_ > kReinvertInterval && !Reinvert()) ResetToSlackBasis();
  if (MakeDualFeasibleByFlips()) {
    RecomputeBasics();
    const LpOutcome outcome = RunDual();
    if (outcome != LpOutcome::kOptimal || DualFeasible()) return outcome;
  }
  RecomputeBasics();
  return RunPrimal();
}

LpOutcome SimplexEngine::RunDual() {
  const long cap = 50L * (m_ + n_) + 10000;
  long local = 0;
  int degenerate = 0;
  bool bland = false;
  for (;;) {
    if (TimeUp()) return LpOutcome::kTimeLimit;
    if (++local > cap) {
      // Hand over to the primal method, which has its own safeguards.
      RecomputeBasics();
      return RunPrimal();
    }
    // A reset to the slack basis forfeits dual feasibility.
    if (!RefreshIfDue()) return RunPrimal();

    int r = -1;
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double inf = Infeasibility(i);
      if (inf <= 0.0) continue;
      if (bland) {
        if (r < 0 || head_[i] < head_[r]) r = i;
      } else if (inf > worst) {
        worst = inf;
        r = i;
      }
    }
    if (r < 0) return LpOutcome::kOptimal;

    const int p = head_[r];
    const bool increase = x_[p] < lower_[p];
    const double target = increase ? lower_[p] : upper_[p];
    const double dir = increase ? 1.0 : -1.0;
    const double* pr = Row(r);
    double* d = Duals();

    double theta_max = kInf;
    bool any = false;
    for (int s = 0; s < n_; ++s) {
      const int v = col_var_[s];
      if (lower_[v] == upper_[v]) continue;
      const double alpha = -dir * pr[s];
      if (std::abs(alpha) < kPivotTol) continue;
      const bool at_lo = x_[v] == lower_[v];
      const bool at_hi = x_[v] == upper_[v];
      const bool free = !at_lo && !at_hi;
      if (!((alpha > 0.0 && (at_lo || free)) || (alpha < 0.0 && (at_hi || free)))) continue;
      any = true;
      const double sd = alpha > 0.0 ? d[s] : -d[s];
      theta_max = std::min(theta_max, (std::max(sd, 0.0) + kDualTol) / std::abs(alpha));
    }
    if (!any) {
      // Confirm on a freshly factored tableau before concluding.
      if (pivots_since_reinvert_ > 0) {
        if (!Refresh()) return RunPrimal();
        continue;
      }
      return LpOutcome::kInfeasible;
    }

    // Pass two: among the candidates within the relaxed step, the largest
    // pivot; in Bland mode the lowest variable index among acceptable pivots.
    auto eligible = [&](int s, double* alpha_out, double* ratio_out) {
      const int v = col_var_[s];
      if (lower_[v] == upper_[v]) return false;
      const double alpha = -dir * pr[s];
      if (std::abs(alpha) < kPivotTol) return false;
      const bool at_lo = x_[v] == lower_[v];
      const bool at_hi = x_[v] == upper_[v];
      const bool free = !at_lo && !at_hi;
      if (!((alpha > 0.0 && (at_lo || free)) || (alpha < 0.0 && (at_hi || free)))) return false;
      const double sd = alpha > 0.0 ? d[s] : -d[s];
      *alpha_out = alpha;
      *ratio_out = std::max(sd, 0.0) / std::abs(alpha);
      return *ratio_out <= theta_max;
    };
    double max_mag = 0.0;
    for (int s = 0; s < n_; ++s) {
      double alpha = 0.0;
      double ratio = 0.0;
      if (eligible(s, &alpha, &ratio)) max_mag = std::max(max_mag, std::abs(alpha));
    }
    int best = -1;
    double best_key = 0.0;
    for (int s = 0; s < n_; ++s) {
      double alpha = 0.0;
      double ratio = 0.0;
      if (!eligible(s, &alpha, &ratio)) continue;
      const int v = col_var_[s];
      const double mag = std::abs(alpha);
      if (bland) {
        if (mag >= 1e-3 * max_mag && (best < 0 || v < col_var_[best])) best = s;
      } else if (best < 0 || mag > best_key || (mag == best_key && v < col_var_[best])) {
        best = s;
        best_key = mag;
      }
    }
    if (best < 0) {
      if (pivots_since_reinvert_ > 0) {
        if (!Refresh()) return RunPrimal();
        continue;
      }
      return LpOutcome::kInfeasible;
    }

    const double alpha = -dir * pr[best];
    const double sd = alpha > 0.0 ? d[best] : -d[best];
    if (sd < 0.0) d[best] = 0.0;  // absorb a Harris-tolerated sign error
    const double dual_step = std::max(sd, 0.0) / std::abs(alpha);

    const double delta = (target - x_[p]) / (-pr[best]);
    Shift(best, delta);
    x_[p] = target;
    Pivot(r, best);
    CountIteration();

    if (dual_step <= 1e-12) {
      if (++degenerate > kDegenerateLimit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

LpOutcome SimplexEngine::RunPrimal() {
  const long cap = 50L * (m_ + n_) + 10000;
  long local = 0;
  int degenerate = 0;
  bool bland = false;
  std::vector<double> w(stride_, 0.0);
  const auto& k = simd::Kernels();
  for (;;) {
    if (TimeUp()) return LpOutcome::kTimeLimit;
    if (++local > cap) throw NumericalError("primal simplex exceeded its iteration limit (cycling suspected)");
    RefreshIfDue();

    bool phase_one = false;
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      const int v = head_[i];
      double g = 0.0;
      if (x_[v] < lower_[v] - Tol(lower_[v])) {
        g = -1.0;
      } else if (x_[v] > upper_[v] + Tol(upper_[v])) {
        g = 1.0;
      }
      if (g != 0.0) {
        phase_one = true;
        k.axpy(w.data(), Row(i), -g, n_);
      }
    }
    const double* price = phase_one ? w.data() : Duals();

    int s_in = -1;
    double best = 0.0;
    for (int s = 0; s < n_; ++s) {
      const int v = col_var_[s];
      if (lower_[v] == upper_[v]) continue;
      const bool at_lo = x_[v] == lower_[v];
      const bool at_hi = x_[v] == upper_[v];
      const bool free = !at_lo && !at_hi;
      const double c = price[s];
      const bool up = (at_lo || free) && c < -kDualTol;
      const bool down = (at_hi || free) && c > kDualTol;
      if (!up && !down) continue;
      if (bland) {
        if (s_in < 0 || v < col_var_[s_in]) s_in = s;
      } else if (std::abs(c) > best || (std::abs(c) == best && s_in >= 0 && v < col_var_[s_in])) {
        best = std::abs(c);
        s_in = s;
      }
    }
    if (s_in < 0) {
      if (phase_one && pivots_since_reinvert_ > 0) {
        Refresh();
        continue;
      }
      return phase_one ? LpOutcome::kInfeasible : LpOutcome::kOptimal;
    }

    const int q = col_var_[s_in];
    const double dir = price[s_in] < 0.0 ? 1.0 : -1.0;
    const double range = (std::isfinite(lower_[q]) && std::isfinite(upper_[q])) ? upper_[q] - lower_[q] : kInf;

    // Harris two-pass ratio test. Pass one finds the largest step allowed
    // when every bound is relaxed by its feasibility tolerance; pass two
    // picks, among the rows blocking within that step, the largest pivot
    // (or, in Bland mode, the lowest basic index among acceptable pivots).
    auto breakpoint = [&](int i, double a, double relax, double* value) {
      const int v = head_[i];
      const double xb = x_[v];
      const double lo = lower_[v];
      const double hi = upper_[v];
      if (xb < lo - Tol(lo)) {
        if (a > 0.0) {
          *value = lo;
          return (lo - xb + relax * Tol(lo)) / a;
        }
        return kInf;
      }
      if (xb > hi + Tol(hi)) {
        if (a < 0.0) {
          *value = hi;
          return (hi - xb - relax * Tol(hi)) / a;
        }
        return kInf;
      }
      if (a > 0.0) {
        if (!std::isfinite(hi)) return kInf;
        *value = hi;
        return (hi - xb + relax * Tol(hi)) / a;
      }
      if (!std::isfinite(lo)) return kInf;
      *value = lo;
      return (lo - xb - relax * Tol(lo)) / a;
    };
    double theta_max = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = -Row(i)[s_in] * dir;
      if (std::abs(a) < kPivotTol) continue;
      double value = 0.0;
      theta_max = std::min(theta_max, std::max(breakpoint(i, a, 1.0, &value), 0.0));
    }
    int r = -1;
    double leave_value = 0.0;
    double theta = kInf;
    if (range <= theta_max) {
      theta = range;
    } else {
      double max_mag = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = -Row(i)[s_in] * dir;
        if (std::abs(a) < kPivotTol) continue;
        double value = 0.0;
        if (std::max(breakpoint(i, a, 0.0, &value), 0.0) <= theta_max) max_mag = std::max(max_mag, std::abs(a));
      }
      double r_mag = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = -Row(i)[s_in] * dir;
        if (std::abs(a) < kPivotTol) continue;
        double value = 0.0;
        const double limit = std::max(breakpoint(i, a, 0.0, &value), 0.0);
        if (limit > theta_max) continue;
        const double mag = std::abs(a);
        bool take;
        if (bland) {
          take = mag >= 1e-3 * max_mag && (r < 0 || head_[i] < head_[r]);
        } else {
          take = r < 0 || mag > r_mag || (mag == r_mag && head_[i] < head_[r]);
        }
        if (take) {
          r = i;
          r_mag = mag;
          theta = limit;
          leave_value = value;
        }
      }
    }
    if (!std::isfinite(theta)) {
      if (pivots_since_reinvert_ > 0) {
        Refresh();
        continue;
      }
      if (phase_one) throw NumericalError("phase-one ray without breakpoint");
      return LpOutcome::kUnbounded;
    }
    CountIteration();
    if (r < 0) {
      // The entering variable reaches its opposite bound first.
      Shift(s_in, dir * theta);
      x_[q] = dir > 0.0 ? upper_[q] : lower_[q];
    } else {
      const int p = head_[r];
      Shift(s_in, dir * theta);
      x_[p] = leave_value;
      Pivot(r, s_in);
    }
    if (theta <= 1e-12) {
      if (++degenerate > kDegenerateLimit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

}  // namespace bowser::milp::internal

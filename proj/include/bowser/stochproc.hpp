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

// Consumption distributions and the first-order loss-function toolkit:
// truncated and compound Poisson laws, exact convolution, loss and
// complementary loss, the lost-sales shortage approximation, piecewise
// linear lower bounds of the complementary loss, and maximum-likelihood
// fitting of compound-Poisson consumption.

#ifndef BOWSER_STOCHPROC_HPP_
#define BOWSER_STOCHPROC_HPP_

#include <vector>

#include "bowser/distribution.hpp"

namespace bowser::stochproc {

// Poisson(lambda) restricted to {0..cap}, renormalized. Requires lambda > 0
// and cap >= 1.
DiscreteDist TruncatedPoisson(double lambda, int cap);

// Law of J_1 + ... + J_M with M ~ Poisson(lambda) and i.i.d. jumps, by the
// Panjer recursion. The support is cut where the remaining tail mass drops
// below `tail` and the result is renormalized. Requires lambda > 0.
DiscreteDist CompoundPoisson(double lambda, const DiscreteDist& jump, double tail = 1e-10);

// Exact law of the sum of two independent variables.
DiscreteDist Convolve(const DiscreteDist& a, const DiscreteDist& b);

// Laws of the partial sums: result[t] is the law of X_0 + ... + X_t.
std::vector<DiscreteDist> PrefixConvolutions(const std::vector<DiscreteDist>& per_period);

// E[(X - q)^+] for real q >= 0.
double Loss(const DiscreteDist& d, double q);
// E[(q - X)^+] for real q >= 0.
double ComplementaryLoss(const DiscreteDist& d, double q);

struct LostSalesLoss {
  // Per-period expected shortage from the backorder decomposition:
  // L_{1..t}(q) - L_{1..t-1}(q).
  double decomposition = 0.0;
  // Lost-sales approximation: L_{1..t}(q + L_{1..t-1}(q)), where earlier
  // expected lost sales are credited back to the available stock.
  double lost_sales = 0.0;
};

// Expected shortage in period t (1-based) of a stock q facing the given
// per-period demands without replenishment. Requires 1 <= t <= size.
LostSalesLoss LostSalesShortage(const std::vector<DiscreteDist>& per_period, int t, double q);

struct LineSegment {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double q) const { return slope * q + intercept; }
};

// Maximum of affine pieces on [0, domain_max].
struct PiecewiseLinear {
  std::vector<LineSegment> segments;
  double domain_max = 0.0;
  // Arguments at which the approximation touches the target function.
  std::vector<double> tangent_points;

  double operator()(double q) const;
};

// Lower bound of the convex complementary loss of `d` as the maximum of
// affine pieces. The support is split into `partitions` intervals of equal
// probability; interval i ends at b_i, the smallest k with cdf(k) >= i / n.
// Each piece coincides with the complementary loss on [b_i, b_i + 1], and a
// zero piece covers the region below the support. Duplicate breakpoints are
// merged, so distributions with few support points get fewer pieces.
// Requires partitions >= 1.
PiecewiseLinear LinearizeComplementaryLoss(const DiscreteDist& d, int partitions);

// Matching lower bound of the loss through loss = complementary - q + mean.
PiecewiseLinear LossFromComplementary(const PiecewiseLinear& complementary, double mean);

struct CompoundPoissonFit {
  double lambda = 0.0;      // event rate per bucket
  double jump_mean = 0.0;   // mean of the Poisson jump size
  double log_likelihood = 0.0;
  bool degenerate = false;  // every sample was zero
};

// Log-likelihood of integer samples under compound Poisson(lambda) with
// Poisson(jump_mean) jumps.
double CompoundPoissonLogLikelihood(const std::vector<int>& samples, double lambda, double jump_mean);

// Maximum-likelihood fit over lambda, jump_mean in [1e-3, 10]: a
// logarithmic grid followed by three rounds of local refinement. Throws
// InsufficientDataError for fewer than 30 samples and InvalidArgumentError
// for negative ones.
CompoundPoissonFit FitCompoundPoissonMle(const std::vector<int>& samples);

}  // namespace bowser::stochproc

#endif  // BOWSER_STOCHPROC_HPP_

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

#include "bowser/stochproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/simd.hpp"

namespace bowser::stochproc {
namespace {

// Largest support size the Panjer recursion may grow to before giving up.
constexpr int kMaxCompoundSupport = 1 << 16;

}  // namespace

DiscreteDist TruncatedPoisson(double lambda, int cap) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgumentError(fmt::format("truncated Poisson rate must be positive, got {}", lambda));
  }
  if (cap < 1) throw InvalidArgumentError(fmt::format("truncated Poisson cap must be at least 1, got {}", cap));
  return TruncatedPoissonDist(lambda, cap);
}

DiscreteDist CompoundPoisson(double lambda, const DiscreteDist& jump, double tail) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgumentError(fmt::format("compound Poisson rate must be positive, got {}", lambda));
  }
  if (!(tail > 0.0 && tail < 1.0)) throw InvalidArgumentError("tail threshold must lie in (0, 1)");
  const std::vector<double>& g = jump.probabilities();
  const int jmax = jump.max_support();
  if (jmax == 0) return DiscreteDist::PointMass(0);

  // Panjer recursion for the Poisson counting law:
  //   f(0) = exp(-lambda (1 - g(0))),
  //   f(k) = lambda / k * sum_{j=1}^{min(k, jmax)} j g(j) f(k - j).
  std::vector<double> f;
  f.push_back(std::exp(-lambda * (1.0 - g[0])));
  double acc = f[0];
  const double mean = lambda * jump.mean();
  for (int k = 1; k < kMaxCompoundSupport; ++k) {
    double s = 0.0;
    for (int j = 1; j <= std::min(k, jmax); ++j) s += j * g[j] * f[k - j];
    const double fk = lambda / k * s;
    f.push_back(fk);
    acc += fk;
    if (k >= mean && 1.0 - acc < tail) break;
  }
  if (1.0 - acc >= tail) {
    throw InvalidArgumentError("compound Poisson support exceeds the supported size; rate or jumps too large");
  }
  return DiscreteDist::FromWeights(std::move(f));
}

DiscreteDist Convolve(const DiscreteDist& a, const DiscreteDist& b) {
  const auto& pa = a.probabilities();
  const auto& pb = b.probabilities();
  std::vector<double> out(pa.size() + pb.size() - 1, 0.0);
  const auto& kernels = simd::Kernels();
  // Each mass of `a` shifts and scales the whole of `b`.
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i] != 0.0) kernels.axpy(out.data() + i, pb.data(), pa[i], pb.size());
  }
  return DiscreteDist::FromWeights(std::move(out));
}

std::vector<DiscreteDist> PrefixConvolutions(const std::vector<DiscreteDist>& per_period) {
  std::vector<DiscreteDist> out;
  out.reserve(per_period.size());
  for (std::size_t t = 0; t < per_period.size(); ++t) {
    out.push_back(t == 0 ? per_period[0] : Convolve(out.back(), per_period[t]));
  }
  return out;
}

double Loss(const DiscreteDist& d, double q) {
  if (!(q >= 0.0)) throw InvalidArgumentError(fmt::format("loss argument must be nonnegative, got {}", q));
  const auto& p = d.probabilities();
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double excess = static_cast<double>(k) - q;
    if (excess > 0.0) s += excess * p[k];
  }
  return s;
}

double ComplementaryLoss(const DiscreteDist& d, double q) {
  if (!(q >= 0.0)) throw InvalidArgumentError(fmt::format("loss argument must be nonnegative, got {}", q));
  const auto& p = d.probabilities();
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double surplus = q - static_cast<double>(k);
    if (surplus > 0.0) s += surplus * p[k];
  }
  return s;
}

LostSalesLoss LostSalesShortage(const std::vector<DiscreteDist>& per_period, int t, double q) {
  if (t < 1 || t > static_cast<int>(per_period.size())) {
    throw InvalidArgumentError(fmt::format("period {} outside 1..{}", t, per_period.size()));
  }
  const std::vector<DiscreteDist> prefix =
      PrefixConvolutions(std::vector<DiscreteDist>(per_period.begin(), per_period.begin() + t));
  const double through_t = Loss(prefix[t - 1], q);
  const double before_t = t >= 2 ? Loss(prefix[t - 2], q) : 0.0;
  LostSalesLoss out;
  out.decomposition = through_t - before_t;
  out.lost_sales = Loss(prefix[t - 1], q + before_t);
  return out;
}

double PiecewiseLinear::operator()(double q) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : segments) best = std::max(best, s(q));
  return best;
}

PiecewiseLinear LinearizeComplementaryLoss(const DiscreteDist& d, int partitions) {
  if (partitions < 1) throw InvalidArgumentError("linearization needs at least one partition");
  const auto& p = d.probabilities();
  const int kmax = d.max_support();

  // Breakpoints b_i: end of the i-th equal-probability interval.
  std::vector<int> ends;
  for (int i = 1; i <= partitions; ++i) {
    int b = kmax;
    if (i < partitions) {
      const double level = static_cast<double>(i) / partitions;
      for (int k = 0; k <= kmax; ++k) {
        if (d.cdf(k) >= level - 1e-12) {
          b = k;
          break;
        }
      }
    }
    if (ends.empty() || b > ends.back()) ends.push_back(b);
  }

  PiecewiseLinear out;
  out.domain_max = std::max(1.0, static_cast<double>(kmax)) * 2.0;
  // Zero piece: exact below the smallest support point.
  out.segments.push_back({0.0, 0.0});
  out.tangent_points.push_back(0.0);
  for (int b : ends) {
    // On [b, b + 1] the complementary loss equals F(b) q - sum_{k<=b} k p_k.
    double cum = 0.0;
    double first_moment = 0.0;
    for (int k = 0; k <= b; ++k) {
      cum += p[k];
      first_moment += k * p[k];
    }
    if (b == kmax) cum = 1.0;
    out.segments.push_back({cum, -first_moment});
    out.tangent_points.push_back(static_cast<double>(b));
  }
  return out;
}

PiecewiseLinear LossFromComplementary(const PiecewiseLinear& complementary, double mean) {
  PiecewiseLinear out = complementary;
  for (auto& s : out.segments) {
    s.slope -= 1.0;
    s.intercept += mean;
  }
  return out;
}

}  // namespace bowser::stochproc

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

#include "bowser/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bowser/errors.hpp"

namespace bowser {
namespace {

constexpr double kSumTolerance = 1e-9;

std::vector<double> BuildCdf(const std::vector<double>& pmf) {
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    cdf[k] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

// Poisson masses for k = 0..cap computed in log space for stability.
std::vector<double> PoissonMasses(double mean, int cap) {
  std::vector<double> w(static_cast<std::size_t>(cap) + 1);
  for (int k = 0; k <= cap; ++k) {
    w[k] = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
  }
  return w;
}

}  // namespace

DiscreteDist::DiscreteDist() : pmf_{1.0}, cdf_{1.0} {}

DiscreteDist::DiscreteDist(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw InvalidArgumentError("distribution needs at least one mass");
  double total = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    if (!std::isfinite(pmf_[k]) || pmf_[k] < 0.0) {
      throw InvalidArgumentError("probability at " + std::to_string(k) +
                                 " is negative or not finite");
    }
    total += pmf_[k];
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw InvalidArgumentError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();
  cdf_ = BuildCdf(pmf_);
}

DiscreteDist DiscreteDist::FromWeights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgumentError("weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgumentError("weights sum to zero");
  for (double& w : weights) w /= total;
  return DiscreteDist(std::move(weights));
}

DiscreteDist DiscreteDist::PointMass(int value) {
  if (value < 0) throw InvalidArgumentError("point mass must be nonnegative");
  std::vector<double> pmf(static_cast<std::size_t>(value) + 1, 0.0);
  pmf[value] = 1.0;
  return DiscreteDist(std::move(pmf));
}

int DiscreteDist::min_support() const {
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    if (pmf_[k] > 0.0) return static_cast<int>(k);
  }
  return 0;
}

double DiscreteDist::pmf(int k) const {
  if (k < 0 || k > max_support()) return 0.0;
  return pmf_[k];
}

double DiscreteDist::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
  return m;
}

double DiscreteDist::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    const double d = static_cast<double>(k) - mu;
    v += d * d * pmf_[k];
  }
  return v;
}

double DiscreteDist::cdf(int k) const {
  if (k < 0) return 0.0;
  if (k >= max_support()) return 1.0;
  return cdf_[k];
}

bool DiscreteDist::is_point_mass() const { return min_support() == max_support(); }

int DiscreteDist::Quantile(double u) const {
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return max_support();
  return static_cast<int>(it - cdf_.begin());
}

DiscreteDist PoissonDist(double mean, double tail) {
  if (!(mean > 0.0)) {
    if (mean == 0.0) return DiscreteDist::PointMass(0);
    throw InvalidArgumentError("Poisson mean must be nonnegative");
  }
  // Grow the support until the neglected tail mass is below `tail`.
  std::vector<double> w;
  double acc = 0.0;
  int k = 0;
  const int hard_cap = static_cast<int>(mean + 50.0 * std::sqrt(mean) + 100.0);
  for (; k <= hard_cap; ++k) {
    const double p = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
    w.push_back(p);
    acc += p;
    if (k >= mean && 1.0 - acc < tail) break;
  }
  return DiscreteDist::FromWeights(std::move(w));
}

DiscreteDist TruncatedPoissonDist(double mean, int cap) {
  if (!(mean > 0.0)) throw InvalidArgumentError("truncated Poisson needs a positive mean");
  if (cap < 1) throw InvalidArgumentError("truncated Poisson needs cap >= 1");
  return DiscreteDist::FromWeights(PoissonMasses(mean, cap));
}

}  // namespace bowser

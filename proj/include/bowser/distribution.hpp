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

// Finite-support distributions on the nonnegative integers.

#ifndef BOWSER_DISTRIBUTION_HPP_
#define BOWSER_DISTRIBUTION_HPP_

#include <vector>

namespace bowser {

// Probability mass function on {0, 1, ..., K_max}. Immutable once built.
class DiscreteDist {
 public:
  // Point mass at zero.
  DiscreteDist();

  // Takes a pmf indexed by support value. Throws InvalidArgumentError when
  // an entry is negative or not finite, or when the masses do not sum to 1
  // within 1e-9. Trailing zero masses are trimmed so that K_max is the
  // largest value with positive probability.
  explicit DiscreteDist(std::vector<double> pmf);

  // Normalizes nonnegative weights to a pmf.
  static DiscreteDist FromWeights(std::vector<double> weights);
  static DiscreteDist PointMass(int value);

  int max_support() const { return static_cast<int>(pmf_.size()) - 1; }
  int min_support() const;
  double pmf(int k) const;
  const std::vector<double>& probabilities() const { return pmf_; }

  double mean() const;
  double variance() const;
  // P(X <= k)
  double cdf(int k) const;
  bool is_point_mass() const;

  // Smallest k with cdf(k) >= u, for u in [0, 1).
  int Quantile(double u) const;

  bool operator==(const DiscreteDist& other) const { return pmf_ == other.pmf_; }

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

// Poisson(mean) truncated where the remaining tail mass drops below
// `tail`, then renormalized.
DiscreteDist PoissonDist(double mean, double tail = 1e-10);

// Poisson(mean) restricted to {0..cap} and renormalized.
DiscreteDist TruncatedPoissonDist(double mean, int cap);

}  // namespace bowser

#endif  // BOWSER_DISTRIBUTION_HPP_

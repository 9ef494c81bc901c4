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

// Maximum-likelihood fit of compound-Poisson consumption with Poisson jump
// sizes (a Neyman type A law). The likelihood is evaluated from the exact
// Panjer recursion over the observed value range; the search is a
// logarithmic grid followed by shrinking local grids.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "bowser/errors.hpp"
#include "bowser/stochproc.hpp"

namespace bowser::stochproc {
namespace {

constexpr double kLowerBound = 1e-3;
constexpr double kUpperBound = 10.0;
constexpr int kCoarsePoints = 41;
constexpr int kRefinePoints = 11;
constexpr int kRefineRounds = 3;
constexpr std::size_t kMinSamples = 30;

// Histogram of sample values: value -> count.
using Histogram = std::map<int, long>;

double LogLikelihood(const Histogram& hist, double lambda, double mu) {
  const int kmax = hist.rbegin()->first;
  // Poisson(mu) jump masses g_1..g_kmax.
  std::vector<double> g(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (int j = 1; j <= kmax; ++j) g[j] = std::exp(j * std::log(mu) - mu - std::lgamma(j + 1.0));
  std::vector<double> f(static_cast<std::size_t>(kmax) + 1, 0.0);
  f[0] = std::exp(-lambda * (1.0 - std::exp(-mu)));
  for (int k = 1; k <= kmax; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * g[j] * f[k - j];
    f[k] = lambda / k * s;
  }
  double ll = 0.0;
  for (const auto& [value, count] : hist) {
    if (!(f[value] > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += count * std::log(f[value]);
  }
  return ll;
}

Histogram BuildHistogram(const std::vector<int>& samples) {
  Histogram hist;
  for (int v : samples) {
    if (v < 0) throw InvalidArgumentError(fmt::format("samples must be nonnegative, got {}", v));
    ++hist[v];
  }
  return hist;
}

}  // namespace

double CompoundPoissonLogLikelihood(const std::vector<int>& samples, double lambda, double jump_mean) {
  if (samples.empty()) throw InvalidArgumentError("no samples");
  if (!(lambda > 0.0) || !(jump_mean > 0.0)) throw InvalidArgumentError("parameters must be positive");
  return LogLikelihood(BuildHistogram(samples), lambda, jump_mean);
}

CompoundPoissonFit FitCompoundPoissonMle(const std::vector<int>& samples) {
  if (samples.size() < kMinSamples) {
    throw InsufficientDataError(
        fmt::format("maximum-likelihood fit needs at least {} samples, got {}", kMinSamples, samples.size()));
  }
  const Histogram hist = BuildHistogram(samples);
  CompoundPoissonFit fit;
  if (hist.size() == 1 && hist.begin()->first == 0) {
    fit.lambda = kLowerBound;
    fit.jump_mean = kLowerBound;
    fit.log_likelihood = LogLikelihood(hist, fit.lambda, fit.jump_mean);
    fit.degenerate = true;
    return fit;
  }

  const double lo = std::log(kLowerBound);
  const double hi = std::log(kUpperBound);
  double best_ll = -std::numeric_limits<double>::infinity();
  double best_a = lo;
  double best_b = lo;
  auto consider = [&](double a, double b) {
    a = std::clamp(a, lo, hi);
    b = std::clamp(b, lo, hi);
    const double ll = LogLikelihood(hist, std::exp(a), std::exp(b));
    if (ll > best_ll) {
      best_ll = ll;
      best_a = a;
      best_b = b;
    }
  };

  double step = (hi - lo) / (kCoarsePoints - 1);
  for (int i = 0; i < kCoarsePoints; ++i) {
    for (int j = 0; j < kCoarsePoints; ++j) consider(lo + i * step, lo + j * step);
  }
  for (int round = 0; round < kRefineRounds; ++round) {
    const double ca = best_a;
    const double cb = best_b;
    const double span = step;
    step = 2.0 * span / (kRefinePoints - 1);
    for (int i = 0; i < kRefinePoints; ++i) {
      for (int j = 0; j < kRefinePoints; ++j) consider(ca - span + i * step, cb - span + j * step);
    }
  }
  fit.lambda = std::exp(best_a);
  fit.jump_mean = std::exp(best_b);
  fit.log_likelihood = best_ll;
  return fit;
}

}  // namespace bowser::stochproc

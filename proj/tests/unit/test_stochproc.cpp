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

#include <cmath>
#include <random>

#include <boost/math/distributions/poisson.hpp>
#include <doctest.h>

#include "bowser/errors.hpp"
#include "bowser/stochproc.hpp"
#include "property_suites.hpp"

using namespace bowser;
using namespace bowser::stochproc;

namespace {

double PoissonPmf(double mean, int k) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return boost::math::pdf(boost::math::poisson_distribution<double>(mean), k);
}

// Compound Poisson with Poisson(mu) jumps: given M = m events the total is
// Poisson(m * mu), so the pmf is a Poisson mixture.
double CompoundPmf(double lambda, double mu, int k) {
  double p = 0.0;
  for (int m = 0; m < 200; ++m) p += PoissonPmf(lambda, m) * PoissonPmf(m * mu, k);
  return p;
}

double DirectLoss(const DiscreteDist& d, double q) {
  double s = 0.0;
  for (int k = 0; k <= d.max_support(); ++k) s += d.pmf(k) * std::max(k - q, 0.0);
  return s;
}

double DirectComplementary(const DiscreteDist& d, double q) {
  double s = 0.0;
  for (int k = 0; k <= d.max_support(); ++k) s += d.pmf(k) * std::max(q - k, 0.0);
  return s;
}

}  // namespace

TEST_CASE("truncated Poisson is the renormalized head of the Poisson law") {
  const DiscreteDist d = TruncatedPoisson(2.0, 7);
  CHECK(d.max_support() == 7);
  double head = 0.0;
  for (int k = 0; k <= 7; ++k) head += PoissonPmf(2.0, k);
  for (int k = 0; k <= 7; ++k) CHECK(d.pmf(k) == doctest::Approx(PoissonPmf(2.0, k) / head));
  CHECK_THROWS_AS(TruncatedPoisson(0.0, 7), InvalidArgumentError);
  CHECK_THROWS_AS(TruncatedPoisson(1.0, 0), InvalidArgumentError);
}

TEST_CASE("compound Poisson matches the Poisson-mixture closed form") {
  for (auto [lambda, mu] : {std::pair{0.5, 0.6}, std::pair{1.04, 1.01}, std::pair{0.28, 0.05}, std::pair{3.0, 2.0}}) {
    const DiscreteDist d = CompoundPoisson(lambda, bowser::PoissonDist(mu, 1e-14));
    for (int k = 0; k <= std::min(d.max_support(), 40); ++k) {
      CHECK(d.pmf(k) == doctest::Approx(CompoundPmf(lambda, mu, k)).epsilon(1e-7));
    }
    CHECK(d.mean() == doctest::Approx(lambda * mu).epsilon(1e-7));
    CHECK(d.variance() == doctest::Approx(lambda * (mu + mu * mu)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(CompoundPoisson(0.0, DiscreteDist::PointMass(1)), InvalidArgumentError);
}

TEST_CASE("prefix convolutions are cumulative sums") {
  const std::vector<DiscreteDist> per{DiscreteDist({0.5, 0.5}), DiscreteDist::PointMass(2), DiscreteDist({0.25, 0.75})};
  const auto pre = PrefixConvolutions(per);
  REQUIRE(pre.size() == 3);
  CHECK(pre[0] == per[0]);
  CHECK(pre[1].pmf(2) == doctest::Approx(0.5));
  CHECK(pre[1].pmf(3) == doctest::Approx(0.5));
  // X0 + X2 takes 0, 1, 2 with probabilities 1/8, 1/2, 3/8; X1 shifts it by 2.
  CHECK(pre[2].pmf(2) == doctest::Approx(0.125));
  CHECK(pre[2].pmf(3) == doctest::Approx(0.5));
  CHECK(pre[2].pmf(4) == doctest::Approx(0.375));
}

TEST_CASE("loss functions match direct summation and the identity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const DiscreteDist d = bowser::testing::RandomDist(rng);
    for (double q : {0.0, 0.3, 1.0, 2.5, 4.0, 6.0, 9.5}) {
      CHECK(Loss(d, q) == doctest::Approx(DirectLoss(d, q)));
      CHECK(ComplementaryLoss(d, q) == doctest::Approx(DirectComplementary(d, q)));
      // E[(X - q)^+] - E[(q - X)^+] = E[X] - q
      CHECK(Loss(d, q) - ComplementaryLoss(d, q) == doctest::Approx(d.mean() - q));
    }
  }
}

TEST_CASE("lost-sales shortage is exact for known demand") {
  // Demands 3, 1, 4 against 5 liters: shortages 0, 0, 3.
  const std::vector<DiscreteDist> per{DiscreteDist::PointMass(3), DiscreteDist::PointMass(1), DiscreteDist::PointMass(4)};
  const double expect[] = {0.0, 0.0, 3.0};
  for (int t = 1; t <= 3; ++t) {
    const LostSalesLoss l = LostSalesShortage(per, t, 5.0);
    CHECK(l.lost_sales == doctest::Approx(expect[t - 1]));
    CHECK(l.decomposition == doctest::Approx(expect[t - 1]));
  }
  // Against 2 liters the first period already loses one liter, which the
  // backorder decomposition would charge again later.
  CHECK(LostSalesShortage(per, 1, 2.0).lost_sales == doctest::Approx(1.0));
  CHECK(LostSalesShortage(per, 2, 2.0).lost_sales == doctest::Approx(1.0));
  CHECK(LostSalesShortage(per, 3, 2.0).lost_sales == doctest::Approx(4.0));
  CHECK_THROWS_AS(LostSalesShortage(per, 0, 2.0), InvalidArgumentError);
  CHECK_THROWS_AS(LostSalesShortage(per, 4, 2.0), InvalidArgumentError);
}

TEST_CASE("lost-sales shortage of a single period is the loss function") {
  const DiscreteDist d = TruncatedPoisson(3.0, 7);
  for (double q : {0.0, 1.0, 2.5, 6.0}) {
    CHECK(LostSalesShortage({d}, 1, q).lost_sales == doctest::Approx(DirectLoss(d, q)));
  }
}

TEST_CASE("linearized complementary loss is a tight lower bound") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const DiscreteDist d = trial % 2 == 0 ? bowser::testing::RandomDist(rng)
                                          : CompoundPoisson(0.3 + trial * 0.01, TruncatedPoisson(1.0, 7));
    const int parts = 1 + trial % 9;
    const PiecewiseLinear pw = LinearizeComplementaryLoss(d, parts);
    CHECK(pw.segments.size() <= static_cast<std::size_t>(parts) + 1);
    CHECK(pw.domain_max >= d.max_support());
    for (double q = 0.0; q <= pw.domain_max + 2.0; q += 0.25) {
      CHECK(pw(q) <= DirectComplementary(d, q) + 1e-9);
    }
    for (double b : pw.tangent_points) CHECK(pw(b) == doctest::Approx(DirectComplementary(d, b)));
    // The matching loss bound stays below the loss function.
    const PiecewiseLinear loss = LossFromComplementary(pw, d.mean());
    for (double q = 0.0; q <= pw.domain_max; q += 0.5) CHECK(loss(q) <= DirectLoss(d, q) + 1e-9);
  }
  CHECK_THROWS_AS(LinearizeComplementaryLoss(DiscreteDist::PointMass(2), 0), InvalidArgumentError);
}

TEST_CASE("more partitions never loosen the linearization") {
  const DiscreteDist d = CompoundPoisson(2.0, TruncatedPoisson(1.5, 7));
  double prev_gap = 1e300;
  for (int parts : {1, 2, 4, 8, 16}) {
    const PiecewiseLinear pw = LinearizeComplementaryLoss(d, parts);
    double gap = 0.0;
    for (double q = 0.0; q <= pw.domain_max; q += 0.5) gap += DirectComplementary(d, q) - pw(q);
    CHECK(gap <= prev_gap + 1e-9);
    prev_gap = gap;
  }
}

TEST_CASE("compound-Poisson log-likelihood sums log probabilities") {
  const std::vector<int> samples{0, 0, 1, 3, 0, 2, 5};
  double ll = 0.0;
  for (int x : samples) ll += std::log(CompoundPmf(0.8, 1.3, x));
  CHECK(CompoundPoissonLogLikelihood(samples, 0.8, 1.3) == doctest::Approx(ll).epsilon(1e-8));
}

TEST_CASE("maximum-likelihood fit recovers the generating parameters") {
  std::mt19937_64 rng(2024);
  for (auto [lambda, mu] : {std::pair{0.5, 1.0}, std::pair{1.04, 1.01}}) {
    std::poisson_distribution<int> events(lambda), jump(mu);
    std::vector<int> samples(20000);
    for (int& x : samples) {
      x = 0;
      for (int m = events(rng); m > 0; --m) x += jump(rng);
    }
    const CompoundPoissonFit fit = FitCompoundPoissonMle(samples);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.lambda == doctest::Approx(lambda).epsilon(0.1));
    CHECK(fit.jump_mean == doctest::Approx(mu).epsilon(0.1));
    // The fit is at least as likely as the truth.
    CHECK(fit.log_likelihood >= CompoundPoissonLogLikelihood(samples, lambda, mu) - 1e-6);
  }
  CHECK_THROWS_AS(FitCompoundPoissonMle(std::vector<int>(29, 1)), InsufficientDataError);
  CHECK(FitCompoundPoissonMle(std::vector<int>(40, 0)).degenerate);
}

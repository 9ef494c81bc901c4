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

#include <doctest.h>

#include "bowser/errors.hpp"
#include "bowser/milp.hpp"
#include "test_support.hpp"

using namespace bowser;
using namespace bowser::milp;
using bowser::testing::kInf;

namespace {

// min -3x - 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18: optimum x=2, y=6, -36.
Model TextbookLp() {
  Model m;
  const int x = m.AddVariable("x", 0.0, kInf, VarKind::kContinuous, -3.0);
  const int y = m.AddVariable("y", 0.0, kInf, VarKind::kContinuous, -5.0);
  m.AddConstraint("c1", {{x, 1.0}}, Sense::kLessEqual, 4.0);
  m.AddConstraint("c2", {{y, 2.0}}, Sense::kLessEqual, 12.0);
  m.AddConstraint("c3", {{x, 3.0}, {y, 2.0}}, Sense::kLessEqual, 18.0);
  return m;
}

}  // namespace

TEST_CASE("simplex solves a textbook LP") {
  const LpResult r = SolveLpRelaxation(TextbookLp());
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-36.0));
  CHECK(r.values[0] == doctest::Approx(2.0));
  CHECK(r.values[1] == doctest::Approx(6.0));
}

TEST_CASE("simplex handles equalities, lower bounds and >= rows") {
  // min x + 2y + 3z s.t. x + y + z = 10, y >= 2 (row), z in [1, 5],
  // x <= 6: optimum x=6, y=3, z=1 -> 6 + 6 + 3 = 15.
  Model m;
  const int x = m.AddVariable("x", 0.0, 6.0, VarKind::kContinuous, 1.0);
  const int y = m.AddVariable("y", 0.0, kInf, VarKind::kContinuous, 2.0);
  const int z = m.AddVariable("z", 1.0, 5.0, VarKind::kContinuous, 3.0);
  m.AddConstraint("sum", {{x, 1.0}, {y, 1.0}, {z, 1.0}}, Sense::kEqual, 10.0);
  m.AddConstraint("ymin", {{y, 1.0}}, Sense::kGreaterEqual, 2.0);
  const LpResult r = SolveLpRelaxation(m);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(15.0));
  CHECK(m.MaxViolation(r.values) < 1e-9);
}

TEST_CASE("infeasible and unbounded models are reported") {
  Model inf;
  const int x = inf.AddVariable("x", 0.0, 1.0, VarKind::kContinuous, 1.0);
  inf.AddConstraint("c", {{x, 1.0}}, Sense::kGreaterEqual, 2.0);
  CHECK(SolveLpRelaxation(inf).status == LpStatus::kInfeasible);
  CHECK(Solve(inf).status == Status::kInfeasible);

  Model unb;
  const int u = unb.AddVariable("u", 0.0, kInf, VarKind::kContinuous, -1.0);
  const int v = unb.AddVariable("v", 0.0, kInf, VarKind::kContinuous, 0.0);
  unb.AddConstraint("c", {{u, 1.0}, {v, -1.0}}, Sense::kLessEqual, 1.0);
  CHECK_THROWS_AS(SolveLpRelaxation(unb), UnboundedError);
}

TEST_CASE("a degenerate LP that cycles under naive pivoting terminates") {
  // Beale's example: min -3/4 x4 + 150 x5 - 1/50 x6 + 6 x7 with two
  // degenerate rows; optimum -1/20 at x4 = 1/25, x6 = 1.
  Model m;
  const int x4 = m.AddVariable("x4", 0.0, kInf, VarKind::kContinuous, -0.75);
  const int x5 = m.AddVariable("x5", 0.0, kInf, VarKind::kContinuous, 150.0);
  const int x6 = m.AddVariable("x6", 0.0, kInf, VarKind::kContinuous, -0.02);
  const int x7 = m.AddVariable("x7", 0.0, kInf, VarKind::kContinuous, 6.0);
  m.AddConstraint("r1", {{x4, 0.25}, {x5, -60.0}, {x6, -0.04}, {x7, 9.0}}, Sense::kLessEqual, 0.0);
  m.AddConstraint("r2", {{x4, 0.5}, {x5, -90.0}, {x6, -0.02}, {x7, 3.0}}, Sense::kLessEqual, 0.0);
  m.AddConstraint("r3", {{x6, 1.0}}, Sense::kLessEqual, 1.0);
  const LpResult r = SolveLpRelaxation(m);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-0.05));
  CHECK(r.values[x4] == doctest::Approx(0.04));
  CHECK(r.values[x6] == doctest::Approx(1.0));
}

TEST_CASE("branch and bound matches enumeration on random knapsacks") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 9;
    std::uniform_int_distribution<int> w(1, 20), p(1, 30);
    std::vector<int> weight(n), profit(n);
    int total = 0;
    for (int i = 0; i < n; ++i) {
      weight[i] = w(rng);
      profit[i] = p(rng);
      total += weight[i];
    }
    const int cap = total / 2;
    Model m;
    std::vector<Term> row;
    for (int i = 0; i < n; ++i) {
      row.push_back({m.AddVariable("x" + std::to_string(i), 0.0, 1.0, VarKind::kBinary, -profit[i]), 1.0 * weight[i]});
    }
    m.AddConstraint("cap", row, Sense::kLessEqual, cap);
    int best = 0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      int wt = 0, pr = 0;
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1) {
          wt += weight[i];
          pr += profit[i];
        }
      }
      if (wt <= cap) best = std::max(best, pr);
    }
    const Solution s = Solve(m);
    REQUIRE(s.status == Status::kOptimal);
    CHECK(s.objective == doctest::Approx(-best));
    CHECK(m.MaxViolation(s.values) < 1e-9);
    for (double v : s.values) CHECK(std::abs(v - std::round(v)) < 1e-9);
    CHECK(s.stats.root_bound <= s.objective + 1e-9);
    CHECK(s.stats.nodes >= 1);
  }
}

TEST_CASE("node limit without an incumbent reports no solution") {
  // Equality knapsack with an odd right-hand side forces branching.
  Model m;
  std::vector<Term> row;
  for (int i = 0; i < 8; ++i) row.push_back({m.AddVariable("x" + std::to_string(i), 0.0, 1.0, VarKind::kBinary, 1.0), 2.0});
  m.AddConstraint("odd", row, Sense::kEqual, 7.0);
  const Solution s = Solve(m, SolveOptions{600.0, 1e-6, 50});
  CHECK_FALSE(s.has_incumbent());
  CHECK(Solve(m).status == Status::kInfeasible);
}

TEST_CASE("model validation and evaluation") {
  Model m = TextbookLp();
  CHECK(m.Validate().empty());
  CHECK(m.Evaluate({2.0, 6.0}) == doctest::Approx(-36.0));
  CHECK(m.MaxViolation({5.0, 0.0}) == doctest::Approx(1.0));
  CHECK(m.FindVariable("y") == 1);
  CHECK(m.FindVariable("nope") == -1);
  CHECK_THROWS_AS(m.AddVariable("x", 0.0, 1.0, VarKind::kContinuous), InvalidArgumentError);
  CHECK_THROWS_AS(m.AddConstraint("bad", {{7, 1.0}}, Sense::kLessEqual, 0.0), InvalidArgumentError);
}

TEST_CASE("MPS export and import round trip") {
  Model m;
  const int a = m.AddVariable("visit_node_long_name_1", 0.0, 1.0, VarKind::kBinary, 3.0);
  const int b = m.AddVariable("b", -2.0, 8.5, VarKind::kContinuous, -1.0);
  const int c = m.AddVariable("c", 0.0, kInf, VarKind::kContinuous, 0.5);
  m.AddConstraint("row_with_a_long_name", {{a, 1.0}, {b, 2.0}}, Sense::kLessEqual, 9.0);
  m.AddConstraint("ge", {{b, 1.0}, {c, 1.0}}, Sense::kGreaterEqual, 1.0);
  m.AddConstraint("eq", {{a, 1.0}, {c, -1.0}}, Sense::kEqual, 0.0);
  const std::string text = ExportMps(m);
  CHECK(text.find("ROWS") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);
  const Model back = ParseMps(text);
  REQUIRE(back.num_variables() == 3);
  REQUIRE(back.num_constraints() == 3);
  CHECK(back.variable(0).kind == VarKind::kBinary);
  CHECK(back.variable(1).lower == -2.0);
  CHECK(back.variable(1).upper == 8.5);
  CHECK(back.objective() == m.objective());
  const Solution s1 = Solve(m), s2 = Solve(back);
  CHECK(s1.objective == doctest::Approx(s2.objective));
  CHECK_THROWS_AS(ParseMps("ROWS\n N obj\nCOLUMNS\n x obj\n"), ParseError);
}

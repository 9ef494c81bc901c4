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

#include <doctest.h>

#include "property_suites.hpp"

using namespace bowser::testing;

namespace {

void Expect(const SuiteResult& r, long cases) {
  CAPTURE(r.name);
  CAPTURE(r.first_failure);
  CHECK(r.cases == cases);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("plan checker agrees with the fixed-plan model") { Expect(PlanFeasibilityFuzz(600, 1), 600); }

TEST_CASE("more fuel never costs more shortage") { Expect(SimulatorMonotonicity(1000, 2), 1000); }

TEST_CASE("common random numbers are reproducible") { Expect(CrnDeterminism(1000, 3), 1000); }

TEST_CASE("convolution is commutative, associative and mass preserving") {
  Expect(ConvolutionAlgebra(1000, 4), 1000);
}

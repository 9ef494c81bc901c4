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

// Dense double-precision kernels used by the simplex tableau, the
// distribution convolutions and the dynamic-programming expectation sweeps.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2
// on x86-64, NEON on AArch64) are selected once at runtime. Element-wise
// kernels (axpy, scale) are bitwise identical across variants because every
// variant evaluates the same multiply-then-add sequence without contraction.
// Reductions (dot, sum) reassociate and therefore agree only to rounding.

#ifndef BOWSER_SIMD_HPP_
#define BOWSER_SIMD_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace bowser::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(double* y, const double* x, double a, std::size_t n);
  // y[i] *= a
  void (*scale)(double* y, double a, std::size_t n);
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
};

// Kernel table currently in use. The first call selects the best ISA the
// CPU supports unless BOWSER_SIMD=scalar|avx2|neon overrides it.
const KernelTable& Kernels();

// Kernel table for a specific ISA; throws InvalidArgumentError when the
// variant is not compiled in or not supported by the running CPU.
const KernelTable& KernelsFor(Isa isa);

bool IsaAvailable(Isa isa);
std::vector<Isa> AvailableIsas();
std::string IsaName(Isa isa);

// Overrides the active table (used by tests and benchmarks).
void SetActiveIsa(Isa isa);

namespace detail {
const KernelTable& ScalarTable();
#if defined(BOWSER_HAVE_AVX2)
const KernelTable& Avx2Table();
#endif
#if defined(BOWSER_HAVE_NEON)
const KernelTable& NeonTable();
#endif
}  // namespace detail

}  // namespace bowser::simd

#endif  // BOWSER_SIMD_HPP_

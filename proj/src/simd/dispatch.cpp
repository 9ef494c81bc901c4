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

#include <atomic>
#include <cstdlib>
#include <string>

#include "bowser/errors.hpp"
#include "bowser/simd.hpp"

namespace bowser::simd {
namespace {

bool CpuSupports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(BOWSER_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(BOWSER_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& TableFor(Isa isa) {
  switch (isa) {
#if defined(BOWSER_HAVE_AVX2)
    case Isa::kAvx2:
      return detail::Avx2Table();
#endif
#if defined(BOWSER_HAVE_NEON)
    case Isa::kNeon:
      return detail::NeonTable();
#endif
    default:
      return detail::ScalarTable();
  }
}

const KernelTable* SelectDefault() {
  if (const char* env = std::getenv("BOWSER_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return &detail::ScalarTable();
    if (v == "avx2" && CpuSupports(Isa::kAvx2)) return &TableFor(Isa::kAvx2);
    if (v == "neon" && CpuSupports(Isa::kNeon)) return &TableFor(Isa::kNeon);
  }
  if (CpuSupports(Isa::kAvx2)) return &TableFor(Isa::kAvx2);
  if (CpuSupports(Isa::kNeon)) return &TableFor(Isa::kNeon);
  return &detail::ScalarTable();
}

std::atomic<const KernelTable*>& Active() {
  static std::atomic<const KernelTable*> active{SelectDefault()};
  return active;
}

}  // namespace

const KernelTable& Kernels() { return *Active().load(std::memory_order_relaxed); }

bool IsaAvailable(Isa isa) { return CpuSupports(isa); }

std::vector<Isa> AvailableIsas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (CpuSupports(isa)) out.push_back(isa);
  }
  return out;
}

std::string IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& KernelsFor(Isa isa) {
  if (!CpuSupports(isa)) {
    throw InvalidArgumentError("SIMD variant not available on this CPU: " + IsaName(isa));
  }
  return TableFor(isa);
}

void SetActiveIsa(Isa isa) { Active().store(&KernelsFor(isa), std::memory_order_relaxed); }

}  // namespace bowser::simd

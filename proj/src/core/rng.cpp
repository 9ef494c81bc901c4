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

#include "bowser/rng.hpp"

namespace bowser {

std::uint64_t MixBits(std::uint64_t x) {
  // SplitMix64 finalizer.
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return MixBits(MixBits(seed) ^ MixBits(index + 0x632be59bd9b4e019ULL));
}

double KeyedUniform(std::uint64_t seed, DrawLane lane, std::uint64_t replication,
                    std::uint64_t asset, std::uint64_t period) {
  std::uint64_t h = MixBits(seed);
  h = MixBits(h ^ static_cast<std::uint64_t>(lane));
  h = MixBits(h ^ replication);
  h = MixBits(h ^ asset);
  h = MixBits(h ^ period);
  // 53 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(h >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace bowser

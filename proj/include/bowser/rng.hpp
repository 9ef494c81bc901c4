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

// Counter-based random streams. A draw is a pure function of the master
// seed and a key, so that common random numbers hold regardless of the
// order in which replications, assets or periods are evaluated.

#ifndef BOWSER_RNG_HPP_
#define BOWSER_RNG_HPP_

#include <cstdint>

namespace bowser {

// Purposes of keyed draws; distinct lanes never share samples.
enum class DrawLane : std::uint64_t { kConsumption = 1, kLocation = 2 };

std::uint64_t MixBits(std::uint64_t x);

// Uniform draw in the open interval (0, 1) for the given key.
double KeyedUniform(std::uint64_t seed, DrawLane lane, std::uint64_t replication,
                    std::uint64_t asset, std::uint64_t period);

// Derives an independent 64-bit seed for a sub-stream.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

}  // namespace bowser

#endif  // BOWSER_RNG_HPP_

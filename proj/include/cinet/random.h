// Copyright 2026 The CINet Authors.
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

#ifndef CINET_RANDOM_H_
#define CINET_RANDOM_H_

#include <cstdint>
#include <random>

namespace cinet {

using Rng = std::mt19937_64;

// Named seed streams. A stream seed is a pure function of
// (master, counter, stream), so replicates and chains never share state.
enum class Stream : std::uint64_t {
  kLabels = 1,
  kObserved = 2,
  kInterference = 3,
  kTreatment = 4,
  kNoise = 5,
  kDetection = 6,
  kMle = 7,
  kGibbs = 8,
  kReplicate = 9,
  kCovariates = 10,
  kFixture = 11,
};

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t counter,
                         Stream stream);

inline Rng MakeRng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace cinet

#endif  // CINET_RANDOM_H_

// Copyright 2026 The rmopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RMOPT_RANDOM_H_
#define RMOPT_RANDOM_H_

#include <cstdint>
#include <random>

namespace rmopt {

// Uniform double in [0, 1) from the top 53 bits. Unlike
// std::uniform_real_distribution this is identical on every standard library.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformIn(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

// Integer in [0, n) by rejection, again library-independent.
inline int UniformInt(std::mt19937_64& rng, int n) {
  const uint64_t bound = static_cast<uint64_t>(n);
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<int>(v % bound);
}

}  // namespace rmopt

#endif  // RMOPT_RANDOM_H_

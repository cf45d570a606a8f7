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


// Brute-force reference computations used as independent oracles. Nothing
// here calls the library's contraction or indexing code.

#ifndef RMOPT_TESTS_ORACLE_H_
#define RMOPT_TESTS_ORACLE_H_

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

// Decodes a row-major joint index (last player fastest).
inline std::vector<int> Decode(const std::vector<int>& counts, size_t idx) {
  std::vector<int> a(counts.size());
  for (size_t k = counts.size(); k-- > 0;) {
    a[k] = static_cast<int>(idx % counts[k]);
    idx /= counts[k];
  }
  return a;
}

inline size_t NumJoint(const std::vector<int>& counts) {
  size_t n = 1;
  for (int m : counts) n *= m;
  return n;
}

// Probability of a joint action under a product profile, skipping `skip`.
inline double Weight(const std::vector<std::vector<double>>& x,
                     const std::vector<int>& a, int skip) {
  double w = 1;
  for (size_t j = 0; j < a.size(); ++j) {
    if (static_cast<int>(j) != skip) w *= x[j][a[j]];
  }
  return w;
}

inline std::vector<double> UtilityVector(
    const std::vector<int>& counts, const std::vector<double>& tensor,
    const std::vector<std::vector<double>>& x, int player) {
  std::vector<double> u(counts[player], 0.0);
  for (size_t idx = 0; idx < NumJoint(counts); ++idx) {
    const std::vector<int> a = Decode(counts, idx);
    u[a[player]] += tensor[idx] * Weight(x, a, player);
  }
  return u;
}

inline double Expectation(const std::vector<int>& counts,
                          const std::vector<double>& tensor,
                          const std::vector<std::vector<double>>& x) {
  double v = 0;
  for (size_t idx = 0; idx < NumJoint(counts); ++idx) {
    v += tensor[idx] * Weight(x, Decode(counts, idx), -1);
  }
  return v;
}

inline double BrGap(const std::vector<double>& u,
                    const std::vector<double>& x) {
  double best = u[0], v = 0;
  for (size_t a = 0; a < u.size(); ++a) {
    best = std::max(best, u[a]);
    v += x[a] * u[a];
  }
  return best - v;
}

inline std::vector<double> RandomSimplex(std::mt19937_64& rng, int m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(m);
  double s = 0;
  for (double& v : x) s += (v = e(rng));
  for (double& v : x) v /= s;
  return x;
}

inline std::vector<std::vector<double>> RandomProfile(
    std::mt19937_64& rng, const std::vector<int>& counts) {
  std::vector<std::vector<double>> x;
  for (int m : counts) x.push_back(RandomSimplex(rng, m));
  return x;
}

}  // namespace oracle

#endif  // RMOPT_TESTS_ORACLE_H_

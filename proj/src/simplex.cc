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

#include "rmopt/simplex.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rmopt {

SimplexProduct::SimplexProduct(std::vector<int> block_sizes)
    : sizes_(std::move(block_sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("need at least one block");
  for (int m : sizes_) {
    if (m < 1) throw std::invalid_argument("block sizes must be >= 1");
  }
}

int SimplexProduct::max_block_size() const {
  return sizes_.empty() ? 0 : *std::max_element(sizes_.begin(), sizes_.end());
}

int SimplexProduct::total_size() const {
  return std::accumulate(sizes_.begin(), sizes_.end(), 0);
}

Point SimplexProduct::Uniform() const {
  Point x;
  for (int m : sizes_) x.emplace_back(m, 1.0 / m);
  return x;
}

void SimplexProduct::CheckShape(const Point& x) const {
  if (x.size() != sizes_.size()) {
    throw std::invalid_argument("profile has " + std::to_string(x.size()) +
                                " blocks, expected " +
                                std::to_string(sizes_.size()));
  }
  for (size_t i = 0; i < sizes_.size(); ++i) {
    if (static_cast<int>(x[i].size()) != sizes_[i]) {
      throw std::invalid_argument("block " + std::to_string(i) + " has size " +
                                  std::to_string(x[i].size()) + ", expected " +
                                  std::to_string(sizes_[i]));
    }
  }
}

bool SimplexProduct::Contains(const Point& x, double tol) const {
  if (x.size() != sizes_.size()) return false;
  for (size_t i = 0; i < sizes_.size(); ++i) {
    if (static_cast<int>(x[i].size()) != sizes_[i]) return false;
    double s = 0;
    for (double p : x[i]) {
      if (!std::isfinite(p) || p < -tol) return false;
      s += p;
    }
    if (std::abs(s - 1) > tol) return false;
  }
  return true;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double BrGap(std::span<const double> utility, std::span<const double> x) {
  if (utility.empty()) throw std::invalid_argument("empty utility");
  // Rounding in <x, u> can leave a value a few ulps below zero.
  return std::max(0.0, utility[BestResponse(utility)] - Dot(x, utility));
}

int BestResponse(std::span<const double> utility) {
  int best = 0;
  for (size_t a = 1; a < utility.size(); ++a) {
    if (utility[a] > utility[best]) best = static_cast<int>(a);
  }
  return best;
}

}  // namespace rmopt

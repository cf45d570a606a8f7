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

#ifndef RMOPT_SIMPLEX_H_
#define RMOPT_SIMPLEX_H_

#include <optional>
#include <span>
#include <vector>

namespace rmopt {

// One block per player. Blocks may sit off the simplex (finite differences).
using Block = std::vector<double>;
using Point = std::vector<Block>;

class SimplexProduct {
 public:
  SimplexProduct() = default;
  explicit SimplexProduct(std::vector<int> block_sizes);

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  int block_size(int i) const { return sizes_.at(i); }
  const std::vector<int>& block_sizes() const { return sizes_; }
  int max_block_size() const;
  int total_size() const;

  Point Uniform() const;
  // Throws std::invalid_argument when the block count or sizes differ.
  void CheckShape(const Point& x) const;
  bool Contains(const Point& x, double tol = 1e-9) const;

  friend bool operator==(const SimplexProduct&,
                         const SimplexProduct&) = default;

 private:
  std::vector<int> sizes_;
};

// max_a u[a] - <x, u>.
double BrGap(std::span<const double> utility, std::span<const double> x);
// Lowest index among the maximizers of u.
int BestResponse(std::span<const double> utility);
double Dot(std::span<const double> a, std::span<const double> b);

// Anything that hands each player a utility vector at a profile: a game
// (expected utilities) or an objective (block gradients).
class UtilitySource {
 public:
  virtual ~UtilitySource() = default;
  virtual const SimplexProduct& domain() const = 0;
  virtual Block UtilityFor(const Point& x, int block) const = 0;
  // Objective or potential value, if the source has one.
  virtual std::optional<double> ValueAt(const Point& x) const = 0;
};

}  // namespace rmopt

#endif  // RMOPT_SIMPLEX_H_

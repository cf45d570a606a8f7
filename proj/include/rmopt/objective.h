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

#ifndef RMOPT_OBJECTIVE_H_
#define RMOPT_OBJECTIVE_H_

#include <memory>
#include <string>
#include <vector>

#include "rmopt/game.h"
#include "rmopt/simplex.h"

namespace rmopt {

// A smooth function on a product of simplices, maximized by the learners.
// Gradients are the utility vectors the learners observe.
class Objective : public UtilitySource {
 public:
  virtual double Evaluate(const Point& x) const = 0;
  virtual Block Gradient(const Point& x, int block) const = 0;
  // Upper bound on the Lipschitz constant of the gradient.
  virtual double smoothness() const = 0;
  // max - min of the objective over the domain, exact or an upper bound.
  virtual double range() const = 0;
  // Upper bound on max_a g[a] - min_a g[a] over the domain and all blocks.
  virtual double gradient_spread() const = 0;
  virtual std::string name() const = 0;

  Block UtilityFor(const Point& x, int block) const final {
    return Gradient(x, block);
  }
  std::optional<double> ValueAt(const Point& x) const final {
    return Evaluate(x);
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

// Mixed extension of the potential (or of the common utility of an
// identical-interest game). Throws for games without either.
ObjectivePtr MakeMultilinear(const GameSpec& game);
ObjectivePtr MakeMultilinear(std::vector<int> counts,
                             std::vector<double> tensor);

// f(p) = 90p - (895/3)p^2 + (1250/3)p^3 - (625/3)p^4 on one 2-action block,
// p = mass on the first action, gradient (f'(p), 0).
ObjectivePtr MakeCyclePolynomial();
double CycleValue(double p);
double CycleDerivative(double p);
double CycleSecondDerivative(double p);

// sum_i <w_i, x_i>.
ObjectivePtr MakeLinear(Point weights);

// c * obj for c > 0.
ObjectivePtr Rescale(ObjectivePtr obj, double factor);
// Rescales so that gradient_spread() <= 1. Identity when the spread is zero.
ObjectivePtr NormalizeGradientSpread(ObjectivePtr obj);
// Replaces the smoothness constant with a caller-supplied value.
ObjectivePtr WithSmoothness(ObjectivePtr obj, double smoothness);

// Sum over blocks of BrGap at the block's utility vector.
double KktGap(const UtilitySource& source, const Point& x);

double EstimateSmoothness(const Objective& obj);
// sqrt(sum_{i != j} sum_{a,b} max_{a_-ij} |T(a, b, a_-ij)|^2): bounds the
// Frobenius norm of the Hessian of the multilinear extension anywhere.
double MultilinearSmoothnessBound(std::span<const int> counts,
                                  std::span<const double> tensor);

// Largest |fd - (g[a] - g[0])| / max(1, |g[a] - g[0]|) over blocks and
// actions a > 0, where fd is the central difference of Evaluate along
// e_a - e_0 with step h. Requires 0 < h <= 1e-3.
double CheckGradient(const Objective& obj, const Point& x, double h);

}  // namespace rmopt

#endif  // RMOPT_OBJECTIVE_H_

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

#include "rmopt/objective.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmopt {
namespace {

class MultilinearObjective : public Objective {
 public:
  MultilinearObjective(std::vector<int> counts, std::vector<double> tensor)
      : counts_(std::move(counts)),
        tensor_(std::move(tensor)),
        domain_(counts_) {
    size_t size = 1;
    for (int m : counts_) size *= m;
    if (tensor_.size() != size) {
      throw std::invalid_argument("tensor size does not match action counts");
    }
    range_ = TensorRange(tensor_);
    smoothness_ = MultilinearSmoothnessBound(counts_, tensor_);
  }
  const SimplexProduct& domain() const override { return domain_; }
  double Evaluate(const Point& x) const override {
    return ExpectedValue(tensor_, counts_, x);
  }
  Block Gradient(const Point& x, int block) const override {
    return ContractExcept(tensor_, counts_, x, block);
  }
  double smoothness() const override { return smoothness_; }
  double range() const override { return range_; }
  // Gradient entries are averages of tensor entries.
  double gradient_spread() const override { return range_; }
  std::string name() const override { return "multilinear"; }

 private:
  std::vector<int> counts_;
  std::vector<double> tensor_;
  SimplexProduct domain_;
  double range_ = 0;
  double smoothness_ = 0;
};

// Real roots in [0, 1] of the cubic f' (bracketed on a grid, then bisected).
std::vector<double> CycleCriticalPoints() {
  std::vector<double> roots;
  constexpr int kGrid = 1000;
  double prev = CycleDerivative(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    double lo = (k - 1.0) / kGrid, hi = static_cast<double>(k) / kGrid;
    const double cur = CycleDerivative(hi);
    if (prev == 0.0) roots.push_back(lo);
    if (prev * cur < 0) {
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((CycleDerivative(lo) < 0) == (CycleDerivative(mid) < 0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  return roots;
}

class CycleObjective : public Objective {
 public:
  CycleObjective() : domain_({2}) {
    double lo = std::min(CycleValue(0), CycleValue(1));
    double hi = std::max(CycleValue(0), CycleValue(1));
    for (double p : CycleCriticalPoints()) {
      lo = std::min(lo, CycleValue(p));
      hi = std::max(hi, CycleValue(p));
    }
    range_ = hi - lo;
    // |f'| peaks at an endpoint or where f'' = 0.
    spread_ = std::max(std::abs(CycleDerivative(0)),
                       std::abs(CycleDerivative(1)));
    const double disc = 2500.0 * 2500.0 - 4 * 2500.0 * (1790.0 / 3.0);
    for (double sgn : {-1.0, 1.0}) {
      const double p = (2500.0 + sgn * std::sqrt(disc)) / 5000.0;
      spread_ = std::max(spread_, std::abs(CycleDerivative(p)));
    }
  }
  const SimplexProduct& domain() const override { return domain_; }
  double Evaluate(const Point& x) const override {
    domain_.CheckShape(x);
    return CycleValue(x[0][0]);
  }
  Block Gradient(const Point& x, int block) const override {
    domain_.CheckShape(x);
    if (block != 0) throw std::out_of_range("block index out of range");
    return {CycleDerivative(x[0][0]), 0.0};
  }
  // max |f''| on [0, 1] is attained at both endpoints.
  double smoothness() const override { return 1790.0 / 3.0; }
  double range() const override { return range_; }
  double gradient_spread() const override { return spread_; }
  std::string name() const override { return "cycle_poly"; }

 private:
  SimplexProduct domain_;
  double range_ = 0;
  double spread_ = 0;
};

class LinearObjective : public Objective {
 public:
  explicit LinearObjective(Point weights) : weights_(std::move(weights)) {
    std::vector<int> sizes;
    for (const Block& w : weights_) {
      sizes.push_back(static_cast<int>(w.size()));
      for (double v : w) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite weight");
      }
      const double r = TensorRange(w);
      range_ += r;
      spread_ = std::max(spread_, r);
    }
    domain_ = SimplexProduct(sizes);
  }
  const SimplexProduct& domain() const override { return domain_; }
  double Evaluate(const Point& x) const override {
    domain_.CheckShape(x);
    double v = 0;
    for (size_t i = 0; i < x.size(); ++i) v += Dot(weights_[i], x[i]);
    return v;
  }
  Block Gradient(const Point& x, int block) const override {
    domain_.CheckShape(x);
    return weights_.at(block);
  }
  double smoothness() const override { return 0; }
  double range() const override { return range_; }
  double gradient_spread() const override { return spread_; }
  std::string name() const override { return "linear"; }

 private:
  Point weights_;
  SimplexProduct domain_;
  double range_ = 0;
  double spread_ = 0;
};

class ScaledObjective : public Objective {
 public:
  ScaledObjective(ObjectivePtr inner, double factor, double smoothness)
      : inner_(std::move(inner)), factor_(factor), smoothness_(smoothness) {}
  const SimplexProduct& domain() const override { return inner_->domain(); }
  double Evaluate(const Point& x) const override {
    return factor_ * inner_->Evaluate(x);
  }
  Block Gradient(const Point& x, int block) const override {
    Block g = inner_->Gradient(x, block);
    for (double& v : g) v *= factor_;
    return g;
  }
  double smoothness() const override { return smoothness_; }
  double range() const override { return factor_ * inner_->range(); }
  double gradient_spread() const override {
    return factor_ * inner_->gradient_spread();
  }
  std::string name() const override { return inner_->name(); }

 private:
  ObjectivePtr inner_;
  double factor_;
  double smoothness_;
};

}  // namespace

// Integer numerators over a common denominator of 3 keep the cycle points'
// derivatives close to exact.
double CycleValue(double p) {
  return (((-625.0 * p + 1250.0) * p - 895.0) * p + 270.0) * p / 3.0;
}

double CycleDerivative(double p) {
  return (((-2500.0 * p + 3750.0) * p - 1790.0) * p + 270.0) / 3.0;
}

double CycleSecondDerivative(double p) {
  return ((-7500.0 * p + 7500.0) * p - 1790.0) / 3.0;
}

ObjectivePtr MakeMultilinear(const GameSpec& game) {
  ValidateGame(game);
  if (game.potential) {
    return std::make_shared<MultilinearObjective>(game.action_counts,
                                                  *game.potential);
  }
  if (game.identical_interest) {
    return std::make_shared<MultilinearObjective>(game.action_counts,
                                                  game.utilities[0]);
  }
  throw std::invalid_argument(
      "multilinear objective needs a potential or identical-interest game");
}

ObjectivePtr MakeMultilinear(std::vector<int> counts,
                             std::vector<double> tensor) {
  return std::make_shared<MultilinearObjective>(std::move(counts),
                                                std::move(tensor));
}

ObjectivePtr MakeCyclePolynomial() {
  return std::make_shared<CycleObjective>();
}

ObjectivePtr MakeLinear(Point weights) {
  return std::make_shared<LinearObjective>(std::move(weights));
}

ObjectivePtr Rescale(ObjectivePtr obj, double factor) {
  if (!obj) throw std::invalid_argument("null objective");
  if (!(factor > 0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scale factor must be positive and finite");
  }
  const double l = factor * obj->smoothness();
  return std::make_shared<ScaledObjective>(std::move(obj), factor, l);
}

ObjectivePtr NormalizeGradientSpread(ObjectivePtr obj) {
  if (!obj) throw std::invalid_argument("null objective");
  const double s = obj->gradient_spread();
  if (!(s > 0)) return obj;
  return Rescale(std::move(obj), 1.0 / s);
}

ObjectivePtr WithSmoothness(ObjectivePtr obj, double smoothness) {
  if (!obj) throw std::invalid_argument("null objective");
  if (!(smoothness >= 0) || !std::isfinite(smoothness)) {
    throw std::invalid_argument("smoothness must be finite and >= 0");
  }
  return std::make_shared<ScaledObjective>(std::move(obj), 1.0, smoothness);
}

double KktGap(const UtilitySource& source, const Point& x) {
  if (!source.domain().Contains(x)) {
    throw std::invalid_argument("kkt_gap: point is not in the domain");
  }
  double total = 0;
  for (int i = 0; i < source.domain().num_blocks(); ++i) {
    total += BrGap(source.UtilityFor(x, i), x[i]);
  }
  return total;
}

double EstimateSmoothness(const Objective& obj) { return obj.smoothness(); }

double MultilinearSmoothnessBound(std::span<const int> counts,
                                  std::span<const double> tensor) {
  const int n = static_cast<int>(counts.size());
  if (n < 2) return 0;
  // peak[i][j][a][b] = max |T| over joints with a_i = a, a_j = b.
  double total = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> peak(static_cast<size_t>(counts[i]) * counts[j], 0);
      for (size_t idx = 0; idx < tensor.size(); ++idx) {
        const std::vector<int> a = JointActions(counts, idx);
        double& p = peak[static_cast<size_t>(a[i]) * counts[j] + a[j]];
        p = std::max(p, std::abs(tensor[idx]));
      }
      for (double p : peak) total += p * p;
    }
  }
  return std::sqrt(total);
}

double CheckGradient(const Objective& obj, const Point& x, double h) {
  if (!(h > 0 && h <= 1e-3)) {
    throw std::invalid_argument("check_gradient: h must lie in (0, 1e-3]");
  }
  obj.domain().CheckShape(x);
  double worst = 0;
  for (int i = 0; i < obj.domain().num_blocks(); ++i) {
    const Block g = obj.Gradient(x, i);
    for (int a = 1; a < obj.domain().block_size(i); ++a) {
      Point plus = x, minus = x;
      plus[i][a] += h;
      plus[i][0] -= h;
      minus[i][a] -= h;
      minus[i][0] += h;
      const double fd = (obj.Evaluate(plus) - obj.Evaluate(minus)) / (2 * h);
      const double exact = g[a] - g[0];
      worst = std::max(worst,
                       std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  return worst;
}

}  // namespace rmopt

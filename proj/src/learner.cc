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

#include "rmopt/learner.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rmopt {

std::string LearnerKindName(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kRM:
      return "rm";
    case LearnerKind::kRMPlus:
      return "rm+";
    case LearnerKind::kDRMPlus:
      return "drm+";
  }
  return "?";
}

LearnerKind ParseLearnerKind(std::string_view name) {
  if (name == "rm") return LearnerKind::kRM;
  if (name == "rm+" || name == "rmplus" || name == "rm_plus") {
    return LearnerKind::kRMPlus;
  }
  if (name == "drm+" || name == "drmplus" || name == "drm_plus") {
    return LearnerKind::kDRMPlus;
  }
  throw std::invalid_argument("unknown learner '" + std::string(name) +
                              "' (expected rm, rm+ or drm+)");
}

Strategy Strategy::Uniform(int num_actions) {
  if (num_actions < 1) throw std::invalid_argument("num_actions must be >= 1");
  return Strategy(std::vector<double>(num_actions, 1.0 / num_actions));
}

Strategy Strategy::Pure(int num_actions, int action) {
  if (num_actions < 1 || action < 0 || action >= num_actions) {
    throw std::invalid_argument("pure strategy action out of range");
  }
  std::vector<double> p(num_actions, 0.0);
  p[action] = 1.0;
  return Strategy(std::move(p));
}

Strategy Strategy::FromWeights(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("empty strategy");
  double sum = 0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0) {
      throw std::invalid_argument("strategy weights must be finite and >= 0");
    }
    sum += w;
  }
  if (!(sum > 0)) throw std::invalid_argument("strategy weights sum to zero");
  for (double& w : weights) w /= sum;
  return Strategy(std::move(weights));
}

namespace {

void CheckDiscount(double alpha) {
  if (!(alpha > 0 && alpha <= 1)) {
    throw std::invalid_argument("discount must lie in (0, 1]");
  }
}

// Proportional play, or nullopt when the positive part is zero.
std::optional<Strategy> PlayRule(const std::vector<double>& r) {
  std::vector<double> theta(r.size());
  bool any = false;
  for (size_t a = 0; a < r.size(); ++a) {
    theta[a] = r[a] > 0 ? r[a] : 0.0;
    any |= theta[a] > 0;
  }
  if (!any) return std::nullopt;
  return Strategy::FromWeights(std::move(theta));
}

}  // namespace

RegretState NewLearner(LearnerKind kind, int num_actions,
                       std::optional<std::vector<double>> init_regrets,
                       std::optional<Strategy> init_strategy,
                       double discount) {
  if (num_actions < 1) throw std::invalid_argument("num_actions must be >= 1");
  CheckDiscount(discount);
  RegretState s;
  s.kind = kind;
  s.discount = discount;
  s.regrets.assign(num_actions, 0.0);
  if (init_regrets) {
    if (static_cast<int>(init_regrets->size()) != num_actions) {
      throw std::invalid_argument("init_regrets has wrong dimension");
    }
    for (double v : *init_regrets) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite regret");
      if (kind != LearnerKind::kRM && v < 0) {
        throw std::invalid_argument("RM+ regrets must be nonnegative");
      }
    }
    s.regrets = std::move(*init_regrets);
  }
  if (init_strategy && init_strategy->size() != num_actions) {
    throw std::invalid_argument("init_strategy has wrong dimension");
  }
  std::optional<Strategy> prop = PlayRule(s.regrets);
  if (prop) {
    if (init_strategy) {
      for (int a = 0; a < num_actions; ++a) {
        if (std::abs((*init_strategy)[a] - (*prop)[a]) > kSimplexTolerance) {
          throw std::invalid_argument(
              "init_strategy disagrees with the positive regrets");
        }
      }
    }
    s.strategy = std::move(*prop);
  } else {
    s.strategy = init_strategy ? std::move(*init_strategy)
                               : Strategy::Uniform(num_actions);
  }
  return s;
}

Strategy CurrentStrategy(const RegretState& state) {
  std::optional<Strategy> prop = PlayRule(state.regrets);
  return prop ? std::move(*prop) : state.strategy;
}

double Advance(RegretState* state, std::span<const double> utility,
               double discount, std::vector<double>* g_out) {
  const Strategy x = CurrentStrategy(*state);
  return AdvanceWithPlayed(state, utility, x.probs(), discount, g_out);
}

double AdvanceWithPlayed(RegretState* state, std::span<const double> utility,
                         std::span<const double> played, double discount,
                         std::vector<double>* g_out) {
  const int m = state->size();
  if (static_cast<int>(utility.size()) != m ||
      static_cast<int>(played.size()) != m) {
    throw std::invalid_argument("utility dimension does not match learner");
  }
  for (double v : utility) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite utility");
  }
  if (state->kind == LearnerKind::kDRMPlus) CheckDiscount(discount);
  double value = 0;
  for (int a = 0; a < m; ++a) value += played[a] * utility[a];
  if (g_out) g_out->resize(m);
  std::vector<double>& r = state->regrets;
  for (int a = 0; a < m; ++a) {
    const double g = utility[a] - value;
    if (g_out) (*g_out)[a] = g;
    r[a] += g;
  }
  if (state->kind != LearnerKind::kRM) {
    for (double& v : r) v = v > 0 ? v : 0.0;
  }
  if (state->kind == LearnerKind::kDRMPlus) {
    for (double& v : r) v *= discount;
  }
  std::optional<Strategy> next = PlayRule(r);
  state->strategy =
      next ? std::move(*next)
           : Strategy::FromWeights(std::vector<double>(played.begin(),
                                                       played.end()));
  return value;
}

StepResult Step(const RegretState& state, std::span<const double> utility) {
  return Step(state, utility, state.discount);
}

StepResult Step(const RegretState& state, std::span<const double> utility,
                double discount) {
  StepResult out{state, {}};
  Advance(&out.state, utility, discount, &out.instantaneous_regret);
  return out;
}

double PositivePartL2(std::span<const double> v) {
  double s = 0;
  for (double x : v) {
    if (x > 0) s += x * x;
  }
  return std::sqrt(s);
}

double PositivePartL1(std::span<const double> v) {
  double s = 0;
  for (double x : v) {
    if (x > 0) s += x;
  }
  return s;
}

double PositivePartMax(std::span<const double> v) {
  double s = 0;
  for (double x : v) s = std::max(s, x);
  return s;
}

double RegretL2(const RegretState& state) {
  return PositivePartL2(state.regrets);
}

double RegretL1Positive(const RegretState& state) {
  return PositivePartL1(state.regrets);
}

RegretBoundReport CheckExternalRegretBound(
    std::span<const double> final_regrets, double sum_sq_g, long long rounds,
    double max_abs_g, double tol) {
  RegretBoundReport rep;
  rep.positive_norm = PositivePartL2(final_regrets);
  rep.path_bound = std::sqrt(sum_sq_g);
  rep.horizon_bound =
      std::sqrt(static_cast<double>(final_regrets.size()) * rounds);
  rep.utilities_bounded = max_abs_g <= 1.0 + tol;
  rep.ok = rep.positive_norm <= rep.path_bound + tol;
  if (rep.utilities_bounded) {
    rep.ok = rep.ok && rep.path_bound <= rep.horizon_bound + tol;
  }
  return rep;
}

RegretBoundReport CheckExternalRegretBound(
    std::span<const double> final_regrets,
    const std::vector<std::vector<double>>& g_history, double tol) {
  double sum_sq = 0, max_abs = 0;
  for (const auto& g : g_history) {
    if (g.size() != final_regrets.size()) {
      throw std::invalid_argument("g history dimension mismatch");
    }
    for (double v : g) {
      sum_sq += v * v;
      max_abs = std::max(max_abs, std::abs(v));
    }
  }
  return CheckExternalRegretBound(final_regrets, sum_sq,
                                  static_cast<long long>(g_history.size()),
                                  max_abs, tol);
}

bool ExternalRegretBoundCheck(
    std::span<const double> final_regrets,
    const std::vector<std::vector<double>>& g_history) {
  return CheckExternalRegretBound(final_regrets, g_history).ok;
}

}  // namespace rmopt

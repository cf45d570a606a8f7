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

#ifndef RMOPT_LEARNER_H_
#define RMOPT_LEARNER_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rmopt {

// Sum-to-one tolerance for strategies.
inline constexpr double kSimplexTolerance = 1e-9;

enum class LearnerKind { kRM, kRMPlus, kDRMPlus };

// "rm", "rm+", "drm+".
std::string LearnerKindName(LearnerKind kind);
LearnerKind ParseLearnerKind(std::string_view name);

// A mixed strategy. Always nonnegative and renormalized by its exact sum.
class Strategy {
 public:
  Strategy() = default;
  static Strategy Uniform(int num_actions);
  static Strategy Pure(int num_actions, int action);
  // Throws std::invalid_argument on negative or non-finite entries or a zero
  // sum.
  static Strategy FromWeights(std::vector<double> weights);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int a) const { return probs_[a]; }
  const std::vector<double>& probs() const { return probs_; }

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  explicit Strategy(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

struct RegretState {
  LearnerKind kind = LearnerKind::kRMPlus;
  std::vector<double> regrets;
  // Strategy played in the most recent round; the fallback when the positive
  // part of the regrets is zero.
  Strategy strategy;
  // Per-round multiplier for DRM+. Ignored by the other kinds.
  double discount = 1.0;

  int size() const { return static_cast<int>(regrets.size()); }
};

// Regrets default to zero. The stored strategy is `init_strategy` if given,
// otherwise proportional to max(r, 0), otherwise uniform.
RegretState NewLearner(LearnerKind kind, int num_actions,
                       std::optional<std::vector<double>> init_regrets = {},
                       std::optional<Strategy> init_strategy = {},
                       double discount = 1.0);

// max(r, 0) normalized, or the stored strategy when that is zero.
Strategy CurrentStrategy(const RegretState& state);

struct StepResult {
  RegretState state;
  // g = u - <x, u> 1 for the strategy x that was played.
  std::vector<double> instantaneous_regret;
};

StepResult Step(const RegretState& state, std::span<const double> utility);
// DRM+ step with an explicit per-round discount.
StepResult Step(const RegretState& state, std::span<const double> utility,
                double discount);

// In-place variant used by the dynamics loop. Plays CurrentStrategy(*state),
// writes g into `g_out` when non-null, and updates regrets and strategy.
// Returns <x, u>.
double Advance(RegretState* state, std::span<const double> utility,
               double discount, std::vector<double>* g_out = nullptr);

// As Advance, but `played` is the strategy used for <x, u> and kept as the
// fallback. The dynamics use this when a strategy is frozen.
double AdvanceWithPlayed(RegretState* state, std::span<const double> utility,
                         std::span<const double> played, double discount,
                         std::vector<double>* g_out = nullptr);

// Norms of max(r, 0).
double PositivePartL2(std::span<const double> v);
double PositivePartL1(std::span<const double> v);
double PositivePartMax(std::span<const double> v);
double RegretL2(const RegretState& state);
double RegretL1Positive(const RegretState& state);

struct RegretBoundReport {
  double positive_norm = 0;  // ||[r^T]^+||_2
  double path_bound = 0;     // sqrt(sum_t ||g_t||^2)
  double horizon_bound = 0;  // sqrt(m T)
  bool utilities_bounded = true;  // every |g_t[a]| <= 1
  bool ok = false;
};

// Checks ||[r^T]^+||_2 <= sqrt(sum ||g||^2), and <= sqrt(mT) when all
// instantaneous regret entries lie in [-1, 1]. Regrets start at zero and
// `final_regrets` is the result of accumulating `g_history` (with RM+
// truncation if applicable).
RegretBoundReport CheckExternalRegretBound(
    std::span<const double> final_regrets,
    const std::vector<std::vector<double>>& g_history, double tol = 1e-9);
// Streaming form: sum of ||g_t||^2, T, and the largest |g_t[a]| seen.
RegretBoundReport CheckExternalRegretBound(
    std::span<const double> final_regrets, double sum_sq_g, long long rounds,
    double max_abs_g, double tol = 1e-9);
bool ExternalRegretBoundCheck(
    std::span<const double> final_regrets,
    const std::vector<std::vector<double>>& g_history);

}  // namespace rmopt

#endif  // RMOPT_LEARNER_H_

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

#ifndef RMOPT_HARD_INSTANCES_H_
#define RMOPT_HARD_INSTANCES_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rmopt/dynamics.h"
#include "rmopt/game.h"

namespace rmopt {

// The m x m spiral payoff matrix A_{m,0}: payoffs 1..2m-1 each appear once,
// everything else is 0. All indices here are 0-based.
struct SpiralMatrix {
  int m = 0;
  std::vector<double> entries;  // row-major m x m
  // positions[k-1] = (row, col) of payoff k.
  std::vector<std::pair<int, int>> positions;

  double at(int row, int col) const { return entries[row * m + col]; }
  int row_of(int k) const { return positions.at(k - 1).first; }
  int col_of(int k) const { return positions.at(k - 1).second; }
  int max_payoff() const { return 2 * m - 1; }
};

// Throws std::invalid_argument unless m is even and >= 2.
SpiralMatrix BuildSpiral(int m);
// A_{m,k} itself, row-major.
std::vector<double> SpiralRecursion(int m, int k);

// (m+1) x (m+1) identical-interest game: A in the top-left block, 1/2 at
// (m, 0) and (0, m), zero elsewhere. Potential = the common matrix.
GameSpec BuildPadded(int m);
// 2m x 2m identical-interest game for uniform initialization.
GameSpec BuildUniformInit(int m);

struct UniformInitSanity {
  double entry_sum = 0;
  std::vector<double> round1_regrets[2];
  double max_pattern_error = 0;  // vs (1/2, 0.., -1/(2m)..)
  bool ok = false;
};
UniformInitSanity CheckUniformInit(const GameSpec& game, int m,
                                   double tol = 1e-9);

// Pure initialization at the padding action, as init strategies.
std::vector<std::vector<double>> PaddedPureInit(int m);

struct PhaseRecord {
  int k = 0;
  int64_t t_low = -1;
  int64_t t_high = -1;  // -1 while phase k+1 has not appeared
  int64_t length = -1;  // T_k
  std::vector<int> rows;  // A_1(k) = {row_of(k') : k <= k' <= 2m-1}
  std::vector<int> cols;
  double min_nash_gap = 0;
  bool complete() const { return t_high >= 0; }
};

struct PhaseViolation {
  int64_t round = 0;
  std::string message;
};

struct BoundCheck {
  std::string name;
  int k = 0;
  double lhs = 0;
  double rhs = 0;
  bool ok = true;
};

struct PhaseReport {
  int m = 0;
  int num_actions = 0;
  double mass_threshold = 0;
  int64_t rounds_observed = 0;
  std::vector<PhaseRecord> phases;  // k = 1, 2, ... in order
  std::vector<PhaseViolation> violations;  // first few, see count
  int64_t violation_count = 0;
  std::vector<BoundCheck> checks;
  double nash_threshold = 0;
  int64_t first_round_nash_at_most = -1;
  double min_nash_gap = 0;
  std::vector<std::string> notes;

  const PhaseRecord* Phase(int k) const;
  int LastCompletePhase() const;
  // Sum of T_k over complete phases k >= 2.
  int64_t CompletedStallRounds() const;
  bool BoundsHold() const;
};

struct PhaseTrackerOptions {
  double mass_threshold = 1e-12;
  // Round 1 is the initialization round; under uniform init every profile
  // has mass there.
  int64_t first_round = 2;
  // Reconstruct zero-init RM regrets from the observed utilities and check
  // the burial, stall and cap bounds. Only meaningful for RM histories.
  bool check_regrets = true;
  bool simultaneous = true;
  double nash_floor_slack = 1e-6;
  // Threshold for first_round_nash_at_most; negative means 1/(2m+2).
  double nash_threshold = -1;
  double regret_tolerance = 1e-6;
  size_t max_logged_violations = 100;
};

// Streams a play history one round at a time, so runs of millions of rounds
// need no stored history.
class PhaseTracker {
 public:
  // `num_actions` is m+1 (padded game) or 2m (uniform-init game).
  PhaseTracker(SpiralMatrix matrix, int num_actions,
               PhaseTrackerOptions options = {});
  // `observed` may be null, in which case the true utilities are used.
  void Observe(int64_t round, const Point& played, const Point* observed);
  PhaseReport Finish() const;
  // Current phase (largest k seen so far), 0 before round first_round.
  int current_phase() const { return phase_; }
  // True once t_low(k) is known.
  bool Reached(int k) const;

 private:
  void Violation(int64_t round, std::string message);
  void SnapshotRegrets(int k);

  SpiralMatrix a_;
  int num_actions_;
  PhaseTrackerOptions opt_;
  GameSpec game_;
  double nash_threshold_;

  int phase_ = 0;
  std::vector<int64_t> t_low_;  // index k, -1 if unseen
  std::vector<double> min_nash_;
  std::vector<double> regrets_[2];
  std::map<int, std::vector<double>> snap_[2];  // r_i at t_high(k)
  std::vector<char> prev_support_[2];
  std::vector<char> abandoned_[2];
  bool have_prev_ = false;
  int64_t rounds_ = 0;
  std::vector<PhaseViolation> violations_;
  int64_t violation_count_ = 0;
  int64_t first_nash_below_ = -1;
  double min_nash_gap_ = 0;
  BoundCheck nash_floor_{"nash_floor", 0, 0, 0, true};
  double nash_floor_margin_ = 0;
};

PhaseReport AnalyzePhases(const PlayHistory& history,
                          const SpiralMatrix& matrix,
                          double mass_threshold = 1e-12);

// T_k >= ((k-2)/2) T_{k-1} and T_k >= (k-2)!/2^(k-3) for every complete
// phase k >= 4.
bool CheckStallGrowth(const PhaseReport& report,
                      std::vector<BoundCheck>* details = nullptr);

nlohmann::json PhaseReportToJson(const PhaseReport& report);

}  // namespace rmopt

#endif  // RMOPT_HARD_INSTANCES_H_

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

#ifndef RMOPT_DYNAMICS_H_
#define RMOPT_DYNAMICS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rmopt/game.h"
#include "rmopt/learner.h"
#include "rmopt/simplex.h"

namespace rmopt {

enum class Scheme { kSimultaneous, kAlternating, kLazyAlternating };
enum class InitPolicy { kZero, kThreshold, kCustom };
enum class StopReason { kConverged, kMaxRounds, kObserver };

std::string SchemeName(Scheme s);        // simultaneous|alternating|lazy
Scheme ParseScheme(std::string_view name);
std::string InitPolicyName(InitPolicy p);  // zero|threshold|custom
InitPolicy ParseInitPolicy(std::string_view name);
std::string StopReasonName(StopReason r);  // converged|max_rounds|observer

struct RunConfig {
  Scheme scheme = Scheme::kSimultaneous;
  // Lazy skip threshold and stopping precision. A run stops after the first
  // round in which every measured br_gap is <= epsilon.
  double epsilon = 1e-3;
  int64_t max_rounds = 1000;
  LearnerKind kind = LearnerKind::kRMPlus;
  // DRM+ multiplier alpha = 1 - gamma. A non-empty schedule gives alpha for
  // rounds 1, 2, ...; its last value repeats once it runs out.
  double discount = 1.0;
  std::vector<double> discount_schedule;
  InitPolicy init = InitPolicy::kZero;
  // Smoothness constant for THRESHOLD init. Negative means take it from the
  // objective (or bound it from the game's potential).
  double smoothness = -1;
  // Per player. kCustom requires regrets; strategies are the fallback for a
  // zero positive part under any policy and may be left empty.
  std::vector<std::vector<double>> init_regrets;
  std::vector<std::vector<double>> init_strategies;
  // Lazy scheme: accumulate a skipped player's regrets (strategy still
  // frozen) instead of freezing both.
  bool lazy_update_skipped_regrets = false;
  uint64_t seed = 0;  // provenance only; the dynamics are deterministic
  bool record_history = true;
  bool record_trace = true;
  bool record_strategies = false;  // snapshot in each TraceRecord

  double DiscountAt(int64_t round) const;
  void Validate() const;
};

struct PlayerTrace {
  double br_gap = 0;
  double regret_l2 = 0;  // ||max(r,0)||_2 after the round
  double regret_l1 = 0;
  bool updated = false;
};

struct TraceRecord {
  int64_t round = 0;
  std::vector<PlayerTrace> players;
  double kkt_gap = 0;  // sum of the players' br_gap
  double value = 0;    // objective at the end of the round, NaN if none
  Point strategies;    // profile entering the round, if recorded
};

// strategies[t][i] is what player i played in round t+1 and utilities[t][i]
// the vector it observed then.
struct PlayHistory {
  Scheme scheme = Scheme::kSimultaneous;
  std::vector<Point> strategies;
  std::vector<Point> utilities;

  size_t size() const { return strategies.size(); }
  void Validate() const;
};

struct RoundView {
  int64_t round;
  const Point& played;
  const Point& utilities;
  const std::vector<double>& br_gaps;
  const std::vector<char>& updated;
  const std::vector<RegretState>& states;  // after the round
  double value;                           // after the round
};

// Called after every round; returning false ends the run.
using RoundObserver = std::function<bool(const RoundView&)>;

struct RunResult {
  PlayHistory history;
  std::vector<TraceRecord> trace;
  StopReason stop_reason = StopReason::kMaxRounds;
  int64_t rounds = 0;
  std::vector<RegretState> final_states;
  Point final_profile;
  double initial_value = 0;
  // delta_i: br_gap measured in round 1.
  std::vector<double> initial_br_gaps;
  std::vector<double> last_br_gaps;
  double last_kkt_gap = 0;
  std::vector<double> max_regret_l2;  // per player over the run
};

std::vector<RegretState> InitialStates(const UtilitySource& source,
                                       const RunConfig& config);
RunResult Run(const UtilitySource& source, const RunConfig& config,
              const RoundObserver& observer = {});
TraceRecord MakeTraceRecord(const RoundView& view, bool with_strategies);

// max_i br_gap_i at the players' true utilities.
double NashGap(const GameSpec& game, const Point& profile);

// Average of the product distributions, built one round at a time.
class CceAccumulator {
 public:
  explicit CceAccumulator(std::vector<int> action_counts);
  void Add(const Point& profile);
  int64_t rounds() const { return rounds_; }
  // max_i max_{a_i'} E_mu[u_i(a_i', a_-i)] - E_mu[u_i].
  double Gap(const GameSpec& game) const;

 private:
  std::vector<int> counts_;
  std::vector<double> mass_;
  int64_t rounds_ = 0;
};

// Throws for alternating histories unless `allow_alternating` is set, in
// which case the result is the gap of the averaged profiles actually played.
double CceGap(const GameSpec& game, const PlayHistory& history,
              bool allow_alternating = false);

// round,player,br_gap,kkt_gap,regret_l2,regret_l1,value,updated
// Numbers use 17 significant digits. Each round gets one row per player and
// a summary row with player -1: max br_gap, kkt sum, max norms, number of
// players updated.
class TraceCsvWriter {
 public:
  explicit TraceCsvWriter(std::ostream& out);
  void WriteHeader();
  void Write(const TraceRecord& record);

 private:
  std::ostream& out_;
};
void WriteTraceCsv(std::ostream& out, const std::vector<TraceRecord>& trace);

// One JSON object per line: a meta line, then per round
// {"round", "strategies", "utilities"}.
class HistoryJsonlWriter {
 public:
  HistoryJsonlWriter(std::ostream& out, Scheme scheme,
                     const std::vector<int>& action_counts);
  void Write(int64_t round, const Point& strategies, const Point& utilities);

 private:
  std::ostream& out_;
};
void WriteHistoryJsonl(std::ostream& out, const PlayHistory& history,
                       const std::vector<int>& action_counts);
PlayHistory ReadHistoryJsonl(std::istream& in);

std::string FormatDouble(double v);

}  // namespace rmopt

#endif  // RMOPT_DYNAMICS_H_

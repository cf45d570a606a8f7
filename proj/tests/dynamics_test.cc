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


#include "rmopt/dynamics.h"

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracle.h"
#include "rmopt/game.h"
#include "rmopt/objective.h"

namespace rmopt {
namespace {

std::shared_ptr<const GameSpec> IdenticalGame(int rows, int cols,
                                              std::vector<double> a) {
  auto g = std::make_shared<GameSpec>();
  g->action_counts = {rows, cols};
  g->utilities = {a, a};
  g->potential = a;
  g->identical_interest = true;
  ValidateGame(*g);
  return g;
}

RunConfig Config(Scheme scheme, LearnerKind kind, double eps,
                 int64_t rounds) {
  RunConfig c;
  c.scheme = scheme;
  c.kind = kind;
  c.epsilon = eps;
  c.max_rounds = rounds;
  return c;
}

TEST_CASE("two-by-two coordination example") {
  GameUtilitySource src(IdenticalGame(2, 2, {1, 0, 0, 0}));
  const RunResult r =
      Run(src, Config(Scheme::kSimultaneous, LearnerKind::kRMPlus, 0, 10));
  REQUIRE(r.rounds == 2);
  CHECK(r.stop_reason == StopReason::kConverged);
  CHECK(r.history.utilities[0][0] == Block{0.5, 0});
  CHECK(r.history.utilities[0][1] == Block{0.5, 0});
  CHECK(r.initial_br_gaps == std::vector<double>{0.25, 0.25});
  CHECK(r.history.strategies[1][0] == Block{1, 0});
  CHECK(r.history.strategies[1][1] == Block{1, 0});
  CHECK(r.last_br_gaps == std::vector<double>{0, 0});
  CHECK(r.trace[0].value == 1);
  CHECK(r.initial_value == 0.25);
  CHECK(r.trace[0].kkt_gap == 0.5);
  // Round 2 adds g = (0, -1) to r = (0.25, 0).
  CHECK(r.final_states[0].regrets == std::vector<double>{0.25, 0});
}

TEST_CASE("single player: all schemes coincide") {
  auto g = std::make_shared<GameSpec>();
  g->action_counts = {4};
  g->utilities = {{0.1, 0.7, 0.3, 0.65}};
  g->potential = g->utilities[0];
  GameUtilitySource src(g);
  const RunResult a =
      Run(src, Config(Scheme::kSimultaneous, LearnerKind::kRM, 1e-3, 500));
  const RunResult b =
      Run(src, Config(Scheme::kAlternating, LearnerKind::kRM, 1e-3, 500));
  const RunResult c =
      Run(src, Config(Scheme::kLazyAlternating, LearnerKind::kRM, 1e-3, 500));
  CHECK(a.rounds == b.rounds);
  CHECK(a.rounds == c.rounds);
  CHECK(a.history.strategies == b.history.strategies);
  CHECK(a.history.strategies == c.history.strategies);
  // The lazy player skips its update in the converged round.
  CHECK_FALSE(c.trace.back().players[0].updated);
  CHECK(a.trace.back().players[0].updated);
}

TEST_CASE("lazy scheme with a large epsilon does nothing") {
  GameUtilitySource src(
      std::make_shared<const GameSpec>(RandomPotentialGame(3, {2, 3, 2}, 3)));
  const RunResult r =
      Run(src, Config(Scheme::kLazyAlternating, LearnerKind::kRMPlus, 2, 50));
  CHECK(r.rounds == 1);
  CHECK(r.stop_reason == StopReason::kConverged);
  for (const PlayerTrace& p : r.trace[0].players) CHECK_FALSE(p.updated);
  for (const RegretState& s : r.final_states) {
    for (double v : s.regrets) CHECK(v == 0);
  }
  CHECK(r.final_profile == src.domain().Uniform());
}

TEST_CASE("alternating players see their predecessors' new strategies") {
  auto g = std::make_shared<const GameSpec>(RandomGeneralGame(3, {2, 3, 2}, 4));
  GameUtilitySource src(g);
  const RunResult r =
      Run(src, Config(Scheme::kAlternating, LearnerKind::kRMPlus, 0, 5));
  // Replay by hand.
  std::vector<RegretState> s;
  Point x;
  for (int m : g->action_counts) {
    s.push_back(NewLearner(LearnerKind::kRMPlus, m));
    x.push_back(s.back().strategy.probs());
  }
  for (int t = 0; t < 5; ++t) {
    CHECK(r.history.strategies[t] == x);
    for (int i = 0; i < 3; ++i) {
      const Block u = oracle::UtilityVector(g->action_counts, g->utilities[i],
                                            x, i);
      for (size_t a = 0; a < u.size(); ++a) {
        CHECK(std::abs(u[a] - r.history.utilities[t][i][a]) <= 1e-15);
      }
      Advance(&s[i], r.history.utilities[t][i], 1.0);
      x[i] = s[i].strategy.probs();
    }
  }
}

TEST_CASE("lazy skip: frozen regrets or accumulated regrets") {
  // Player 0 is already at its best response; player 1 is not.
  GameUtilitySource src(IdenticalGame(2, 2, {1, 0, 0, 0}));
  RunConfig c = Config(Scheme::kLazyAlternating, LearnerKind::kRMPlus, 0.01, 1);
  c.init_strategies = {{1, 0}, {0.5, 0.5}};
  const RunResult frozen = Run(src, c);
  // Player 0 faces (0.5, 0) with x = (1, 0): gap 0.
  CHECK_FALSE(frozen.trace[0].players[0].updated);
  CHECK(frozen.trace[0].players[1].updated);
  CHECK(frozen.final_states[0].regrets == std::vector<double>{0, 0});
  CHECK(frozen.final_profile[0] == Block{1, 0});

  c.lazy_update_skipped_regrets = true;
  const RunResult acc = Run(src, c);
  CHECK_FALSE(acc.trace[0].players[0].updated);
  // g = (0.5, 0) - 0.5 = (0, -0.5); RM+ clips to zero either way, so use RM.
  c.kind = LearnerKind::kRM;
  const RunResult acc_rm = Run(src, c);
  CHECK(acc_rm.final_states[0].regrets == std::vector<double>{0, -0.5});
  CHECK(acc_rm.final_profile[0] == Block{1, 0});
  CHECK(acc_rm.final_states[0].strategy.probs() == Block{1, 0});
}

TEST_CASE("lazy scheme: potential never decreases and telescopes") {
  for (int s = 0; s < 20; ++s) {
    auto g = std::make_shared<const GameSpec>(
        RandomPotentialGame(3, {3, 2, 3}, 100 + s, s % 2 ? 0.5 : 0.0));
    GameUtilitySource src(g);
    RunConfig c = Config(Scheme::kLazyAlternating, LearnerKind::kRMPlus, 0.05,
                         2000);
    const RunResult r = Run(src, c);
    double prev = r.initial_value, gain = 0;
    for (const TraceRecord& t : r.trace) {
      CHECK(t.value >= prev - 1e-12);
      gain += t.value - prev;
      prev = t.value;
    }
    CHECK(gain == doctest::Approx(prev - r.initial_value));
    CHECK(r.initial_value + gain <= 1 + 1e-12);
  }
}

TEST_CASE("symmetric games in lockstep stay identical") {
  for (int s = 0; s < 6; ++s) {
    auto g = std::make_shared<const GameSpec>(
        s % 2 ? RandomSymmetricIdenticalGame(3, 3, s)
              : NormalizeUtilities(RandomCongestionGame(2, 4, s)));
    GameUtilitySource src(g);
    const RunResult r =
        Run(src, Config(Scheme::kSimultaneous, LearnerKind::kRM, 0, 300));
    for (size_t t = 0; t < r.history.size(); ++t) {
      for (int i = 1; i < g->num_players(); ++i) {
        CHECK(r.history.strategies[t][i] == r.history.strategies[t][0]);
        CHECK(r.history.utilities[t][i] == r.history.utilities[t][0]);
      }
    }
  }
}

TEST_CASE("runs are deterministic and trace kkt is the sum of gaps") {
  auto g = std::make_shared<const GameSpec>(RandomPotentialGame(3, {3, 3, 2}, 5));
  GameUtilitySource src(g);
  RunConfig c = Config(Scheme::kAlternating, LearnerKind::kDRMPlus, 1e-4, 400);
  c.discount = 0.9;
  c.record_strategies = true;
  const RunResult a = Run(src, c), b = Run(src, c);
  CHECK(a.history.strategies == b.history.strategies);
  CHECK(a.rounds == b.rounds);
  for (const TraceRecord& t : a.trace) {
    double sum = 0;
    for (const PlayerTrace& p : t.players) sum += p.br_gap;
    CHECK(t.kkt_gap == sum);
    CHECK(t.strategies == a.history.strategies[t.round - 1]);
  }
  CHECK(a.last_kkt_gap == a.trace.back().kkt_gap);
}

TEST_CASE("nash gap") {
  auto id = IdenticalGame(2, 2, {1, 0, 0, 1});
  CHECK(NashGap(*id, {{1, 0}, {1, 0}}) == 0);
  CHECK(NashGap(*id, {{0.5, 0.5}, {0.5, 0.5}}) == 0);
  CHECK(NashGap(*id, {{1, 0}, {0, 1}}) == 1);
  CHECK_THROWS(NashGap(*id, {{1, 0}}));
}

TEST_CASE("cce gap") {
  auto id = IdenticalGame(2, 2, {1, 0, 0, 1});
  PlayHistory h;
  h.strategies = {{{1, 0}, {1, 0}}};
  h.utilities = {{{1, 0}, {1, 0}}};
  CHECK(CceGap(*id, h) == 0);
  h.strategies = {{{0.5, 0.5}, {0.5, 0.5}}};
  CHECK(CceGap(*id, h) == 0);
  // mu = 1/2 on each diagonal cell: every deviation loses 1/2, and the gap
  // is reported without clamping.
  h.strategies = {{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}};
  h.utilities = h.strategies;
  CHECK(CceGap(*id, h) == -0.5);
  h.scheme = Scheme::kAlternating;
  CHECK_THROWS_AS(CceGap(*id, h), std::invalid_argument);
  CHECK(CceGap(*id, h, true) == -0.5);

  // Bounded by the average of the worst external regret.
  for (int s = 0; s < 10; ++s) {
    auto g = std::make_shared<const GameSpec>(RandomGeneralGame(2, {3, 3}, s));
    GameUtilitySource src(g);
    RunConfig c = Config(Scheme::kSimultaneous, LearnerKind::kRM, 0, 500);
    const RunResult r = Run(src, c);
    double worst = 0;
    for (const RegretState& st : r.final_states) {
      for (double v : st.regrets) worst = std::max(worst, v);
    }
    const double cce = CceGap(*g, r.history);
    CHECK(cce <= worst / r.rounds + 1e-12);
    CHECK(cce <= std::sqrt(3.0 / r.rounds));
  }
}

TEST_CASE("cce accumulator matches a brute-force average") {
  std::mt19937_64 rng(3);
  const std::vector<int> counts = {2, 3};
  const GameSpec g = RandomGeneralGame(2, counts, 3);
  CceAccumulator acc(counts);
  std::vector<double> mu(6, 0);
  for (int t = 0; t < 7; ++t) {
    const Point p = oracle::RandomProfile(rng, counts);
    acc.Add(p);
    for (size_t idx = 0; idx < 6; ++idx) {
      mu[idx] += oracle::Weight(p, oracle::Decode(counts, idx), -1) / 7;
    }
  }
  double want = -1;
  for (int i = 0; i < 2; ++i) {
    double base = 0;
    for (size_t idx = 0; idx < 6; ++idx) base += mu[idx] * g.utilities[i][idx];
    for (int d = 0; d < counts[i]; ++d) {
      double dev = 0;
      for (size_t idx = 0; idx < 6; ++idx) {
        std::vector<int> a = oracle::Decode(counts, idx);
        a[i] = d;
        dev += mu[idx] * g.utilities[i][JointIndex(counts, a)];
      }
      want = std::max(want, dev - base);
    }
  }
  CHECK(acc.Gap(g) == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS(CceAccumulator({2, 3}).Gap(g));
}

TEST_CASE("run config validation and discounts") {
  RunConfig c;
  c.scheme = Scheme::kLazyAlternating;
  c.epsilon = 0;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c.epsilon = 0.1;
  c.max_rounds = 0;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c.max_rounds = 5;
  c.discount = 0;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c.discount = 1;
  c.discount_schedule = {0.5, 0.8};
  CHECK(c.DiscountAt(1) == 1.0);  // not DRM+
  c.kind = LearnerKind::kDRMPlus;
  CHECK(c.DiscountAt(1) == 0.5);
  CHECK(c.DiscountAt(2) == 0.8);
  CHECK(c.DiscountAt(50) == 0.8);
  c.discount_schedule = {1.5};
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  CHECK(ParseScheme("lazy") == Scheme::kLazyAlternating);
  CHECK(SchemeName(Scheme::kAlternating) == "alternating");
  CHECK_THROWS(ParseScheme("sometimes"));
  CHECK(ParseInitPolicy("threshold") == InitPolicy::kThreshold);
  CHECK(StopReasonName(StopReason::kObserver) == "observer");
}

TEST_CASE("initial states") {
  const ObjectivePtr obj =
      MakeLinear({{1, 0}, {0, 1}, {0.5, 0.5}, {0.2, 0.8}});
  RunConfig c;
  c.init = InitPolicy::kThreshold;
  c.smoothness = 2;
  const std::vector<RegretState> s = InitialStates(*obj, c);
  REQUIRE(s.size() == 4);
  for (const RegretState& st : s) {
    CHECK(st.regrets ==
          std::vector<double>(2, std::max(2 * std::sqrt(2.0),
                                          9 * std::sqrt(2.0) * 2)));
  }
  c.smoothness = 0.01;
  CHECK(InitialStates(*obj, c)[0].regrets[0] == 2 * std::sqrt(2.0));

  c.init = InitPolicy::kCustom;
  CHECK_THROWS_AS(InitialStates(*obj, c), std::invalid_argument);
  c.init_regrets = {{1, 0}, {0, 1}, {0, 0}, {2, 2}};
  c.init_strategies = {{}, {}, {0.25, 0.75}, {}};
  const std::vector<RegretState> t = InitialStates(*obj, c);
  CHECK(CurrentStrategy(t[0]).probs() == Block{1, 0});
  CHECK(CurrentStrategy(t[2]).probs() == Block{0.25, 0.75});
  CHECK(CurrentStrategy(t[3]).probs() == Block{0.5, 0.5});
  c.init_strategies = {{}, {}, {1, 0, 0}, {}};
  CHECK_THROWS_AS(InitialStates(*obj, c), std::invalid_argument);

  // A general game has no smoothness constant to offer.
  GameUtilitySource general(
      std::make_shared<const GameSpec>(RandomGeneralGame(2, {2, 2}, 1)));
  RunConfig th;
  th.init = InitPolicy::kThreshold;
  CHECK_THROWS_AS(InitialStates(general, th), std::invalid_argument);
}

class NanSource : public UtilitySource {
 public:
  NanSource() : dom_({2}) {}
  const SimplexProduct& domain() const override { return dom_; }
  Block UtilityFor(const Point&, int) const override { return {1, 0}; }
  std::optional<double> ValueAt(const Point& x) const override {
    return x[0][0] > 0.9 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  }

 private:
  SimplexProduct dom_;
};

TEST_CASE("a non-finite value aborts the run") {
  NanSource src;
  CHECK_THROWS_AS(Run(src, RunConfig{}), std::runtime_error);
}

TEST_CASE("observer can stop the run") {
  GameUtilitySource src(
      std::make_shared<const GameSpec>(RandomGeneralGame(2, {3, 3}, 9)));
  int calls = 0;
  const RunResult r = Run(src, Config(Scheme::kSimultaneous,
                                      LearnerKind::kRM, 0, 100),
                          [&](const RoundView& v) {
                            ++calls;
                            return v.round < 7;
                          });
  CHECK(r.rounds == 7);
  CHECK(calls == 7);
  CHECK(r.stop_reason == StopReason::kObserver);
  CHECK(r.trace.size() == 7);
}

TEST_CASE("trace csv") {
  GameUtilitySource src(IdenticalGame(2, 2, {1, 0, 0, 0}));
  const RunResult r =
      Run(src, Config(Scheme::kSimultaneous, LearnerKind::kRMPlus, 0, 10));
  std::ostringstream out;
  WriteTraceCsv(out, r.trace);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "round,player,br_gap,kkt_gap,regret_l2,regret_l1,value,updated");
  std::getline(in, line);
  CHECK(line == "1,0,0.25,0.5,0.25,0.25,1,1");
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "1,-1,0.25,0.5,0.25,0.25,1,2");
  int rows = 3;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2 * 3);  // two rounds, two players plus a summary row
}

TEST_CASE("history jsonl round trip and errors") {
  auto g = std::make_shared<const GameSpec>(RandomGeneralGame(2, {2, 3}, 2));
  GameUtilitySource src(g);
  const RunResult r =
      Run(src, Config(Scheme::kAlternating, LearnerKind::kRM, 0, 25));
  std::stringstream buf;
  WriteHistoryJsonl(buf, r.history, g->action_counts);
  const PlayHistory back = ReadHistoryJsonl(buf);
  CHECK(back.scheme == Scheme::kAlternating);
  CHECK(back.strategies == r.history.strategies);
  CHECK(back.utilities == r.history.utilities);

  std::istringstream bad(
      "{\"type\":\"meta\",\"scheme\":\"simultaneous\"}\n"
      "{\"round\":1,\"strategies\":[[1,0]],\"utilities\":[[0,0]]}\n"
      "{\"round\":3,\"strategies\":[[1,0]],\"utilities\":[[0,0]]}\n");
  try {
    ReadHistoryJsonl(bad);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream garbage("{\"type\":\"meta\",\"scheme\":\"lazy\"}\n{oops\n");
  CHECK_THROWS_AS(ReadHistoryJsonl(garbage), std::invalid_argument);
  std::istringstream empty("");
  CHECK_THROWS_AS(ReadHistoryJsonl(empty), std::invalid_argument);
}

}  // namespace
}  // namespace rmopt

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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "rmopt/objective.h"

namespace rmopt {

using nlohmann::json;

std::string SchemeName(Scheme s) {
  switch (s) {
    case Scheme::kSimultaneous:
      return "simultaneous";
    case Scheme::kAlternating:
      return "alternating";
    case Scheme::kLazyAlternating:
      return "lazy";
  }
  return "?";
}

Scheme ParseScheme(std::string_view name) {
  if (name == "simultaneous" || name == "sim") return Scheme::kSimultaneous;
  if (name == "alternating" || name == "alt") return Scheme::kAlternating;
  if (name == "lazy" || name == "lazy_alternating" ||
      name == "lazy-alternating") {
    return Scheme::kLazyAlternating;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected simultaneous, alternating, lazy)");
}

std::string InitPolicyName(InitPolicy p) {
  switch (p) {
    case InitPolicy::kZero:
      return "zero";
    case InitPolicy::kThreshold:
      return "threshold";
    case InitPolicy::kCustom:
      return "custom";
  }
  return "?";
}

InitPolicy ParseInitPolicy(std::string_view name) {
  if (name == "zero") return InitPolicy::kZero;
  if (name == "threshold") return InitPolicy::kThreshold;
  if (name == "custom") return InitPolicy::kCustom;
  throw std::invalid_argument("unknown init policy '" + std::string(name) +
                              "' (expected zero, threshold, custom)");
}

std::string StopReasonName(StopReason r) {
  switch (r) {
    case StopReason::kConverged:
      return "converged";
    case StopReason::kMaxRounds:
      return "max_rounds";
    case StopReason::kObserver:
      return "observer";
  }
  return "?";
}

double RunConfig::DiscountAt(int64_t round) const {
  if (kind != LearnerKind::kDRMPlus) return 1.0;
  if (discount_schedule.empty()) return discount;
  const size_t k = static_cast<size_t>(std::max<int64_t>(round, 1) - 1);
  return discount_schedule[std::min(k, discount_schedule.size() - 1)];
}

void RunConfig::Validate() const {
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (!std::isfinite(epsilon) || epsilon < 0) {
    throw std::invalid_argument("epsilon must be finite and >= 0");
  }
  if (scheme == Scheme::kLazyAlternating && !(epsilon > 0)) {
    throw std::invalid_argument("the lazy scheme needs epsilon > 0");
  }
  auto check_alpha = [](double a) {
    if (!(a > 0 && a <= 1)) {
      throw std::invalid_argument("discount must lie in (0, 1]");
    }
  };
  check_alpha(discount);
  for (double a : discount_schedule) check_alpha(a);
}

void PlayHistory::Validate() const {
  if (strategies.size() != utilities.size()) {
    throw std::invalid_argument("history: strategies and utilities differ "
                                "in length");
  }
  for (size_t t = 0; t < strategies.size(); ++t) {
    if (strategies[t].size() != utilities[t].size() ||
        (t > 0 && strategies[t].size() != strategies[0].size())) {
      throw std::invalid_argument("history: inconsistent block count at "
                                  "round " + std::to_string(t + 1));
    }
    for (size_t i = 0; i < strategies[t].size(); ++i) {
      if (strategies[t][i].size() != utilities[t][i].size()) {
        throw std::invalid_argument("history: block size mismatch at round " +
                                    std::to_string(t + 1));
      }
    }
  }
}

namespace {

double ResolveSmoothness(const UtilitySource& source, const RunConfig& c) {
  if (c.smoothness >= 0) return c.smoothness;
  if (const auto* obj = dynamic_cast<const Objective*>(&source)) {
    return obj->smoothness();
  }
  if (const auto* g = dynamic_cast<const GameUtilitySource*>(&source)) {
    const GameSpec& game = g->game();
    if (game.potential) {
      return MultilinearSmoothnessBound(game.action_counts, *game.potential);
    }
    if (game.identical_interest) {
      return MultilinearSmoothnessBound(game.action_counts,
                                        game.utilities[0]);
    }
  }
  throw std::invalid_argument(
      "threshold init needs a smoothness constant for this source");
}

}  // namespace

std::vector<RegretState> InitialStates(const UtilitySource& source,
                                       const RunConfig& config) {
  config.Validate();
  const SimplexProduct& dom = source.domain();
  const int n = dom.num_blocks();
  if (!config.init_strategies.empty() &&
      static_cast<int>(config.init_strategies.size()) != n) {
    throw std::invalid_argument("init_strategies: expected one per player");
  }
  if (config.init == InitPolicy::kCustom &&
      static_cast<int>(config.init_regrets.size()) != n) {
    throw std::invalid_argument("init_regrets: expected one per player");
  }
  double smooth = 0;
  if (config.init == InitPolicy::kThreshold) {
    smooth = ResolveSmoothness(source, config);
  }
  std::vector<RegretState> states;
  for (int i = 0; i < n; ++i) {
    const int m = dom.block_size(i);
    std::optional<std::vector<double>> regrets;
    if (config.init == InitPolicy::kThreshold) {
      const double c = std::max(2 * std::sqrt(m), 9 * std::sqrt(m) * smooth);
      regrets = std::vector<double>(m, c);
    } else if (config.init == InitPolicy::kCustom) {
      regrets = config.init_regrets[i];
    }
    std::optional<Strategy> strategy;
    if (!config.init_strategies.empty() &&
        !config.init_strategies[i].empty()) {
      if (static_cast<int>(config.init_strategies[i].size()) != m) {
        throw std::invalid_argument("init_strategies[" + std::to_string(i) +
                                    "]: wrong dimension");
      }
      strategy = Strategy::FromWeights(config.init_strategies[i]);
    }
    states.push_back(NewLearner(config.kind, m, std::move(regrets),
                                std::move(strategy), config.DiscountAt(1)));
  }
  return states;
}

TraceRecord MakeTraceRecord(const RoundView& view, bool with_strategies) {
  TraceRecord rec;
  rec.round = view.round;
  rec.players.resize(view.br_gaps.size());
  for (size_t i = 0; i < view.br_gaps.size(); ++i) {
    PlayerTrace& p = rec.players[i];
    p.br_gap = view.br_gaps[i];
    p.regret_l2 = RegretL2(view.states[i]);
    p.regret_l1 = RegretL1Positive(view.states[i]);
    p.updated = view.updated[i] != 0;
    rec.kkt_gap += p.br_gap;
  }
  rec.value = view.value;
  if (with_strategies) rec.strategies = view.played;
  return rec;
}

RunResult Run(const UtilitySource& source, const RunConfig& config,
              const RoundObserver& observer) {
  RunResult res;
  std::vector<RegretState> states = InitialStates(source, config);
  const int n = source.domain().num_blocks();
  const bool lazy = config.scheme == Scheme::kLazyAlternating;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto value_at = [&](const Point& p, int64_t round) {
    std::optional<double> v = source.ValueAt(p);
    if (!v) return nan;
    if (!std::isfinite(*v)) {
      throw std::runtime_error("non-finite objective value at round " +
                               std::to_string(round));
    }
    return *v;
  };

  Point x(n);
  for (int i = 0; i < n; ++i) x[i] = states[i].strategy.probs();
  res.initial_value = value_at(x, 0);
  res.history.scheme = config.scheme;
  res.max_regret_l2.resize(n);
  for (int i = 0; i < n; ++i) res.max_regret_l2[i] = RegretL2(states[i]);

  Point utils(n);
  std::vector<double> gaps(n);
  std::vector<char> updated(n);
  int64_t t = 0;
  while (t < config.max_rounds) {
    ++t;
    const Point played = x;
    const double alpha = config.DiscountAt(t);
    if (config.scheme == Scheme::kSimultaneous) {
      for (int i = 0; i < n; ++i) {
        utils[i] = source.UtilityFor(x, i);
        gaps[i] = BrGap(utils[i], x[i]);
      }
      for (int i = 0; i < n; ++i) {
        AdvanceWithPlayed(&states[i], utils[i], x[i], alpha);
        updated[i] = 1;
      }
      for (int i = 0; i < n; ++i) x[i] = states[i].strategy.probs();
    } else {
      for (int i = 0; i < n; ++i) {
        utils[i] = source.UtilityFor(x, i);
        gaps[i] = BrGap(utils[i], x[i]);
        if (lazy && gaps[i] <= config.epsilon) {
          updated[i] = 0;
          if (config.lazy_update_skipped_regrets) {
            AdvanceWithPlayed(&states[i], utils[i], x[i], alpha);
            states[i].strategy = Strategy::FromWeights(x[i]);
          }
          continue;
        }
        AdvanceWithPlayed(&states[i], utils[i], x[i], alpha);
        x[i] = states[i].strategy.probs();
        updated[i] = 1;
      }
    }
    const double value = value_at(x, t);
    for (int i = 0; i < n; ++i) {
      res.max_regret_l2[i] = std::max(res.max_regret_l2[i],
                                      RegretL2(states[i]));
    }
    if (t == 1) res.initial_br_gaps = gaps;

    const RoundView view{t, played, utils, gaps, updated, states, value};
    if (config.record_history) {
      res.history.strategies.push_back(played);
      res.history.utilities.push_back(utils);
    }
    if (config.record_trace) {
      res.trace.push_back(MakeTraceRecord(view, config.record_strategies));
    }
    const bool keep_going = !observer || observer(view);

    bool done = true;
    for (double g : gaps) done = done && g <= config.epsilon;
    if (done) {
      res.stop_reason = StopReason::kConverged;
      break;
    }
    if (!keep_going) {
      res.stop_reason = StopReason::kObserver;
      break;
    }
  }
  res.rounds = t;
  res.last_br_gaps = gaps;
  res.last_kkt_gap = 0;
  for (double g : gaps) res.last_kkt_gap += g;
  res.final_states = std::move(states);
  res.final_profile = std::move(x);
  return res;
}

double NashGap(const GameSpec& game, const Point& profile) {
  game.domain().CheckShape(profile);
  double gap = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    gap = std::max(gap, BrGap(UtilityVector(game, i, profile), profile[i]));
  }
  return gap;
}

CceAccumulator::CceAccumulator(std::vector<int> action_counts)
    : counts_(std::move(action_counts)) {
  size_t size = 1;
  for (int m : counts_) size *= m;
  mass_.assign(size, 0.0);
}

void CceAccumulator::Add(const Point& profile) {
  SimplexProduct(counts_).CheckShape(profile);
  const int n = static_cast<int>(counts_.size());
  std::vector<int> a(n, 0);
  for (size_t idx = 0; idx < mass_.size(); ++idx) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= profile[j][a[j]];
    mass_[idx] += w;
    for (int j = n - 1; j >= 0; --j) {
      if (++a[j] < counts_[j]) break;
      a[j] = 0;
    }
  }
  ++rounds_;
}

double CceAccumulator::Gap(const GameSpec& game) const {
  if (game.action_counts != counts_) {
    throw std::invalid_argument("cce_gap: game does not match the history");
  }
  if (rounds_ == 0) throw std::invalid_argument("cce_gap: empty history");
  const int n = game.num_players();
  std::vector<size_t> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * counts_[i + 1];
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const auto& u = game.utilities[i];
    double base = 0;
    std::vector<double> dev(counts_[i], 0.0);
    for (size_t idx = 0; idx < mass_.size(); ++idx) {
      const double mu = mass_[idx] / rounds_;
      if (mu == 0.0) continue;
      base += mu * u[idx];
      const int ai = static_cast<int>((idx / stride[i]) % counts_[i]);
      const size_t root = idx - ai * stride[i];
      for (int d = 0; d < counts_[i]; ++d) dev[d] += mu * u[root + d * stride[i]];
    }
    worst = std::max(worst, *std::max_element(dev.begin(), dev.end()) - base);
  }
  return worst;
}

double CceGap(const GameSpec& game, const PlayHistory& history,
              bool allow_alternating) {
  history.Validate();
  if (history.scheme != Scheme::kSimultaneous && !allow_alternating) {
    throw std::invalid_argument(
        "cce_gap: history is not simultaneous (pass the alternating "
        "override to compute it anyway)");
  }
  CceAccumulator acc(game.action_counts);
  for (const Point& p : history.strategies) acc.Add(p);
  return acc.Gap(game);
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TraceCsvWriter::TraceCsvWriter(std::ostream& out) : out_(out) {}

void TraceCsvWriter::WriteHeader() {
  out_ << "round,player,br_gap,kkt_gap,regret_l2,regret_l1,value,updated\n";
}

void TraceCsvWriter::Write(const TraceRecord& rec) {
  const std::string kkt = FormatDouble(rec.kkt_gap);
  const std::string value = FormatDouble(rec.value);
  double max_gap = 0, max_l2 = 0, max_l1 = 0;
  int count = 0;
  for (size_t i = 0; i < rec.players.size(); ++i) {
    const PlayerTrace& p = rec.players[i];
    out_ << rec.round << ',' << i << ',' << FormatDouble(p.br_gap) << ','
         << kkt << ',' << FormatDouble(p.regret_l2) << ','
         << FormatDouble(p.regret_l1) << ',' << value << ','
         << (p.updated ? 1 : 0) << '\n';
    max_gap = std::max(max_gap, p.br_gap);
    max_l2 = std::max(max_l2, p.regret_l2);
    max_l1 = std::max(max_l1, p.regret_l1);
    count += p.updated ? 1 : 0;
  }
  out_ << rec.round << ",-1," << FormatDouble(max_gap) << ',' << kkt << ','
       << FormatDouble(max_l2) << ',' << FormatDouble(max_l1) << ',' << value
       << ',' << count << '\n';
}

void WriteTraceCsv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  TraceCsvWriter w(out);
  w.WriteHeader();
  for (const TraceRecord& r : trace) w.Write(r);
}

HistoryJsonlWriter::HistoryJsonlWriter(std::ostream& out, Scheme scheme,
                                       const std::vector<int>& action_counts)
    : out_(out) {
  json meta = {{"type", "meta"},
               {"scheme", SchemeName(scheme)},
               {"players", action_counts.size()},
               {"actions", action_counts}};
  out_ << meta.dump() << '\n';
}

void HistoryJsonlWriter::Write(int64_t round, const Point& strategies,
                               const Point& utilities) {
  json row = {{"round", round},
              {"strategies", strategies},
              {"utilities", utilities}};
  out_ << row.dump() << '\n';
}

void WriteHistoryJsonl(std::ostream& out, const PlayHistory& history,
                       const std::vector<int>& action_counts) {
  HistoryJsonlWriter w(out, history.scheme, action_counts);
  for (size_t t = 0; t < history.size(); ++t) {
    w.Write(static_cast<int64_t>(t + 1), history.strategies[t],
            history.utilities[t]);
  }
}

PlayHistory ReadHistoryJsonl(std::istream& in) {
  PlayHistory h;
  std::string line;
  int lineno = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
      if (!have_meta) {
        if (row.value("type", "") != "meta") {
          throw std::invalid_argument("first line must be the meta record");
        }
        h.scheme = ParseScheme(row.at("scheme").get<std::string>());
        have_meta = true;
        continue;
      }
      if (row.at("round").get<int64_t>() !=
          static_cast<int64_t>(h.size() + 1)) {
        throw std::invalid_argument("rounds must be consecutive from 1");
      }
      h.strategies.push_back(row.at("strategies").get<Point>());
      h.utilities.push_back(row.at("utilities").get<Point>());
    } catch (const std::exception& e) {
      throw std::invalid_argument("history line " + std::to_string(lineno) +
                                  ": " + e.what());
    }
  }
  if (!have_meta) throw std::invalid_argument("history: missing meta line");
  h.Validate();
  return h;
}

}  // namespace rmopt

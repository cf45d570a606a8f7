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

#include "rmopt/hard_instances.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmopt/learner.h"

namespace rmopt {
namespace {

void CheckEven(int m) {
  if (m < 2 || m % 2 != 0) {
    throw std::invalid_argument("m must be an even integer >= 2, got " +
                                std::to_string(m));
  }
}

std::string SetString(const std::vector<char>& s) {
  std::string out = "{";
  for (size_t a = 0; a < s.size(); ++a) {
    if (!s[a]) continue;
    if (out.size() > 1) out += ',';
    out += std::to_string(a);
  }
  return out + "}";
}

bool SupportWithin(const std::vector<char>& s, int a, int b) {
  bool any = false;
  for (size_t k = 0; k < s.size(); ++k) {
    if (!s[k]) continue;
    if (static_cast<int>(k) != a && static_cast<int>(k) != b) return false;
    any = true;
  }
  return any;
}

}  // namespace

std::vector<double> SpiralRecursion(int m, int k) {
  CheckEven(m);
  std::vector<double> a(static_cast<size_t>(m) * m, 0.0);
  if (m == 2) {
    a = {k + 1.0, 0.0, k + 2.0, k + 3.0};
    return a;
  }
  a[0] = k + 1.0;
  a[(m - 1) * m] = k + 2.0;
  a[(m - 1) * m + (m - 1)] = k + 3.0;
  a[1 * m + (m - 1)] = k + 4.0;
  const std::vector<double> inner = SpiralRecursion(m - 2, k + 4);
  for (int r = 0; r < m - 2; ++r) {
    for (int c = 0; c < m - 2; ++c) {
      a[(r + 1) * m + (c + 1)] = inner[r * (m - 2) + c];
    }
  }
  return a;
}

SpiralMatrix BuildSpiral(int m) {
  SpiralMatrix s;
  s.m = m;
  s.entries = SpiralRecursion(m, 0);
  s.positions.assign(2 * m - 1, {-1, -1});
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const double v = s.at(r, c);
      if (v == 0) continue;
      const int k = static_cast<int>(v);
      if (k != v || k < 1 || k > 2 * m - 1 || s.positions[k - 1].first >= 0) {
        throw std::logic_error("spiral recursion produced a bad entry");
      }
      s.positions[k - 1] = {r, c};
    }
  }
  return s;
}

GameSpec BuildPadded(int m) {
  const SpiralMatrix a = BuildSpiral(m);
  const int n = m + 1;
  std::vector<double> b(static_cast<size_t>(n) * n, 0.0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) b[r * n + c] = a.at(r, c);
  }
  b[m * n + 0] = 0.5;
  b[0 * n + m] = 0.5;
  GameSpec g;
  g.action_counts = {n, n};
  g.utilities = {b, b};
  g.potential = b;
  g.identical_interest = true;
  return g;
}

GameSpec BuildUniformInit(int m) {
  const SpiralMatrix a = BuildSpiral(m);
  const int n = 2 * m;
  const double md = m;
  double total = 0;
  std::vector<double> row_sum(m, 0.0), col_sum(m, 0.0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      row_sum[r] += a.at(r, c);
      col_sum[c] += a.at(r, c);
      total += a.at(r, c);
    }
  }
  std::vector<double> b(static_cast<size_t>(n) * n, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double v;
      if (r < m && c < m) {
        v = a.at(r, c);
      } else if (r == 0) {  // c >= m
        v = 1 - 1 / md;
      } else if (c == 0) {  // r >= m
        v = 1 - 3 / md;
      } else if (r < m) {  // 1 <= r < m, c >= m
        v = -row_sum[r] / md;
      } else if (c < m) {  // r >= m, 1 <= c < m
        v = -col_sum[c] / md;
      } else {
        v = total / (md * md) - 2 / md;
      }
      b[r * n + c] = v;
    }
  }
  GameSpec g;
  g.action_counts = {n, n};
  g.utilities = {b, b};
  g.potential = b;
  g.identical_interest = true;
  const UniformInitSanity sanity = CheckUniformInit(g, m);
  if (!sanity.ok) {
    throw std::logic_error("uniform-init matrix failed its sanity identities");
  }
  return g;
}

UniformInitSanity CheckUniformInit(const GameSpec& game, int m, double tol) {
  CheckEven(m);
  UniformInitSanity s;
  if (game.action_counts != std::vector<int>{2 * m, 2 * m}) {
    throw std::invalid_argument("uniform-init game must be 2m x 2m");
  }
  for (double v : game.utilities[0]) s.entry_sum += v;
  const Point x = game.domain().Uniform();
  for (int i = 0; i < 2; ++i) {
    const Block u = UtilityVector(game, i, x);
    const double v = Dot(x[i], u);
    s.round1_regrets[i].resize(u.size());
    for (size_t a = 0; a < u.size(); ++a) {
      const double r = u[a] - v;
      s.round1_regrets[i][a] = r;
      const double want = a == 0                           ? 0.5
                          : a < static_cast<size_t>(m) ? 0.0
                                                       : -0.5 / m;
      s.max_pattern_error = std::max(s.max_pattern_error, std::abs(r - want));
    }
  }
  s.ok = std::abs(s.entry_sum) <= tol && s.max_pattern_error <= tol;
  return s;
}

std::vector<std::vector<double>> PaddedPureInit(int m) {
  CheckEven(m);
  std::vector<double> e(m + 1, 0.0);
  e[m] = 1.0;
  return {e, e};
}

const PhaseRecord* PhaseReport::Phase(int k) const {
  for (const PhaseRecord& p : phases) {
    if (p.k == k) return &p;
  }
  return nullptr;
}

int PhaseReport::LastCompletePhase() const {
  int last = 0;
  for (const PhaseRecord& p : phases) {
    if (p.complete()) last = std::max(last, p.k);
  }
  return last;
}

int64_t PhaseReport::CompletedStallRounds() const {
  int64_t total = 0;
  for (const PhaseRecord& p : phases) {
    if (p.k >= 2 && p.complete()) total += p.length;
  }
  return total;
}

bool PhaseReport::BoundsHold() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BoundCheck& c) { return c.ok; });
}

PhaseTracker::PhaseTracker(SpiralMatrix matrix, int num_actions,
                           PhaseTrackerOptions options)
    : a_(std::move(matrix)), num_actions_(num_actions), opt_(options) {
  const int m = a_.m;
  if (num_actions == m + 1) {
    game_ = BuildPadded(m);
  } else if (num_actions == 2 * m) {
    game_ = BuildUniformInit(m);
  } else {
    throw std::invalid_argument("history has " + std::to_string(num_actions) +
                                " actions; expected m+1 or 2m for m = " +
                                std::to_string(m));
  }
  nash_threshold_ =
      opt_.nash_threshold >= 0 ? opt_.nash_threshold : 1.0 / (2 * m + 2);
  t_low_.assign(2 * m + 1, -1);
  min_nash_.assign(2 * m + 1, std::numeric_limits<double>::infinity());
  for (int i = 0; i < 2; ++i) {
    regrets_[i].assign(num_actions, 0.0);
    prev_support_[i].assign(num_actions, 0);
    abandoned_[i].assign(num_actions, 0);
  }
  min_nash_gap_ = std::numeric_limits<double>::infinity();
}

bool PhaseTracker::Reached(int k) const {
  return k >= 1 && k < static_cast<int>(t_low_.size()) && t_low_[k] >= 0;
}

void PhaseTracker::Violation(int64_t round, std::string message) {
  ++violation_count_;
  if (violations_.size() < opt_.max_logged_violations) {
    violations_.push_back({round, std::move(message)});
  }
}

void PhaseTracker::SnapshotRegrets(int k) {
  for (int i = 0; i < 2; ++i) snap_[i][k] = regrets_[i];
}

void PhaseTracker::Observe(int64_t round, const Point& played,
                           const Point* observed) {
  if (played.size() != 2 || static_cast<int>(played[0].size()) != num_actions_ ||
      static_cast<int>(played[1].size()) != num_actions_) {
    throw std::invalid_argument("phase tracker: profile has the wrong shape");
  }
  rounds_ = std::max(rounds_, round);
  const bool need_true = !(opt_.simultaneous && observed);
  Point true_u;
  if (need_true) {
    true_u = {UtilityVector(game_, 0, played), UtilityVector(game_, 1, played)};
  }
  const Point& u_true = need_true ? true_u : *observed;
  const Point& u_seen = observed ? *observed : true_u;
  const int top = a_.max_payoff();

  if (round >= opt_.first_round) {
    std::vector<char> support[2];
    for (int i = 0; i < 2; ++i) {
      support[i].resize(num_actions_);
      for (int a = 0; a < num_actions_; ++a) {
        support[i][a] = played[i][a] > opt_.mass_threshold;
      }
    }
    if (have_prev_) {
      for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < num_actions_; ++a) {
          if (prev_support_[i][a] && !support[i][a]) abandoned_[i][a] = 1;
          if (abandoned_[i][a] && support[i][a]) {
            Violation(round, std::string(i == 0 ? "row " : "column ") +
                                 std::to_string(a) +
                                 " regained mass after being abandoned");
          }
        }
      }
    }
    for (int k = phase_ + 1; k <= top; ++k) {
      const double mass = played[0][a_.row_of(k)] * played[1][a_.col_of(k)];
      if (!(mass > opt_.mass_threshold)) continue;
      if (k != phase_ + 1) {
        Violation(round, "profile " + std::to_string(k) +
                             " appeared before profile " +
                             std::to_string(phase_ + 1));
      }
      t_low_[k] = round;
      if (k >= 2 && phase_ == k - 1) SnapshotRegrets(k - 1);
      phase_ = k;
    }
    if (phase_ == 0) {
      Violation(round, "profile 1 has no mass");
    } else if (phase_ == 1) {
      if (!SupportWithin(support[0], a_.row_of(1), a_.row_of(1)) ||
          !SupportWithin(support[1], a_.col_of(1), a_.col_of(1))) {
        Violation(round, "phase 1 support " + SetString(support[0]) + " x " +
                             SetString(support[1]) + " is not pure");
      }
    } else {
      const int rk = a_.row_of(phase_), ck = a_.col_of(phase_);
      const int rp = a_.row_of(phase_ - 1), cp = a_.col_of(phase_ - 1);
      const bool ok = rp == rk ? SupportWithin(support[0], rk, rk) &&
                                     SupportWithin(support[1], cp, ck)
                               : SupportWithin(support[1], ck, ck) &&
                                     SupportWithin(support[0], rp, rk);
      if (!ok) {
        Violation(round, "phase " + std::to_string(phase_) + " support " +
                             SetString(support[0]) + " x " +
                             SetString(support[1]) +
                             " leaves the prescribed transition");
      }
    }
    prev_support_[0] = std::move(support[0]);
    prev_support_[1] = std::move(support[1]);
    have_prev_ = true;

    const double ng = std::max(BrGap(u_true[0], played[0]),
                               BrGap(u_true[1], played[1]));
    min_nash_gap_ = std::min(min_nash_gap_, ng);
    if (phase_ >= 1) min_nash_[phase_] = std::min(min_nash_[phase_], ng);
    if (first_nash_below_ < 0 && ng <= nash_threshold_) {
      first_nash_below_ = round;
    }
    if (phase_ >= 1 && phase_ + 1 < top) {
      const double floor = 1.0 / (phase_ + 2) - opt_.nash_floor_slack;
      const double margin = ng - floor;
      if (nash_floor_.k == 0 || margin < nash_floor_margin_) {
        nash_floor_margin_ = margin;
        nash_floor_ = {"nash_floor", phase_, ng, floor, margin > 0};
      }
    }
  }

  if (opt_.check_regrets) {
    for (int i = 0; i < 2; ++i) {
      const double v = Dot(played[i], u_seen[i]);
      for (int a = 0; a < num_actions_; ++a) {
        regrets_[i][a] += u_seen[i][a] - v;
      }
    }
  }
}

PhaseReport PhaseTracker::Finish() const {
  PhaseReport rep;
  const int m = a_.m, top = a_.max_payoff();
  rep.m = m;
  rep.num_actions = num_actions_;
  rep.mass_threshold = opt_.mass_threshold;
  rep.rounds_observed = rounds_;
  rep.violations = violations_;
  rep.violation_count = violation_count_;
  rep.nash_threshold = nash_threshold_;
  rep.first_round_nash_at_most = first_nash_below_;
  rep.min_nash_gap = std::isfinite(min_nash_gap_) ? min_nash_gap_ : 0.0;

  for (int k = 1; k <= top; ++k) {
    if (t_low_[k] < 0) {
      rep.notes.push_back("phase " + std::to_string(k) + " not reached in " +
                          std::to_string(rounds_) + " rounds");
      break;
    }
    PhaseRecord p;
    p.k = k;
    p.t_low = t_low_[k];
    if (k < top && t_low_[k + 1] >= 0) {
      p.t_high = t_low_[k + 1] - 1;
      p.length = p.t_high - p.t_low + 1;
    }
    for (int kk = k; kk <= top; ++kk) {
      p.rows.push_back(a_.row_of(kk));
      p.cols.push_back(a_.col_of(kk));
    }
    std::sort(p.rows.begin(), p.rows.end());
    p.rows.erase(std::unique(p.rows.begin(), p.rows.end()), p.rows.end());
    std::sort(p.cols.begin(), p.cols.end());
    p.cols.erase(std::unique(p.cols.begin(), p.cols.end()), p.cols.end());
    p.min_nash_gap = std::isfinite(min_nash_[k]) ? min_nash_[k] : 0.0;
    rep.phases.push_back(std::move(p));
  }
  if (!rep.phases.empty() && !rep.phases.back().complete() &&
      rep.phases.back().k < top) {
    rep.notes.push_back("phase " + std::to_string(rep.phases.back().k) +
                        " incomplete at the end of the history");
  }

  auto length = [&](int k) -> int64_t {
    const PhaseRecord* p = rep.Phase(k);
    return p && p->complete() ? p->length : -1;
  };
  auto snap = [&](int player, int k) -> const std::vector<double>* {
    auto it = snap_[player].find(k);
    return it == snap_[player].end() ? nullptr : &it->second;
  };
  const double tol = opt_.regret_tolerance;

  if (opt_.check_regrets) {
    if (const auto* r = snap(0, 2)) {
      const double lhs = PositivePartMax(*r);
      rep.checks.push_back({"regret_cap", 2, lhs, 4.0 / 3, lhs <= 4.0 / 3 + tol});
    }
    if (const auto* r = snap(1, 3)) {
      const double lhs = PositivePartMax(*r);
      rep.checks.push_back({"regret_cap", 3, lhs, 4.0 / 3, lhs <= 4.0 / 3 + tol});
    }
    for (int k = 4; k <= top; ++k) {
      const int p = k % 2 == 0 ? 0 : 1;
      // Burial of the not-yet-played actions at t_high(k-2).
      if (const auto* r = snap(p, k - 2)) {
        double rhs = 0;
        bool known = true;
        for (int l = 2; l <= k - 2; ++l) {
          known = known && length(l) >= 0;
          rhs -= (l - 1) * static_cast<double>(length(l));
        }
        if (known) {
          double lhs = -std::numeric_limits<double>::infinity();
          for (int kk = k; kk <= top; ++kk) {
            lhs = std::max(lhs, (*r)[p == 0 ? a_.row_of(kk) : a_.col_of(kk)]);
          }
          rep.checks.push_back({"burial", k, lhs, rhs, lhs <= rhs + tol});
        }
      }
      // Stall duration from the mover's buried regret.
      if (k + 1 <= top && length(k) >= 0) {
        const int other = 1 - p;
        if (const auto* r = snap(other, k - 1)) {
          const int a = other == 0 ? a_.row_of(k + 1) : a_.col_of(k + 1);
          const double rhs = -0.5 * (*r)[a];
          const double lhs = static_cast<double>(length(k));
          rep.checks.push_back({"stall", k, lhs, rhs, lhs >= rhs - tol});
        }
      }
      if (const auto* r = snap(p, k)) {
        const double lhs = PositivePartMax(*r);
        const double rhs = 5.0 / 3 * std::pow(2.0, (k - p) / 2);
        rep.checks.push_back({"regret_cap", k, lhs, rhs, lhs <= rhs + tol});
      }
    }
  }
  if (nash_floor_.k != 0) rep.checks.push_back(nash_floor_);
  return rep;
}

PhaseReport AnalyzePhases(const PlayHistory& history,
                          const SpiralMatrix& matrix, double mass_threshold) {
  history.Validate();
  if (history.size() == 0) throw std::invalid_argument("empty history");
  PhaseTrackerOptions opt;
  opt.mass_threshold = mass_threshold;
  opt.simultaneous = history.scheme == Scheme::kSimultaneous;
  PhaseTracker tracker(matrix,
                       static_cast<int>(history.strategies[0].at(0).size()),
                       opt);
  for (size_t t = 0; t < history.size(); ++t) {
    tracker.Observe(static_cast<int64_t>(t + 1), history.strategies[t],
                    &history.utilities[t]);
  }
  return tracker.Finish();
}

bool CheckStallGrowth(const PhaseReport& report,
                      std::vector<BoundCheck>* details) {
  bool ok = true;
  int checked = 0;
  for (const PhaseRecord& p : report.phases) {
    if (p.k < 4 || !p.complete()) continue;
    const PhaseRecord* prev = report.Phase(p.k - 1);
    if (!prev || !prev->complete()) continue;
    const double growth = (p.k - 2) / 2.0 * prev->length;
    double factorial = 1;
    for (int j = 2; j <= p.k - 2; ++j) factorial *= j;
    const double floor = factorial / std::pow(2.0, p.k - 3);
    const double t = static_cast<double>(p.length);
    const BoundCheck g{"growth", p.k, t, growth, t >= growth};
    const BoundCheck f{"factorial_floor", p.k, t, floor, t >= floor};
    ok = ok && g.ok && f.ok;
    if (details) {
      details->push_back(g);
      details->push_back(f);
    }
    ++checked;
  }
  return ok && checked > 0;
}

nlohmann::json PhaseReportToJson(const PhaseReport& report) {
  using nlohmann::json;
  json phases = json::array();
  for (const PhaseRecord& p : report.phases) {
    json j = {{"k", p.k},
              {"t_low", p.t_low},
              {"rows", p.rows},
              {"cols", p.cols},
              {"min_nash_gap", p.min_nash_gap}};
    j["t_high"] = p.complete() ? json(p.t_high) : json(nullptr);
    j["length"] = p.complete() ? json(p.length) : json(nullptr);
    phases.push_back(std::move(j));
  }
  json violations = json::array();
  for (const PhaseViolation& v : report.violations) {
    violations.push_back({{"round", v.round}, {"message", v.message}});
  }
  json checks = json::array();
  for (const BoundCheck& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"k", c.k},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"ok", c.ok}});
  }
  std::vector<BoundCheck> growth;
  const bool growth_ok = CheckStallGrowth(report, &growth);
  json growth_json = json::array();
  for (const BoundCheck& c : growth) {
    growth_json.push_back({{"name", c.name},
                           {"k", c.k},
                           {"length", c.lhs},
                           {"floor", c.rhs},
                           {"ok", c.ok}});
  }
  json out = {{"m", report.m},
              {"num_actions", report.num_actions},
              {"mass_threshold", report.mass_threshold},
              {"rounds_observed", report.rounds_observed},
              {"index_base", 0},
              {"phases", phases},
              {"violation_count", report.violation_count},
              {"violations", violations},
              {"checks", checks},
              {"stall_growth_ok", growth_ok},
              {"stall_growth", growth_json},
              {"nash_threshold", report.nash_threshold},
              {"min_nash_gap", report.min_nash_gap},
              {"notes", report.notes}};
  out["first_round_nash_at_most"] =
      report.first_round_nash_at_most >= 0
          ? json(report.first_round_nash_at_most)
          : json(nullptr);
  return out;
}

}  // namespace rmopt

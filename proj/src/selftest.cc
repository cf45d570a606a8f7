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

#include "rmopt/selftest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmopt/dynamics.h"
#include "rmopt/game.h"
#include "rmopt/hard_instances.h"
#include "rmopt/learner.h"
#include "rmopt/objective.h"
#include "rmopt/random.h"
#include "rmopt/simplex.h"

namespace rmopt {
namespace {

constexpr double kTol = 1e-9;

std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Counts checks and keeps the first few failure messages.
class Checker {
 public:
  bool Expect(bool ok, const std::function<std::string()>& what) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (messages_.size() < 12) messages_.push_back("FAIL " + what());
    }
    return ok;
  }
  void Note(std::string s) { notes_.push_back(std::move(s)); }

  int64_t checks() const { return checks_; }
  int64_t failures() const { return failures_; }

  void Fill(SuiteResult* r) const {
    r->passed = failures_ == 0 && checks_ > 0;
    r->details = notes_;
    r->details.insert(r->details.end(), messages_.begin(), messages_.end());
    if (failures_ > static_cast<int64_t>(messages_.size())) {
      r->details.push_back(Fmt("... %lld failures in total",
                               static_cast<long long>(failures_)));
    }
  }

 private:
  int64_t checks_ = 0;
  int64_t failures_ = 0;
  std::vector<std::string> messages_;
  std::vector<std::string> notes_;
};

std::vector<double> RandomSimplexPoint(std::mt19937_64& rng, int m) {
  std::vector<double> w(m);
  for (double& v : w) v = -std::log(1.0 - UniformUnit(rng)) + 1e-12;
  return Strategy::FromWeights(w).probs();
}

Point RandomProfile(std::mt19937_64& rng, const SimplexProduct& dom) {
  Point x(dom.num_blocks());
  for (int i = 0; i < dom.num_blocks(); ++i) {
    x[i] = RandomSimplexPoint(rng, dom.block_size(i));
  }
  return x;
}

int MaxCount(const std::vector<int>& counts) {
  return *std::max_element(counts.begin(), counts.end());
}

std::string CountsString(const std::vector<int>& counts) {
  std::string s;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(counts[i]);
  }
  return s;
}

// Normalized game of one of four families: potential, general, symmetric
// identical interest, congestion.
GameSpec CorpusGame(std::mt19937_64& rng, int family, int n, int max_m) {
  std::vector<int> counts(n);
  for (int& m : counts) m = 2 + UniformInt(rng, max_m - 1);
  const uint64_t seed = rng();
  GameSpec g;
  switch (family % 4) {
    case 0:
      g = RandomPotentialGame(n, counts, seed, UniformInt(rng, 2) ? 0.5 : 0.0);
      break;
    case 1:
      g = RandomGeneralGame(n, counts, seed);
      break;
    case 2:
      g = RandomSymmetricIdenticalGame(n, counts[0], seed);
      break;
    default:
      // Two resources give every action the same cost.
      g = RandomCongestionGame(n, std::max(counts[0], 3), seed);
      break;
  }
  return NormalizeUtilities(std::move(g));
}

// Potential games only: potential, potential with dummy terms, symmetric,
// congestion.
GameSpec PotentialCorpusGame(std::mt19937_64& rng, int family, int n,
                             int max_m) {
  std::vector<int> counts(n);
  for (int& m : counts) m = 2 + UniformInt(rng, max_m - 1);
  const uint64_t seed = rng();
  GameSpec g;
  switch (family % 4) {
    case 0:
      g = RandomPotentialGame(n, counts, seed);
      break;
    case 1:
      g = RandomPotentialGame(n, counts, seed, 0.5);
      break;
    case 2:
      g = RandomSymmetricIdenticalGame(n, counts[0], seed);
      break;
    default:
      g = RandomCongestionGame(n, std::max(counts[0], 3), seed);
      break;
  }
  return NormalizeUtilities(std::move(g));
}

std::vector<double> InstantRegret(const Block& u, const Block& x) {
  const double v = Dot(x, u);
  std::vector<double> g(u.size());
  for (size_t a = 0; a < u.size(); ++a) g[a] = u[a] - v;
  return g;
}

double SquaredNorm(const std::vector<double>& v) {
  double s = 0;
  for (double e : v) s += e * e;
  return s;
}

RunConfig QuietConfig() {
  RunConfig c;
  c.record_history = false;
  c.record_trace = false;
  return c;
}

constexpr Scheme kSchemes[] = {Scheme::kSimultaneous, Scheme::kAlternating,
                               Scheme::kLazyAlternating};

struct CorpusRun {
  std::shared_ptr<const GameSpec> game;
  Scheme scheme;
  LearnerKind kind;
  std::string label;
};

// The 200 (game, scheme, learner) configurations shared by the regret-norm
// suites.
std::vector<CorpusRun> RegretCorpus() {
  std::vector<CorpusRun> runs;
  for (int k = 0; k < 200; ++k) {
    std::mt19937_64 rng(0xC0FFEE + k);
    const int n = 1 + UniformInt(rng, 3);
    auto game = std::make_shared<const GameSpec>(CorpusGame(rng, k, n, 5));
    const Scheme scheme = kSchemes[k % 3];
    const LearnerKind kind =
        (k / 3) % 2 ? LearnerKind::kRMPlus : LearnerKind::kRM;
    runs.push_back({game, scheme, kind,
                    Fmt("run %d (%s, %s, %s)", k,
                        CountsString(game->action_counts).c_str(),
                        SchemeName(scheme).c_str(),
                        LearnerKindName(kind).c_str())});
  }
  return runs;
}

RunConfig CorpusConfig(const CorpusRun& run, LearnerKind kind) {
  RunConfig c = QuietConfig();
  c.scheme = run.scheme;
  c.kind = kind;
  c.epsilon = run.scheme == Scheme::kLazyAlternating ? 1e-3 : 0.0;
  c.max_rounds = 1000;
  return c;
}

void RegretBoundSuite(Checker* ck) {
  double worst = 0;
  for (const CorpusRun& run : RegretCorpus()) {
    GameUtilitySource src(run.game);
    const int n = run.game->num_players();
    std::vector<double> sum_sq(n, 0.0), max_abs(n, 0.0);
    const RunConfig c = CorpusConfig(run, run.kind);
    RunResult res = Run(src, c, [&](const RoundView& v) {
      for (int i = 0; i < n; ++i) {
        if (!v.updated[i]) continue;
        for (double e : InstantRegret(v.utilities[i], v.played[i])) {
          sum_sq[i] += e * e;
          max_abs[i] = std::max(max_abs[i], std::abs(e));
        }
      }
      return true;
    });
    for (int i = 0; i < n; ++i) {
      const RegretBoundReport rep = CheckExternalRegretBound(
          res.final_states[i].regrets, sum_sq[i], res.rounds, max_abs[i], kTol);
      worst = std::max(worst, rep.positive_norm / rep.horizon_bound);
      ck->Expect(rep.ok && rep.utilities_bounded, [&] {
        return Fmt("%s player %d: |[r]+|=%.6g path=%.6g sqrt(mT)=%.6g",
                   run.label.c_str(), i, rep.positive_norm, rep.path_bound,
                   rep.horizon_bound);
      });
    }
  }
  ck->Note(Fmt("200 runs: max |[r]+|_2 / sqrt(mT) = %.4f", worst));

  double worst_drm = 0;
  for (int k = 0; k < 50; ++k) {
    std::mt19937_64 rng(0xD15C + k);
    const int n = 1 + UniformInt(rng, 3);
    auto game = std::make_shared<const GameSpec>(CorpusGame(rng, k, n, 5));
    GameUtilitySource src(game);
    for (double gamma : {0.1, 0.5}) {
      RunConfig c = QuietConfig();
      c.scheme = kSchemes[k % 3];
      c.kind = LearnerKind::kDRMPlus;
      c.discount = 1 - gamma;
      c.epsilon = c.scheme == Scheme::kLazyAlternating ? 1e-3 : 0.0;
      c.max_rounds = 1000;
      Run(src, c, [&](const RoundView& v) {
        for (int i = 0; i < n; ++i) {
          const double norm = RegretL2(v.states[i]);
          const double bound = std::sqrt(v.states[i].size() / gamma);
          worst_drm = std::max(worst_drm, norm / bound);
          ck->Expect(norm <= bound + kTol, [&] {
            return Fmt("drm+ game %d gamma %.2f round %lld player %d: "
                       "|r|=%.6g > %.6g",
                       k, gamma, static_cast<long long>(v.round), i, norm,
                       bound);
          });
        }
        return true;
      });
    }
  }
  ck->Note(Fmt("drm+ 100 runs: max |r|_2 / sqrt(m/gamma) = %.4f", worst_drm));
}

void MonotoneNormSuite(Checker* ck) {
  int64_t steps = 0;
  double min_slack = INFINITY;
  for (const CorpusRun& run : RegretCorpus()) {
    GameUtilitySource src(run.game);
    const int n = run.game->num_players();
    const RunConfig c = CorpusConfig(run, LearnerKind::kRMPlus);
    std::vector<std::vector<double>> prev;
    for (const RegretState& s : InitialStates(src, c)) prev.push_back(s.regrets);
    Run(src, c, [&](const RoundView& v) {
      for (int i = 0; i < n; ++i) {
        const std::vector<double>& next = v.states[i].regrets;
        if (v.updated[i] && PositivePartL1(prev[i]) > 0) {
          const std::vector<double> g =
              InstantRegret(v.utilities[i], v.played[i]);
          const double growth = SquaredNorm(next) - SquaredNorm(prev[i]);
          const double floor = PositivePartL2(g) * PositivePartL2(g);
          const double cap = SquaredNorm(g);
          ++steps;
          min_slack = std::min(min_slack, growth - floor);
          ck->Expect(growth >= floor - kTol && growth <= cap + kTol, [&] {
            return Fmt("%s round %lld player %d: growth %.6g floor %.6g "
                       "cap %.6g",
                       run.label.c_str(), static_cast<long long>(v.round), i,
                       growth, floor, cap);
          });
        }
        prev[i] = next;
      }
      return true;
    });
  }
  ck->Note(Fmt("%lld rm+ steps checked, min growth - |g+|^2 = %.3g",
               static_cast<long long>(steps), min_slack));
}

void OneStepSuite(Checker* ck) {
  std::mt19937_64 rng(0x5EED);
  auto scale = [&] { return std::pow(10.0, UniformIn(rng, -3, 3)); };
  auto utility = [&](int m) {
    const double s = std::pow(10.0, UniformIn(rng, -1, 1));
    std::vector<double> u(m);
    for (double& v : u) v = s * UniformIn(rng, -1, 1);
    return u;
  };
  auto l1_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s;
  };
  auto l2_diff_sq = [](const std::vector<double>& a,
                       const std::vector<double>& b) {
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
  };
  auto closeness = [&](const std::vector<double>& r,
                       const std::vector<double>& r2, int sample) {
    const double n1 = PositivePartL1(r), n2 = PositivePartL1(r2);
    const std::vector<double> x = Strategy::FromWeights(r).probs();
    const std::vector<double> x2 = Strategy::FromWeights(r2).probs();
    const double lhs = l1_diff(x, x2);
    const double rhs = l1_diff(r, r2) * (1 / n1 + 1 / n2);
    ck->Expect(lhs <= rhs + kTol, [&] {
      return Fmt("closeness sample %d: |x-x'|=%.6g > %.6g", sample, lhs, rhs);
    });
  };

  const int kSamples = 100000;
  int64_t zero_cases = 0;
  for (int s = 0; s < kSamples; ++s) {
    const int m = 2 + UniformInt(rng, 7);
    const std::vector<double> u = utility(m);
    const int best = BestResponse(u);

    // RM+: r >= 0, x = r / |r|_1, arbitrary x when r = 0.
    {
      std::vector<double> r(m, 0.0);
      if (UniformUnit(rng) >= 0.05) {
        const double sc = scale();
        for (double& v : r) v = UniformUnit(rng) < 0.3 ? 0 : sc * UniformUnit(rng);
      }
      std::optional<Strategy> fallback;
      if (PositivePartL1(r) == 0) {
        fallback = Strategy::FromWeights(RandomSimplexPoint(rng, m));
        ++zero_cases;
      }
      const RegretState st = NewLearner(LearnerKind::kRMPlus, m, r, fallback);
      const std::vector<double>& x = st.strategy.probs();
      const StepResult out = Step(st, u);
      const std::vector<double>& r2 = out.state.regrets;
      const std::vector<double>& x2 = out.state.strategy.probs();
      const double gap = BrGap(u, x);
      const double n2 = PositivePartL1(r2);
      if (n2 == 0) {
        ck->Expect(gap <= kTol && x2 == x, [&] {
          return Fmt("rm+ sample %d: r'=0 with gap %.6g", s, gap);
        });
      } else {
        double lhs = 0;
        for (int a = 0; a < m; ++a) lhs += (x2[a] - x[a]) * u[a];
        const double mid = l2_diff_sq(r, r2) / n2;
        const double low = gap * gap / n2;
        ck->Expect(lhs >= mid - kTol && mid >= low - kTol, [&] {
          return Fmt("rm+ sample %d: <x'-x,u>=%.9g |r-r'|^2/|r'|=%.9g "
                     "gap^2/|r'|=%.9g",
                     s, lhs, mid, low);
        });
        if (PositivePartL1(r) > 0) closeness(r, r2, s);
      }
    }

    // RM: arbitrary signs, x proportional to the positive part.
    {
      std::vector<double> r(m);
      const double sc = scale();
      for (double& v : r) v = sc * UniformIn(rng, -1, 1);
      if (UniformUnit(rng) < 0.3) r[best] = -r[best] * (r[best] > 0 ? 1 : -1);
      if (UniformUnit(rng) < 0.1) r[UniformInt(rng, m)] = 0;
      std::optional<Strategy> fallback;
      if (PositivePartL1(r) == 0) {
        fallback = Strategy::FromWeights(RandomSimplexPoint(rng, m));
      }
      const RegretState st = NewLearner(LearnerKind::kRM, m, r, fallback);
      const std::vector<double>& x = st.strategy.probs();
      const StepResult out = Step(st, u);
      const std::vector<double>& r2 = out.state.regrets;
      const std::vector<double>& x2 = out.state.strategy.probs();
      std::vector<double> th(m), th2(m);
      for (int a = 0; a < m; ++a) {
        th[a] = std::max(r[a], 0.0);
        th2[a] = std::max(r2[a], 0.0);
      }
      const double n2 = PositivePartL1(r2);
      const double v = Dot(x, u);
      if (n2 == 0) {
        // The lemma only constrains the indicator case here.
        ck->Expect(r[best] < 0 || v >= u[best] - kTol, [&] {
          return Fmt("rm sample %d: theta'=0 but u[a]-<x,u>=%.6g", s,
                     u[best] - v);
        });
      } else {
        double lhs = 0;
        for (int a = 0; a < m; ++a) lhs += (x2[a] - x[a]) * u[a];
        const double mid = l2_diff_sq(th, th2) / n2;
        const double d = u[best] - v;
        const double low = r[best] >= 0 ? d * d / n2 : 0.0;
        ck->Expect(lhs >= mid - kTol && mid >= low - kTol, [&] {
          return Fmt("rm sample %d: <x'-x,u>=%.9g |th-th'|^2/|th'|=%.9g "
                     "indicator term=%.9g",
                     s, lhs, mid, low);
        });
        if (PositivePartL1(r) > 0) closeness(th, th2, s);
      }
    }

    // Closeness on unrelated nonnegative pairs.
    {
      std::vector<double> a(m), b(m);
      const double sc = scale();
      for (int k = 0; k < m; ++k) {
        a[k] = sc * UniformUnit(rng);
        b[k] = UniformUnit(rng) < 0.5 ? a[k] * UniformIn(rng, 0, 2)
                                      : sc * UniformUnit(rng);
      }
      if (PositivePartL1(a) > 0 && PositivePartL1(b) > 0) closeness(a, b, s);
    }
  }
  ck->Note(Fmt("%d samples (%lld rm+ with r = 0), %lld inequalities checked",
               kSamples, static_cast<long long>(zero_cases),
               static_cast<long long>(ck->checks())));
}

void AlternatingPotentialSuite(Checker* ck) {
  const double eps = 0.05;
  double worst_ratio = 0, worst_drm_ratio = 0;
  int64_t max_rounds_seen = 0;
  for (int k = 0; k < 50; ++k) {
    std::mt19937_64 rng(0xA17 + k);
    const int n = 1 + k % 3;
    auto game =
        std::make_shared<const GameSpec>(PotentialCorpusGame(rng, k, n, 6));
    GameUtilitySource src(game);
    const int m = MaxCount(game->action_counts);
    const double phi_range = TensorRange(*game->potential);
    const std::string label =
        Fmt("game %d (%s)", k, CountsString(game->action_counts).c_str());
    const double initial = *src.ValueAt(src.domain().Uniform());

    {
      const double bound =
          1 + std::pow(m * phi_range, 2) / std::pow(eps, 4);
      RunConfig c = QuietConfig();
      c.scheme = Scheme::kLazyAlternating;
      c.kind = LearnerKind::kRMPlus;
      c.epsilon = eps;
      c.max_rounds = static_cast<int64_t>(std::floor(bound)) + 1;
      double prev = initial;
      RunResult res = Run(src, c, [&](const RoundView& v) {
        double need = 0;
        for (int i = 0; i < n; ++i) {
          const double l1 = RegretL1Positive(v.states[i]);
          if (v.updated[i] && l1 > 0) need += v.br_gaps[i] * v.br_gaps[i] / l1;
        }
        ck->Expect(v.value - prev >= need - kTol, [&] {
          return Fmt("%s round %lld: potential step %.9g < %.9g",
                     label.c_str(), static_cast<long long>(v.round),
                     v.value - prev, need);
        });
        prev = v.value;
        return true;
      });
      worst_ratio = std::max(worst_ratio, res.rounds / bound);
      max_rounds_seen = std::max(max_rounds_seen, res.rounds);
      ck->Expect(res.stop_reason == StopReason::kConverged &&
                     res.rounds <= bound,
                 [&] {
                   return Fmt("%s rm+: %s after %lld rounds, bound %.6g",
                              label.c_str(),
                              StopReasonName(res.stop_reason).c_str(),
                              static_cast<long long>(res.rounds), bound);
                 });
    }
    {
      const double gamma = 0.25;
      const double bound = 1 + m * phi_range / (eps * eps * std::sqrt(gamma));
      RunConfig c = QuietConfig();
      c.scheme = Scheme::kLazyAlternating;
      c.kind = LearnerKind::kDRMPlus;
      c.discount = 1 - gamma;
      c.epsilon = eps;
      c.max_rounds = static_cast<int64_t>(std::floor(bound)) + 1;
      double prev = initial;
      RunResult res = Run(src, c, [&](const RoundView& v) {
        ck->Expect(v.value >= prev - kTol, [&] {
          return Fmt("%s drm+ round %lld: potential fell by %.6g",
                     label.c_str(), static_cast<long long>(v.round),
                     prev - v.value);
        });
        prev = v.value;
        return true;
      });
      worst_drm_ratio = std::max(worst_drm_ratio, res.rounds / bound);
      ck->Expect(res.stop_reason == StopReason::kConverged &&
                     res.rounds <= bound,
                 [&] {
                   return Fmt("%s drm+: %s after %lld rounds, bound %.6g",
                              label.c_str(),
                              StopReasonName(res.stop_reason).c_str(),
                              static_cast<long long>(res.rounds), bound);
                 });
    }
  }
  ck->Note(Fmt("rm+: max rounds %lld, max rounds/bound %.3g; "
               "drm+: max rounds/bound %.3g",
               static_cast<long long>(max_rounds_seen), worst_ratio,
               worst_drm_ratio));
}

void ThresholdInitSuite(Checker* ck) {
  const double eps = 0.1;
  int64_t max_thr = 0, max_zero = 0;
  for (int s = 0; s < 20; ++s) {
    std::mt19937_64 rng(0x7E5 + s);
    const int n = 2 + s % 2;
    std::vector<int> counts(n);
    for (int& m : counts) m = 2 + UniformInt(rng, 3);
    auto obj = NormalizeGradientSpread(
        MakeMultilinear(RandomPotentialGame(n, counts, rng())));
    const int m = MaxCount(counts);
    const double bound = 1 + 4 * std::pow(n, 4) * m * m *
                                 std::pow(obj->range(), 2) / std::pow(eps, 4);
    for (InitPolicy init : {InitPolicy::kThreshold, InitPolicy::kZero}) {
      RunConfig c = QuietConfig();
      c.scheme = Scheme::kLazyAlternating;
      c.kind = LearnerKind::kRMPlus;
      c.epsilon = eps / n;
      c.init = init;
      c.max_rounds = init == InitPolicy::kThreshold
                         ? static_cast<int64_t>(std::floor(bound)) + 1
                         : static_cast<int64_t>(1 / std::pow(eps, 8));
      RunResult res = Run(*obj, c);
      const double kkt = KktGap(*obj, res.final_profile);
      const bool converged = res.stop_reason == StopReason::kConverged;
      if (init == InitPolicy::kThreshold) {
        max_thr = std::max(max_thr, res.rounds);
        ck->Expect(converged && res.rounds <= bound && kkt <= eps, [&] {
          return Fmt("objective %d threshold init: %s after %lld rounds "
                     "(bound %.6g), kkt %.6g",
                     s, StopReasonName(res.stop_reason).c_str(),
                     static_cast<long long>(res.rounds), bound, kkt);
        });
      } else {
        max_zero = std::max(max_zero, res.rounds);
        ck->Expect(converged && kkt <= eps, [&] {
          return Fmt("objective %d zero init: %s after %lld rounds, kkt %.6g",
                     s, StopReasonName(res.stop_reason).c_str(),
                     static_cast<long long>(res.rounds), kkt);
        });
      }
    }
  }
  ck->Note(Fmt("threshold init max rounds %lld, zero init max rounds %lld",
               static_cast<long long>(max_thr),
               static_cast<long long>(max_zero)));
}

std::string PhaseLengths(const PhaseReport& rep) {
  std::string s;
  for (const PhaseRecord& p : rep.phases) {
    if (!p.complete()) continue;
    if (!s.empty()) s += ",";
    s += std::to_string(p.length);
  }
  return s;
}

// Simultaneous RM on a spiral game until phase `until` starts.
PhaseReport TrackSpiralRun(const GameSpec& game, int m, bool pure_init,
                           int until, int64_t max_rounds,
                           const std::function<void(const RoundView&)>& extra) {
  GameUtilitySource src(std::make_shared<const GameSpec>(game));
  RunConfig c = QuietConfig();
  c.kind = LearnerKind::kRM;
  c.epsilon = 0;
  c.max_rounds = max_rounds;
  if (pure_init) c.init_strategies = PaddedPureInit(m);
  PhaseTracker tracker(BuildSpiral(m), game.action_counts[0]);
  Run(src, c, [&](const RoundView& v) {
    tracker.Observe(v.round, v.played, &v.utilities);
    if (extra) extra(v);
    return !tracker.Reached(until);
  });
  return tracker.Finish();
}

void CheckPhaseStructure(const PhaseReport& rep, Checker* ck) {
  auto length = [&](int k) {
    const PhaseRecord* p = rep.Phase(k);
    return p && p->complete() ? p->length : int64_t{-1};
  };
  ck->Expect(length(3) >= 5, [&] {
    return Fmt("T3 = %lld < 5", static_cast<long long>(length(3)));
  });
  ck->Expect(length(4) >= 20, [&] {
    return Fmt("T4 = %lld < 20", static_cast<long long>(length(4)));
  });
  std::vector<BoundCheck> growth;
  const bool grows = CheckStallGrowth(rep, &growth);
  ck->Expect(grows && rep.LastCompletePhase() >= 10, [&] {
    std::string bad;
    for (const BoundCheck& b : growth) {
      if (!b.ok) bad += Fmt(" %s k=%d %.6g<%.6g", b.name.c_str(), b.k, b.lhs,
                            b.rhs);
    }
    return Fmt("stall growth through k=%d:%s", rep.LastCompletePhase(),
               bad.c_str());
  });
  ck->Expect(rep.violation_count == 0, [&] {
    return Fmt("%lld phase violations, first: %s",
               static_cast<long long>(rep.violation_count),
               rep.violations.empty() ? "" : rep.violations[0].message.c_str());
  });
  ck->Expect(rep.BoundsHold(), [&] {
    for (const BoundCheck& b : rep.checks) {
      if (!b.ok) {
        return Fmt("bound %s k=%d fails: %.9g vs %.9g", b.name.c_str(), b.k,
                   b.lhs, b.rhs);
      }
    }
    return std::string("bound check failed");
  });
}

void HardInstanceSuite(Checker* ck) {
  const int m = 6;
  const GameSpec game = BuildPadded(m);
  const PhaseReport rep = TrackSpiralRun(game, m, true, 11, 20000000, {});
  CheckPhaseStructure(rep, ck);
  const int64_t stall = rep.CompletedStallRounds();
  const int64_t above = rep.first_round_nash_at_most < 0
                            ? rep.rounds_observed
                            : rep.first_round_nash_at_most - 1;
  ck->Expect(above >= stall, [&] {
    return Fmt("rm nash_gap <= %.6g at round %lld, before %lld stall rounds",
               rep.nash_threshold,
               static_cast<long long>(rep.first_round_nash_at_most),
               static_cast<long long>(stall));
  });

  // Alternating RM+ from the same start.
  auto shared = std::make_shared<const GameSpec>(game);
  GameUtilitySource src(shared);
  RunConfig c = QuietConfig();
  c.scheme = Scheme::kAlternating;
  c.kind = LearnerKind::kRMPlus;
  c.epsilon = 0;
  c.max_rounds = std::max<int64_t>(1, above / 100);
  c.init_strategies = PaddedPureInit(m);
  int64_t hit = -1;
  double last_gap = 0;
  Run(src, c, [&](const RoundView& v) {
    last_gap = NashGap(game, v.played);
    if (last_gap <= rep.nash_threshold) {
      hit = v.round;
      return false;
    }
    return true;
  });
  ck->Expect(hit > 0 && 100 * hit <= above, [&] {
    return Fmt("alternating rm+ nash_gap <= %.6g at round %lld (last %.6g); "
               "rm stayed above for %lld rounds",
               rep.nash_threshold, static_cast<long long>(hit), last_gap,
               static_cast<long long>(above));
  });
  ck->Note(Fmt("rm phases T_k = %s over %lld rounds, min nash_gap %.4f",
               PhaseLengths(rep).c_str(),
               static_cast<long long>(rep.rounds_observed), rep.min_nash_gap));
  ck->Note(Fmt("alternating rm+ reaches nash_gap <= %.4f at round %lld, "
               "rm stays above for %lld rounds (ratio %.3g)",
               rep.nash_threshold, static_cast<long long>(hit),
               static_cast<long long>(above),
               hit > 0 ? static_cast<double>(above) / hit : 0.0));
}

void UniformInitSuite(Checker* ck) {
  const int m = 6;
  const GameSpec game = BuildUniformInit(m);
  const UniformInitSanity sanity = CheckUniformInit(game, m);
  ck->Expect(sanity.ok, [&] {
    return Fmt("uniform-init game sanity: entry sum %.6g, pattern error %.3g",
               sanity.entry_sum, sanity.max_pattern_error);
  });
  Point round2;
  const PhaseReport rep =
      TrackSpiralRun(game, m, false, 11, 20000000, [&](const RoundView& v) {
        if (v.round == 2) round2 = v.played;
      });
  for (int i = 0; i < 2; ++i) {
    const double p = round2.empty() ? 0.0 : round2[i][0];
    ck->Expect(p >= 1 - 1e-12, [&] {
      return Fmt("player %d puts %.17g on action 1 in round 2", i, p);
    });
  }
  CheckPhaseStructure(rep, ck);
  ck->Note(Fmt("phases T_k = %s over %lld rounds",
               PhaseLengths(rep).c_str(),
               static_cast<long long>(rep.rounds_observed)));
}

void FourCycleSuite(Checker* ck) {
  ObjectivePtr obj = MakeCyclePolynomial();
  const double cycle[] = {0.6, 0.7, 0.4, 0.3};
  const double kkt_expected[] = {0.8, 0.7, 0.8, 0.7};
  RegretState state = NewLearner(LearnerKind::kRM, 2);
  double min_kkt = INFINITY;
  for (int rep = 0; rep < 25; ++rep) {
    for (int k = 0; k < 4; ++k) {
      const Point x = {{cycle[k], 1 - cycle[k]}};
      const Block u = obj->Gradient(x, 0);
      AdvanceWithPlayed(&state, u, x[0], 1.0);
      if (rep == 0) {
        const double kkt = KktGap(*obj, x);
        min_kkt = std::min(min_kkt, kkt);
        ck->Expect(kkt >= 0.7 - kTol &&
                       std::abs(kkt - kkt_expected[k]) <= kTol,
                   [&] {
                     return Fmt("kkt at p=%.1f is %.17g", cycle[k], kkt);
                   });
      }
    }
  }
  const double regret =
      *std::max_element(state.regrets.begin(), state.regrets.end());
  ck->Expect(std::abs(regret) <= 1e-12, [&] {
    return Fmt("total regret over 100 steps is %.3g", regret);
  });
  const double points[] = {0.6, 0.7, 0.4, 0.3};
  const double slopes[] = {2, -1, -2, 1};
  for (int k = 0; k < 4; ++k) {
    const double d = CycleDerivative(points[k]);
    ck->Expect(std::abs(d - slopes[k]) <= kTol, [&] {
      return Fmt("f'(%.1f) = %.17g, expected %g", points[k], d, slopes[k]);
    });
  }
  ck->Note(Fmt("total regret %.3g, min kkt %.3g", regret, min_kkt));
}

void CceSuite(Checker* ck) {
  const int64_t checkpoints[] = {100, 1000, 10000};
  double worst_ratio = 0;
  for (int k = 0; k < 6; ++k) {
    std::mt19937_64 rng(0xCCE + k);
    const int n = 2 + k % 2;
    auto game = std::make_shared<const GameSpec>(CorpusGame(rng, k, n, 4));
    GameUtilitySource src(game);
    const int m = MaxCount(game->action_counts);
    for (LearnerKind kind : {LearnerKind::kRM, LearnerKind::kRMPlus}) {
      RunConfig c = QuietConfig();
      c.kind = kind;
      c.epsilon = 0;
      c.max_rounds = 10000;
      CceAccumulator acc(game->action_counts);
      std::vector<Block> sum_u(n);
      std::vector<double> sum_v(n, 0.0);
      for (int i = 0; i < n; ++i) sum_u[i].assign(game->action_counts[i], 0.0);
      auto check = [&](int64_t t) {
        double reg = -INFINITY;
        for (int i = 0; i < n; ++i) {
          const double best = *std::max_element(sum_u[i].begin(),
                                                sum_u[i].end());
          reg = std::max(reg, best - sum_v[i]);
        }
        const double cce = acc.Gap(*game);
        const double avg = reg / t;
        if (avg > 0) worst_ratio = std::max(worst_ratio, cce / avg);
        ck->Expect(cce <= avg + kTol && avg <= std::sqrt(m / double(t)) + kTol,
                   [&] {
                     return Fmt("game %d %s T=%lld: cce %.9g, max Reg/T %.9g, "
                                "sqrt(m/T) %.6g",
                                k, LearnerKindName(kind).c_str(),
                                static_cast<long long>(t), cce, avg,
                                std::sqrt(m / double(t)));
                   });
      };
      int64_t last = 0;
      Run(src, c, [&](const RoundView& v) {
        acc.Add(v.played);
        for (int i = 0; i < n; ++i) {
          for (size_t a = 0; a < sum_u[i].size(); ++a) {
            sum_u[i][a] += v.utilities[i][a];
          }
          sum_v[i] += Dot(v.played[i], v.utilities[i]);
        }
        last = v.round;
        if (std::find(std::begin(checkpoints), std::end(checkpoints),
                      v.round) != std::end(checkpoints)) {
          check(v.round);
        }
        return true;
      });
      if (last < 10000) check(last);
    }
  }
  ck->Note(Fmt("random games: cce_gap / (max Reg/T) at most %.6f",
               worst_ratio));

  // Hard instance: the averaged play approaches a CCE while the last iterate
  // stays far from Nash.
  const int m = 6;
  const GameSpec hard = BuildPadded(m);
  GameUtilitySource src(std::make_shared<const GameSpec>(hard));
  RunConfig c = QuietConfig();
  c.kind = LearnerKind::kRM;
  c.epsilon = 0;
  c.max_rounds = 10000;
  c.init_strategies = PaddedPureInit(m);
  const double range = UtilityRange(hard);
  const int actions = hard.action_counts[0];
  CceAccumulator acc(hard.action_counts);
  std::string series;
  Run(src, c, [&](const RoundView& v) {
    acc.Add(v.played);
    if (std::find(std::begin(checkpoints), std::end(checkpoints), v.round) ==
        std::end(checkpoints)) {
      return true;
    }
    const double t = static_cast<double>(v.round);
    const double cce = acc.Gap(hard) / range;
    const double nash = NashGap(hard, v.played);
    series += Fmt(" T=%lld cce/range=%.4g nash=%.4g;",
                  static_cast<long long>(v.round), cce, nash);
    ck->Expect(cce <= std::sqrt(actions / t), [&] {
      return Fmt("hard instance T=%lld: cce/range %.6g > sqrt(m/T) %.6g",
                 static_cast<long long>(v.round), cce,
                 std::sqrt(actions / t));
    });
    ck->Expect(nash > 1.0 / (2 * m + 2), [&] {
      return Fmt("hard instance T=%lld: nash_gap %.6g <= 1/14",
                 static_cast<long long>(v.round), nash);
    });
    return true;
  });
  ck->Note("hard instance:" + series);
}

void GradientStructureSuite(Checker* ck) {
  std::mt19937_64 rng(0x6AD);
  // Finite differences on every objective kind.
  std::vector<ObjectivePtr> objectives = {
      MakeMultilinear(RandomPotentialGame(3, {3, 2, 4}, 11)),
      MakeMultilinear(NormalizeUtilities(RandomCongestionGame(2, 4, 12))),
      MakeCyclePolynomial(),
      MakeLinear({{0.3, -1.2, 2.0}, {0.5, 0.25}}),
      Rescale(MakeMultilinear(RandomPotentialGame(2, {3, 3}, 13)), 0.37),
      NormalizeGradientSpread(
          MakeMultilinear(RandomPotentialGame(2, {4, 2}, 14, 0.5))),
  };
  double worst_fd = 0;
  for (const ObjectivePtr& obj : objectives) {
    for (int s = 0; s < 100; ++s) {
      const Point x = RandomProfile(rng, obj->domain());
      const double err = CheckGradient(*obj, x, 1e-6);
      worst_fd = std::max(worst_fd, err);
      ck->Expect(err <= 1e-6, [&] {
        return Fmt("%s: finite-difference error %.3g", obj->name().c_str(),
                   err);
      });
    }
  }

  // Exhaustive potential verification, with a negative control.
  int verified = 0;
  for (int k = 0; k < 50; ++k) {
    std::mt19937_64 grng(0xA17 + k);
    const GameSpec g = PotentialCorpusGame(grng, k, 1 + k % 3, 6);
    const PotentialCheck pc = VerifyPotential(g);
    ++verified;
    ck->Expect(pc.ok, [&] {
      return Fmt("potential corpus game %d fails verify_potential", k);
    });
  }
  for (int m : {2, 4, 6}) {
    for (const GameSpec& g : {BuildPadded(m), BuildUniformInit(m)}) {
      ++verified;
      ck->Expect(VerifyPotential(g).ok, [&] {
        return Fmt("spiral game m=%d (%d actions) fails verify_potential", m,
                   g.action_counts[0]);
      });
    }
  }
  {
    GameSpec bad = RandomGeneralGame(2, {3, 3}, 21);
    bad.potential = bad.utilities[0];
    const PotentialCheck pc = VerifyPotential(bad);
    ck->Expect(!pc.ok && pc.witness.has_value(), [] {
      return std::string("negative control passed verify_potential");
    });
  }

  // Sup-norm change of a utility vector against l1 changes of the others.
  double worst_tv = 0;
  for (int s = 0; s < 1000; ++s) {
    const int n = 2 + s % 3;
    std::vector<int> counts(n);
    for (int& m : counts) m = 2 + UniformInt(rng, 3);
    const GameSpec g = NormalizeUtilities(
        s % 2 ? RandomGeneralGame(n, counts, rng())
              : RandomPotentialGame(n, counts, rng(), 0.5));
    const Point x = RandomProfile(rng, g.domain());
    const Point y = RandomProfile(rng, g.domain());
    for (int i = 0; i < n; ++i) {
      const Block ux = UtilityVector(g, i, x), uy = UtilityVector(g, i, y);
      double lhs = 0, rhs = 0;
      for (size_t a = 0; a < ux.size(); ++a) {
        lhs = std::max(lhs, std::abs(ux[a] - uy[a]));
      }
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        for (size_t a = 0; a < x[j].size(); ++a) {
          rhs += std::abs(x[j][a] - y[j][a]);
        }
      }
      if (rhs > 0) worst_tv = std::max(worst_tv, lhs / rhs);
      ck->Expect(lhs <= rhs + kTol, [&] {
        return Fmt("pair %d player %d: |du|_inf %.9g > %.9g", s, i, lhs, rhs);
      });
    }
  }

  // Deviation identity on mixed profiles.
  for (int s = 0; s < 200; ++s) {
    std::mt19937_64 grng(0xDE7 + s);
    const int n = 2 + s % 2;
    const GameSpec g = PotentialCorpusGame(grng, s, n, 4);
    const Point x = RandomProfile(rng, g.domain());
    const int i = UniformInt(rng, n);
    Point y = x;
    y[i] = RandomSimplexPoint(rng, g.action_counts[i]);
    const double dphi = PotentialValue(g, y) - PotentialValue(g, x);
    const double du = ExpectedUtility(g, i, y) - ExpectedUtility(g, i, x);
    ck->Expect(std::abs(dphi - du) <= 1e-12, [&] {
      return Fmt("deviation identity %d: dPhi %.17g du %.17g", s, dphi, du);
    });
  }

  // Symmetric games played in lockstep from identical starts.
  int64_t lockstep_rounds = 0;
  for (int s = 0; s < 24; ++s) {
    const int n = 2 + s % 2;
    const int m = 2 + s % 4;
    auto g = std::make_shared<const GameSpec>(
        s % 2 ? RandomSymmetricIdenticalGame(n, m, 300 + s)
              : NormalizeUtilities(RandomCongestionGame(n, m, 300 + s)));
    ck->Expect(g->symmetric && CheckSymmetric(*g), [&] {
      return Fmt("lockstep game %d is not symmetric", s);
    });
    GameUtilitySource src(g);
    RunConfig c = QuietConfig();
    c.kind = s % 3 == 0 ? LearnerKind::kRM : LearnerKind::kRMPlus;
    c.epsilon = 0;
    c.max_rounds = 300;
    Run(src, c, [&](const RoundView& v) {
      ++lockstep_rounds;
      bool same = true;
      for (int i = 1; i < n; ++i) {
        same = same && v.played[i] == v.played[0] &&
               v.utilities[i] == v.utilities[0];
      }
      ck->Expect(same, [&] {
        return Fmt("lockstep game %d diverges at round %lld", s,
                   static_cast<long long>(v.round));
      });
      return same;
    });
  }
  ck->Note(Fmt("max finite-difference error %.3g; %d potentials verified; "
               "max |du|/sum|dx| %.4f; %lld lockstep rounds",
               worst_fd, verified, worst_tv,
               static_cast<long long>(lockstep_rounds)));
}

struct SuiteEntry {
  const char* name;
  int criterion;
  void (*run)(Checker*);
};

constexpr SuiteEntry kSuites[] = {
    {"regret_bound", 1, RegretBoundSuite},
    {"monotone_norm", 2, MonotoneNormSuite},
    {"one_step", 3, OneStepSuite},
    {"altern_rm_plus", 4, AlternatingPotentialSuite},
    {"threshold_init", 5, ThresholdInitSuite},
    {"hard_instance", 6, HardInstanceSuite},
    {"uniform_init", 7, UniformInitSuite},
    {"four_cycle", 8, FourCycleSuite},
    {"cce", 9, CceSuite},
    {"gradient_structure", 10, GradientStructureSuite},
};

}  // namespace

const std::vector<std::string>& SuiteNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const SuiteEntry& e : kSuites) v.push_back(e.name);
    return v;
  }();
  return names;
}

SuiteResult RunSuite(const std::string& name) {
  for (const SuiteEntry& e : kSuites) {
    if (name != e.name) continue;
    SuiteResult r;
    r.name = e.name;
    r.criterion = e.criterion;
    Checker ck;
    const auto start = std::chrono::steady_clock::now();
    try {
      e.run(&ck);
    } catch (const std::exception& ex) {
      ck.Expect(false, [&] { return std::string("exception: ") + ex.what(); });
    }
    r.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    ck.Fill(&r);
    r.summary = Fmt("%lld checks, %lld failed, %.2fs",
                    static_cast<long long>(ck.checks()),
                    static_cast<long long>(ck.failures()), r.seconds);
    return r;
  }
  std::string known;
  for (const std::string& n : SuiteNames()) known += " " + n;
  throw std::invalid_argument("unknown suite '" + name + "' (known:" + known +
                              ", all)");
}

std::vector<SuiteResult> RunSuites(const std::string& name) {
  std::vector<SuiteResult> out;
  if (name == "all") {
    for (const std::string& n : SuiteNames()) out.push_back(RunSuite(n));
  } else {
    out.push_back(RunSuite(name));
  }
  return out;
}

}  // namespace rmopt

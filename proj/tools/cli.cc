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

#include "rmopt/cli.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "rmopt/hard_instances.h"
#include "rmopt/io.h"
#include "rmopt/objective.h"
#include "rmopt/selftest.h"

namespace rmopt {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

[[noreturn]] void BadValue(const std::string& key, const std::string& want,
                           const std::string& value) {
  throw std::invalid_argument("config key '" + key + "': expected " + want +
                              ", got '" + value + "'");
}

double ToDouble(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  BadValue(key, "a finite number", value);
}

int64_t ToInt(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  // Accept integral values written in floating point, e.g. 1e6.
  const double d = ToDouble(key, value);
  if (d == std::floor(d) && std::abs(d) < 9e18) return static_cast<int64_t>(d);
  BadValue(key, "an integer", value);
}

bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  BadValue(key, "true or false", value);
}

std::string ResolvePath(const std::string& path, const std::string& base) {
  if (path.empty() || path == "-" || base.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

std::vector<int> ParseCounts(const std::string& text) {
  std::vector<int> counts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      counts.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad action counts '" + text +
                                  "' (expected e.g. 3x3)");
    }
  }
  if (counts.empty()) {
    throw std::invalid_argument("bad action counts '" + text + "'");
  }
  return counts;
}

void OpenOutput(std::ofstream* f, const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  f->open(path, std::ios::binary);
  if (!*f) throw std::runtime_error("cannot write '" + path + "'");
}

ordered_json Vec(const std::vector<double>& v) { return ordered_json(v); }

}  // namespace

std::vector<std::string> ExperimentConfig::InputSources() const {
  std::vector<std::string> s;
  if (!game.empty()) s.push_back("game");
  if (!objective.empty()) s.push_back("objective");
  if (hard_instance != 0) s.push_back("hard_instance");
  if (!random_game.empty()) s.push_back("random_game");
  return s;
}

void ExperimentConfig::Validate() const {
  const std::vector<std::string> sources = InputSources();
  if (sources.size() != 1) {
    std::string got;
    for (const std::string& s : sources) got += " " + s;
    throw std::invalid_argument(
        "exactly one input source is required (game, objective, "
        "hard_instance, random_game); got" +
        (got.empty() ? std::string(" none") : got));
  }
  if (variant != "pure_init" && variant != "uniform_init") {
    throw std::invalid_argument("variant must be pure_init or uniform_init");
  }
  if (algo == LearnerKind::kDRMPlus && !(gamma > 0 && gamma < 1)) {
    throw std::invalid_argument("drm+ needs gamma in (0, 1)");
  }
  if (trace_stride < 1) throw std::invalid_argument("trace_stride must be >= 1");
  if (progress_every < 0) {
    throw std::invalid_argument("progress_every must be >= 0");
  }
  std::set<std::string> outputs;
  for (const std::string* p : {&trace, &strategies, &summary}) {
    if (p->empty() || *p == "-") continue;
    if (!outputs.insert(*p).second) {
      throw std::invalid_argument("output path '" + *p + "' is used twice");
    }
  }
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = {
      "game",          "objective",   "hard_instance", "variant",
      "random_game",   "algo",        "gamma",         "scheme",
      "epsilon",       "max_rounds",  "init",          "init_file",
      "smoothness",    "normalize",   "lazy_update_regrets",
      "seed",          "trace",       "strategies",    "summary",
      "trace_stride",  "progress_every", "quiet"};
  return keys;
}

void ApplySetting(ExperimentConfig* c, const std::string& key,
                  const std::string& value, const std::string& base_dir) {
  if (key == "game") {
    c->game = ResolvePath(value, base_dir);
  } else if (key == "objective") {
    c->objective =
        value == "cycle_poly" ? value : ResolvePath(value, base_dir);
  } else if (key == "hard_instance") {
    c->hard_instance = ParseHardInstance(value);
  } else if (key == "variant") {
    c->variant = value;
  } else if (key == "random_game") {
    c->random_game = value;
  } else if (key == "algo") {
    c->algo = ParseLearnerKind(value);
  } else if (key == "gamma") {
    c->gamma = ToDouble(key, value);
  } else if (key == "scheme") {
    c->scheme = ParseScheme(value);
  } else if (key == "epsilon") {
    c->epsilon = ToDouble(key, value);
  } else if (key == "max_rounds") {
    c->max_rounds = ToInt(key, value);
  } else if (key == "init") {
    c->init = ParseInitPolicy(value);
  } else if (key == "init_file") {
    c->init_file = ResolvePath(value, base_dir);
  } else if (key == "smoothness") {
    c->smoothness = ToDouble(key, value);
  } else if (key == "normalize") {
    c->normalize = ToBool(key, value);
  } else if (key == "lazy_update_regrets") {
    c->lazy_update_regrets = ToBool(key, value);
  } else if (key == "seed") {
    const int64_t s = ToInt(key, value);
    if (s < 0) BadValue(key, "a non-negative integer", value);
    c->seed = static_cast<uint64_t>(s);
  } else if (key == "trace") {
    c->trace = value;
  } else if (key == "strategies") {
    c->strategies = value;
  } else if (key == "summary") {
    c->summary = value;
  } else if (key == "trace_stride") {
    c->trace_stride = ToInt(key, value);
  } else if (key == "progress_every") {
    c->progress_every = ToInt(key, value);
  } else if (key == "quiet") {
    c->quiet = ToBool(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

void ApplyConfigJson(ExperimentConfig* c, const json& j,
                     const std::string& base_dir) {
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a flat JSON object");
  }
  for (const auto& [key, v] : j.items()) {
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_boolean()) {
      text = v.get<bool>() ? "true" : "false";
    } else if (v.is_number()) {
      text = v.dump();
    } else {
      throw std::invalid_argument("config key '" + key +
                                  "': expected a string, number or boolean");
    }
    ApplySetting(c, key, text, base_dir);
  }
}

ExperimentConfig LoadConfigFile(const std::string& path,
                                ExperimentConfig base) {
  const json j = ReadJsonFile(path);
  try {
    ApplyConfigJson(&base, j,
                    std::filesystem::path(path).parent_path().string());
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return base;
}

json ConfigToJson(const ExperimentConfig& c) {
  ordered_json j;
  if (!c.game.empty()) j["game"] = c.game;
  if (!c.objective.empty()) j["objective"] = c.objective;
  if (c.hard_instance) {
    j["hard_instance"] = "m=" + std::to_string(c.hard_instance);
    j["variant"] = c.variant;
  }
  if (!c.random_game.empty()) j["random_game"] = c.random_game;
  j["algo"] = LearnerKindName(c.algo);
  if (c.algo == LearnerKind::kDRMPlus) j["gamma"] = c.gamma;
  j["scheme"] = SchemeName(c.scheme);
  j["epsilon"] = c.epsilon;
  j["max_rounds"] = c.max_rounds;
  j["init"] = InitPolicyName(c.init);
  if (!c.init_file.empty()) j["init_file"] = c.init_file;
  if (c.smoothness >= 0) j["smoothness"] = c.smoothness;
  j["normalize"] = c.normalize;
  j["lazy_update_regrets"] = c.lazy_update_regrets;
  j["seed"] = c.seed;
  return j;
}

GameSpec ParseRandomGame(const std::string& spec, uint64_t seed) {
  const size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("random game '" + spec +
                                "': expected family:counts, e.g. potential:3x3");
  }
  const std::string family = spec.substr(0, colon);
  const std::vector<int> counts = ParseCounts(spec.substr(colon + 1));
  const int n = static_cast<int>(counts.size());
  const bool equal = std::all_of(counts.begin(), counts.end(),
                                 [&](int m) { return m == counts[0]; });
  if (family == "potential") return RandomPotentialGame(n, counts, seed);
  if (family == "general") return RandomGeneralGame(n, counts, seed);
  if (family == "symmetric" || family == "congestion") {
    if (!equal) {
      throw std::invalid_argument(family +
                                  " games need equal action counts");
    }
    return family == "symmetric" ? RandomSymmetricIdenticalGame(n, counts[0], seed)
                                 : RandomCongestionGame(n, counts[0], seed);
  }
  throw std::invalid_argument("unknown random game family '" + family +
                              "' (potential, general, symmetric, congestion)");
}

int ParseHardInstance(const std::string& spec) {
  std::string v = spec;
  if (v.rfind("m=", 0) == 0) v = v.substr(2);
  int m = 0;
  try {
    size_t used = 0;
    m = std::stoi(v, &used);
    if (used != v.size()) m = 0;
  } catch (const std::exception&) {
    m = 0;
  }
  if (m < 2 || m % 2 != 0) {
    throw std::invalid_argument("hard instance '" + spec +
                                "': expected m=<even integer >= 2>");
  }
  return m;
}

Experiment BuildExperiment(const ExperimentConfig& c) {
  c.Validate();
  Experiment ex;
  RunConfig& r = ex.run;
  r.scheme = c.scheme;
  r.epsilon = c.epsilon;
  r.max_rounds = c.max_rounds;
  r.kind = c.algo;
  r.discount = c.algo == LearnerKind::kDRMPlus ? 1 - c.gamma : 1.0;
  r.init = c.init;
  r.smoothness = c.smoothness;
  r.lazy_update_skipped_regrets = c.lazy_update_regrets;
  r.seed = c.seed;
  r.record_history = false;
  r.record_trace = false;

  if (!c.objective.empty()) {
    ObjectivePtr obj = c.objective == "cycle_poly"
                           ? MakeCyclePolynomial()
                           : LoadObjectiveFile(c.objective);
    if (c.normalize) obj = NormalizeGradientSpread(obj);
    ex.source = obj;
  } else {
    GameSpec g;
    if (!c.game.empty()) {
      g = LoadGameFile(c.game);
    } else if (!c.random_game.empty()) {
      g = ParseRandomGame(c.random_game, c.seed);
    } else if (c.variant == "pure_init") {
      g = BuildPadded(c.hard_instance);
      r.init_strategies = PaddedPureInit(c.hard_instance);
    } else {
      g = BuildUniformInit(c.hard_instance);
    }
    if (c.normalize) g = NormalizeUtilities(std::move(g));
    ex.game = std::make_shared<const GameSpec>(std::move(g));
    ex.source = std::make_shared<GameUtilitySource>(ex.game);
  }

  if (!c.init_file.empty()) {
    const json j = ReadJsonFile(c.init_file);
    try {
      if (j.contains("regrets")) {
        if (c.init == InitPolicy::kThreshold) {
          throw std::invalid_argument(
              "regrets in the init file conflict with init=threshold");
        }
        r.init = InitPolicy::kCustom;
        r.init_regrets = j.at("regrets").get<std::vector<std::vector<double>>>();
      }
      if (j.contains("strategies")) {
        r.init_strategies =
            j.at("strategies").get<std::vector<std::vector<double>>>();
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument(c.init_file + ": " + e.what());
    }
  } else if (c.init == InitPolicy::kCustom) {
    throw std::invalid_argument("init=custom needs an init_file");
  }
  r.Validate();
  return ex;
}

int RunExperiment(const ExperimentConfig& c, std::ostream& out,
                  std::ostream& err) {
  const Experiment ex = BuildExperiment(c);
  const UtilitySource& source = *ex.source;
  const SimplexProduct& dom = source.domain();
  const int n = dom.num_blocks();

  std::ofstream trace_file, history_file;
  std::unique_ptr<TraceCsvWriter> trace;
  std::unique_ptr<HistoryJsonlWriter> history;
  if (!c.trace.empty()) {
    OpenOutput(&trace_file, c.trace);
    trace = std::make_unique<TraceCsvWriter>(trace_file);
    trace->WriteHeader();
  }
  if (!c.strategies.empty()) {
    OpenOutput(&history_file, c.strategies);
    history = std::make_unique<HistoryJsonlWriter>(history_file, c.scheme,
                                                   dom.block_sizes());
  }

  TraceRecord pending;
  bool pending_due = false;
  const RunResult res = Run(source, ex.run, [&](const RoundView& v) {
    if (trace) {
      if (v.round == 1 || v.round % c.trace_stride == 0) {
        trace->Write(MakeTraceRecord(v, false));
        pending_due = false;
      } else {
        pending = MakeTraceRecord(v, false);
        pending_due = true;
      }
    }
    if (history) history->Write(v.round, v.played, v.utilities);
    if (!c.quiet && c.progress_every > 0 && v.round % c.progress_every == 0) {
      double kkt = 0;
      for (double g : v.br_gaps) kkt += g;
      err << "round " << v.round << " kkt_gap " << Fmt("%.6g", kkt);
      if (std::isfinite(v.value)) err << " value " << Fmt("%.6g", v.value);
      err << "\n";
    }
    return true;
  });
  // The last round always lands in the trace.
  if (trace && pending_due) trace->Write(pending);
  if (trace_file.is_open() && !trace_file.flush()) {
    throw std::runtime_error("error writing '" + c.trace + "'");
  }
  if (history_file.is_open() && !history_file.flush()) {
    throw std::runtime_error("error writing '" + c.strategies + "'");
  }

  const bool converged = res.stop_reason == StopReason::kConverged;
  ordered_json s;
  s["config"] = ConfigToJson(c);
  s["rounds"] = res.rounds;
  s["stop_reason"] = StopReasonName(res.stop_reason);
  s["converged"] = converged;
  s["br_gaps"] = Vec(res.last_br_gaps);
  s["kkt_gap"] = res.last_kkt_gap;
  s["final_kkt_gap"] = KktGap(source, res.final_profile);
  if (ex.game) s["nash_gap"] = NashGap(*ex.game, res.final_profile);
  const std::optional<double> value = source.ValueAt(res.final_profile);
  s["value"] = value ? ordered_json(*value) : ordered_json(nullptr);
  s["initial_value"] = std::isfinite(res.initial_value)
                           ? ordered_json(res.initial_value)
                           : ordered_json(nullptr);
  s["delta"] = Vec(res.initial_br_gaps);
  s["max_regret_l2"] = Vec(res.max_regret_l2);
  std::vector<double> max_regret(n);
  for (int i = 0; i < n; ++i) {
    const std::vector<double>& r = res.final_states[i].regrets;
    max_regret[i] = *std::max_element(r.begin(), r.end());
  }
  s["final_max_regret"] = Vec(max_regret);
  s["final_profile"] = res.final_profile;

  if (c.summary.empty() || c.summary == "-") {
    out << s.dump(2) << "\n";
  } else {
    std::ofstream f;
    OpenOutput(&f, c.summary);
    f << s.dump(2) << "\n";
    if (!f.flush()) throw std::runtime_error("error writing '" + c.summary + "'");
  }
  if (!c.quiet) {
    err << StopReasonName(res.stop_reason) << " after " << res.rounds
        << " rounds, kkt_gap " << Fmt("%.6g", res.last_kkt_gap) << "\n";
  }
  return converged ? kExitConverged : kExitNotConverged;
}

namespace {

int CmdRun(const std::vector<std::string>& config_files,
           const std::map<std::string, std::string>& flags, int jobs,
           std::ostream& out, std::ostream& err) {
  std::vector<ExperimentConfig> configs;
  const char* env_seed = std::getenv("RM_SEED");
  auto finish = [&](ExperimentConfig c) {
    if (env_seed != nullptr && *env_seed != '\0') {
      ApplySetting(&c, "seed", env_seed);
    }
    for (const auto& [key, value] : flags) ApplySetting(&c, key, value);
    c.Validate();
    return c;
  };
  if (config_files.empty()) {
    configs.push_back(finish(ExperimentConfig{}));
  } else {
    for (const std::string& path : config_files) {
      configs.push_back(finish(LoadConfigFile(path)));
    }
  }
  if (configs.size() > 1) {
    std::set<std::string> seen;
    for (const ExperimentConfig& c : configs) {
      for (const std::string* p : {&c.trace, &c.strategies, &c.summary}) {
        if (p->empty() || *p == "-") continue;
        if (!seen.insert(*p).second) {
          throw std::invalid_argument("batch runs share the output '" + *p +
                                      "'");
        }
      }
    }
  }
  if (configs.size() == 1) return RunExperiment(configs[0], out, err);

  // Batch: buffer each run's streams and replay them in config order.
  std::vector<std::ostringstream> outs(configs.size()), errs(configs.size());
  std::vector<int> codes(configs.size(), kExitError);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < configs.size(); k = next++) {
      try {
        codes[k] = RunExperiment(configs[k], outs[k], errs[k]);
      } catch (const std::exception& e) {
        errs[k] << "error: " << e.what() << "\n";
        codes[k] = kExitError;
      }
    }
  };
  const int threads =
      std::clamp(jobs, 1, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  bool failed = false, unconverged = false;
  for (size_t k = 0; k < configs.size(); ++k) {
    out << outs[k].str();
    std::istringstream lines(errs[k].str());
    for (std::string line; std::getline(lines, line);) {
      err << "[" << config_files[k] << "] " << line << "\n";
    }
    failed = failed || codes[k] == kExitError;
    unconverged = unconverged || codes[k] == kExitNotConverged;
  }
  if (failed) return kExitError;
  return unconverged ? kExitNotConverged : kExitConverged;
}

int CmdGenHard(int m, const std::string& variant, const std::string& path,
               std::ostream& out) {
  if (m < 2 || m % 2) throw std::invalid_argument("--m must be even and >= 2");
  GameSpec g;
  if (variant == "pure_init") {
    g = BuildPadded(m);
  } else if (variant == "uniform_init") {
    g = BuildUniformInit(m);
  } else {
    throw std::invalid_argument("--variant must be pure_init or uniform_init");
  }
  if (path.empty() || path == "-") {
    out << GameToJson(g).dump(2) << "\n";
  } else {
    SaveGameFile(g, path);
  }
  return 0;
}

int CmdVerify(const std::string& path, std::ostream& out, std::ostream& err) {
  const GameSpec g = LoadGameFile(path);
  std::vector<std::string> problems;
  bool checked = false;
  if (g.potential) {
    checked = true;
    const PotentialCheck pc = VerifyPotential(g);
    if (!pc.ok) {
      const PotentialWitness& w = *pc.witness;
      std::string joint;
      for (size_t k = 0; k < w.joint.size(); ++k) {
        joint += (k ? "," : "") + std::to_string(w.joint[k]);
      }
      problems.push_back(
          "potential mismatch: player " + std::to_string(w.player) +
          " at joint action (" + joint + ") deviating to " +
          std::to_string(w.deviation) + ": potential change " +
          FormatDouble(w.potential_change) + ", utility change " +
          FormatDouble(w.utility_change));
    }
  }
  if (g.identical_interest) {
    checked = true;
    for (int i = 1; i < g.num_players(); ++i) {
      if (g.utilities[i] != g.utilities[0]) {
        problems.push_back("identical_interest is set but player " +
                           std::to_string(i) + "'s utilities differ");
      }
    }
  }
  if (g.symmetric) {
    checked = true;
    if (!CheckSymmetric(g)) {
      problems.push_back(
          "symmetric is set but permuting players changes utilities");
    }
  }
  if (!checked) err << "note: no potential or structural tags to check\n";
  if (problems.empty()) {
    out << "OK\n";
    return 0;
  }
  for (const std::string& p : problems) out << p << "\n";
  return 1;
}

// Recognizes the spiral games by exact comparison; returns m or 0.
int SpiralOrder(const GameSpec& g, bool* uniform) {
  if (g.num_players() != 2 || g.action_counts[0] != g.action_counts[1]) {
    return 0;
  }
  const int a = g.action_counts[0];
  if (a % 2 == 1 && a >= 3) {
    const GameSpec p = BuildPadded(a - 1);
    if (p.utilities == g.utilities) {
      *uniform = false;
      return a - 1;
    }
  }
  if (a % 2 == 0 && a >= 4 && (a / 2) % 2 == 0) {
    const GameSpec u = BuildUniformInit(a / 2);
    if (u.utilities == g.utilities) {
      *uniform = true;
      return a / 2;
    }
  }
  return 0;
}

struct AnalyzeOptions {
  std::string history;
  std::string game;
  int hard_instance = 0;
  std::string variant = "pure_init";
  bool phases = false;
  bool cce = false;
  bool stall_growth = false;
  bool allow_alternating = false;
  double mass_threshold = 1e-12;
  std::string out;
};

int CmdAnalyze(const AnalyzeOptions& o, std::ostream& out,
               std::ostream& err) {
  if (o.game.empty() == (o.hard_instance == 0)) {
    throw std::invalid_argument("give exactly one of --game, --hard-instance");
  }
  const GameSpec g = !o.game.empty() ? LoadGameFile(o.game)
                     : o.variant == "uniform_init"
                         ? BuildUniformInit(o.hard_instance)
                         : BuildPadded(o.hard_instance);
  std::ifstream in(o.history);
  if (!in) throw std::runtime_error("cannot read '" + o.history + "'");
  PlayHistory h;
  try {
    h = ReadHistoryJsonl(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument(o.history + ": " + e.what());
  }
  if (h.size() > 0) g.domain().CheckShape(h.strategies[0]);

  const bool any = o.phases || o.cce || o.stall_growth;
  bool uniform = false;
  const int m = SpiralOrder(g, &uniform);
  const bool want_phases = o.phases || o.stall_growth || (!any && m > 0);
  if (want_phases && m == 0) {
    throw std::invalid_argument(
        "phase analysis needs a spiral game (gen-hard output)");
  }

  ordered_json report;
  report["history"] = {{"path", o.history},
                       {"rounds", h.size()},
                       {"scheme", SchemeName(h.scheme)}};
  if (want_phases) {
    const PhaseReport pr = AnalyzePhases(h, BuildSpiral(m), o.mass_threshold);
    report["phases"] = PhaseReportToJson(pr);
    report["phases"]["variant"] = uniform ? "uniform_init" : "pure_init";
    if (o.stall_growth || !any) {
      std::vector<BoundCheck> checks;
      const bool ok = CheckStallGrowth(pr, &checks);
      ordered_json list = ordered_json::array();
      for (const BoundCheck& b : checks) {
        list.push_back({{"name", b.name},
                        {"k", b.k},
                        {"lhs", b.lhs},
                        {"rhs", b.rhs},
                        {"ok", b.ok}});
      }
      report["stall_growth"] = {{"ok", ok}, {"checks", list}};
    }
  }
  if (o.cce || !any) {
    const double gap = CceGap(g, h, o.allow_alternating);
    const double range = UtilityRange(g);
    ordered_json c = {{"cce_gap", gap},
                      {"normalized_cce_gap", range > 0 ? gap / range : gap}};
    if (h.size() > 0) c["last_nash_gap"] = NashGap(g, h.strategies.back());
    report["cce"] = c;
  }
  if (o.out.empty() || o.out == "-") {
    out << report.dump(2) << "\n";
  } else {
    std::ofstream f;
    OpenOutput(&f, o.out);
    f << report.dump(2) << "\n";
  }
  (void)err;
  return 0;
}

int CmdSelftest(const std::string& suite, bool verbose, std::ostream& out) {
  bool ok = true;
  for (const std::string& name :
       suite == "all" ? SuiteNames() : std::vector<std::string>{suite}) {
    const SuiteResult r = RunSuite(name);
    ok = ok && r.passed;
    out << (r.passed ? "PASS" : "FAIL") << " criterion " << r.criterion
        << " " << r.name << ": " << r.summary << "\n";
    if (verbose || !r.passed) {
      for (const std::string& d : r.details) out << "    " << d << "\n";
    }
    out.flush();
  }
  return ok ? 0 : 1;
}

std::string Dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

}  // namespace

int CliMain(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regret-matching dynamics for potential games and smooth "
               "objectives over products of simplices"};
  app.name("rmopt");
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand("run", "Run learning dynamics");
  std::vector<std::string> config_files;
  int jobs = 1;
  run->add_option("--config", config_files,
                  "Flat JSON config; repeat for a batch")
      ->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "Parallel runs in batch mode")
      ->check(CLI::PositiveNumber);
  const std::set<std::string> bool_keys = {"normalize", "lazy_update_regrets",
                                           "quiet"};
  const std::map<std::string, std::string> help = {
      {"game", "Game JSON file"},
      {"objective", "cycle_poly or an objective JSON file"},
      {"hard_instance", "Spiral lower-bound game, e.g. m=6"},
      {"variant", "pure_init or uniform_init"},
      {"random_game", "family:counts, e.g. potential:3x3"},
      {"algo", "rm, rm+ or drm+"},
      {"gamma", "DRM+ discount parameter in (0, 1)"},
      {"scheme", "simultaneous, alternating or lazy"},
      {"epsilon", "Stopping precision and lazy threshold"},
      {"max_rounds", "Round limit"},
      {"init", "zero, threshold or custom"},
      {"init_file", "JSON with per-player regrets and/or strategies"},
      {"smoothness", "Smoothness constant for threshold init"},
      {"normalize", "Rescale utilities (or gradient spread) to range 1"},
      {"lazy_update_regrets", "Lazy scheme: accumulate skipped regrets"},
      {"seed", "Seed for random games (RM_SEED overrides config files)"},
      {"trace", "Trace CSV output"},
      {"strategies", "Strategy/utility history JSONL output"},
      {"summary", "Summary JSON output (default stdout)"},
      {"trace_stride", "Write every k-th round to the trace"},
      {"progress_every", "Progress line interval on stderr, 0 disables"},
      {"quiet", "No progress or status on stderr"},
  };
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  for (const std::string& key : ConfigKeys()) {
    const std::string flag = "--" + Dashed(key);
    if (bool_keys.count(key)) {
      opts[key] = run->add_flag(flag, help.at(key));
    } else {
      opts[key] = run->add_option(flag, raw[key], help.at(key));
    }
  }

  // gen-hard
  CLI::App* gen = app.add_subcommand("gen-hard", "Write a spiral game");
  int gen_m = 0;
  std::string gen_variant = "pure_init", gen_out;
  gen->add_option("--m", gen_m, "Even matrix order")->required();
  gen->add_option("--variant", gen_variant, "pure_init or uniform_init");
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  // verify
  CLI::App* verify =
      app.add_subcommand("verify", "Check a game's potential and tags");
  std::string verify_path;
  verify->add_option("game", verify_path, "Game JSON file")
      ->required()
      ->check(CLI::ExistingFile);

  // analyze
  CLI::App* analyze = app.add_subcommand("analyze", "Analyze a history");
  AnalyzeOptions ao;
  std::string ao_hard;
  analyze->add_option("--history", ao.history, "History JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--game", ao.game, "Game JSON file");
  analyze->add_option("--hard-instance", ao_hard, "Spiral game, e.g. m=6");
  analyze->add_option("--variant", ao.variant, "pure_init or uniform_init");
  analyze->add_flag("--phases", ao.phases, "Phase structure report");
  analyze->add_flag("--cce", ao.cce, "Gap of the averaged play");
  analyze->add_flag("--stall-growth", ao.stall_growth,
                    "Check phase-length growth");
  analyze->add_flag("--allow-alternating", ao.allow_alternating,
                    "Allow cce on alternating histories");
  analyze->add_option("--mass-threshold", ao.mass_threshold,
                      "Support threshold for phase detection");
  analyze->add_option("--out", ao.out, "Report path (default stdout)");

  // selftest
  CLI::App* selftest =
      app.add_subcommand("selftest", "Run the verification suites");
  std::string suite = "all";
  bool verbose = false, list = false;
  selftest->add_option("suite", suite, "Suite name or all");
  selftest->add_flag("--verbose,-v", verbose, "Print measurements");
  selftest->add_flag("--list", list, "List suite names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error maps to kExitError.
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*run) {
      std::map<std::string, std::string> flags;
      for (const std::string& key : ConfigKeys()) {
        if (opts[key]->count() == 0) continue;
        flags[key] = bool_keys.count(key) ? "true" : raw[key];
      }
      return CmdRun(config_files, flags, jobs, out, err);
    }
    if (*gen) return CmdGenHard(gen_m, gen_variant, gen_out, out);
    if (*verify) return CmdVerify(verify_path, out, err);
    if (*analyze) {
      if (!ao_hard.empty()) ao.hard_instance = ParseHardInstance(ao_hard);
      return CmdAnalyze(ao, out, err);
    }
    if (*selftest) {
      if (list) {
        for (const std::string& n : SuiteNames()) out << n << "\n";
        return 0;
      }
      return CmdSelftest(suite, verbose, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace rmopt

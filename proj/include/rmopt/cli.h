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

#ifndef RMOPT_CLI_H_
#define RMOPT_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmopt/dynamics.h"
#include "rmopt/game.h"
#include "rmopt/learner.h"
#include "rmopt/simplex.h"

namespace rmopt {

// Exit codes of `rmopt run`.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

// Flat experiment description. Config files use the same keys as the
// command-line flags with dashes replaced by underscores.
struct ExperimentConfig {
  // Exactly one input source.
  std::string game;           // game JSON path
  std::string objective;      // "cycle_poly" or an objective JSON path
  int hard_instance = 0;      // m of the spiral game, 0 if unused
  std::string variant = "pure_init";  // or uniform_init
  std::string random_game;    // family:counts, e.g. potential:3x3

  LearnerKind algo = LearnerKind::kRMPlus;
  double gamma = 0;  // DRM+ discount is 1 - gamma
  Scheme scheme = Scheme::kSimultaneous;
  double epsilon = 1e-3;
  int64_t max_rounds = 1000;
  InitPolicy init = InitPolicy::kZero;
  std::string init_file;  // {"regrets": [...], "strategies": [...]}
  double smoothness = -1;
  bool normalize = false;
  bool lazy_update_regrets = false;
  uint64_t seed = 0;

  std::string trace;       // CSV
  std::string strategies;  // JSONL history
  std::string summary;     // JSON; "-" or empty prints to stdout
  int64_t trace_stride = 1;
  int64_t progress_every = 10000;
  bool quiet = false;

  std::vector<std::string> InputSources() const;
  void Validate() const;
};

// Keys accepted by ApplySetting, in flag order.
const std::vector<std::string>& ConfigKeys();
// Sets one key from its textual value. Relative paths are resolved against
// `base_dir`.
void ApplySetting(ExperimentConfig* config, const std::string& key,
                  const std::string& value, const std::string& base_dir = "");
void ApplyConfigJson(ExperimentConfig* config, const nlohmann::json& j,
                     const std::string& base_dir = "");
ExperimentConfig LoadConfigFile(const std::string& path,
                                ExperimentConfig base = {});
nlohmann::json ConfigToJson(const ExperimentConfig& config);

// family:counts with family in potential, general, symmetric, congestion.
GameSpec ParseRandomGame(const std::string& spec, uint64_t seed);
// "m=6" or "6".
int ParseHardInstance(const std::string& spec);

struct Experiment {
  std::shared_ptr<const GameSpec> game;  // null for objectives
  std::shared_ptr<const UtilitySource> source;
  RunConfig run;
};
Experiment BuildExperiment(const ExperimentConfig& config);

// Runs one experiment, writing its artifacts. Returns an exit code.
int RunExperiment(const ExperimentConfig& config, std::ostream& out,
                  std::ostream& err);

// Entry point of the rmopt binary.
int CliMain(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rmopt

#endif  // RMOPT_CLI_H_

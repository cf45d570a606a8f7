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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rmopt/game.h"
#include "rmopt/hard_instances.h"
#include "rmopt/io.h"

namespace rmopt {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rmopt");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code =
      CliMain(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("rmopt_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  std::string Write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

 private:
  fs::path path_;
};

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST_CASE("run: RM on the m=6 spiral game stays far from equilibrium") {
  const Outcome o = Cli({"run", "--hard-instance", "m=6", "--algo", "rm",
                         "--scheme", "simultaneous", "--epsilon", "0",
                         "--max-rounds", "200000", "--quiet"});
  CHECK(o.code == kExitNotConverged);
  const json s = json::parse(o.out);
  CHECK(s["rounds"] == 200000);
  CHECK(s["stop_reason"] == "max_rounds");
  CHECK(s["nash_gap"].get<double>() > 1.0 / 14);
}

TEST_CASE("run: alternating RM+ on the m=6 spiral game converges") {
  const Outcome o = Cli({"run", "--hard-instance", "m=6", "--algo", "rm+",
                         "--scheme", "alternating", "--epsilon", "0.01",
                         "--max-rounds", "10000"});
  CHECK(o.code == kExitConverged);
  const json s = json::parse(o.out);
  CHECK(s["converged"] == true);
  CHECK(s["rounds"].get<int>() <= 10000);
  CHECK(o.err.find("converged") != std::string::npos);
}

TEST_CASE("run: cycle polynomial") {
  const Outcome o = Cli({"run", "--objective", "cycle_poly", "--algo", "rm+",
                         "--max-rounds", "1000", "--quiet"});
  CHECK(o.code == kExitConverged);
  const json s = json::parse(o.out);
  CHECK(s["final_kkt_gap"].get<double>() <= 0.05);
  CHECK_FALSE(s.contains("nash_gap"));
}

TEST_CASE("run: outputs and config files") {
  TempDir dir;
  // Output paths are taken as given, so make them absolute.
  const json exp = {{"random_game", "potential:3x2x2"},
                    {"algo", "drm+"},
                    {"gamma", 0.1},
                    {"scheme", "lazy"},
                    {"epsilon", 0.01},
                    {"max_rounds", 300},
                    {"seed", 11},
                    {"trace", dir.file("trace.csv")},
                    {"strategies", dir.file("hist.jsonl")},
                    {"summary", dir.file("summary.json")},
                    {"quiet", true}};
  const std::string cfg = dir.Write("exp.json", exp.dump());
  const Outcome o = Cli({"run", "--config", cfg});
  CHECK(o.code != kExitError);
  CHECK(o.out.empty());
  const json s = json::parse(Slurp(dir.file("summary.json")));
  CHECK(s["config"]["seed"] == 11);
  CHECK(s["config"]["algo"] == "drm+");
  const std::string trace = Slurp(dir.file("trace.csv"));
  CHECK(trace.rfind("round,player,br_gap,", 0) == 0);
  CHECK(fs::exists(dir.file("hist.jsonl")));

  // Same config and seed: byte-identical trace.
  fs::rename(dir.file("trace.csv"), dir.file("first.csv"));
  Cli({"run", "--config", cfg});
  CHECK(Slurp(dir.file("trace.csv")) == Slurp(dir.file("first.csv")));

  // Flags override the file; RM_SEED sits between the two.
  const std::string sum2 = dir.file("s2.json");
  Cli({"run", "--config", cfg, "--max-rounds", "5", "--summary", sum2});
  CHECK(json::parse(Slurp(sum2))["config"]["max_rounds"] == 5);
  ::setenv("RM_SEED", "99", 1);
  Cli({"run", "--config", cfg, "--summary", sum2});
  CHECK(json::parse(Slurp(sum2))["config"]["seed"] == 99);
  Cli({"run", "--config", cfg, "--summary", sum2, "--seed", "5"});
  CHECK(json::parse(Slurp(sum2))["config"]["seed"] == 5);
  ::unsetenv("RM_SEED");
}

TEST_CASE("run: trace stride keeps the first and last rounds") {
  // Also checks that missing output directories are created.
  TempDir dir;
  const Outcome o = Cli({"run", "--random-game", "general:3x3", "--algo", "rm",
                         "--epsilon", "0", "--max-rounds", "25",
                         "--trace-stride", "10", "--trace",
                         dir.file("sub/t.csv"), "--quiet"});
  CHECK(o.code == kExitNotConverged);
  std::istringstream in(Slurp(dir.file("sub/t.csv")));
  std::string line;
  std::vector<std::string> rounds;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.find(",-1,") != std::string::npos) {
      rounds.push_back(line.substr(0, line.find(',')));
    }
  }
  CHECK(rounds == std::vector<std::string>{"1", "10", "20", "25"});
}

TEST_CASE("run: errors") {
  TempDir dir;
  Outcome o = Cli({"run", "--objective", "cycle_poly", "--hard-instance", "4"});
  CHECK(o.code == kExitError);
  CHECK(o.err.find("error:") != std::string::npos);
  const std::string bad = dir.Write("bad.json", "{\"players\": 2,\n \"actions\": [2 2]}");
  o = Cli({"run", "--game", bad});
  CHECK(o.code == kExitError);
  CHECK(o.err.find(bad + ":2:") != std::string::npos);
  o = Cli({"run", "--game", dir.file("nope.json")});
  CHECK(o.code == kExitError);
  o = Cli({"run", "--objective", "cycle_poly", "--algo", "rm++"});
  CHECK(o.code == kExitError);
  o = Cli({"run", "--objective", "cycle_poly", "--scheme", "lazy",
           "--epsilon", "0"});
  CHECK(o.code == kExitError);
}

TEST_CASE("run: batch mode") {
  TempDir dir;
  const std::string a = dir.Write(
      "a.json", json{{"objective", "cycle_poly"},
                     {"max_rounds", 50},
                     {"quiet", true},
                     {"summary", dir.file("a_sum.json")}}
                    .dump());
  const std::string b = dir.Write(
      "b.json", json{{"hard_instance", "m=4"},
                     {"algo", "rm"},
                     {"epsilon", 0},
                     {"max_rounds", 50},
                     {"quiet", true},
                     {"summary", dir.file("b_sum.json")}}
                    .dump());
  const Outcome o = Cli({"run", "--config", a, "--config", b, "--jobs", "2"});
  CHECK(o.code == kExitNotConverged);
  CHECK(json::parse(Slurp(dir.file("a_sum.json")))["converged"] == true);
  CHECK(json::parse(Slurp(dir.file("b_sum.json")))["converged"] == false);

  const std::string c = dir.Write(
      "c.json", json{{"objective", "cycle_poly"},
                     {"summary", dir.file("a_sum.json")}}
                    .dump());
  CHECK(Cli({"run", "--config", a, "--config", c}).code == kExitError);
}

TEST_CASE("gen-hard") {
  const Outcome o = Cli({"gen-hard", "--m", "4"});
  REQUIRE(o.code == 0);
  const json g = json::parse(o.out);
  const std::vector<double> want = BuildSpiral(4).entries;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      CHECK(g["payoff_matrix"][r][c].get<double>() == want[r * 4 + c]);
    }
  }
  TempDir dir;
  CHECK(Cli({"gen-hard", "--m", "6", "--variant", "uniform_init", "--out",
             dir.file("u.json")})
            .code == 0);
  CHECK(LoadGameFile(dir.file("u.json")).utilities ==
        BuildUniformInit(6).utilities);
  CHECK(Cli({"gen-hard", "--m", "5"}).code == kExitError);
}

TEST_CASE("verify") {
  TempDir dir;
  SaveGameFile(RandomPotentialGame(3, {2, 3, 2}, 4, 0.5), dir.file("p.json"));
  Outcome o = Cli({"verify", dir.file("p.json")});
  CHECK(o.code == 0);
  CHECK(o.out.find("OK") != std::string::npos);

  GameSpec g = RandomGeneralGame(2, {2, 2}, 500);
  g.potential = g.utilities[0];
  SaveGameFile(g, dir.file("g.json"));
  o = Cli({"verify", dir.file("g.json")});
  CHECK(o.code == 1);
  CHECK(o.out.find("OK") == std::string::npos);
  CHECK(o.out.find("player 1") != std::string::npos);
}

TEST_CASE("analyze") {
  TempDir dir;
  const std::string hist = dir.file("h.jsonl");
  CHECK(Cli({"run", "--hard-instance", "m=6", "--algo", "rm", "--epsilon",
             "0", "--max-rounds", "1000", "--strategies", hist, "--quiet"})
            .code == kExitNotConverged);
  Outcome o = Cli({"analyze", "--history", hist, "--hard-instance", "m=6",
                   "--phases"});
  REQUIRE(o.code == 0);
  json r = json::parse(o.out);
  const json& phases = r["phases"]["phases"];
  CHECK(phases[2]["length"].get<int>() >= 5);
  CHECK(phases[3]["length"].get<int>() >= 20);
  CHECK_FALSE(r.contains("cce"));

  // With no analysis flags, everything applicable runs.
  o = Cli({"analyze", "--history", hist, "--hard-instance", "6", "--out",
           dir.file("r.json")});
  REQUIRE(o.code == 0);
  r = json::parse(Slurp(dir.file("r.json")));
  CHECK(r.contains("phases"));
  CHECK(r.contains("stall_growth"));
  CHECK(r["cce"]["cce_gap"].get<double>() <= std::sqrt(7.0 / 1000));

  CHECK(Cli({"analyze", "--history", dir.file("none.jsonl")}).code ==
        kExitError);
}

TEST_CASE("selftest") {
  Outcome o = Cli({"selftest", "four_cycle"});
  CHECK(o.code == 0);
  CHECK(o.out.find("PASS criterion 8 four_cycle") == 0);
  o = Cli({"selftest", "--list"});
  CHECK(o.out.find("gradient_structure") != std::string::npos);
  CHECK(Cli({"selftest", "nonexistent"}).code == kExitError);
}

TEST_CASE("config keys round trip through json") {
  ExperimentConfig c;
  ApplySetting(&c, "hard_instance", "m=4");
  ApplySetting(&c, "algo", "drm+");
  ApplySetting(&c, "gamma", "0.2");
  ApplySetting(&c, "trace", "out/t.csv", "/base");
  CHECK(c.hard_instance == 4);
  // Inputs resolve against the config's directory, outputs do not.
  CHECK(c.trace == "out/t.csv");
  ApplySetting(&c, "init_file", "init.json", "/base");
  CHECK(c.init_file == "/base/init.json");
  ExperimentConfig d;
  ApplyConfigJson(&d, ConfigToJson(c));
  CHECK(ConfigToJson(d) == ConfigToJson(c));
  CHECK_THROWS(ApplySetting(&c, "colour", "red"));
  CHECK(ParseHardInstance("6") == 6);
  CHECK_THROWS(ParseHardInstance("m=x"));
  CHECK(ParseRandomGame("congestion:4x4x4", 1).action_counts ==
        std::vector<int>{4, 4, 4});
  CHECK_THROWS(ParseRandomGame("zero_sum:2x2", 1));
  CHECK_THROWS(ParseRandomGame("congestion:3x4", 1));
}

}  // namespace
}  // namespace rmopt

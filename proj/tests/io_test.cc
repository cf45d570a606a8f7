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


#include "rmopt/io.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "rmopt/game.h"
#include "rmopt/hard_instances.h"
#include "rmopt/objective.h"

namespace rmopt {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("rmopt_io_" + std::to_string(rd()) + std::to_string(rd()));
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

std::string ErrorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("game json round trips") {
  for (const GameSpec& g :
       {RandomPotentialGame(2, {2, 3}, 1), RandomPotentialGame(3, {2, 2, 3}, 2),
        RandomPotentialGame(3, {2, 2, 3}, 3, 0.5),
        RandomGeneralGame(2, {3, 2}, 4), RandomCongestionGame(3, 3, 5),
        BuildPadded(4)}) {
    const json j = GameToJson(g);
    const GameSpec back = GameFromJson(json::parse(j.dump()));
    CHECK(back.action_counts == g.action_counts);
    CHECK(back.utilities == g.utilities);
    CHECK(back.potential == g.potential);
    CHECK(back.identical_interest == g.identical_interest);
    CHECK(back.symmetric == g.symmetric);
  }
  const json two = GameToJson(RandomPotentialGame(2, {2, 3}, 1));
  CHECK(two.contains("payoff_matrix"));
  CHECK(two["payoff_matrix"].size() == 2);
  CHECK(two["payoff_matrix"][0].size() == 3);
}

TEST_CASE("payoff matrix and shared utilities") {
  const GameSpec g = GameFromJson(json::parse(R"({
      "players": 2, "actions": [2, 3], "kind": "identical_interest",
      "payoff_matrix": [[1, 2, 3], [4, 5, 6]]})"));
  CHECK(g.utilities[0] == std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(g.utilities[1] == g.utilities[0]);
  CHECK(*g.potential == g.utilities[0]);
  // Row-major, last player fastest: index of (1, 2) is 1 * 3 + 2.
  CHECK(g.utilities[0][JointIndex(g.action_counts, std::vector<int>{1, 2})] ==
        6);
  const GameSpec h = GameFromJson(json::parse(R"({
      "players": 3, "actions": [2, 1, 2], "kind": "identical_interest",
      "utilities": [[0, 1, 2, 3]]})"));
  CHECK(h.utilities.size() == 3);
}

TEST_CASE("game json errors name the field") {
  auto err = [](const char* text) {
    return ErrorOf([&] { GameFromJson(json::parse(text)); });
  };
  CHECK(err(R"({"actions": [2]})").find("players") == 0);
  CHECK(err(R"({"players": 2, "actions": [2]})").find("actions") == 0);
  CHECK(err(R"({"players": 1, "actions": [0]})").find("actions[0]") == 0);
  CHECK(err(R"({"players": 1, "actions": [2], "kind": "zero_sum",
                "utilities": [[0, 1]]})")
            .find("kind") == 0);
  CHECK(err(R"({"players": 1, "actions": [2],
                "utilities": [[0, "x"]]})")
            .find("utilities[0][1]") == 0);
  CHECK(err(R"({"players": 2, "actions": [2, 2], "kind": "potential",
                "utilities": [[0, 1, 2, 3], [0, 1, 2, 3]]})")
            .find("potential") == 0);
  CHECK(err(R"({"players": 2, "actions": [2, 2], "kind": "identical_interest",
                "payoff_matrix": [[1, 2], [3]]})")
            .find("payoff_matrix[1]") == 0);
  CHECK(err(R"({"players": 2, "actions": [2, 2],
                "utilities": [[0, 1, 2, 3], [0, 1, 2]]})")
            .find("utilities[1]") != std::string::npos);
  CHECK(err(R"([1, 2])").find("game") == 0);
}

TEST_CASE("files: parse errors carry line and column") {
  TempDir dir;
  const std::string path = dir.Write("bad.json", "{\n  \"players\": 2,\n  oops\n}\n");
  const std::string e = ErrorOf([&] { LoadGameFile(path); });
  CHECK(e.find(path + ":3:") == 0);
  CHECK(ErrorOf([&] { LoadGameFile(dir.file("missing.json")); })
            .find("cannot read") != std::string::npos);
  const std::string field = dir.Write("field.json", R"({"players": 0})");
  CHECK(ErrorOf([&] { LoadGameFile(field); }) == field + ": players: must be >= 1");
}

TEST_CASE("saved hard instances reload bit for bit") {
  TempDir dir;
  for (const GameSpec& g : {BuildPadded(6), BuildUniformInit(6)}) {
    const std::string path = dir.file("hard.json");
    SaveGameFile(g, path);
    const GameSpec back = LoadGameFile(path);
    CHECK(back.utilities == g.utilities);
    CHECK(back.potential == g.potential);
  }
}

TEST_CASE("objective json") {
  TempDir dir;
  const ObjectivePtr cyc = ObjectiveFromJson(json{{"type", "cycle_poly"}});
  CHECK(cyc->Evaluate({{0.5, 0.5}}) == doctest::Approx(CycleValue(0.5)));

  SaveGameFile(RandomPotentialGame(2, {2, 3}, 1), dir.file("g.json"));
  const std::string obj_path = dir.Write(
      "obj.json", R"({"type": "multilinear", "game": "g.json"})");
  const ObjectivePtr ml = LoadObjectiveFile(obj_path);
  const ObjectivePtr direct = MakeMultilinear(RandomPotentialGame(2, {2, 3}, 1));
  const Point x = {{0.3, 0.7}, {0.2, 0.2, 0.6}};
  CHECK(ml->Evaluate(x) == direct->Evaluate(x));

  const json inline_game = {{"type", "multilinear"},
                            {"game", GameToJson(BuildPadded(2))},
                            {"normalize", true},
                            {"smoothness", 7.5}};
  const ObjectivePtr norm = ObjectiveFromJson(inline_game);
  CHECK(norm->smoothness() == 7.5);
  CHECK(norm->gradient_spread() == doctest::Approx(1));

  const ObjectivePtr lin = ObjectiveFromJson(
      json::parse(R"({"type": "linear", "weights": [[1, 0], [0, 2, 1]]})"));
  CHECK(lin->Evaluate({{0.5, 0.5}, {0, 0, 1}}) == doctest::Approx(1.5));

  CHECK(ErrorOf([] { ObjectiveFromJson(json{{"type", "cubic"}}); })
            .find("type") == 0);
  CHECK(ErrorOf([] { ObjectiveFromJson(json{{"type", "multilinear"}}); })
            .find("game") == 0);
  const std::string general = dir.Write(
      "gen.json", GameToJson(RandomGeneralGame(2, {2, 2}, 3)).dump());
  const std::string bad = dir.Write(
      "bad_obj.json", R"({"type": "multilinear", "game": "gen.json"})");
  CHECK_THROWS(LoadObjectiveFile(bad));
}

}  // namespace
}  // namespace rmopt

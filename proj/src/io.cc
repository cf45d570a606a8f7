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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rmopt {

using nlohmann::json;

namespace {

template <typename T>
T Field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw std::invalid_argument(key + ": missing field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(key + ": " + e.what());
  }
}

std::vector<double> Tensor(const json& j, const std::string& field) {
  if (!j.is_array()) throw std::invalid_argument(field + ": expected array");
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) {
      throw std::invalid_argument(field + "[" + std::to_string(k) +
                                  "]: expected a number");
    }
    out.push_back(j[k].get<double>());
  }
  return out;
}

}  // namespace

json GameToJson(const GameSpec& game) {
  ValidateGame(game);
  json j;
  j["players"] = game.num_players();
  j["actions"] = game.action_counts;
  const bool common_potential =
      game.potential && *game.potential == game.utilities[0];
  if (game.identical_interest) {
    j["kind"] = "identical_interest";
  } else if (game.potential) {
    j["kind"] = "potential";
  } else {
    j["kind"] = "general";
  }
  if (game.identical_interest && game.num_players() == 2) {
    const int rows = game.action_counts[0], cols = game.action_counts[1];
    json mat = json::array();
    for (int r = 0; r < rows; ++r) {
      mat.push_back(std::vector<double>(
          game.utilities[0].begin() + static_cast<size_t>(r) * cols,
          game.utilities[0].begin() + static_cast<size_t>(r + 1) * cols));
    }
    j["payoff_matrix"] = std::move(mat);
  } else {
    j["utilities"] = game.utilities;
  }
  if (game.potential && !(game.identical_interest && common_potential)) {
    j["potential"] = *game.potential;
  }
  if (game.symmetric) j["symmetric"] = true;
  return j;
}

GameSpec GameFromJson(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("game: expected an object");
  GameSpec g;
  const int n = Field<int>(j, "players");
  if (n < 1) throw std::invalid_argument("players: must be >= 1");
  g.action_counts = Field<std::vector<int>>(j, "actions");
  if (static_cast<int>(g.action_counts.size()) != n) {
    throw std::invalid_argument("actions: expected " + std::to_string(n) +
                                " entries");
  }
  for (size_t i = 0; i < g.action_counts.size(); ++i) {
    if (g.action_counts[i] < 1) {
      throw std::invalid_argument("actions[" + std::to_string(i) +
                                  "]: must be >= 1");
    }
  }
  const std::string kind = j.contains("kind")
                               ? Field<std::string>(j, "kind")
                               : std::string("general");
  if (kind != "identical_interest" && kind != "potential" &&
      kind != "general") {
    throw std::invalid_argument(
        "kind: expected identical_interest, potential or general");
  }
  g.identical_interest = kind == "identical_interest";
  if (j.contains("payoff_matrix")) {
    if (!g.identical_interest || n != 2) {
      throw std::invalid_argument(
          "payoff_matrix: only allowed for 2-player identical_interest games");
    }
    const json& mat = j.at("payoff_matrix");
    if (!mat.is_array() ||
        static_cast<int>(mat.size()) != g.action_counts[0]) {
      throw std::invalid_argument("payoff_matrix: expected " +
                                  std::to_string(g.action_counts[0]) +
                                  " rows");
    }
    std::vector<double> flat;
    for (size_t r = 0; r < mat.size(); ++r) {
      const std::string field = "payoff_matrix[" + std::to_string(r) + "]";
      std::vector<double> row = Tensor(mat[r], field);
      if (static_cast<int>(row.size()) != g.action_counts[1]) {
        throw std::invalid_argument(field + ": expected " +
                                    std::to_string(g.action_counts[1]) +
                                    " columns");
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
    g.utilities.assign(2, flat);
  } else if (j.contains("utilities")) {
    const json& us = j.at("utilities");
    if (!us.is_array()) throw std::invalid_argument("utilities: expected array");
    for (size_t i = 0; i < us.size(); ++i) {
      g.utilities.push_back(
          Tensor(us[i], "utilities[" + std::to_string(i) + "]"));
    }
    if (g.identical_interest && g.utilities.size() == 1) {
      g.utilities.assign(n, g.utilities[0]);
    }
  } else {
    throw std::invalid_argument("utilities: missing (or payoff_matrix)");
  }
  if (j.contains("potential")) {
    g.potential = Tensor(j.at("potential"), "potential");
  } else if (g.identical_interest && !g.utilities.empty()) {
    g.potential = g.utilities[0];
  } else if (kind == "potential") {
    throw std::invalid_argument("potential: required for kind potential");
  }
  if (j.contains("symmetric")) g.symmetric = Field<bool>(j, "symmetric");
  ValidateGame(g);
  return g;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::invalid_argument(path + ":" + std::to_string(line) + ":" +
                                std::to_string(col) + ": malformed JSON");
  }
}

void WriteJsonFile(const json& j, const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

GameSpec LoadGameFile(const std::string& path) {
  const json j = ReadJsonFile(path);
  try {
    return GameFromJson(j);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void SaveGameFile(const GameSpec& game, const std::string& path) {
  WriteJsonFile(GameToJson(game), path);
}

ObjectivePtr ObjectiveFromJson(const json& j, const std::string& base_dir) {
  if (!j.is_object()) {
    throw std::invalid_argument("objective: expected an object");
  }
  const std::string type = Field<std::string>(j, "type");
  ObjectivePtr obj;
  if (type == "cycle_poly") {
    obj = MakeCyclePolynomial();
  } else if (type == "multilinear") {
    if (!j.contains("game")) throw std::invalid_argument("game: missing field");
    const json& g = j.at("game");
    if (g.is_string()) {
      std::filesystem::path p = g.get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      obj = MakeMultilinear(LoadGameFile(p.string()));
    } else {
      obj = MakeMultilinear(GameFromJson(g));
    }
  } else if (type == "linear") {
    obj = MakeLinear(Field<Point>(j, "weights"));
  } else {
    throw std::invalid_argument("type: expected cycle_poly, multilinear or "
                                "linear");
  }
  if (j.contains("normalize") && Field<bool>(j, "normalize")) {
    obj = NormalizeGradientSpread(obj);
  }
  if (j.contains("smoothness")) {
    obj = WithSmoothness(obj, Field<double>(j, "smoothness"));
  }
  return obj;
}

ObjectivePtr LoadObjectiveFile(const std::string& path) {
  const json j = ReadJsonFile(path);
  const std::string dir =
      std::filesystem::path(path).parent_path().string();
  try {
    return ObjectiveFromJson(j, dir.empty() ? "." : dir);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace rmopt

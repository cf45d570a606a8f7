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

#ifndef RMOPT_IO_H_
#define RMOPT_IO_H_

#include <string>

#include "json.hpp"
#include "rmopt/game.h"
#include "rmopt/objective.h"

namespace rmopt {

// Game file format:
//   {"players": n, "actions": [m_1, ...],
//    "kind": "identical_interest" | "potential" | "general",
//    "payoff_matrix": [[...], ...]   (2-player identical interest only)
//    "utilities": [[flat tensor], ...],
//    "potential": [flat tensor],      (optional)
//    "symmetric": bool}               (optional)
// Flat tensors are row-major over joint actions, last player fastest.
nlohmann::json GameToJson(const GameSpec& game);
// Errors name the offending field.
GameSpec GameFromJson(const nlohmann::json& j);

// Parse errors report line and column.
nlohmann::json ReadJsonFile(const std::string& path);
void WriteJsonFile(const nlohmann::json& j, const std::string& path);

GameSpec LoadGameFile(const std::string& path);
void SaveGameFile(const GameSpec& game, const std::string& path);

// {"type": "cycle_poly"} | {"type": "multilinear", "game": path or object}
// | {"type": "linear", "weights": [[...], ...]}, plus optional
// "smoothness" (override) and "normalize" (bool). Relative game paths
// resolve against `base_dir`.
ObjectivePtr ObjectiveFromJson(const nlohmann::json& j,
                               const std::string& base_dir = ".");
ObjectivePtr LoadObjectiveFile(const std::string& path);

}  // namespace rmopt

#endif  // RMOPT_IO_H_

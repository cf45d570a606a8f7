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

#ifndef RMOPT_GAME_H_
#define RMOPT_GAME_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmopt/simplex.h"

namespace rmopt {

// Dense normal-form game. Every tensor is flat, row-major over joint actions
// with the last player varying fastest:
//   index(a_1..a_n) = sum_i a_i * prod_{j>i} m_j.
struct GameSpec {
  std::vector<int> action_counts;
  std::vector<std::vector<double>> utilities;  // one tensor per player
  std::optional<std::vector<double>> potential;
  bool identical_interest = false;
  bool symmetric = false;

  int num_players() const { return static_cast<int>(action_counts.size()); }
  size_t num_joint() const;
  SimplexProduct domain() const { return SimplexProduct(action_counts); }
};

size_t JointIndex(std::span<const int> counts, std::span<const int> actions);
std::vector<int> JointActions(std::span<const int> counts, size_t index);

// Shape, finiteness and identical-interest consistency. Throws
// std::invalid_argument with the offending field.
void ValidateGame(const GameSpec& game);

// Expected tensor entry with `free_block`'s action held fixed, one entry per
// action of that block. The other players' joint actions are summed in
// lexicographic order and their probabilities multiplied in increasing player
// order, so symmetric inputs give bit-identical results.
Block ContractExcept(std::span<const double> tensor,
                     std::span<const int> counts, const Point& profile,
                     int free_block);
double ExpectedValue(std::span<const double> tensor,
                     std::span<const int> counts, const Point& profile);

// u_i(x_{-i}).
Block UtilityVector(const GameSpec& game, int player, const Point& profile);
// <x_i, u_i(x_{-i})>.
double ExpectedUtility(const GameSpec& game, int player, const Point& profile);
double PotentialValue(const GameSpec& game, const Point& profile);

struct PotentialWitness {
  int player = 0;
  std::vector<int> joint;  // a
  int deviation = 0;       // a_i'
  double potential_change = 0;
  double utility_change = 0;
};

struct PotentialCheck {
  bool ok = true;
  std::optional<PotentialWitness> witness;
};

// Exhaustive check of Phi(a_i', a_-i) - Phi(a) = u_i(a_i', a_-i) - u_i(a).
// Throws if the game has no potential tensor.
PotentialCheck VerifyPotential(const GameSpec& game, double tol = 1e-12);

// u_i(x_{-i}) identical across players at `samples` random equal profiles.
bool CheckSymmetric(const GameSpec& game, int samples = 50,
                    uint64_t seed = 0, double tol = 1e-12);

// max_i (max u_i - min u_i).
double UtilityRange(const GameSpec& game);
double TensorRange(std::span<const double> tensor);
// Divides every tensor by UtilityRange (no-op when it is zero).
GameSpec NormalizeUtilities(GameSpec game);

// Phi iid uniform[0,1]. With dummy_scale > 0 each player's utility adds a
// term uniform[0, dummy_scale] that ignores the player's own action.
GameSpec RandomPotentialGame(int n, std::vector<int> action_counts,
                             uint64_t seed, double dummy_scale = 0.0);
// Identical interest, Phi depends only on the multiset of actions.
GameSpec RandomSymmetricIdenticalGame(int n, int m, uint64_t seed);
// Independent uniform[0,1] utilities, no potential.
GameSpec RandomGeneralGame(int n, std::vector<int> action_counts,
                           uint64_t seed);
// Each of the m actions uses resources {a, a+1 mod m}; the per-resource cost
// grows with load. Utilities are negated costs and the potential is
// Rosenthal's.
GameSpec RandomCongestionGame(int n, int m, uint64_t seed);

class GameUtilitySource : public UtilitySource {
 public:
  explicit GameUtilitySource(std::shared_ptr<const GameSpec> game);
  const SimplexProduct& domain() const override { return domain_; }
  Block UtilityFor(const Point& x, int block) const override;
  std::optional<double> ValueAt(const Point& x) const override;
  const GameSpec& game() const { return *game_; }

 private:
  std::shared_ptr<const GameSpec> game_;
  SimplexProduct domain_;
};

}  // namespace rmopt

#endif  // RMOPT_GAME_H_

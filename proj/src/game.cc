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

#include "rmopt/game.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "rmopt/random.h"

namespace rmopt {
namespace {

std::vector<size_t> Strides(std::span<const int> counts) {
  std::vector<size_t> s(counts.size(), 1);
  for (int i = static_cast<int>(counts.size()) - 2; i >= 0; --i) {
    s[i] = s[i + 1] * static_cast<size_t>(counts[i + 1]);
  }
  return s;
}

size_t NumJoint(std::span<const int> counts) {
  size_t n = 1;
  for (int m : counts) n *= static_cast<size_t>(m);
  return n;
}

void CheckProfile(std::span<const int> counts, const Point& profile,
                  size_t tensor_size) {
  if (profile.size() != counts.size()) {
    throw std::invalid_argument("profile block count does not match game");
  }
  for (size_t i = 0; i < counts.size(); ++i) {
    if (static_cast<int>(profile[i].size()) != counts[i]) {
      throw std::invalid_argument("profile block " + std::to_string(i) +
                                  " has the wrong size");
    }
  }
  if (tensor_size != NumJoint(counts)) {
    throw std::invalid_argument("tensor size does not match action counts");
  }
}

}  // namespace

size_t GameSpec::num_joint() const { return NumJoint(action_counts); }

size_t JointIndex(std::span<const int> counts, std::span<const int> actions) {
  if (actions.size() != counts.size()) {
    throw std::invalid_argument("joint action has the wrong length");
  }
  size_t idx = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= counts[i]) {
      throw std::out_of_range("action index out of range");
    }
    idx = idx * counts[i] + actions[i];
  }
  return idx;
}

std::vector<int> JointActions(std::span<const int> counts, size_t index) {
  std::vector<int> a(counts.size());
  for (int i = static_cast<int>(counts.size()) - 1; i >= 0; --i) {
    a[i] = static_cast<int>(index % counts[i]);
    index /= counts[i];
  }
  return a;
}

void ValidateGame(const GameSpec& game) {
  const int n = game.num_players();
  if (n < 1) throw std::invalid_argument("players: must be >= 1");
  for (int i = 0; i < n; ++i) {
    if (game.action_counts[i] < 1) {
      throw std::invalid_argument("actions[" + std::to_string(i) +
                                  "]: must be >= 1");
    }
  }
  const size_t size = game.num_joint();
  if (static_cast<int>(game.utilities.size()) != n) {
    throw std::invalid_argument("utilities: expected one tensor per player");
  }
  auto check_tensor = [&](const std::vector<double>& t,
                          const std::string& field) {
    if (t.size() != size) {
      throw std::invalid_argument(field + ": has " + std::to_string(t.size()) +
                                  " entries, expected " +
                                  std::to_string(size));
    }
    for (size_t k = 0; k < t.size(); ++k) {
      if (!std::isfinite(t[k])) {
        throw std::invalid_argument(field + "[" + std::to_string(k) +
                                    "]: non-finite entry");
      }
    }
  };
  for (int i = 0; i < n; ++i) {
    check_tensor(game.utilities[i], "utilities[" + std::to_string(i) + "]");
  }
  if (game.potential) check_tensor(*game.potential, "potential");
  if (game.identical_interest) {
    for (int i = 1; i < n; ++i) {
      if (game.utilities[i] != game.utilities[0]) {
        throw std::invalid_argument("utilities[" + std::to_string(i) +
                                    "]: differs from player 0 in an "
                                    "identical-interest game");
      }
    }
  }
  if (game.symmetric) {
    for (int i = 1; i < n; ++i) {
      if (game.action_counts[i] != game.action_counts[0]) {
        throw std::invalid_argument(
            "actions: symmetric games need equal action counts");
      }
    }
  }
}

Block ContractExcept(std::span<const double> tensor,
                     std::span<const int> counts, const Point& profile,
                     int free_block) {
  const int n = static_cast<int>(counts.size());
  if (free_block < 0 || free_block >= n) {
    throw std::out_of_range("player index out of range");
  }
  CheckProfile(counts, profile, tensor.size());
  const std::vector<size_t> stride = Strides(counts);
  std::vector<int> others;
  for (int j = 0; j < n; ++j) {
    if (j != free_block) others.push_back(j);
  }
  const int mf = counts[free_block];
  const size_t sf = stride[free_block];
  Block out(mf, 0.0);
  std::vector<int> a(n, 0);
  while (true) {
    double w = 1.0;
    size_t base = 0;
    for (int j : others) {
      w *= profile[j][a[j]];
      base += a[j] * stride[j];
    }
    if (w != 0.0) {
      for (int k = 0; k < mf; ++k) out[k] += w * tensor[base + k * sf];
    }
    int pos = static_cast<int>(others.size()) - 1;
    for (; pos >= 0; --pos) {
      const int j = others[pos];
      if (++a[j] < counts[j]) break;
      a[j] = 0;
    }
    if (pos < 0) break;
  }
  return out;
}

double ExpectedValue(std::span<const double> tensor,
                     std::span<const int> counts, const Point& profile) {
  CheckProfile(counts, profile, tensor.size());
  const int n = static_cast<int>(counts.size());
  std::vector<int> a(n, 0);
  double total = 0;
  for (size_t idx = 0; idx < tensor.size(); ++idx) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= profile[j][a[j]];
    if (w != 0.0) total += w * tensor[idx];
    for (int j = n - 1; j >= 0; --j) {
      if (++a[j] < counts[j]) break;
      a[j] = 0;
    }
  }
  return total;
}

Block UtilityVector(const GameSpec& game, int player, const Point& profile) {
  if (player < 0 || player >= game.num_players()) {
    throw std::out_of_range("player index out of range");
  }
  return ContractExcept(game.utilities[player], game.action_counts, profile,
                        player);
}

double ExpectedUtility(const GameSpec& game, int player, const Point& profile) {
  return Dot(profile.at(player), UtilityVector(game, player, profile));
}

double PotentialValue(const GameSpec& game, const Point& profile) {
  if (!game.potential) throw std::invalid_argument("game has no potential");
  return ExpectedValue(*game.potential, game.action_counts, profile);
}

PotentialCheck VerifyPotential(const GameSpec& game, double tol) {
  if (!game.potential) {
    throw std::invalid_argument("verify_potential: game has no potential");
  }
  ValidateGame(game);
  const auto& phi = *game.potential;
  const auto& counts = game.action_counts;
  const std::vector<size_t> stride = Strides(counts);
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& u = game.utilities[i];
    for (size_t idx = 0; idx < phi.size(); ++idx) {
      const int ai = static_cast<int>((idx / stride[i]) % counts[i]);
      const size_t base = idx - ai * stride[i];
      for (int dev = 0; dev < counts[i]; ++dev) {
        if (dev == ai) continue;
        const size_t jdx = base + dev * stride[i];
        const double dphi = phi[jdx] - phi[idx];
        const double du = u[jdx] - u[idx];
        if (!(std::abs(dphi - du) <= tol)) {
          PotentialWitness w;
          w.player = i;
          w.joint = JointActions(counts, idx);
          w.deviation = dev;
          w.potential_change = dphi;
          w.utility_change = du;
          return {false, w};
        }
      }
    }
  }
  return {true, std::nullopt};
}

bool CheckSymmetric(const GameSpec& game, int samples, uint64_t seed,
                    double tol) {
  const int n = game.num_players();
  for (int i = 1; i < n; ++i) {
    if (game.action_counts[i] != game.action_counts[0]) return false;
  }
  const int m = game.action_counts[0];
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Block x(m);
    double sum = 0;
    for (double& v : x) sum += (v = UniformUnit(rng) + 1e-3);
    for (double& v : x) v /= sum;
    const Point profile(n, x);
    const Block u0 = UtilityVector(game, 0, profile);
    for (int i = 1; i < n; ++i) {
      const Block ui = UtilityVector(game, i, profile);
      for (int a = 0; a < m; ++a) {
        if (std::abs(ui[a] - u0[a]) > tol) return false;
      }
    }
  }
  return true;
}

double TensorRange(std::span<const double> tensor) {
  if (tensor.empty()) return 0;
  auto [lo, hi] = std::minmax_element(tensor.begin(), tensor.end());
  return *hi - *lo;
}

double UtilityRange(const GameSpec& game) {
  double r = 0;
  for (const auto& u : game.utilities) r = std::max(r, TensorRange(u));
  return r;
}

GameSpec NormalizeUtilities(GameSpec game) {
  const double r = UtilityRange(game);
  if (r > 0) {
    for (auto& u : game.utilities) {
      for (double& v : u) v /= r;
    }
    if (game.potential) {
      for (double& v : *game.potential) v /= r;
    }
  }
  return game;
}

GameSpec RandomPotentialGame(int n, std::vector<int> action_counts,
                             uint64_t seed, double dummy_scale) {
  if (n < 1 || static_cast<int>(action_counts.size()) != n) {
    throw std::invalid_argument("need one action count per player");
  }
  GameSpec g;
  g.action_counts = std::move(action_counts);
  for (int m : g.action_counts) {
    if (m < 1) throw std::invalid_argument("action counts must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> phi(g.num_joint());
  for (double& v : phi) v = UniformUnit(rng);
  g.utilities.assign(n, phi);
  g.potential = phi;
  g.identical_interest = dummy_scale == 0.0;
  if (dummy_scale != 0.0) {
    const std::vector<size_t> stride = Strides(g.action_counts);
    for (int i = 0; i < n; ++i) {
      // One draw per joint action of the others: index with a_i zeroed.
      std::vector<double> shift(g.num_joint());
      for (size_t idx = 0; idx < shift.size(); ++idx) {
        const int ai = static_cast<int>((idx / stride[i]) % g.action_counts[i]);
        if (ai == 0) shift[idx] = dummy_scale * UniformUnit(rng);
      }
      for (size_t idx = 0; idx < shift.size(); ++idx) {
        const int ai = static_cast<int>((idx / stride[i]) % g.action_counts[i]);
        g.utilities[i][idx] += shift[idx - ai * stride[i]];
      }
    }
  }
  return g;
}

GameSpec RandomSymmetricIdenticalGame(int n, int m, uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("sizes must be >= 1");
  GameSpec g;
  g.action_counts.assign(n, m);
  std::mt19937_64 rng(seed);
  std::map<std::vector<int>, double> by_multiset;
  std::vector<double> phi(g.num_joint());
  for (size_t idx = 0; idx < phi.size(); ++idx) {
    std::vector<int> a = JointActions(g.action_counts, idx);
    std::sort(a.begin(), a.end());
    auto it = by_multiset.find(a);
    if (it == by_multiset.end()) {
      it = by_multiset.emplace(std::move(a), UniformUnit(rng)).first;
    }
    phi[idx] = it->second;
  }
  g.utilities.assign(n, phi);
  g.potential = std::move(phi);
  g.identical_interest = true;
  g.symmetric = true;
  return g;
}

GameSpec RandomGeneralGame(int n, std::vector<int> action_counts,
                           uint64_t seed) {
  if (n < 1 || static_cast<int>(action_counts.size()) != n) {
    throw std::invalid_argument("need one action count per player");
  }
  GameSpec g;
  g.action_counts = std::move(action_counts);
  for (int m : g.action_counts) {
    if (m < 1) throw std::invalid_argument("action counts must be >= 1");
  }
  std::mt19937_64 rng(seed);
  g.utilities.assign(n, std::vector<double>(g.num_joint()));
  for (auto& u : g.utilities) {
    for (double& v : u) v = UniformUnit(rng);
  }
  ValidateGame(g);
  return g;
}

GameSpec RandomCongestionGame(int n, int m, uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("sizes must be >= 1");
  std::mt19937_64 rng(seed);
  // cost[r][k-1]: cost of resource r under load k, increasing in k.
  std::vector<std::vector<double>> cost(m, std::vector<double>(n));
  for (auto& c : cost) {
    double acc = 0;
    for (double& v : c) v = (acc += UniformUnit(rng));
  }
  std::vector<std::set<int>> uses(m);
  for (int a = 0; a < m; ++a) uses[a] = {a, (a + 1) % m};

  GameSpec g;
  g.action_counts.assign(n, m);
  g.utilities.assign(n, std::vector<double>(g.num_joint()));
  g.potential = std::vector<double>(g.num_joint());
  for (size_t idx = 0; idx < g.num_joint(); ++idx) {
    const std::vector<int> a = JointActions(g.action_counts, idx);
    std::vector<int> load(m, 0);
    for (int ai : a) {
      for (int r : uses[ai]) ++load[r];
    }
    for (int i = 0; i < n; ++i) {
      double c = 0;
      for (int r : uses[a[i]]) c += cost[r][load[r] - 1];
      g.utilities[i][idx] = -c;
    }
    double phi = 0;
    for (int r = 0; r < m; ++r) {
      for (int k = 0; k < load[r]; ++k) phi += cost[r][k];
    }
    (*g.potential)[idx] = -phi;
  }
  g.symmetric = true;
  return g;
}

GameUtilitySource::GameUtilitySource(std::shared_ptr<const GameSpec> game)
    : game_(std::move(game)) {
  if (!game_) throw std::invalid_argument("null game");
  ValidateGame(*game_);
  domain_ = game_->domain();
}

Block GameUtilitySource::UtilityFor(const Point& x, int block) const {
  return UtilityVector(*game_, block, x);
}

std::optional<double> GameUtilitySource::ValueAt(const Point& x) const {
  if (game_->potential) return PotentialValue(*game_, x);
  if (game_->identical_interest) {
    return ExpectedValue(game_->utilities[0], game_->action_counts, x);
  }
  return std::nullopt;
}

}  // namespace rmopt

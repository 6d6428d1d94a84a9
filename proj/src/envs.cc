// Copyright 2026 The ersym Authors.
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

#include "ersym/envs.h"

#include <cmath>

#include "ersym/error.h"

namespace ersym {

TabularDecPomdp MakeLeverGame(const LeverGameConfig& cfg) {
  if (cfg.num_levers < 2) throw ValidationError("lever game needs at least 2 levers");
  if (cfg.rounds < 1) throw ValidationError("lever game needs at least 1 round");
  const int L = cfg.num_levers;
  std::vector<std::string> labels;
  for (int l = 0; l < L; ++l) labels.push_back("lever" + std::to_string(l + 1));
  TabularDecPomdp m = MakeEmptyModel("lever" + std::to_string(L), {"s"},
                                     {labels, labels}, {labels, labels},
                                     cfg.rounds);
  m.shared_symmetries = true;
  m.initial_dist = {1.0};
  for (int a0 = 0; a0 < L; ++a0) {
    for (int a1 = 0; a1 < L; ++a1) {
      const int ja = m.EncodeJointAction(std::vector<int>{a0, a1});
      m.transition[ja] = 1.0;
      m.reward[ja] = a0 == a1 ? 1.0 : 0.0;
      m.observation[0][ja * L + a1] = 1.0;
      m.observation[1][ja * L + a0] = 1.0;
    }
  }
  CheckModel(m);
  return m;
}

TabularDecPomdp MakeCatDog() {
  using namespace catdog;
  using C = CatDogConfig;
  TabularDecPomdp m = MakeEmptyModel(
      "catdog", {"cat", "dog", "end_cat", "end_dog"},
      {{"light_on", "light_off", "bail", "remove_barrier", "noop"},
       {"noop", "bail", "guess_cat", "guess_dog"}},
      {{"cat", "dog"}, {"light_on", "light_off", "cat_revealed", "dog_revealed"}},
      2);
  m.terminal = {0, 0, 1, 1};
  m.initial_dist = {0.5, 0.5, 0.0, 0.0};
  // Alice sees the pet before acting.
  m.initial_observation[0] = {1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0};
  m.legal[0] = {1, 1, 1, 1, 0,
                0, 0, 0, 0, 1};
  m.legal[1] = {1, 0, 0, 0,
                0, 1, 1, 1};
  const double alice_reward[] = {C::kLightOn, C::kLightOff, C::kAliceBail,
                                 -C::kBarrierCost, 0.0};
  const int S = m.num_states();
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 4; ++b) {
      const int ja = m.EncodeJointAction(std::vector<int>{a, b});
      for (int s = 0; s < S; ++s) {
        const int pet = s % 2;
        int next = s;
        if (s == kCat || s == kDog) {
          const bool stays = a == kLightOnAct || a == kLightOffAct || a == kRemoveBarrier;
          next = stays ? s : (pet == 0 ? kEndCat : kEndDog);
        }
        m.transition[(s * m.num_joint_actions() + ja) * S + next] = 1.0;
      }
      for (int s2 = 0; s2 < S; ++s2) {
        const int pet = s2 % 2;
        double bob = 0.0;
        if (b == kBobBailAct) bob = C::kBobBail;
        if (b == kGuessCat) bob = pet == 0 ? C::kCatCorrect : C::kWrong;
        if (b == kGuessDog) bob = pet == 1 ? C::kDogCorrect : C::kWrong;
        m.reward[s2 * m.num_joint_actions() + ja] = alice_reward[a] + bob;
        const size_t row = static_cast<size_t>(s2) * m.num_joint_actions() + ja;
        m.observation[0][row * 2 + pet] = 1.0;
        int seen = 0;
        if (a == kLightOffAct) seen = kSeesLightOff;
        if (a == kRemoveBarrier) seen = pet == 0 ? kCatRevealed : kDogRevealed;
        m.observation[1][row * 4 + seen] = 1.0;
      }
    }
  }
  CheckModel(m);
  return m;
}

TabularDecPomdp MakeMatrixGame(const MatrixGameConfig& cfg) {
  const size_t n = cfg.labels.size();
  if (n == 0 || cfg.payoff.size() != n) {
    throw ValidationError("payoff matrix must be square with one row per label");
  }
  for (const auto& row : cfg.payoff) {
    if (row.size() != n) {
      throw ValidationError("payoff matrix must be square with one row per label");
    }
    for (double x : row) {
      if (!std::isfinite(x)) throw ValidationError("payoff entries must be finite");
    }
  }
  TabularDecPomdp m = MakeEmptyModel("matrix", {"s"}, {cfg.labels, cfg.labels},
                                     {{"none"}, {"none"}}, 1);
  m.shared_symmetries = true;
  m.initial_dist = {1.0};
  for (size_t a0 = 0; a0 < n; ++a0) {
    for (size_t a1 = 0; a1 < n; ++a1) {
      const int ja = m.EncodeJointAction(
          std::vector<int>{static_cast<int>(a0), static_cast<int>(a1)});
      m.transition[ja] = 1.0;
      m.reward[ja] = cfg.payoff[a0][a1];
      m.observation[0][ja] = 1.0;
      m.observation[1][ja] = 1.0;
    }
  }
  CheckModel(m);
  return m;
}

TabularDecPomdp MakeEnvironment(const std::string& name) {
  if (name == "lever3") return MakeLeverGame({3, 2});
  if (name == "lever2") return MakeLeverGame({2, 2});
  if (name == "catdog") return MakeCatDog();
  if (name == "matrix") return MakeMatrixGame();
  throw ValidationError("unknown environment '" + name +
                        "' (expected lever3, lever2, catdog or matrix)");
}

std::vector<std::string> EnvironmentNames() {
  return {"lever3", "lever2", "catdog", "matrix"};
}

}  // namespace ersym

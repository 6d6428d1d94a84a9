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

#ifndef ERSYM_ENVS_H_
#define ERSYM_ENVS_H_

#include <string>
#include <vector>

#include "ersym/model.h"

namespace ersym {

struct LeverGameConfig {
  int num_levers = 3;
  int rounds = 2;
};

// Two agents pick a lever each round and are paid 1 if the levers match.
// Each agent then observes the lever its partner pulled.
TabularDecPomdp MakeLeverGame(const LeverGameConfig& cfg = {});

struct CatDogConfig {
  static constexpr double kLightOn = 0.01;
  static constexpr double kLightOff = 0.0;
  static constexpr double kAliceBail = 1.0;
  static constexpr double kBarrierCost = 5.0;
  static constexpr double kBobBail = 0.5;
  static constexpr double kCatCorrect = 10.0;
  static constexpr double kDogCorrect = 11.0;
  static constexpr double kWrong = -10.0;
};

// Alice (agent 0) sees the pet and may signal with the light, bail, or pay
// to remove the barrier so Bob sees the pet. Bob (agent 1) then bails or
// guesses. Two steps; the acting agent's partner only has a no-op.
TabularDecPomdp MakeCatDog();

namespace catdog {
enum AliceAction { kLightOnAct = 0, kLightOffAct, kAliceBailAct, kRemoveBarrier, kAliceNoop };
enum BobAction { kBobNoop = 0, kBobBailAct, kGuessCat, kGuessDog };
enum AliceObs { kSeesCat = 0, kSeesDog };
enum BobObs { kSeesLightOn = 0, kSeesLightOff, kCatRevealed, kDogRevealed };
enum State { kCat = 0, kDog, kEndCat, kEndDog };
}  // namespace catdog

struct MatrixGameConfig {
  std::vector<std::string> labels = {"handshake", "fist_bump"};
  std::vector<std::vector<double>> payoff = {{1.0, -1.0}, {-1.0, 1.0}};
};

// One-shot game with a shared action set; both agents are paid
// payoff[a0][a1].
TabularDecPomdp MakeMatrixGame(const MatrixGameConfig& cfg = {});

// "lever3", "lever2", "catdog" or "matrix"; throws ValidationError otherwise.
TabularDecPomdp MakeEnvironment(const std::string& name);
std::vector<std::string> EnvironmentNames();

}  // namespace ersym

#endif  // ERSYM_ENVS_H_

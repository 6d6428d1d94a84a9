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

// Policy builders shared by the test binaries.

#ifndef ERSYM_TESTS_TEST_UTIL_H_
#define ERSYM_TESTS_TEST_UTIL_H_

#include <functional>
#include <vector>

#include "ersym/envs.h"
#include "ersym/evaluate.h"
#include "ersym/model.h"
#include "ersym/policy.h"
#include "ersym/rng.h"
#include "ersym/symmetry.h"

namespace ersym::testing {

inline std::vector<double> OneHot(int n, int k) {
  std::vector<double> p(n, 0.0);
  p[k] = 1.0;
  return p;
}

// Deterministic policy from a chooser (agent, step, history) -> action.
inline TabularJointPolicy Deterministic(
    const TabularDecPomdp& model,
    const std::function<int(int, int, const LocalAoh&)>& choose) {
  return TabularJointPolicy::FromFunction(
      model, [&](int agent, int step, const LocalAoh& h) {
        return OneHot(model.num_actions(agent), choose(agent, step, h));
      });
}

// Random distribution over legal actions at every valid history.
inline TabularJointPolicy RandomPolicy(const TabularDecPomdp& model, uint64_t seed) {
  Rng rng(seed);
  return TabularJointPolicy::FromFunction(
      model, [&](int agent, int step, const LocalAoh&) {
        std::vector<double> p(model.num_actions(agent), 0.0);
        double total = 0.0;
        for (int a : model.LegalActions(agent, step)) {
          p[a] = rng.Uniform() + 0.05;
          total += p[a];
        }
        for (double& x : p) x /= total;
        return p;
      });
}

// Lever game: always pull `lever`.
inline TabularJointPolicy AlwaysLever(const TabularDecPomdp& lever, int k) {
  return Deterministic(lever, [k](int, int, const LocalAoh&) { return k; });
}

// Lever game OP optimum: uniform first round; afterwards repeat on a match
// and otherwise switch to the lever neither agent pulled.
inline TabularJointPolicy LeverOpOptimal(const TabularDecPomdp& lever) {
  const int L = lever.num_actions(0);
  return TabularJointPolicy::FromFunction(
      lever, [L](int, int step, const LocalAoh& h) {
        std::vector<double> p(L, 0.0);
        if (step == 0) {
          for (double& x : p) x = 1.0 / L;
          return p;
        }
        const auto [mine, theirs] = h.steps.back();
        if (mine == theirs) {
          p[mine] = 1.0;
        } else {
          for (int l = 0; l < L; ++l) {
            if (l != mine && l != theirs) p[l] = 1.0 / (L - 2);
          }
        }
        return p;
      });
}

// Cat/dog cheap talk. With `cat_is_on` Alice lights the bulb for the cat and
// leaves it off for the dog; Bob decodes accordingly and reads revealed pets.
inline TabularJointPolicy CatDogCheapTalk(const TabularDecPomdp& cd, bool cat_is_on) {
  using namespace catdog;
  return Deterministic(cd, [cat_is_on](int agent, int step, const LocalAoh& h) {
    if (agent == 0) {
      if (step == 1) return static_cast<int>(kAliceNoop);
      const bool cat = h.initial_observation == kSeesCat;
      return static_cast<int>(cat == cat_is_on ? kLightOnAct : kLightOffAct);
    }
    if (step == 0) return static_cast<int>(kBobNoop);
    const int o = h.steps[0].second;
    if (o == kCatRevealed) return static_cast<int>(kGuessCat);
    if (o == kDogRevealed) return static_cast<int>(kGuessDog);
    const bool on = o == kSeesLightOn;
    return static_cast<int>(on == cat_is_on ? kGuessCat : kGuessDog);
  });
}

// Cat/dog grounded play: Alice removes the barrier, Bob guesses the pet he
// sees (falls back to bailing on a light).
inline TabularJointPolicy CatDogGrounded(const TabularDecPomdp& cd) {
  using namespace catdog;
  return Deterministic(cd, [](int agent, int step, const LocalAoh& h) {
    if (agent == 0) return static_cast<int>(step == 0 ? kRemoveBarrier : kAliceNoop);
    if (step == 0) return static_cast<int>(kBobNoop);
    const int o = h.steps[0].second;
    if (o == kCatRevealed) return static_cast<int>(kGuessCat);
    if (o == kDogRevealed) return static_cast<int>(kGuessDog);
    return static_cast<int>(kBobBailAct);
  });
}

inline TabularJointPolicy CatDogAliceBails(const TabularDecPomdp& cd) {
  using namespace catdog;
  return Deterministic(cd, [](int agent, int step, const LocalAoh&) {
    if (agent == 0) return static_cast<int>(step == 0 ? kAliceBailAct : kAliceNoop);
    return static_cast<int>(step == 0 ? kBobNoop : kBobBailAct);
  });
}

// Alice's light action swapped with Bob's reading of it.
inline SymmetryMap CatDogLightSwap(const TabularDecPomdp& cd) {
  SymmetryMap phi = IdentitySymmetry(cd);
  std::swap(phi.act[0][catdog::kLightOnAct], phi.act[0][catdog::kLightOffAct]);
  std::swap(phi.obs[1][catdog::kSeesLightOn], phi.obs[1][catdog::kSeesLightOff]);
  return phi;
}

// Alice's view of the pet swapped with Bob's guesses and revealed pets.
inline SymmetryMap CatDogPetSwap(const TabularDecPomdp& cd) {
  SymmetryMap phi = IdentitySymmetry(cd);
  std::swap(phi.obs[0][catdog::kSeesCat], phi.obs[0][catdog::kSeesDog]);
  std::swap(phi.act[1][catdog::kGuessCat], phi.act[1][catdog::kGuessDog]);
  std::swap(phi.obs[1][catdog::kCatRevealed], phi.obs[1][catdog::kDogRevealed]);
  return phi;
}

// True if phi carries the light-on-means-cat convention onto the other one.
inline bool CatDogIsPairing(const TabularDecPomdp& cd, const SymmetryMap& phi) {
  const auto on = CatDogCheapTalk(cd, true);
  const auto off = CatDogCheapTalk(cd, false);
  return CrossPlay(cd, off, TransformPolicy(cd, phi, on)) >= 10.505 - 1e-9;
}

}  // namespace ersym::testing

#endif  // ERSYM_TESTS_TEST_UTIL_H_

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

#ifndef ERSYM_EVALUATE_H_
#define ERSYM_EVALUATE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ersym/aoh.h"
#include "ersym/model.h"
#include "ersym/policy.h"

namespace ersym {

inline constexpr int64_t kDefaultLeafCap = 10'000'000;

// Expected discounted return J(pi), computed by enumerating every
// trajectory with positive probability in a fixed order. Throws DomainError
// if a history reached with positive probability has no policy entry, and
// CapExceeded if the tree has more than `leaf_cap` leaves.
double ExactExpectedReturn(const TabularDecPomdp& model,
                           const TabularJointPolicy& policy,
                           int64_t leaf_cap = kDefaultLeafCap);
// Same, with agent i acting according to *agents[i].
double ExactExpectedReturn(const TabularDecPomdp& model,
                           std::span<const LocalPolicy* const> agents,
                           int64_t leaf_cap = kDefaultLeafCap);

// Calls `visit(probability, final histories)` once per leaf of the
// trajectory tree, in the same order as ExactExpectedReturn. The final
// histories include the observation received after the last step.
using TrajectoryVisitor =
    std::function<void(double, const std::vector<LocalAoh>&)>;
void ForEachTrajectory(const TabularDecPomdp& model,
                       const TabularJointPolicy& policy,
                       const TrajectoryVisitor& visit,
                       int64_t leaf_cap = kDefaultLeafCap);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Sample mean of `episodes` returns and its standard error.
McEstimate McExpectedReturn(const TabularDecPomdp& model,
                            const TabularJointPolicy& policy, int64_t episodes,
                            uint64_t seed);

struct TrajectoryStep {
  int state = 0;
  int joint_action = 0;
  int next_state = 0;
  std::vector<int> observations;
  double reward = 0.0;
};

struct Trajectory {
  int initial_state = 0;
  std::vector<int> initial_observations;  // -1 for agents without one
  std::vector<TrajectoryStep> steps;
  double realized_return = 0.0;
};

Trajectory Rollout(const TabularDecPomdp& model,
                   const TabularJointPolicy& policy, uint64_t seed);
// Rollout with an explicit generator, so trainers can share one stream.
Trajectory Rollout(const TabularDecPomdp& model,
                   std::span<const LocalPolicy* const> agents, Rng& rng);

// XP(pi1, pi2) = (J(pi1^1, pi2^2) + J(pi2^1, pi1^2)) / 2 for two agents.
double CrossPlay(const TabularDecPomdp& model, const TabularJointPolicy& pi1,
                 const TabularJointPolicy& pi2,
                 int64_t leaf_cap = kDefaultLeafCap);

}  // namespace ersym

#endif  // ERSYM_EVALUATE_H_

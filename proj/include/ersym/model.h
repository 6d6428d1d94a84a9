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

#ifndef ERSYM_MODEL_H_
#define ERSYM_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ersym/rng.h"

namespace ersym {

// A finite-horizon cooperative Dec-POMDP with enumerated states, actions and
// observations. Tables are dense and indexed as follows:
//
//   transition[(s * J + ja) * S + s']       P(s' | s, ja)
//   observation[i][(s' * J + ja) * O_i + o] P(o^i | s', ja)
//   reward[s' * J + ja]                     R(s', ja), shared by all agents
//   initial_observation[i][s * O_i + o]     P(o^i_0 | s_0), empty if agent i
//                                           receives no initial observation
//   legal[i][t * A_i + a]                   1 if action a is available to
//                                           agent i at step t
//
// where J is the number of joint actions and joint action indices are mixed
// radix with agent 0 most significant. Entering a terminal state ends the
// episode early; otherwise the episode ends after `horizon` steps.
struct TabularDecPomdp {
  std::string name;
  std::vector<std::string> states;
  std::vector<uint8_t> terminal;
  std::vector<std::vector<std::string>> actions;
  std::vector<std::vector<std::string>> observations;
  std::vector<double> transition;
  std::vector<std::vector<double>> observation;
  std::vector<std::vector<double>> initial_observation;
  std::vector<double> reward;
  std::vector<std::vector<uint8_t>> legal;
  std::vector<double> initial_dist;
  int horizon = 1;
  double gamma = 1.0;
  // When set, symmetry searches only consider maps that apply the same
  // permutation to every agent (requires identical local spaces).
  bool shared_symmetries = false;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_agents() const { return static_cast<int>(actions.size()); }
  int num_actions(int agent) const {
    return static_cast<int>(actions[agent].size());
  }
  int num_observations(int agent) const {
    return static_cast<int>(observations[agent].size());
  }
  int num_joint_actions() const;

  int EncodeJointAction(std::span<const int> local_actions) const;
  std::vector<int> DecodeJointAction(int joint_action) const;

  double Transition(int s, int joint_action, int next_s) const {
    return transition[(static_cast<size_t>(s) * num_joint_actions() +
                       joint_action) * num_states() + next_s];
  }
  double Observation(int agent, int next_s, int joint_action, int o) const {
    return observation[agent][(static_cast<size_t>(next_s) *
                                   num_joint_actions() + joint_action) *
                                  num_observations(agent) + o];
  }
  double Reward(int next_s, int joint_action) const {
    return reward[static_cast<size_t>(next_s) * num_joint_actions() +
                  joint_action];
  }
  bool HasInitialObservation(int agent) const {
    return !initial_observation[agent].empty();
  }
  double InitialObservation(int agent, int s, int o) const {
    return initial_observation[agent][static_cast<size_t>(s) *
                                          num_observations(agent) + o];
  }
  bool IsLegal(int agent, int step, int action) const {
    return legal[agent][static_cast<size_t>(step) * num_actions(agent) +
                        action] != 0;
  }
  bool IsTerminal(int s) const { return terminal[s] != 0; }
  std::vector<int> LegalActions(int agent, int step) const;

  // True if every agent has the same number of actions and observations, the
  // same legality masks, and the same initial-observation flag.
  bool AgentsShareSpaces() const;
};

// Allocates zeroed tables of the right shape for the given sizes, with every
// action legal at every step, no initial observations and no terminal
// states. Environment builders fill in the entries.
TabularDecPomdp MakeEmptyModel(std::string name,
                               std::vector<std::string> states,
                               std::vector<std::vector<std::string>> actions,
                               std::vector<std::vector<std::string>> observations,
                               int horizon, double gamma = 1.0);

// Returns one human-readable line per invariant violation. An empty result
// means the model is valid.
std::vector<std::string> ValidateModel(const TabularDecPomdp& model);

// Throws ValidationError listing every violation, if any.
void CheckModel(const TabularDecPomdp& model);

// Stable 64-bit hash of the canonical serialization, rendered as 16 hex
// digits. Stored in policy and symmetry files.
std::string ModelFingerprint(const TabularDecPomdp& model);

// Sampling primitives shared by rollouts and trainers.
struct StepOutcome {
  int next_state = 0;
  double reward = 0.0;
  std::vector<int> observations;
};
int SampleInitialState(const TabularDecPomdp& model, Rng& rng);
// Initial observation of each agent; -1 for agents without one.
std::vector<int> SampleInitialObservations(const TabularDecPomdp& model,
                                           int state, Rng& rng);
StepOutcome SampleStep(const TabularDecPomdp& model, int state,
                       int joint_action, Rng& rng);

}  // namespace ersym

#endif  // ERSYM_MODEL_H_

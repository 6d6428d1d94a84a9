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

#ifndef ERSYM_POLICY_H_
#define ERSYM_POLICY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ersym/aoh.h"
#include "ersym/model.h"

namespace ersym {

// Tabular local policy of one agent: a distribution over its actions at each
// defined history, stored densely per step. Entries at histories that were
// never set are undefined, and querying them raises DomainError.
class LocalPolicy {
 public:
  LocalPolicy() = default;
  LocalPolicy(const TabularDecPomdp& model, int agent);

  int agent() const { return agent_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return static_cast<int>(probs_.size()); }
  int64_t NumAohs(int step) const {
    return static_cast<int64_t>(defined_[step].size());
  }

  bool IsDefined(int step, int64_t aoh) const { return defined_[step][aoh] != 0; }
  // Throws DomainError if undefined.
  std::span<const double> Probs(int step, int64_t aoh) const;
  // Unchecked access for hot loops; caller guarantees the entry is defined.
  const double* RawProbs(int step, int64_t aoh) const {
    return &probs_[step][aoh * num_actions_];
  }
  void Set(int step, int64_t aoh, std::span<const double> probs);
  void Clear(int step, int64_t aoh);

  bool operator==(const LocalPolicy&) const = default;

 private:
  int agent_ = 0;
  int num_actions_ = 0;
  std::vector<std::vector<double>> probs_;
  std::vector<std::vector<uint8_t>> defined_;
};

// Joint policy: one local policy per agent. The probability of a joint action
// is the product of the local probabilities.
class TabularJointPolicy {
 public:
  TabularJointPolicy() = default;
  explicit TabularJointPolicy(std::vector<LocalPolicy> agents);

  // Callback receives (agent, step, history) and returns a distribution over
  // the agent's actions.
  using Generator =
      std::function<std::vector<double>(int, int, const LocalAoh&)>;

  // Defines every valid history of every agent using `generator`.
  static TabularJointPolicy FromFunction(const TabularDecPomdp& model,
                                         const Generator& generator);
  // Uniform over legal actions at every valid history.
  static TabularJointPolicy Uniform(const TabularDecPomdp& model);

  // Agent 0 from `first`, agent 1 from `second`: the pair (pi1^1, pi2^2).
  static TabularJointPolicy Pair(const TabularJointPolicy& first,
                                 const TabularJointPolicy& second);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  const LocalPolicy& agent(int i) const { return agents_[i]; }
  LocalPolicy& mutable_agent(int i) { return agents_[i]; }
  const std::vector<LocalPolicy>& agents() const { return agents_; }

  bool operator==(const TabularJointPolicy&) const = default;

 private:
  std::vector<LocalPolicy> agents_;
};

// One line per violation: wrong shapes, entries that are not distributions
// within 1e-12, or mass on actions that are illegal at that step.
std::vector<std::string> ValidatePolicy(const TabularDecPomdp& model,
                                        const TabularJointPolicy& policy);
void CheckPolicy(const TabularDecPomdp& model, const TabularJointPolicy& policy);

// Mixes every defined entry with the uniform distribution over the legal
// actions: (1 - epsilon) * pi + epsilon * uniform. Every legal action then
// has probability at least epsilon / |legal actions|. epsilon must lie in
// (0, 1).
TabularJointPolicy EpsilonSoften(const TabularDecPomdp& model,
                                 const TabularJointPolicy& policy,
                                 double epsilon);

// Index of the largest entry of `values` among the actions listed in
// `legal` (ascending); ties go to the lowest action index.
int ArgmaxLegal(std::span<const double> values, std::span<const int> legal);

}  // namespace ersym

#endif  // ERSYM_POLICY_H_

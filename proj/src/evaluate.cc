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

#include "ersym/evaluate.h"

#include <cmath>
#include <string>

#include "ersym/aoh.h"
#include "ersym/error.h"

namespace ersym {
namespace {

class TreeEvaluator {
 public:
  TreeEvaluator(const TabularDecPomdp& model,
                std::span<const LocalPolicy* const> agents, int64_t leaf_cap)
      : model_(model), agents_(agents), leaf_cap_(leaf_cap),
        n_(model.num_agents()) {
    if (static_cast<int>(agents.size()) != n_) {
      throw ValidationError("policy has " + std::to_string(agents.size()) +
                            " agents, model has " + std::to_string(n_));
    }
    for (int i = 0; i < n_; ++i) {
      spaces_.emplace_back(model, i);
      if (agents[i]->num_actions() != model.num_actions(i) ||
          agents[i]->horizon() != model.horizon) {
        throw ValidationError("agent " + std::to_string(i) +
                              " policy does not match the model");
      }
    }
    aoh_.assign(n_, 0);
    local_.assign(n_, 0);
  }

  double Run() {
    double total = 0.0;
    for (int s = 0; s < model_.num_states(); ++s) {
      const double p = model_.initial_dist[s];
      if (p <= 0.0) continue;
      total += InitialObservations(s, 0, p);
    }
    return total;
  }

 private:
  double InitialObservations(int s, int agent, double prob) {
    if (agent == n_) return Step(s, 0, prob, 1.0);
    if (!model_.HasInitialObservation(agent)) {
      aoh_[agent] = 0;
      return InitialObservations(s, agent + 1, prob);
    }
    double total = 0.0;
    for (int o = 0; o < model_.num_observations(agent); ++o) {
      const double q = model_.InitialObservation(agent, s, o);
      if (q <= 0.0) continue;
      aoh_[agent] = spaces_[agent].Root(o);
      total += InitialObservations(s, agent + 1, prob * q);
    }
    return total;
  }

  // Enumerates joint actions agent by agent.
  double Step(int s, int t, double prob, double discount) {
    return Actions(s, t, 0, prob, discount);
  }

  double Actions(int s, int t, int agent, double prob, double discount) {
    if (agent == n_) return Outcomes(s, t, prob, discount);
    const LocalPolicy& pol = *agents_[agent];
    const double* p = pol.Probs(t, aoh_[agent]).data();
    double total = 0.0;
    for (int a = 0; a < pol.num_actions(); ++a) {
      if (p[a] <= 0.0) continue;
      local_[agent] = a;
      total += Actions(s, t, agent + 1, prob * p[a], discount);
    }
    return total;
  }

  double Outcomes(int s, int t, double prob, double discount) {
    const int ja = model_.EncodeJointAction(local_);
    const std::vector<int64_t> saved = aoh_;
    const std::vector<int> actions = local_;
    double total = 0.0;
    for (int s2 = 0; s2 < model_.num_states(); ++s2) {
      const double q = model_.Transition(s, ja, s2);
      if (q <= 0.0) continue;
      const double pq = prob * q;
      total += pq * discount * model_.Reward(s2, ja);
      if (model_.IsTerminal(s2) || t + 1 == model_.horizon) {
        if (++leaves_ > leaf_cap_) {
          throw CapExceeded("trajectory tree exceeds " +
                            std::to_string(leaf_cap_) + " leaves");
        }
        continue;
      }
      total += Observations(s2, ja, actions, saved, t, 0, pq,
                            discount * model_.gamma);
    }
    aoh_ = saved;
    local_ = actions;
    return total;
  }

  double Observations(int s2, int ja, const std::vector<int>& actions,
                      const std::vector<int64_t>& prefix, int t, int agent,
                      double prob, double discount) {
    if (agent == n_) return Step(s2, t + 1, prob, discount);
    double total = 0.0;
    for (int o = 0; o < model_.num_observations(agent); ++o) {
      const double q = model_.Observation(agent, s2, ja, o);
      if (q <= 0.0) continue;
      aoh_[agent] = spaces_[agent].Extend(prefix[agent], actions[agent], o);
      total += Observations(s2, ja, actions, prefix, t, agent + 1, prob * q,
                            discount);
    }
    return total;
  }

  const TabularDecPomdp& model_;
  std::span<const LocalPolicy* const> agents_;
  int64_t leaf_cap_;
  int n_;
  int64_t leaves_ = 0;
  std::vector<AohSpace> spaces_;
  std::vector<int64_t> aoh_;
  std::vector<int> local_;
};

std::vector<const LocalPolicy*> Pointers(const TabularJointPolicy& policy) {
  std::vector<const LocalPolicy*> out;
  for (const auto& local : policy.agents()) out.push_back(&local);
  return out;
}

struct LeafWalker {
  const TabularDecPomdp& model;
  const TabularJointPolicy& policy;
  const TrajectoryVisitor& visit;
  int64_t leaf_cap;
  std::vector<AohSpace> spaces;
  int64_t leaves = 0;

  void Initial(int s, int agent, double prob, std::vector<LocalAoh>& h) {
    const int n = model.num_agents();
    if (agent == n) return Step(s, 0, prob, h);
    if (!model.HasInitialObservation(agent)) return Initial(s, agent + 1, prob, h);
    for (int o = 0; o < model.num_observations(agent); ++o) {
      const double q = model.InitialObservation(agent, s, o);
      if (q <= 0.0) continue;
      h[agent].initial_observation = o;
      Initial(s, agent + 1, prob * q, h);
    }
    h[agent].initial_observation = -1;
  }

  void Step(int s, int t, double prob, std::vector<LocalAoh>& h) {
    std::vector<int> local(model.num_agents());
    Actions(s, t, 0, prob, h, local);
  }

  void Actions(int s, int t, int agent, double prob, std::vector<LocalAoh>& h,
               std::vector<int>& local) {
    if (agent == model.num_agents()) return Outcomes(s, t, prob, h, local);
    const auto p = policy.agent(agent).Probs(t, spaces[agent].Encode(h[agent]));
    for (int a = 0; a < model.num_actions(agent); ++a) {
      if (p[a] <= 0.0) continue;
      local[agent] = a;
      Actions(s, t, agent + 1, prob * p[a], h, local);
    }
  }

  void Outcomes(int s, int t, double prob, std::vector<LocalAoh>& h,
                const std::vector<int>& local) {
    const int ja = model.EncodeJointAction(local);
    for (int s2 = 0; s2 < model.num_states(); ++s2) {
      const double q = model.Transition(s, ja, s2);
      if (q <= 0.0) continue;
      const bool leaf = model.IsTerminal(s2) || t + 1 == model.horizon;
      Observations(s2, ja, t, 0, prob * q, leaf, h, local);
    }
  }

  void Observations(int s2, int ja, int t, int agent, double prob, bool leaf,
                    std::vector<LocalAoh>& h, const std::vector<int>& local) {
    if (agent == model.num_agents()) {
      if (!leaf) return Step(s2, t + 1, prob, h);
      if (++leaves > leaf_cap) {
        throw CapExceeded("trajectory tree exceeds " + std::to_string(leaf_cap) +
                          " leaves");
      }
      visit(prob, h);
      return;
    }
    for (int o = 0; o < model.num_observations(agent); ++o) {
      const double q = model.Observation(agent, s2, ja, o);
      if (q <= 0.0) continue;
      h[agent].steps.emplace_back(local[agent], o);
      Observations(s2, ja, t, agent + 1, prob * q, leaf, h, local);
      h[agent].steps.pop_back();
    }
  }
};

}  // namespace

void ForEachTrajectory(const TabularDecPomdp& model,
                       const TabularJointPolicy& policy,
                       const TrajectoryVisitor& visit, int64_t leaf_cap) {
  LeafWalker walker{model, policy, visit, leaf_cap, {}, 0};
  for (int i = 0; i < model.num_agents(); ++i) walker.spaces.emplace_back(model, i);
  std::vector<LocalAoh> h(model.num_agents());
  for (int s = 0; s < model.num_states(); ++s) {
    if (model.initial_dist[s] > 0.0) walker.Initial(s, 0, model.initial_dist[s], h);
  }
}

double ExactExpectedReturn(const TabularDecPomdp& model,
                           std::span<const LocalPolicy* const> agents,
                           int64_t leaf_cap) {
  TreeEvaluator evaluator(model, agents, leaf_cap);
  return evaluator.Run();
}

double ExactExpectedReturn(const TabularDecPomdp& model,
                           const TabularJointPolicy& policy, int64_t leaf_cap) {
  const auto ptrs = Pointers(policy);
  return ExactExpectedReturn(model, ptrs, leaf_cap);
}

Trajectory Rollout(const TabularDecPomdp& model,
                   std::span<const LocalPolicy* const> agents, Rng& rng) {
  const int n = model.num_agents();
  if (static_cast<int>(agents.size()) != n) {
    throw ValidationError("policy agent count does not match the model");
  }
  Trajectory traj;
  traj.initial_state = SampleInitialState(model, rng);
  traj.initial_observations =
      SampleInitialObservations(model, traj.initial_state, rng);
  // Same indexing as AohSpace, without building the validity tables.
  std::vector<int64_t> aoh(n, 0);
  for (int i = 0; i < n; ++i) {
    if (traj.initial_observations[i] >= 0) aoh[i] = traj.initial_observations[i];
  }
  int s = traj.initial_state;
  double discount = 1.0;
  std::vector<int> local(n);
  for (int t = 0; t < model.horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      local[i] = rng.Categorical(agents[i]->Probs(t, aoh[i]));
    }
    const int ja = model.EncodeJointAction(local);
    StepOutcome out = SampleStep(model, s, ja, rng);
    traj.realized_return += discount * out.reward;
    discount *= model.gamma;
    for (int i = 0; i < n; ++i) {
      aoh[i] = (aoh[i] * model.num_actions(i) + local[i]) *
                   model.num_observations(i) + out.observations[i];
    }
    traj.steps.push_back(
        {s, ja, out.next_state, std::move(out.observations), out.reward});
    s = traj.steps.back().next_state;
    if (model.IsTerminal(s)) break;
  }
  return traj;
}

Trajectory Rollout(const TabularDecPomdp& model,
                   const TabularJointPolicy& policy, uint64_t seed) {
  Rng rng(seed);
  const auto ptrs = Pointers(policy);
  return Rollout(model, ptrs, rng);
}

McEstimate McExpectedReturn(const TabularDecPomdp& model,
                            const TabularJointPolicy& policy, int64_t episodes,
                            uint64_t seed) {
  if (episodes < 1) throw ValidationError("episodes must be >= 1");
  Rng rng(seed);
  const auto ptrs = Pointers(policy);
  double mean = 0.0;
  double m2 = 0.0;
  for (int64_t e = 0; e < episodes; ++e) {
    const double g = Rollout(model, ptrs, rng).realized_return;
    const double delta = g - mean;
    mean += delta / static_cast<double>(e + 1);
    m2 += delta * (g - mean);
  }
  McEstimate est;
  est.estimate = mean;
  if (episodes > 1) {
    const double var = m2 / static_cast<double>(episodes - 1);
    est.std_error = std::sqrt(var / static_cast<double>(episodes));
  }
  return est;
}

double CrossPlay(const TabularDecPomdp& model, const TabularJointPolicy& pi1,
                 const TabularJointPolicy& pi2, int64_t leaf_cap) {
  if (model.num_agents() != 2) {
    throw ValidationError("cross-play requires a two-agent model");
  }
  const LocalPolicy* a[2] = {&pi1.agent(0), &pi2.agent(1)};
  const LocalPolicy* b[2] = {&pi2.agent(0), &pi1.agent(1)};
  const double j12 = ExactExpectedReturn(model, a, leaf_cap);
  const double j21 = ExactExpectedReturn(model, b, leaf_cap);
  return 0.5 * (j12 + j21);
}

}  // namespace ersym

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

#include "ersym/policy.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "ersym/error.h"

namespace ersym {

LocalPolicy::LocalPolicy(const TabularDecPomdp& model, int agent)
    : agent_(agent), num_actions_(model.num_actions(agent)) {
  AohSpace space(model, agent);
  probs_.resize(model.horizon);
  defined_.resize(model.horizon);
  for (int t = 0; t < model.horizon; ++t) {
    probs_[t].assign(space.Count(t) * num_actions_, 0.0);
    defined_[t].assign(space.Count(t), 0);
  }
}

std::span<const double> LocalPolicy::Probs(int step, int64_t aoh) const {
  if (step < 0 || step >= horizon() || aoh < 0 || aoh >= NumAohs(step) ||
      !defined_[step][aoh]) {
    throw DomainError("agent " + std::to_string(agent_) +
                      " policy has no entry at step " + std::to_string(step) +
                      ", history index " + std::to_string(aoh));
  }
  return {RawProbs(step, aoh), static_cast<size_t>(num_actions_)};
}

void LocalPolicy::Set(int step, int64_t aoh, std::span<const double> probs) {
  if (static_cast<int>(probs.size()) != num_actions_) {
    throw ValidationError("distribution has " + std::to_string(probs.size()) +
                          " entries, expected " + std::to_string(num_actions_));
  }
  std::copy(probs.begin(), probs.end(), probs_[step].begin() + aoh * num_actions_);
  defined_[step][aoh] = 1;
}

void LocalPolicy::Clear(int step, int64_t aoh) {
  std::fill_n(probs_[step].begin() + aoh * num_actions_, num_actions_, 0.0);
  defined_[step][aoh] = 0;
}

TabularJointPolicy::TabularJointPolicy(std::vector<LocalPolicy> agents)
    : agents_(std::move(agents)) {}

TabularJointPolicy TabularJointPolicy::FromFunction(const TabularDecPomdp& model,
                                                    const Generator& generator) {
  std::vector<LocalPolicy> agents;
  for (int i = 0; i < model.num_agents(); ++i) {
    AohSpace space(model, i);
    LocalPolicy local(model, i);
    for (int t = 0; t < model.horizon; ++t) {
      for (int64_t idx = 0; idx < space.Count(t); ++idx) {
        if (!space.IsValid(t, idx)) continue;
        local.Set(t, idx, generator(i, t, space.Decode(t, idx)));
      }
    }
    agents.push_back(std::move(local));
  }
  return TabularJointPolicy(std::move(agents));
}

TabularJointPolicy TabularJointPolicy::Uniform(const TabularDecPomdp& model) {
  return FromFunction(model, [&model](int agent, int step, const LocalAoh&) {
    std::vector<double> p(model.num_actions(agent), 0.0);
    const auto legal = model.LegalActions(agent, step);
    for (int a : legal) p[a] = 1.0 / static_cast<double>(legal.size());
    return p;
  });
}

TabularJointPolicy TabularJointPolicy::Pair(const TabularJointPolicy& first,
                                            const TabularJointPolicy& second) {
  if (first.num_agents() != 2 || second.num_agents() != 2) {
    throw ValidationError("cross-play pairing requires two-agent policies");
  }
  return TabularJointPolicy({first.agent(0), second.agent(1)});
}

std::vector<std::string> ValidatePolicy(const TabularDecPomdp& model,
                                        const TabularJointPolicy& policy) {
  std::vector<std::string> v;
  if (policy.num_agents() != model.num_agents()) {
    v.push_back("policy has " + std::to_string(policy.num_agents()) +
                " agents, model has " + std::to_string(model.num_agents()));
    return v;
  }
  for (int i = 0; i < model.num_agents(); ++i) {
    const LocalPolicy& local = policy.agent(i);
    AohSpace space(model, i);
    if (local.num_actions() != model.num_actions(i) ||
        local.horizon() != model.horizon) {
      v.push_back("agent " + std::to_string(i) + " policy has the wrong shape");
      continue;
    }
    for (int t = 0; t < model.horizon; ++t) {
      if (local.NumAohs(t) != space.Count(t)) {
        v.push_back("agent " + std::to_string(i) + " step " + std::to_string(t) +
                    " has the wrong number of histories");
        continue;
      }
      for (int64_t idx = 0; idx < space.Count(t); ++idx) {
        if (!local.IsDefined(t, idx)) continue;
        const double* p = local.RawProbs(t, idx);
        double total = 0.0;
        bool ok = true;
        for (int a = 0; a < local.num_actions(); ++a) {
          if (!(p[a] >= 0.0) || !std::isfinite(p[a])) ok = false;
          if (p[a] > 0.0 && !model.IsLegal(i, t, a)) ok = false;
          total += p[a];
        }
        if (!ok || std::abs(total - 1.0) > 1e-12) {
          v.push_back("agent " + std::to_string(i) + " distribution at " +
                      space.ToString(model, space.Decode(t, idx)) +
                      " is not a distribution over legal actions");
        }
      }
    }
  }
  return v;
}

void CheckPolicy(const TabularDecPomdp& model, const TabularJointPolicy& policy) {
  auto violations = ValidatePolicy(model, policy);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid policy:";
  for (const auto& line : violations) msg << "\n  " << line;
  throw ValidationError(msg.str());
}

TabularJointPolicy EpsilonSoften(const TabularDecPomdp& model,
                                 const TabularJointPolicy& policy,
                                 double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  TabularJointPolicy out = policy;
  for (int i = 0; i < out.num_agents(); ++i) {
    LocalPolicy& local = out.mutable_agent(i);
    std::vector<double> mixed(local.num_actions());
    for (int t = 0; t < local.horizon(); ++t) {
      const auto legal = model.LegalActions(i, t);
      const double floor = epsilon / static_cast<double>(legal.size());
      for (int64_t idx = 0; idx < local.NumAohs(t); ++idx) {
        if (!local.IsDefined(t, idx)) continue;
        const double* p = local.RawProbs(t, idx);
        std::fill(mixed.begin(), mixed.end(), 0.0);
        for (int a : legal) mixed[a] = (1.0 - epsilon) * p[a] + floor;
        local.Set(t, idx, mixed);
      }
    }
  }
  return out;
}

int ArgmaxLegal(std::span<const double> values, std::span<const int> legal) {
  int best = legal.front();
  for (int a : legal) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

}  // namespace ersym

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

#include "ersym/aoh.h"

#include <sstream>

#include "ersym/error.h"

namespace ersym {

AohSpace::AohSpace(const TabularDecPomdp& model, int agent)
    : agent_(agent),
      horizon_(model.horizon),
      num_actions_(model.num_actions(agent)),
      num_observations_(model.num_observations(agent)),
      has_initial_(model.HasInitialObservation(agent)) {
  counts_.resize(horizon_);
  valid_.resize(horizon_);
  int64_t count = has_initial_ ? num_observations_ : 1;
  for (int t = 0; t < horizon_; ++t) {
    if (t > 0) count *= static_cast<int64_t>(num_actions_) * num_observations_;
    if (count > kMaxAohsPerStep) {
      throw CapExceeded("agent " + std::to_string(agent) + " has " +
                        std::to_string(count) + "+ histories at step " +
                        std::to_string(t) + "; tabular limit exceeded");
    }
    counts_[t] = count;
    valid_[t].assign(count, 1);
    if (t == 0) continue;
    const int64_t block = num_observations_;
    for (int64_t idx = 0; idx < count; ++idx) {
      const int64_t prefix = idx / (static_cast<int64_t>(num_actions_) * block);
      const int action = static_cast<int>((idx / block) % num_actions_);
      valid_[t][idx] = valid_[t - 1][prefix] && model.IsLegal(agent, t - 1, action);
    }
  }
}

LocalAoh AohSpace::Decode(int step, int64_t index) const {
  LocalAoh aoh;
  aoh.steps.resize(step);
  for (int k = step - 1; k >= 0; --k) {
    const int o = static_cast<int>(index % num_observations_);
    index /= num_observations_;
    const int a = static_cast<int>(index % num_actions_);
    index /= num_actions_;
    aoh.steps[k] = {a, o};
  }
  aoh.initial_observation = has_initial_ ? static_cast<int>(index) : -1;
  return aoh;
}

int64_t AohSpace::Encode(const LocalAoh& aoh) const {
  if (aoh.length() >= horizon_ + 1) {
    throw DomainError("history longer than the horizon");
  }
  int64_t index = Root(aoh.initial_observation);
  for (const auto& [a, o] : aoh.steps) {
    if (a < 0 || a >= num_actions_ || o < 0 || o >= num_observations_) {
      throw DomainError("history contains an out-of-range identifier");
    }
    index = Extend(index, a, o);
  }
  return index;
}

std::string AohSpace::ToString(const TabularDecPomdp& model,
                               const LocalAoh& aoh) const {
  std::ostringstream out;
  out << "agent" << agent_ << "[";
  bool first = true;
  if (aoh.initial_observation >= 0) {
    out << model.observations[agent_][aoh.initial_observation];
    first = false;
  }
  for (const auto& [a, o] : aoh.steps) {
    if (!first) out << ",";
    out << model.actions[agent_][a] << "," << model.observations[agent_][o];
    first = false;
  }
  out << "]";
  return out.str();
}

}  // namespace ersym

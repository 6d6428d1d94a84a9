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

#include "ersym/model.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

#include "ersym/error.h"
#include "ersym/io.h"

namespace ersym {
namespace {

constexpr double kSumTolerance = 1e-12;

bool IsDistribution(std::span<const double> row) {
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= kSumTolerance;
}

}  // namespace

int TabularDecPomdp::num_joint_actions() const {
  int count = 1;
  for (const auto& a : actions) count *= static_cast<int>(a.size());
  return count;
}

int TabularDecPomdp::EncodeJointAction(std::span<const int> local_actions) const {
  int index = 0;
  for (int i = 0; i < num_agents(); ++i) {
    index = index * num_actions(i) + local_actions[i];
  }
  return index;
}

std::vector<int> TabularDecPomdp::DecodeJointAction(int joint_action) const {
  std::vector<int> local(num_agents());
  for (int i = num_agents() - 1; i >= 0; --i) {
    local[i] = joint_action % num_actions(i);
    joint_action /= num_actions(i);
  }
  return local;
}

std::vector<int> TabularDecPomdp::LegalActions(int agent, int step) const {
  std::vector<int> out;
  for (int a = 0; a < num_actions(agent); ++a) {
    if (IsLegal(agent, step, a)) out.push_back(a);
  }
  return out;
}

bool TabularDecPomdp::AgentsShareSpaces() const {
  for (int i = 1; i < num_agents(); ++i) {
    if (num_actions(i) != num_actions(0) ||
        num_observations(i) != num_observations(0) ||
        legal[i] != legal[0] ||
        HasInitialObservation(i) != HasInitialObservation(0)) {
      return false;
    }
  }
  return true;
}

TabularDecPomdp MakeEmptyModel(std::string name,
                               std::vector<std::string> states,
                               std::vector<std::vector<std::string>> actions,
                               std::vector<std::vector<std::string>> observations,
                               int horizon, double gamma) {
  TabularDecPomdp m;
  m.name = std::move(name);
  m.states = std::move(states);
  m.actions = std::move(actions);
  m.observations = std::move(observations);
  m.horizon = horizon;
  m.gamma = gamma;
  const size_t s = m.states.size();
  const size_t j = m.num_joint_actions();
  m.terminal.assign(s, 0);
  m.transition.assign(s * j * s, 0.0);
  m.reward.assign(s * j, 0.0);
  m.initial_dist.assign(s, 0.0);
  for (int i = 0; i < m.num_agents(); ++i) {
    m.observation.emplace_back(s * j * m.num_observations(i), 0.0);
    m.initial_observation.emplace_back();
    m.legal.emplace_back(static_cast<size_t>(std::max(horizon, 0)) *
                             m.num_actions(i), 1);
  }
  return m;
}

std::vector<std::string> ValidateModel(const TabularDecPomdp& m) {
  std::vector<std::string> v;
  auto report = [&v](const std::string& line) { v.push_back(line); };

  if (m.horizon < 1) report("horizon must be >= 1");
  if (!(m.gamma >= 0.0 && m.gamma <= 1.0)) report("gamma must lie in [0, 1]");
  if (m.num_states() == 0) report("model has no states");
  if (m.num_agents() == 0) report("model has no agents");
  if (m.observations.size() != m.actions.size()) {
    report("observation spaces do not match agent count");
    return v;
  }
  for (int i = 0; i < m.num_agents(); ++i) {
    if (m.num_actions(i) == 0) report("agent " + std::to_string(i) + " has no actions");
    if (m.num_observations(i) == 0) {
      report("agent " + std::to_string(i) + " has no observations");
    }
  }
  if (!v.empty()) return v;

  const int S = m.num_states();
  const int J = m.num_joint_actions();
  if (m.terminal.size() != static_cast<size_t>(S)) report("terminal flags have wrong size");
  if (m.initial_dist.size() != static_cast<size_t>(S)) {
    report("initial_dist has wrong size");
  } else if (!IsDistribution(m.initial_dist)) {
    report("initial_dist is not a probability distribution");
  }
  if (m.transition.size() != static_cast<size_t>(S) * J * S) {
    report("transition table has wrong size");
  } else {
    for (int s = 0; s < S; ++s) {
      for (int ja = 0; ja < J; ++ja) {
        std::span<const double> row(&m.transition[(static_cast<size_t>(s) * J + ja) * S], S);
        if (!IsDistribution(row)) {
          report("transition row (s=" + m.states[s] + ", joint_action=" +
                 std::to_string(ja) + ") is not a probability distribution");
        }
      }
    }
  }
  if (m.reward.size() != static_cast<size_t>(S) * J) {
    report("reward table has wrong size");
  } else {
    for (double r : m.reward) {
      if (!std::isfinite(r)) {
        report("reward table contains a non-finite entry");
        break;
      }
    }
  }
  if (m.observation.size() != static_cast<size_t>(m.num_agents()) ||
      m.initial_observation.size() != static_cast<size_t>(m.num_agents()) ||
      m.legal.size() != static_cast<size_t>(m.num_agents())) {
    report("per-agent tables do not match agent count");
    return v;
  }
  for (int i = 0; i < m.num_agents(); ++i) {
    const int O = m.num_observations(i);
    const std::string agent = "agent " + std::to_string(i);
    if (m.observation[i].size() != static_cast<size_t>(S) * J * O) {
      report(agent + " observation table has wrong size");
    } else {
      for (int s = 0; s < S; ++s) {
        for (int ja = 0; ja < J; ++ja) {
          std::span<const double> row(&m.observation[i][(static_cast<size_t>(s) * J + ja) * O], O);
          if (!IsDistribution(row)) {
            report(agent + " observation row (s'=" + m.states[s] + ", joint_action=" +
                   std::to_string(ja) + ") is not a probability distribution");
          }
        }
      }
    }
    if (m.HasInitialObservation(i)) {
      if (m.initial_observation[i].size() != static_cast<size_t>(S) * O) {
        report(agent + " initial observation table has wrong size");
      } else {
        for (int s = 0; s < S; ++s) {
          std::span<const double> row(&m.initial_observation[i][static_cast<size_t>(s) * O], O);
          if (!IsDistribution(row)) {
            report(agent + " initial observation row (s=" + m.states[s] +
                   ") is not a probability distribution");
          }
        }
      }
    }
    if (m.horizon >= 1) {
      if (m.legal[i].size() != static_cast<size_t>(m.horizon) * m.num_actions(i)) {
        report(agent + " legality mask has wrong size");
      } else {
        for (int t = 0; t < m.horizon; ++t) {
          if (m.LegalActions(i, t).empty()) {
            report(agent + " has no legal action at step " + std::to_string(t));
          }
        }
      }
    }
  }
  return v;
}

void CheckModel(const TabularDecPomdp& model) {
  auto violations = ValidateModel(model);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid model '" << model.name << "':";
  for (const auto& line : violations) msg << "\n  " << line;
  throw ValidationError(msg.str());
}

std::string ModelFingerprint(const TabularDecPomdp& model) {
  // FNV-1a over the canonical JSON text.
  const std::string canonical = ModelToJson(model).dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int SampleInitialState(const TabularDecPomdp& model, Rng& rng) {
  return rng.Categorical(model.initial_dist);
}

std::vector<int> SampleInitialObservations(const TabularDecPomdp& model,
                                           int state, Rng& rng) {
  std::vector<int> obs(model.num_agents(), -1);
  for (int i = 0; i < model.num_agents(); ++i) {
    if (!model.HasInitialObservation(i)) continue;
    const int O = model.num_observations(i);
    obs[i] = rng.Categorical(std::span<const double>(
        &model.initial_observation[i][static_cast<size_t>(state) * O], O));
  }
  return obs;
}

StepOutcome SampleStep(const TabularDecPomdp& model, int state,
                       int joint_action, Rng& rng) {
  const int S = model.num_states();
  const int J = model.num_joint_actions();
  StepOutcome out;
  out.next_state = rng.Categorical(std::span<const double>(
      &model.transition[(static_cast<size_t>(state) * J + joint_action) * S], S));
  out.reward = model.Reward(out.next_state, joint_action);
  out.observations.resize(model.num_agents());
  for (int i = 0; i < model.num_agents(); ++i) {
    const int O = model.num_observations(i);
    out.observations[i] = rng.Categorical(std::span<const double>(
        &model.observation[i][(static_cast<size_t>(out.next_state) * J + joint_action) * O],
        O));
  }
  return out;
}

}  // namespace ersym

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

#ifndef ERSYM_AOH_H_
#define ERSYM_AOH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ersym/model.h"

namespace ersym {

// Local action-observation history of one agent: an optional initial
// observation followed by (action, next observation) pairs.
struct LocalAoh {
  int initial_observation = -1;  // -1 when the agent has none
  std::vector<std::pair<int, int>> steps;

  int length() const { return static_cast<int>(steps.size()); }
  bool operator==(const LocalAoh&) const = default;
};

// One LocalAoh per agent, all of equal length.
using JointAoh = std::vector<LocalAoh>;

// Dense indexing of the local histories of one agent at each decision step
// t = 0, ..., H - 1. At step t the index is the mixed-radix number
//   o_0, a_0, o_1, ..., a_{t-1}, o_t
// (o_0 only when the agent has an initial observation), so a history at
// step t + 1 is obtained from its prefix by Extend().
class AohSpace {
 public:
  AohSpace(const TabularDecPomdp& model, int agent);

  int agent() const { return agent_; }
  int horizon() const { return horizon_; }
  int num_actions() const { return num_actions_; }
  int num_observations() const { return num_observations_; }
  bool has_initial_observation() const { return has_initial_; }

  int64_t Count(int step) const { return counts_[step]; }
  int64_t Root(int initial_observation) const {
    return has_initial_ ? initial_observation : 0;
  }
  int64_t Extend(int64_t index, int action, int observation) const {
    return (index * num_actions_ + action) * num_observations_ + observation;
  }

  LocalAoh Decode(int step, int64_t index) const;
  int64_t Encode(const LocalAoh& aoh) const;

  // A history is valid if every action in it was legal at its step.
  bool IsValid(int step, int64_t index) const { return valid_[step][index] != 0; }

  std::string ToString(const TabularDecPomdp& model, const LocalAoh& aoh) const;

 private:
  int agent_;
  int horizon_;
  int num_actions_;
  int num_observations_;
  bool has_initial_;
  std::vector<int64_t> counts_;
  std::vector<std::vector<uint8_t>> valid_;
};

// Upper bound on the number of histories per agent and step that AohSpace
// will allocate.
inline constexpr int64_t kMaxAohsPerStep = int64_t{1} << 22;

}  // namespace ersym

#endif  // ERSYM_AOH_H_

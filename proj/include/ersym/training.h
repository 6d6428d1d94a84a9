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

#ifndef ERSYM_TRAINING_H_
#define ERSYM_TRAINING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ersym/model.h"
#include "ersym/policy.h"
#include "ersym/symmetry.h"

namespace ersym {

enum class TrainerAlgorithm { kIql, kPg };

std::string AlgorithmName(TrainerAlgorithm algorithm);
TrainerAlgorithm ParseAlgorithm(const std::string& name);

struct TrainerConfig {
  TrainerAlgorithm algorithm = TrainerAlgorithm::kIql;
  int64_t episodes = 10000;
  double learning_rate = 0.1;
  // IQL: epsilon-greedy exploration rate.
  double epsilon = 0.1;
  // PG: Boltzmann temperature and constant baseline.
  double temperature = 1.0;
  double baseline = 0.0;
  uint64_t seed = 0;
  // One table for all agents (requires identical agent spaces).
  bool shared_q = false;
  // IQL values start uniform in [0, q_init) so that greedy conventions
  // differ between seeds.
  double q_init = 1e-3;
  // Training-curve window; 0 disables the curve.
  int64_t log_every = 100;
  // Exact evaluation of the current policy every so many episodes; 0 disables.
  int64_t checkpoint_every = 0;
};

std::vector<std::string> ValidateTrainerConfig(const TrainerConfig& cfg);

struct CurvePoint {
  int64_t episode = 0;      // last episode of the window
  double mean_return = 0.0; // mean training return over the window
};

struct Checkpoint {
  int64_t episode = 0;
  double exact_return = 0.0;
};

struct TrainResult {
  TabularJointPolicy policy;
  std::vector<CurvePoint> curve;
  std::vector<Checkpoint> checkpoints;
};

// Independent learners trained together. IQL returns the greedy policy
// (ties to the lowest action), PG the softmax policy at the configured
// temperature. Deterministic given cfg.seed.
TrainResult TrainSelfPlay(const TabularDecPomdp& model, const TrainerConfig& cfg);

// Other-play: each episode draws phi uniformly from closure(set) and agent 1
// plays phi of its own policy, i.e. it sees phi^-1 of its observations and
// its chosen action is relabeled by phi before reaching the environment.
// With set = {Id} this is exactly TrainSelfPlay.
TrainResult TrainOtherPlay(const TabularDecPomdp& model, const SymmetrySet& set,
                           const TrainerConfig& cfg);

// Action distribution that the stream-form partner puts on environment
// actions at (environment-coordinate) history `aoh` of agent 1. Used to
// check the stream form against TransformPolicy.
std::vector<double> StreamFormPartnerProbs(const TabularDecPomdp& model,
                                           const SymmetryMap& phi,
                                           const LocalPolicy& partner, int step,
                                           const LocalAoh& aoh);

struct PolicyPool {
  std::vector<TabularJointPolicy> policies;  // epsilon-softened
  std::vector<TabularJointPolicy> raw;
  std::vector<double> raw_returns;
  std::vector<uint64_t> seeds;
  int retrains = 0;
};

struct PoolConfig {
  int k = 10;
  double epsilon = 0.1;
  // Keep policies with J >= best - fraction * |best|.
  double optimality_fraction = 0.02;
  int max_retrains = 50;
};

// k self-play policies with seeds derived from cfg.seed. Policies below the
// optimality threshold are retrained with fresh seeds; throws CapExceeded
// once max_retrains is used up.
PolicyPool BuildPolicyPool(const TabularDecPomdp& model, const PoolConfig& pool,
                           const TrainerConfig& cfg);

}  // namespace ersym

#endif  // ERSYM_TRAINING_H_

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

// Population experiments: every agent builds a self-play pool, discovers
// symmetries, trains other-play policies and deploys one of them; agents
// are then scored against each other by exact cross-play.

#ifndef ERSYM_HARNESS_H_
#define ERSYM_HARNESS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ersym/discovery.h"
#include "ersym/io.h"
#include "ersym/model.h"
#include "ersym/policy.h"
#include "ersym/symmetry.h"
#include "ersym/training.h"

namespace ersym {

inline constexpr char kPopulationSchema[] = "ersym.population/1";

enum class DiscoveryAlgorithm { kAlg1, kAlg2, kAlg3, kExhaustive };
// Where an agent's other-play set comes from. kNone gives {Id}, i.e. the
// self-play baseline through the same pipeline.
enum class SymmetrySource { kEr, kMdp, kNone };
enum class DeployMode { kRaw, kSymmetrizedEr, kSymmetrizedMdp };

std::string DiscoveryAlgorithmName(DiscoveryAlgorithm a);
DiscoveryAlgorithm ParseDiscoveryAlgorithm(const std::string& name);
std::string SymmetrySourceName(SymmetrySource s);
SymmetrySource ParseSymmetrySource(const std::string& name);
std::string DeployModeName(DeployMode d);
DeployMode ParseDeployMode(const std::string& name);

struct PopulationConfig {
  int population = 5;  // P
  int k = 10;          // self-play seeds per agent
  int l = 3;           // symmetries kept
  int m = 1;           // other-play policies per agent
  double epsilon = 0.1;  // pool softening
  double optimality_fraction = 0.02;
  int max_retrains = 50;
  TrainerConfig sp;
  TrainerConfig op;
  DiscoveryConfig discovery;
  DiscoveryAlgorithm algorithm = DiscoveryAlgorithm::kAlg1;
  SymmetrySource source = SymmetrySource::kEr;
  DeployMode deploy = DeployMode::kRaw;
  uint64_t master_seed = 0;
  // Per-agent seeds; empty means MixSeed(master_seed, i). The seeds in
  // sp, op and discovery are ignored: every phase derives its own.
  std::vector<uint64_t> agent_seeds;
};

std::vector<std::string> ValidatePopulationConfig(const PopulationConfig& cfg);
uint64_t AgentSeed(const PopulationConfig& cfg, int agent);

struct AgentRecord {
  int index = 0;
  uint64_t seed = 0;
  std::vector<double> pool_returns;  // before softening
  int pool_retrains = 0;
  SymmetrySet symmetries;            // the other-play set (before closure)
  int closure_size = 1;
  std::vector<CandidateRecord> candidates;  // best first, truncated
  std::vector<std::string> warnings;
  std::vector<double> op_returns;      // J of each trained policy
  std::vector<double> op_values;       // OP objective of each trained policy
  std::vector<double> deployed_returns;  // J of each deployable form
  int chosen = 0;
  TabularJointPolicy deployed;
  double sp_score = 0.0;  // J(deployed)
};

struct XpStats {
  int pairs = 0;  // unordered off-diagonal pairs
  double mean = 0.0;
  double median = 0.0;
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
  // Mean over ordered off-diagonal pairs; equals `mean` for a symmetric
  // matrix and is kept to make that visible.
  double mean_ordered = 0.0;
};

struct PairDiagnostic {
  int i = 0;
  int j = 0;
  double xp = 0.0;
  double breaking_gap = 0.0;  // (J_i + J_j) / 2 - XP_ij
};

struct PopulationResult {
  std::vector<AgentRecord> agents;
  std::vector<std::vector<double>> xp;  // diagonal: self-play
  XpStats stats;
  std::vector<PairDiagnostic> pairs;
};

using ProgressFn = std::function<void(const std::string&)>;

PopulationResult RunPopulation(const TabularDecPomdp& model, const PopulationConfig& cfg,
                               const ProgressFn& progress = nullptr);

std::vector<std::vector<double>> XpMatrix(const TabularDecPomdp& model,
                                          const std::vector<TabularJointPolicy>& policies);
// Statistics over the off-diagonal; all zero with pairs = 0 for fewer than
// two policies.
XpStats XpMatrixStats(const std::vector<std::vector<double>>& xp);
std::vector<double> OffDiagonal(const std::vector<std::vector<double>>& xp);

struct SymmetrizedComparison {
  XpStats before;
  XpStats after;
  bool degenerate = false;  // fewer than two policies
  int group_size = 0;
};
SymmetrizedComparison CompareSymmetrized(const TabularDecPomdp& model,
                                         const std::vector<TabularJointPolicy>& policies,
                                         const SymmetrySet& set);

struct OpGapReport {
  std::vector<double> sp_values;
  std::vector<double> op_values;
  double best_op = 0.0;
  XpStats xp;
  double gap = 0.0;  // best_op - xp.mean
  // Connected groups of compatible policies, where i and j are compatible
  // when both seatings reach min(OP_i, OP_j) - 1e-9.
  int classes = 0;
};
OpGapReport MakeOpGapReport(const TabularDecPomdp& model,
                            const std::vector<TabularJointPolicy>& policies,
                            const SymmetrySet& set);

std::vector<TabularJointPolicy> DeployedPolicies(const PopulationResult& result);

Json XpStatsToJson(const XpStats& s);
Json TrainerConfigToJson(const TrainerConfig& cfg);
Json DiscoveryConfigToJson(const DiscoveryConfig& cfg);
Json PopulationConfigToJson(const PopulationConfig& cfg);
// Key order is fixed, so equal results serialize to identical bytes.
Json PopulationResultToJson(const TabularDecPomdp& model, const PopulationConfig& cfg,
                            const PopulationResult& result);
std::string XpMatrixToCsv(const std::vector<std::vector<double>>& xp);
// Equal-width bins over [min, max] of the values (a single bin when all
// values coincide).
std::string HistogramCsv(const std::vector<double>& values, int bins);

}  // namespace ersym

#endif  // ERSYM_HARNESS_H_

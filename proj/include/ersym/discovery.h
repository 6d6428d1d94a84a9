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

#ifndef ERSYM_DISCOVERY_H_
#define ERSYM_DISCOVERY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ersym/model.h"
#include "ersym/policy.h"
#include "ersym/symmetry.h"

namespace ersym {

// Learnable distribution over observation permutations with a fixed action
// map: p_i = softmax(theta_i / T) over all permutations of agent i's
// observations. With `shared` a single distribution drives every agent.
struct SoftSymmetry {
  SymmetryMap action_map;  // obs entries are ignored
  bool shared = false;
  std::vector<std::vector<Perm>> candidates;  // per distribution
  std::vector<std::vector<double>> logits;    // per distribution

  int num_distributions() const { return static_cast<int>(logits.size()); }
  std::vector<double> Probabilities(int dist, double temperature) const;
  // Index of the largest logit, lowest index on ties.
  int Mode(int dist) const;
  // Action map with the given observation-permutation choices.
  SymmetryMap Harden(const std::vector<int>& choice) const;
  SymmetryMap HardenModal() const;
};

inline constexpr int64_t kDefaultPermutationCap = 5040;

// Zero logits over every observation permutation; throws CapExceeded if
// some agent has more than `cap` of them.
SoftSymmetry MakeSoftSymmetry(const TabularDecPomdp& model,
                              const SymmetryMap& action_map,
                              int64_t cap = kDefaultPermutationCap);

enum class ActionMapMode {
  kTranspositions,  // every legality-preserving single-agent transposition
  kPermutations,    // every legality-preserving action permutation
};

struct DiscoveryConfig {
  int64_t episodes = 2000;  // per inner loop
  double learning_rate = 0.01;
  double temperature = 1.0 / 2.667;
  double baseline = 9.5;
  int top_l = 3;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  // Maximum |J(pi) - J(phi(pi))| over the pool for a returned map.
  double tolerance = 0.05;
  uint64_t seed = 0;
  // Number of action maps (LearnAlg1, LearnAlg2) or policy pairs
  // (LearnAlg3) to optimize; 0 means all.
  int64_t budget = 0;
  // Independent inner-loop runs per action map (Algorithms 1 and 2).
  int restarts = 1;
  ActionMapMode action_maps = ActionMapMode::kTranspositions;
  int64_t permutation_cap = kDefaultPermutationCap;
  // Cap on candidates for the exhaustive search.
  int64_t search_cap = 1'000'000;
};

std::vector<std::string> ValidateDiscoveryConfig(const DiscoveryConfig& cfg);
std::string ActionMapModeName(ActionMapMode mode);
ActionMapMode ParseActionMapMode(const std::string& name);

// Mean over the pool of |J(pi) - J(phi(pi))|.
double ErGap(const TabularDecPomdp& model, const SymmetryMap& phi,
             const std::vector<TabularJointPolicy>& pool);
// Mean over the pool of J(phi(pi)).
double MeanTransformedReturn(const TabularDecPomdp& model, const SymmetryMap& phi,
                             const std::vector<TabularJointPolicy>& pool);
// E over phi ~ soft of the mean transformed return, computed exactly by
// summing over every choice of permutations.
double SoftMeanTransformedReturn(const TabularDecPomdp& model,
                                 const SoftSymmetry& soft, double temperature,
                                 const std::vector<TabularJointPolicy>& pool);

// Candidate action maps in the order Algorithms 1 and 2 visit them (before
// budget shuffling).
std::vector<SymmetryMap> CandidateActionMaps(const TabularDecPomdp& model,
                                             ActionMapMode mode, int64_t cap);

struct CandidateRecord {
  SymmetryMap map;
  double objective = 0.0;  // mean J(phi(pi)) or XP, exact
  double soft_objective = 0.0;  // before hardening (learned candidates only)
  double er_gap = 0.0;
  double max_gap = 0.0;
  // Mean over the pool of J(pi) - XP(pi, phi(pi)); secondary ranking key.
  double breaking_gap = 0.0;
  int source = -1;  // index of the action map or policy pair
  int restart = 0;
};

struct DiscoveryResult {
  SymmetrySet selected;
  std::vector<CandidateRecord> candidates;  // in ranking order
  std::vector<std::string> warnings;
};

// Warnings about pools that poorly stand in for the optimal policy set.
std::vector<std::string> PoolWarnings(const TabularDecPomdp& model,
                                      const std::vector<TabularJointPolicy>& pool);

// Every factored (action map, observation map) candidate ranked by mean
// J(phi(pi)), ties within 1e-9 broken by map order; keeps the top l.
DiscoveryResult SearchExhaustive(const TabularDecPomdp& model,
                                 const std::vector<TabularJointPolicy>& pool,
                                 int l, const DiscoveryConfig& cfg = {});

// Policy-gradient search over observation permutations per action map.
DiscoveryResult LearnAlg1(const TabularDecPomdp& model,
                          const std::vector<TabularJointPolicy>& pool,
                          const DiscoveryConfig& cfg);

// LearnAlg1 with random composition against `unregularized` (probability
// lambda1) and an invertibility penalty weighted by lambda2.
DiscoveryResult LearnAlg2(const TabularDecPomdp& model,
                          const std::vector<TabularJointPolicy>& pool,
                          const SymmetrySet& unregularized,
                          const DiscoveryConfig& cfg);

// Invertibility penalty of one soft permutation matrix M = sum_k p_k P_k:
// mean over observations of ||e_o - M^2 e_o||^2, and its gradient with
// respect to the logits.
struct PenaltyValue {
  double value = 0.0;
  std::vector<double> grad;
};
PenaltyValue InvertibilityPenalty(const std::vector<Perm>& candidates,
                                  const std::vector<double>& probs,
                                  double temperature);

// Cross-play maximization over ordered policy pairs with learnable action
// and observation permutations.
DiscoveryResult LearnAlg3(const TabularDecPomdp& model,
                          const std::vector<TabularJointPolicy>& pool,
                          const DiscoveryConfig& cfg);

// Top l by ascending ErGap, ties by map order. l = 0 or l > |candidates|
// produce a warning.
DiscoveryResult RankAndSelect(const TabularDecPomdp& model,
                              const SymmetrySet& candidates,
                              const std::vector<TabularJointPolicy>& pool, int l);

struct GroupPropertyReport {
  double base_return = 0.0;          // mean J(pi) over the holdout pool
  std::vector<double> composed;      // J_1, J_2, J_3
  std::vector<int64_t> tuples;       // tuples evaluated per k
  std::vector<bool> sampled;         // true if tuples were sampled
  double reconstruction_loss = 0.0;  // E ||tau - phi_O^2(tau)|| / ||tau||
};

// J_k averages J((phi_1 o ... o phi_k)(pi)) over all k-tuples from the set
// and the holdout pool (sampled with `seed` beyond `tuple_cap` tuples).
// The reconstruction loss averages over maps in the set and over the exact
// trajectory distribution of each holdout policy, encoding each agent's
// final observation sequence one-hot.
GroupPropertyReport MakeGroupPropertyReport(
    const TabularDecPomdp& model, const SymmetrySet& set,
    const std::vector<TabularJointPolicy>& holdout, int64_t tuple_cap = 20000,
    uint64_t seed = 0);

}  // namespace ersym

#endif  // ERSYM_DISCOVERY_H_

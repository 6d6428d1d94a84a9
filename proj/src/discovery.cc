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

#include "ersym/discovery.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ersym/error.h"
#include "ersym/evaluate.h"

namespace ersym {
namespace {

constexpr double kTieTolerance = 1e-9;

void CheckPool(const std::vector<TabularJointPolicy>& pool) {
  if (pool.empty()) throw ValidationError("policy pool is empty");
}

void CheckConfig(const DiscoveryConfig& cfg) {
  const auto v = ValidateDiscoveryConfig(cfg);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "invalid discovery config:";
  for (const auto& line : v) msg << "\n  " << line;
  throw ValidationError(msg.str());
}

std::vector<double> Softmax(const std::vector<double>& logits, double temperature) {
  std::vector<double> p(logits.size());
  const double hi = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp((logits[k] - hi) / temperature);
    total += p[k];
  }
  for (double& x : p) x /= total;
  return p;
}

int ArgmaxFirst(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

bool AllFinite(const std::vector<std::vector<double>>& logits) {
  for (const auto& row : logits) {
    for (double x : row) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

// REINFORCE step for one categorical distribution.
void PolicyGradientStep(std::vector<double>& logits, const std::vector<double>& probs,
                        int chosen, double advantage, double lr, double temperature) {
  const double scale = lr * advantage / temperature;
  for (size_t k = 0; k < logits.size(); ++k) {
    logits[k] += scale * ((static_cast<int>(k) == chosen ? 1.0 : 0.0) - probs[k]);
  }
}

double MeanBreakingGap(const TabularDecPomdp& model, const SymmetryMap& phi,
                       const std::vector<TabularJointPolicy>& pool) {
  double total = 0.0;
  for (const auto& pi : pool) total += SymmetryBreakingGap(model, pi, phi);
  return total / static_cast<double>(pool.size());
}

// Ranks by descending objective. Ties go to the map that moves the pool
// policies more (larger breaking gap), then to map order, unless
// lexicographic_ties is set. Drops duplicates and keeps the first l
// candidates within tolerance.
DiscoveryResult Select(const TabularDecPomdp& model,
                       const std::vector<TabularJointPolicy>& pool,
                       std::vector<CandidateRecord> records, int l,
                       double tolerance, std::vector<std::string> warnings,
                       bool lexicographic_ties = false) {
  if (!lexicographic_ties) {
    for (auto& rec : records) rec.breaking_gap = MeanBreakingGap(model, rec.map, pool);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const CandidateRecord& a, const CandidateRecord& b) {
                     if (std::abs(a.objective - b.objective) > kTieTolerance) {
                       return a.objective > b.objective;
                     }
                     if (std::abs(a.breaking_gap - b.breaking_gap) > kTieTolerance) {
                       return a.breaking_gap > b.breaking_gap;
                     }
                     return a.map < b.map;
                   });
  DiscoveryResult result;
  result.warnings = std::move(warnings);
  int dropped = 0;
  for (auto& rec : records) {
    const bool duplicate =
        std::any_of(result.candidates.begin(), result.candidates.end(),
                    [&rec](const CandidateRecord& r) { return r.map == rec.map; });
    if (duplicate) continue;
    rec.er_gap = ErGap(model, rec.map, pool);
    rec.max_gap = IsErSymmetry(model, rec.map, pool, tolerance).max_gap;
    if (result.selected.size() < l) {
      if (rec.max_gap <= tolerance) {
        result.selected.maps.push_back(rec.map);
      } else {
        ++dropped;
      }
    }
    result.candidates.push_back(std::move(rec));
  }
  if (dropped > 0) {
    result.warnings.push_back(std::to_string(dropped) +
                              " high-ranked candidates exceed the return-gap tolerance " +
                              "and were not selected");
  }
  if (result.selected.size() < l) {
    result.warnings.push_back("only " + std::to_string(result.selected.size()) +
                              " of the requested " + std::to_string(l) +
                              " symmetries pass the tolerance");
  }
  return result;
}

// Transformed pool members, cached by observation choice.
class TransformCache {
 public:
  TransformCache(const TabularDecPomdp& model, const TabularJointPolicy& policy)
      : model_(model), policy_(policy) {}
  const TabularJointPolicy& Get(const SymmetryMap& phi) {
    auto it = cache_.find(phi);
    if (it == cache_.end()) {
      it = cache_.emplace(phi, TransformPolicy(model_, phi, policy_)).first;
    }
    return it->second;
  }

 private:
  const TabularDecPomdp& model_;
  const TabularJointPolicy& policy_;
  std::map<SymmetryMap, TabularJointPolicy> cache_;
};

std::vector<size_t> BudgetedOrder(size_t count, int64_t budget, uint64_t seed) {
  std::vector<size_t> order(count);
  for (size_t k = 0; k < count; ++k) order[k] = k;
  Rng rng(MixSeed(seed, 0x0dd5));
  for (size_t k = count; k > 1; --k) {
    std::swap(order[k - 1], order[rng.UniformInt(static_cast<int>(k))]);
  }
  if (budget > 0 && static_cast<size_t>(budget) < count) order.resize(budget);
  std::sort(order.begin(), order.end());
  return order;
}

// One inner loop of Algorithms 1 and 2: policy gradient on the observation
// logits of `soft`. Returns false if the logits diverged.
bool OptimizeObservationMap(const TabularDecPomdp& model, size_t pool_size,
                            std::vector<TransformCache>& caches,
                            const SymmetrySet* unregularized,
                            const DiscoveryConfig& cfg, uint64_t stream,
                            SoftSymmetry& soft) {
  const double lambda1 = unregularized ? cfg.lambda1 : 0.0;
  const double lambda2 = unregularized ? cfg.lambda2 : 0.0;
  Rng rng(MixSeed(cfg.seed, stream));
  Rng compose_rng(MixSeed(cfg.seed, (uint64_t{1} << 48) | stream));
  const int nd = soft.num_distributions();
  std::vector<int> choice(nd);
  std::vector<std::vector<double>> probs(nd);
  for (int64_t e = 0; e < cfg.episodes; ++e) {
    const size_t which = static_cast<size_t>(e % static_cast<int64_t>(pool_size));
    for (int d = 0; d < nd; ++d) {
      probs[d] = Softmax(soft.logits[d], cfg.temperature);
      choice[d] = rng.Categorical(probs[d]);
    }
    SymmetryMap phi = soft.Harden(choice);
    if (unregularized && compose_rng.Uniform() < lambda1) {
      const auto& maps = unregularized->maps;
      const int n = static_cast<int>(maps.size());
      const SymmetryMap& left = maps[compose_rng.UniformInt(n)];
      const SymmetryMap& right = maps[compose_rng.UniformInt(n)];
      phi = Compose(left, Compose(phi, right));
    }
    const TabularJointPolicy& played = caches[which].Get(phi);
    std::vector<const LocalPolicy*> agents;
    for (const auto& local : played.agents()) agents.push_back(&local);
    const double g = Rollout(model, agents, rng).realized_return;
    for (int d = 0; d < nd; ++d) {
      PolicyGradientStep(soft.logits[d], probs[d], choice[d], g - cfg.baseline,
                         cfg.learning_rate, cfg.temperature);
      if (lambda2 > 0.0) {
        const PenaltyValue pen =
            InvertibilityPenalty(soft.candidates[d], probs[d], cfg.temperature);
        for (size_t k = 0; k < pen.grad.size(); ++k) {
          soft.logits[d][k] -= cfg.learning_rate * lambda2 * pen.grad[k] / nd;
        }
      }
    }
    if (!AllFinite(soft.logits)) return false;
  }
  return true;
}

// Shared body of Algorithms 1 and 2.
DiscoveryResult LearnObservationMaps(const TabularDecPomdp& model,
                                     const std::vector<TabularJointPolicy>& pool,
                                     const SymmetrySet* unregularized,
                                     const DiscoveryConfig& cfg) {
  CheckPool(pool);
  CheckConfig(cfg);
  if (unregularized && unregularized->maps.empty()) {
    throw ValidationError("algorithm 2 needs a nonempty unregularized set");
  }
  std::vector<std::string> warnings = PoolWarnings(model, pool);
  const auto action_maps = CandidateActionMaps(model, cfg.action_maps, cfg.permutation_cap);
  const auto order = BudgetedOrder(action_maps.size(), cfg.budget, cfg.seed);
  std::vector<TransformCache> caches;
  for (const auto& pi : pool) caches.emplace_back(model, pi);

  std::vector<CandidateRecord> records;
  for (size_t c : order) {
    for (int restart = 0; restart < cfg.restarts; ++restart) {
      SoftSymmetry soft = MakeSoftSymmetry(model, action_maps[c], cfg.permutation_cap);
      const uint64_t stream = (static_cast<uint64_t>(c) << 16) | static_cast<uint64_t>(restart);
      if (!OptimizeObservationMap(model, pool.size(), caches, unregularized, cfg, stream,
                                  soft)) {
        warnings.push_back("candidate " + action_maps[c].ToString(model) + " (restart " +
                           std::to_string(restart) + ") diverged and was skipped");
        continue;
      }
      CandidateRecord rec;
      rec.map = soft.HardenModal();
      rec.objective = MeanTransformedReturn(model, rec.map, pool);
      rec.soft_objective = SoftMeanTransformedReturn(model, soft, cfg.temperature, pool);
      rec.source = static_cast<int>(c);
      rec.restart = restart;
      records.push_back(std::move(rec));
    }
  }
  return Select(model, pool, std::move(records), cfg.top_l, cfg.tolerance,
                std::move(warnings));
}

}  // namespace

std::vector<double> SoftSymmetry::Probabilities(int dist, double temperature) const {
  return Softmax(logits[dist], temperature);
}

int SoftSymmetry::Mode(int dist) const { return ArgmaxFirst(logits[dist]); }

SymmetryMap SoftSymmetry::Harden(const std::vector<int>& choice) const {
  SymmetryMap phi = action_map;
  for (size_t i = 0; i < phi.obs.size(); ++i) {
    const int d = shared ? 0 : static_cast<int>(i);
    phi.obs[i] = candidates[d][choice[d]];
  }
  return phi;
}

SymmetryMap SoftSymmetry::HardenModal() const {
  std::vector<int> choice(num_distributions());
  for (int d = 0; d < num_distributions(); ++d) choice[d] = Mode(d);
  return Harden(choice);
}

SoftSymmetry MakeSoftSymmetry(const TabularDecPomdp& model,
                              const SymmetryMap& action_map, int64_t cap) {
  SoftSymmetry soft;
  soft.action_map = action_map;
  soft.action_map.obs.clear();
  for (int i = 0; i < model.num_agents(); ++i) {
    soft.action_map.obs.push_back(IdentityPerm(model.num_observations(i)));
  }
  CheckSymmetry(model, soft.action_map);
  soft.shared = model.shared_symmetries;
  const int nd = soft.shared ? 1 : model.num_agents();
  for (int d = 0; d < nd; ++d) {
    soft.candidates.push_back(AllPermutations(model.num_observations(d), cap));
    soft.logits.emplace_back(soft.candidates.back().size(), 0.0);
  }
  return soft;
}

std::vector<std::string> ValidateDiscoveryConfig(const DiscoveryConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.episodes < 1) v.push_back("episodes must be >= 1");
  if (!(cfg.learning_rate > 0.0)) v.push_back("learning_rate must be > 0");
  if (!(cfg.temperature > 0.0)) v.push_back("temperature must be > 0");
  if (cfg.top_l < 0) v.push_back("top_l must be >= 0");
  if (!(cfg.lambda1 >= 0.0 && cfg.lambda1 < 1.0)) v.push_back("lambda1 must lie in [0, 1)");
  if (!(cfg.lambda2 >= 0.0)) v.push_back("lambda2 must be >= 0");
  if (!(cfg.tolerance >= 0.0)) v.push_back("tolerance must be >= 0");
  if (cfg.budget < 0) v.push_back("budget must be >= 0");
  if (cfg.restarts < 1) v.push_back("restarts must be >= 1");
  if (cfg.permutation_cap < 1) v.push_back("permutation_cap must be >= 1");
  return v;
}

std::string ActionMapModeName(ActionMapMode mode) {
  return mode == ActionMapMode::kTranspositions ? "transpositions" : "permutations";
}

ActionMapMode ParseActionMapMode(const std::string& name) {
  if (name == "transpositions") return ActionMapMode::kTranspositions;
  if (name == "permutations") return ActionMapMode::kPermutations;
  throw ValidationError("unknown action map mode '" + name +
                        "' (expected transpositions or permutations)");
}

double ErGap(const TabularDecPomdp& model, const SymmetryMap& phi,
             const std::vector<TabularJointPolicy>& pool) {
  CheckPool(pool);
  double total = 0.0;
  for (const auto& pi : pool) {
    total += std::abs(ExactExpectedReturn(model, pi) -
                      ExactExpectedReturn(model, TransformPolicy(model, phi, pi)));
  }
  return total / static_cast<double>(pool.size());
}

double MeanTransformedReturn(const TabularDecPomdp& model, const SymmetryMap& phi,
                             const std::vector<TabularJointPolicy>& pool) {
  CheckPool(pool);
  double total = 0.0;
  for (const auto& pi : pool) {
    total += ExactExpectedReturn(model, TransformPolicy(model, phi, pi));
  }
  return total / static_cast<double>(pool.size());
}

double SoftMeanTransformedReturn(const TabularDecPomdp& model,
                                 const SoftSymmetry& soft, double temperature,
                                 const std::vector<TabularJointPolicy>& pool) {
  const int nd = soft.num_distributions();
  std::vector<std::vector<double>> probs(nd);
  for (int d = 0; d < nd; ++d) probs[d] = soft.Probabilities(d, temperature);
  std::vector<int> choice(nd, 0);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (int d = 0; d < nd; ++d) weight *= probs[d][choice[d]];
    // Choices with negligible weight cannot move the value by more than
    // weight * (range of returns); skip them.
    if (weight > 1e-12) {
      total += weight * MeanTransformedReturn(model, soft.Harden(choice), pool);
    }
    int d = nd - 1;
    for (; d >= 0; --d) {
      if (++choice[d] < static_cast<int>(probs[d].size())) break;
      choice[d] = 0;
    }
    if (d < 0) break;
  }
  return total;
}

std::vector<SymmetryMap> CandidateActionMaps(const TabularDecPomdp& model,
                                             ActionMapMode mode, int64_t cap) {
  const int n = model.num_agents();
  const SymmetryMap id = IdentitySymmetry(model);
  std::vector<SymmetryMap> out;
  if (mode == ActionMapMode::kPermutations) {
    const int distinct = model.shared_symmetries ? 1 : n;
    std::vector<std::vector<Perm>> perms(distinct);
    for (int i = 0; i < distinct; ++i) perms[i] = LegalActionPermutations(model, i, cap);
    std::vector<size_t> digit(distinct, 0);
    while (true) {
      SymmetryMap phi = id;
      for (int i = 0; i < n; ++i) {
        phi.act[i] = perms[model.shared_symmetries ? 0 : i][digit[model.shared_symmetries ? 0 : i]];
      }
      out.push_back(std::move(phi));
      int d = distinct - 1;
      for (; d >= 0; --d) {
        if (++digit[d] < perms[d].size()) break;
        digit[d] = 0;
      }
      if (d < 0) break;
      if (static_cast<int64_t>(out.size()) > cap) {
        throw CapExceeded("action map candidates exceed the cap of " + std::to_string(cap));
      }
    }
    return out;
  }
  const int distinct = model.shared_symmetries ? 1 : n;
  for (int i = 0; i < distinct; ++i) {
    for (const Perm& t : AllTranspositions(model.num_actions(i))) {
      SymmetryMap phi = id;
      if (model.shared_symmetries) {
        for (int j = 0; j < n; ++j) phi.act[j] = t;
      } else {
        phi.act[i] = t;
      }
      if (ValidateSymmetry(model, phi).empty()) out.push_back(std::move(phi));
    }
  }
  return out;
}

std::vector<std::string> PoolWarnings(const TabularDecPomdp& model,
                                      const std::vector<TabularJointPolicy>& pool) {
  CheckPool(pool);
  std::vector<double> j;
  for (const auto& pi : pool) j.push_back(ExactExpectedReturn(model, pi));
  double mean = 0.0;
  for (double x : j) mean += x;
  mean /= static_cast<double>(j.size());
  double var = 0.0;
  for (double x : j) var += (x - mean) * (x - mean);
  var /= static_cast<double>(j.size());
  std::vector<std::string> out;
  if (var > 0.05 * std::abs(mean)) {
    std::ostringstream msg;
    msg << "pool returns vary widely (mean " << mean << ", variance " << var
        << "); the pool may not stand in for the optimal policies";
    out.push_back(msg.str());
  }
  return out;
}

DiscoveryResult SearchExhaustive(const TabularDecPomdp& model,
                                 const std::vector<TabularJointPolicy>& pool, int l,
                                 const DiscoveryConfig& cfg) {
  CheckPool(pool);
  std::vector<std::string> warnings = PoolWarnings(model, pool);
  std::vector<CandidateRecord> records;
  int source = 0;
  for (auto& phi : AllFactoredMaps(model, cfg.search_cap)) {
    CandidateRecord rec;
    rec.objective = MeanTransformedReturn(model, phi, pool);
    rec.map = std::move(phi);
    rec.source = source++;
    records.push_back(std::move(rec));
  }
  double top = -INFINITY;
  for (const auto& r : records) top = std::max(top, r.objective);
  int tied = 0;
  for (const auto& r : records) tied += std::abs(r.objective - top) <= kTieTolerance;
  if (tied > std::max(l, 1) && tied == static_cast<int>(records.size())) {
    warnings.push_back("every candidate attains the same value; the pool does not "
                       "distinguish symmetries");
  } else if (tied > std::max(l, 1)) {
    warnings.push_back(std::to_string(tied) + " candidates tie at the top value");
  }
  return Select(model, pool, std::move(records), l, cfg.tolerance, std::move(warnings),
                /*lexicographic_ties=*/true);
}

DiscoveryResult LearnAlg1(const TabularDecPomdp& model,
                          const std::vector<TabularJointPolicy>& pool,
                          const DiscoveryConfig& cfg) {
  return LearnObservationMaps(model, pool, nullptr, cfg);
}

DiscoveryResult LearnAlg2(const TabularDecPomdp& model,
                          const std::vector<TabularJointPolicy>& pool,
                          const SymmetrySet& unregularized,
                          const DiscoveryConfig& cfg) {
  return LearnObservationMaps(model, pool, &unregularized, cfg);
}

PenaltyValue InvertibilityPenalty(const std::vector<Perm>& candidates,
                                  const std::vector<double>& probs,
                                  double temperature) {
  const int n = static_cast<int>(candidates.front().size());
  // M[r][c] = sum_k p_k [P_k]_{rc}, with P_k e_o = e_{perm(o)}.
  std::vector<double> m(n * n, 0.0);
  for (size_t k = 0; k < candidates.size(); ++k) {
    for (int o = 0; o < n; ++o) m[candidates[k][o] * n + o] += probs[k];
  }
  std::vector<double> m2(n * n, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int x = 0; x < n; ++x) {
      for (int c = 0; c < n; ++c) m2[r * n + c] += m[r * n + x] * m[x * n + c];
    }
  }
  std::vector<double> e(n * n);
  double value = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      e[r * n + c] = (r == c ? 1.0 : 0.0) - m2[r * n + c];
      value += e[r * n + c] * e[r * n + c];
    }
  }
  PenaltyValue out;
  out.value = value / n;
  // dL/dM = -(2/n) (E M^T + M^T E).
  std::vector<double> g(n * n, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int x = 0; x < n; ++x) s += e[r * n + x] * m[c * n + x] + m[x * n + r] * e[x * n + c];
      g[r * n + c] = -2.0 * s / n;
    }
  }
  // dM/dtheta_k = p_k (P_k - M) / T.
  double gm = 0.0;
  for (int i = 0; i < n * n; ++i) gm += g[i] * m[i];
  out.grad.resize(candidates.size());
  for (size_t k = 0; k < candidates.size(); ++k) {
    double gp = 0.0;
    for (int o = 0; o < n; ++o) gp += g[candidates[k][o] * n + o];
    out.grad[k] = probs[k] * (gp - gm) / temperature;
  }
  return out;
}

DiscoveryResult LearnAlg3(const TabularDecPomdp& model,
                          const std::vector<TabularJointPolicy>& pool,
                          const DiscoveryConfig& cfg) {
  CheckConfig(cfg);
  if (pool.size() < 2) throw ValidationError("algorithm 3 needs at least two policies");
  if (model.num_agents() != 2) throw ValidationError("algorithm 3 needs a two-agent model");
  std::vector<std::string> warnings = PoolWarnings(model, pool);
  const bool shared = model.shared_symmetries;
  const int distinct = shared ? 1 : 2;
  std::vector<std::vector<Perm>> act_cands(distinct), obs_cands(distinct);
  for (int i = 0; i < distinct; ++i) {
    act_cands[i] = LegalActionPermutations(model, i, cfg.permutation_cap);
    obs_cands[i] = AllPermutations(model.num_observations(i), cfg.permutation_cap);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
    for (int j = 0; j < static_cast<int>(pool.size()); ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  const auto order = BudgetedOrder(pairs.size(), cfg.budget, cfg.seed);
  std::vector<TransformCache> caches;
  for (const auto& pi : pool) caches.emplace_back(model, pi);

  std::vector<CandidateRecord> records;
  for (size_t c : order) {
    const auto [pi_i, pi_j] = pairs[c];
    Rng rng(MixSeed(cfg.seed, 3'000'000 + c));
    // Distributions: action perms then observation perms per distinct agent.
    std::vector<std::vector<double>> logits;
    for (int i = 0; i < distinct; ++i) logits.emplace_back(act_cands[i].size(), 0.0);
    for (int i = 0; i < distinct; ++i) logits.emplace_back(obs_cands[i].size(), 0.0);
    const int nd = static_cast<int>(logits.size());
    auto build = [&](const std::vector<int>& choice) {
      SymmetryMap phi;
      for (int a = 0; a < 2; ++a) {
        const int d = shared ? 0 : a;
        phi.act.push_back(act_cands[d][choice[d]]);
        phi.obs.push_back(obs_cands[d][choice[distinct + d]]);
      }
      return phi;
    };
    std::vector<int> choice(nd);
    bool diverged = false;
    for (int64_t e = 0; e < cfg.episodes && !diverged; ++e) {
      std::vector<std::vector<double>> probs(nd);
      for (int d = 0; d < nd; ++d) {
        probs[d] = Softmax(logits[d], cfg.temperature);
        choice[d] = rng.Categorical(probs[d]);
      }
      const TabularJointPolicy& other = caches[pi_j].Get(build(choice));
      const LocalPolicy* seats[2];
      if (e % 2 == 0) {
        seats[0] = &pool[pi_i].agent(0);
        seats[1] = &other.agent(1);
      } else {
        seats[0] = &other.agent(0);
        seats[1] = &pool[pi_i].agent(1);
      }
      const double g = Rollout(model, seats, rng).realized_return;
      for (int d = 0; d < nd; ++d) {
        PolicyGradientStep(logits[d], probs[d], choice[d], g - cfg.baseline,
                           cfg.learning_rate, cfg.temperature);
      }
      diverged = !AllFinite(logits);
    }
    if (diverged) {
      warnings.push_back("pair (" + std::to_string(pi_i) + ", " + std::to_string(pi_j) +
                         ") diverged and was skipped");
      continue;
    }
    for (int d = 0; d < nd; ++d) choice[d] = ArgmaxFirst(logits[d]);
    CandidateRecord rec;
    rec.map = build(choice);
    rec.objective = CrossPlay(model, pool[pi_i], caches[pi_j].Get(rec.map));
    rec.source = static_cast<int>(c);
    records.push_back(std::move(rec));
  }
  return Select(model, pool, std::move(records), cfg.top_l, cfg.tolerance,
                std::move(warnings));
}

DiscoveryResult RankAndSelect(const TabularDecPomdp& model,
                              const SymmetrySet& candidates,
                              const std::vector<TabularJointPolicy>& pool, int l) {
  CheckPool(pool);
  if (candidates.maps.empty()) throw ValidationError("candidate set is empty");
  DiscoveryResult result;
  if (l <= 0) {
    result.warnings.push_back("l = " + std::to_string(l) + ": nothing selected");
  } else if (l > candidates.size()) {
    result.warnings.push_back("l = " + std::to_string(l) + " exceeds the " +
                              std::to_string(candidates.size()) +
                              " candidates; returning all of them");
  }
  for (const auto& phi : candidates.maps) {
    CandidateRecord rec;
    rec.map = phi;
    rec.er_gap = ErGap(model, phi, pool);
    rec.objective = -rec.er_gap;
    rec.max_gap = IsErSymmetry(model, phi, pool, 0.0).max_gap;
    result.candidates.push_back(std::move(rec));
  }
  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [](const CandidateRecord& a, const CandidateRecord& b) {
                     if (std::abs(a.er_gap - b.er_gap) > kTieTolerance) {
                       return a.er_gap < b.er_gap;
                     }
                     return a.map < b.map;
                   });
  for (const auto& rec : result.candidates) {
    if (result.selected.size() >= l) break;
    result.selected.maps.push_back(rec.map);
  }
  return result;
}

GroupPropertyReport MakeGroupPropertyReport(const TabularDecPomdp& model,
                                            const SymmetrySet& set,
                                            const std::vector<TabularJointPolicy>& holdout,
                                            int64_t tuple_cap, uint64_t seed) {
  CheckPool(holdout);
  if (set.maps.empty()) throw ValidationError("symmetry set is empty");
  GroupPropertyReport report;
  for (const auto& pi : holdout) report.base_return += ExactExpectedReturn(model, pi);
  report.base_return /= static_cast<double>(holdout.size());
  const int64_t n = set.size();
  Rng rng(seed);
  for (int k = 1; k <= 3; ++k) {
    const double count = std::pow(static_cast<double>(n), k);
    const bool sample = count > static_cast<double>(tuple_cap);
    const int64_t tuples = sample ? tuple_cap : static_cast<int64_t>(count);
    double total = 0.0;
    for (int64_t t = 0; t < tuples; ++t) {
      SymmetryMap phi = IdentitySymmetry(model);
      int64_t code = t;
      for (int f = 0; f < k; ++f) {
        int64_t idx;
        if (sample) {
          idx = static_cast<int64_t>(rng.UniformInt(static_cast<int>(n)));
        } else {
          idx = code % n;
          code /= n;
        }
        phi = Compose(phi, set.maps[idx]);
      }
      total += MeanTransformedReturn(model, phi, holdout);
    }
    report.composed.push_back(total / static_cast<double>(tuples));
    report.tuples.push_back(tuples);
    report.sampled.push_back(sample);
  }
  double loss = 0.0;
  for (const auto& phi : set.maps) {
    std::vector<Perm> twice;
    for (const auto& p : phi.obs) twice.push_back(ComposePerm(p, p));
    for (const auto& pi : holdout) {
      ForEachTrajectory(model, pi, [&](double prob, const std::vector<LocalAoh>& h) {
        int positions = 0;
        int moved = 0;
        for (size_t i = 0; i < h.size(); ++i) {
          if (h[i].initial_observation >= 0) {
            ++positions;
            moved += twice[i][h[i].initial_observation] != h[i].initial_observation;
          }
          for (const auto& [a, o] : h[i].steps) {
            ++positions;
            moved += twice[i][o] != o;
          }
        }
        if (positions > 0) loss += prob * std::sqrt(2.0 * moved / positions);
      });
    }
  }
  report.reconstruction_loss =
      loss / static_cast<double>(set.maps.size() * holdout.size());
  return report;
}

}  // namespace ersym

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "ersym/discovery.h"
#include "ersym/envs.h"
#include "ersym/error.h"
#include "ersym/evaluate.h"
#include "ersym/symmetry.h"
#include "ersym/training.h"
#include "test_util.h"

using namespace ersym;
using namespace ersym::testing;

namespace {

PolicyPool LeverPool(uint64_t seed) {
  TrainerConfig tc;
  tc.episodes = 10000;
  tc.learning_rate = 0.1;
  tc.epsilon = 0.1;
  tc.shared_q = true;
  tc.seed = seed;
  return BuildPolicyPool(MakeLeverGame(), PoolConfig{}, tc);
}

PolicyPool CatDogPool(uint64_t seed) {
  TrainerConfig tc;
  tc.episodes = 10000;
  tc.learning_rate = 0.1;
  tc.epsilon = 0.3;
  tc.seed = seed;
  return BuildPolicyPool(MakeCatDog(), PoolConfig{}, tc);
}

DiscoveryConfig LeverDiscovery(uint64_t seed) {
  DiscoveryConfig dc;
  dc.episodes = 20000;
  dc.learning_rate = 0.05;
  dc.temperature = 1.0;
  dc.baseline = 1.75;
  dc.top_l = 6;
  dc.action_maps = ActionMapMode::kPermutations;
  dc.seed = seed;
  return dc;
}

// Both pull lever k; in round two agent 0 repeats itself and agent 1 copies
// the partner.
TabularJointPolicy LeverThenCopy(const TabularDecPomdp& lever, int k) {
  return Deterministic(lever, [k](int agent, int step, const LocalAoh& h) {
    if (step == 0) return k;
    return agent == 0 ? h.steps[0].first : h.steps[0].second;
  });
}

bool SameMaps(const SymmetrySet& a, const SymmetrySet& b) {
  std::vector<SymmetryMap> x = a.maps, y = b.maps;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

bool SameResult(const DiscoveryResult& a, const DiscoveryResult& b) {
  if (!(a.selected.maps == b.selected.maps)) return false;
  if (a.candidates.size() != b.candidates.size()) return false;
  for (size_t i = 0; i < a.candidates.size(); ++i) {
    if (!(a.candidates[i].map == b.candidates[i].map)) return false;
    if (a.candidates[i].objective != b.candidates[i].objective) return false;
    if (a.candidates[i].soft_objective != b.candidates[i].soft_objective) return false;
  }
  return true;
}

double Sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("soft symmetry construction") {
  const auto lever = MakeLeverGame();
  const auto soft = MakeSoftSymmetry(lever, IdentitySymmetry(lever));
  CHECK(soft.shared);
  REQUIRE(soft.num_distributions() == 1);
  CHECK(soft.candidates[0].size() == 6);
  CHECK(Sum(soft.Probabilities(0, 0.5)) == doctest::Approx(1.0));

  const auto cd = MakeCatDog();
  const auto csoft = MakeSoftSymmetry(cd, IdentitySymmetry(cd));
  CHECK_FALSE(csoft.shared);
  REQUIRE(csoft.num_distributions() == 2);
  CHECK(csoft.candidates[0].size() == 2);
  CHECK(csoft.candidates[1].size() == 24);
  CHECK_THROWS_AS(MakeSoftSymmetry(cd, IdentitySymmetry(cd), 10), CapExceeded);

  // The modal choice picks the largest logit, lowest index on ties, and
  // hardening writes the chosen permutation into every agent sharing it.
  auto s = soft;
  s.logits[0] = {0.0, 2.0, 2.0, 0.0, 0.0, 0.0};
  CHECK(s.Mode(0) == 1);
  const SymmetryMap phi = s.HardenModal();
  CHECK(phi.obs[0] == s.candidates[0][1]);
  CHECK(phi.obs[1] == s.candidates[0][1]);
  CHECK(phi.act[0] == IdentityPerm(3));
}

TEST_CASE("candidate action maps") {
  const auto lever = MakeLeverGame();
  CHECK(CandidateActionMaps(lever, ActionMapMode::kPermutations, 5040).size() == 6);
  CHECK(CandidateActionMaps(lever, ActionMapMode::kTranspositions, 5040).size() == 3);
  const auto cd = MakeCatDog();
  // Alice: 6 swaps among her four first-step actions; Bob: 3 among his
  // three second-step actions. Swaps with the no-op break legality.
  const auto maps = CandidateActionMaps(cd, ActionMapMode::kTranspositions, 5040);
  CHECK(maps.size() == 9);
  for (const auto& phi : maps) {
    CHECK(ValidateSymmetry(cd, phi).empty());
    CHECK_FALSE(phi.IsIdentity());
  }
  CHECK(CandidateActionMaps(cd, ActionMapMode::kPermutations, 5040).size() == 24 * 6);
}

TEST_CASE("er gap") {
  const auto lever = MakeLeverGame();
  const std::vector<TabularJointPolicy> always = {
      EpsilonSoften(lever, AlwaysLever(lever, 0), 0.1), EpsilonSoften(lever, AlwaysLever(lever, 1), 0.1)};
  CHECK(ErGap(lever, IdentitySymmetry(lever), always) == 0.0);
  for (const auto& phi : EnumerateMdpSymmetries(lever).maps) {
    CHECK(ErGap(lever, phi, always) <= 1e-10);
  }
  // Relabeling levers without relabeling what is seen of the partner breaks
  // an always-match policy in which only agent 1 reads the partner.
  SymmetryMap act_only = IdentitySymmetry(lever);
  act_only.act = {{1, 0, 2}, {1, 0, 2}};
  CHECK(ErGap(lever, act_only, always) == 0.0);
  const std::vector<TabularJointPolicy> copy = {
      EpsilonSoften(lever, LeverThenCopy(lever, 0), 0.1),
      EpsilonSoften(lever, LeverThenCopy(lever, 1), 0.1)};
  CHECK(ErGap(lever, act_only, copy) > 0.5);
  // Pool of one: the identity attains J(pi).
  const std::vector<TabularJointPolicy> one = {always[0]};
  CHECK(MeanTransformedReturn(lever, IdentitySymmetry(lever), one) ==
        ExactExpectedReturn(lever, always[0]));
}

TEST_CASE("soft objective matches a hard distribution") {
  const auto lever = MakeLeverGame();
  const std::vector<TabularJointPolicy> pool = {RandomPolicy(lever, 3), RandomPolicy(lever, 4)};
  auto soft = MakeSoftSymmetry(lever, IdentitySymmetry(lever));
  soft.logits[0] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  // Uniform logits: the exact average over the six observation maps.
  double mean = 0.0;
  for (int k = 0; k < 6; ++k) mean += MeanTransformedReturn(lever, soft.Harden({k}), pool);
  CHECK(SoftMeanTransformedReturn(lever, soft, 1.0, pool) == doctest::Approx(mean / 6).epsilon(1e-12));
  // Nearly one-hot logits: the value of the modal map.
  soft.logits[0][4] = 100.0;
  CHECK(SoftMeanTransformedReturn(lever, soft, 1.0, pool) ==
        doctest::Approx(MeanTransformedReturn(lever, soft.Harden({4}), pool)).epsilon(1e-12));
}

TEST_CASE("invertibility penalty values") {
  const std::vector<Perm> cands = AllPermutations(3, 5040);
  for (size_t k = 0; k < cands.size(); ++k) {
    std::vector<double> p(cands.size(), 0.0);
    p[k] = 1.0;
    const auto pen = InvertibilityPenalty(cands, p, 1.0);
    // Each moved observation contributes d = 2: zero for involutions, and
    // 2 for a 3-cycle, which moves every observation.
    const bool involution = IsIdentityPerm(ComposePerm(cands[k], cands[k]));
    CHECK(pen.value == doctest::Approx(involution ? 0.0 : 2.0));
  }
}

TEST_CASE("invertibility penalty gradient matches finite differences") {
  Rng rng(17);
  for (int n : {2, 3, 4}) {
    const std::vector<Perm> cands = AllPermutations(n, 5040);
    for (double temperature : {1.0, 0.4}) {
      std::vector<double> logits(cands.size());
      for (double& x : logits) x = rng.Uniform() * 2.0 - 1.0;
      auto probs_of = [&](const std::vector<double>& th) {
        std::vector<double> p(th.size());
        double z = 0.0;
        for (size_t k = 0; k < th.size(); ++k) z += p[k] = std::exp(th[k] / temperature);
        for (double& x : p) x /= z;
        return p;
      };
      const auto pen = InvertibilityPenalty(cands, probs_of(logits), temperature);
      const double h = 1e-6;
      for (size_t k = 0; k < logits.size(); ++k) {
        auto up = logits, down = logits;
        up[k] += h;
        down[k] -= h;
        const double fd = (InvertibilityPenalty(cands, probs_of(up), temperature).value -
                           InvertibilityPenalty(cands, probs_of(down), temperature).value) /
                          (2 * h);
        CHECK(pen.grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("exhaustive search on the lever game returns the Dec-POMDP symmetries") {
  const auto lever = MakeLeverGame();
  const auto mdp = EnumerateMdpSymmetries(lever);
  for (uint64_t seed : {1, 2, 3}) {
    const auto pool = LeverPool(seed);
    const auto result = SearchExhaustive(lever, pool.policies, 6);
    CHECK(result.selected.size() == 6);
    CHECK(SameMaps(result.selected, mdp));
    // Ranking is by value, then map order; the identity sorts first.
    CHECK(result.candidates.front().map.IsIdentity());
    for (size_t i = 1; i < result.candidates.size(); ++i) {
      CHECK(result.candidates[i - 1].objective >= result.candidates[i].objective - 1e-9);
    }
  }
}

TEST_CASE("exhaustive search on a uniform pool warns and ranks the identity first") {
  const auto lever = MakeLeverGame();
  const std::vector<TabularJointPolicy> pool = {TabularJointPolicy::Uniform(lever)};
  const auto result = SearchExhaustive(lever, pool, 2);
  CHECK(result.candidates.front().map.IsIdentity());
  CHECK_FALSE(result.warnings.empty());
}

TEST_CASE("exhaustive search on cat/dog includes a pairing symmetry") {
  const auto cd = MakeCatDog();
  const auto pool = CatDogPool(11);
  const auto result = SearchExhaustive(cd, pool.policies, 3);
  REQUIRE(result.selected.size() == 3);
  bool pairing = false;
  for (const auto& phi : result.selected.maps) pairing |= CatDogIsPairing(cd, phi);
  CHECK(pairing);
  CHECK(CatDogIsPairing(cd, CatDogLightSwap(cd)));
  CHECK(CatDogIsPairing(cd, CatDogPetSwap(cd)));
  CHECK_FALSE(CatDogIsPairing(cd, IdentitySymmetry(cd)));
}

TEST_CASE("exhaustive search respects its cap") {
  const auto cd = MakeCatDog();
  DiscoveryConfig dc;
  dc.search_cap = 100;
  const std::vector<TabularJointPolicy> pool = {CatDogGrounded(cd)};
  CHECK_THROWS_AS(SearchExhaustive(cd, pool, 3, dc), CapExceeded);
}

TEST_CASE("algorithm 1 recovers the lever symmetries and agrees with exhaustive search") {
  const auto lever = MakeLeverGame();
  for (uint64_t seed : {1, 2, 3}) {
    const auto pool = LeverPool(seed);
    const auto learned = LearnAlg1(lever, pool.policies, LeverDiscovery(seed));
    const auto oracle = SearchExhaustive(lever, pool.policies, 6);
    CHECK(SameMaps(learned.selected, oracle.selected));
    for (const auto& phi : learned.selected.maps) {
      CHECK(ErGap(lever, phi, pool.policies) <= 0.02);
      CHECK(IsErSymmetry(lever, phi, pool.policies, 0.05).passed);
    }
    // Converged distributions harden without losing value.
    for (const auto& rec : learned.candidates) {
      CHECK(std::abs(rec.soft_objective - rec.objective) <= 0.01 * std::abs(rec.objective));
    }
  }
}

TEST_CASE("algorithm 1 is deterministic and honours the budget") {
  const auto lever = MakeLeverGame();
  const auto pool = LeverPool(5);
  auto dc = LeverDiscovery(9);
  dc.episodes = 500;
  CHECK(SameResult(LearnAlg1(lever, pool.policies, dc), LearnAlg1(lever, pool.policies, dc)));
  dc.budget = 2;
  dc.restarts = 3;
  const auto r = LearnAlg1(lever, pool.policies, dc);
  CHECK(r.candidates.size() <= 6);
  std::set<int> sources;
  for (const auto& rec : r.candidates) sources.insert(rec.source);
  CHECK(sources.size() <= 2);
}

TEST_CASE("algorithm 1 returns only maps within tolerance") {
  const auto cd = MakeCatDog();
  const auto pool = CatDogPool(21);
  DiscoveryConfig dc;
  dc.seed = 4;
  const auto r = LearnAlg1(cd, pool.policies, dc);
  for (const auto& phi : r.selected.maps) {
    CHECK(IsErSymmetry(cd, phi, pool.policies, dc.tolerance).passed);
  }
}

TEST_CASE("algorithm 1 finds a cat/dog pairing symmetry") {
  // Single runs per action map reach a pairing map in roughly half of the
  // seeds; restarts make it reliable.
  const auto cd = MakeCatDog();
  int found = 0;
  for (int a = 0; a < 10; ++a) {
    const auto pool = CatDogPool(600 + a);
    DiscoveryConfig dc;
    dc.seed = a;
    dc.restarts = 8;
    const auto r = LearnAlg1(cd, pool.policies, dc);
    bool pairing = false;
    for (const auto& phi : r.selected.maps) pairing |= CatDogIsPairing(cd, phi);
    found += pairing;
  }
  CHECK(found >= 9);
}

TEST_CASE("algorithm 2 with zero regularization is algorithm 1") {
  const auto lever = MakeLeverGame();
  const auto pool = LeverPool(2);
  auto dc = LeverDiscovery(3);
  dc.episodes = 2000;
  const auto a1 = LearnAlg1(lever, pool.policies, dc);
  const auto a2 = LearnAlg2(lever, pool.policies, EnumerateMdpSymmetries(lever), dc);
  CHECK(SameResult(a1, a2));
  SymmetrySet empty;
  CHECK_THROWS_AS(LearnAlg2(lever, pool.policies, empty, dc), ValidationError);
}

TEST_CASE("algorithm 2 on the lever game returns a composable set") {
  const auto lever = MakeLeverGame();
  const auto pool = LeverPool(4);
  auto dc = LeverDiscovery(4);
  const auto unreg = LearnAlg1(lever, pool.policies, dc);
  REQUIRE_FALSE(unreg.selected.maps.empty());
  dc.lambda1 = 0.5;
  dc.lambda2 = 0.1;
  const auto reg = LearnAlg2(lever, pool.policies, unreg.selected, dc);
  REQUIRE_FALSE(reg.selected.maps.empty());
  for (const auto& a : reg.selected.maps) {
    for (const auto& b : reg.selected.maps) {
      CHECK(IsErSymmetry(lever, Compose(a, b), pool.policies, 0.05).passed);
    }
  }
}

TEST_CASE("algorithm 3 aligns a pair related by a known symmetry") {
  const auto lever = MakeLeverGame();
  const auto base = EpsilonSoften(lever, AlwaysLever(lever, 0), 0.05);
  SymmetryMap star = IdentitySymmetry(lever);
  star.act = {{1, 2, 0}, {1, 2, 0}};
  star.obs = star.act;
  const std::vector<TabularJointPolicy> pool = {base, TransformPolicy(lever, star, base)};
  DiscoveryConfig dc;
  dc.temperature = 1.0;
  dc.baseline = 1.5;
  dc.learning_rate = 0.05;
  dc.episodes = 5000;
  dc.top_l = 2;
  const auto r = LearnAlg3(lever, pool, dc);
  REQUIRE(r.candidates.size() == 2);
  const double j = ExactExpectedReturn(lever, base);
  for (const auto& rec : r.candidates) {
    CHECK(rec.objective == doctest::Approx(j).epsilon(1e-9));
  }
  // The map for the pair (0, 1) undoes star on the lever the pool uses.
  const auto& first = r.candidates[0].source == 0 ? r.candidates[0] : r.candidates[1];
  CHECK(CrossPlay(lever, pool[0], TransformPolicy(lever, first.map, pool[1])) ==
        doctest::Approx(j).epsilon(1e-9));
}

TEST_CASE("algorithm 3 recovers the cat/dog pairing") {
  const auto cd = MakeCatDog();
  const std::vector<TabularJointPolicy> pool = {CatDogCheapTalk(cd, true),
                                                CatDogCheapTalk(cd, false)};
  DiscoveryConfig dc;
  dc.episodes = 5000;
  dc.top_l = 2;
  const auto r = LearnAlg3(cd, pool, dc);
  REQUIRE_FALSE(r.candidates.empty());
  CHECK(r.candidates.front().objective >= 10.4);
  CHECK(CatDogIsPairing(cd, r.candidates.front().map));
}

TEST_CASE("algorithm 3 on identical policies attains J") {
  const auto lever = MakeLeverGame();
  const auto pi = EpsilonSoften(lever, AlwaysLever(lever, 2), 0.1);
  const std::vector<TabularJointPolicy> pool = {pi, pi};
  DiscoveryConfig dc;
  dc.temperature = 1.0;
  dc.baseline = 1.5;
  dc.learning_rate = 0.05;
  dc.episodes = 3000;
  const auto r = LearnAlg3(lever, pool, dc);
  REQUIRE_FALSE(r.candidates.empty());
  CHECK(r.candidates.front().objective == doctest::Approx(ExactExpectedReturn(lever, pi)));
  CHECK_THROWS_AS(LearnAlg3(lever, {pi}, dc), ValidationError);
}

TEST_CASE("rank and select") {
  const auto lever = MakeLeverGame();
  const auto pool = LeverPool(1);
  SymmetrySet cands;
  SymmetryMap act_only = IdentitySymmetry(lever);
  act_only.act = {{1, 0, 2}, {1, 0, 2}};
  cands.maps = {act_only, EnumerateMdpSymmetries(lever).maps[3], IdentitySymmetry(lever)};
  const auto r = RankAndSelect(lever, cands, pool.policies, 2);
  REQUIRE(r.selected.size() == 2);
  CHECK(r.selected.maps[0].IsIdentity());
  CHECK(r.selected.maps[1] == cands.maps[1]);
  CHECK(r.warnings.empty());
  for (size_t i = 1; i < r.candidates.size(); ++i) {
    CHECK(r.candidates[i - 1].er_gap <= r.candidates[i].er_gap);
  }
  const auto all = RankAndSelect(lever, cands, pool.policies, 5);
  CHECK(all.selected.size() == 3);
  CHECK_FALSE(all.warnings.empty());
  CHECK_THROWS_AS(RankAndSelect(lever, SymmetrySet{}, pool.policies, 1), ValidationError);
}

TEST_CASE("pool warnings") {
  const auto lever = MakeLeverGame();
  const std::vector<TabularJointPolicy> good = {AlwaysLever(lever, 0), AlwaysLever(lever, 1)};
  CHECK(PoolWarnings(lever, good).empty());
  const std::vector<TabularJointPolicy> mixed = {AlwaysLever(lever, 0),
                                                 TabularJointPolicy::Uniform(lever)};
  CHECK(PoolWarnings(lever, mixed).size() == 1);
}

TEST_CASE("group property report on the lever group") {
  const auto lever = MakeLeverGame();
  const auto holdout = LeverPool(77).policies;
  const auto mdp = EnumerateMdpSymmetries(lever);
  const auto report = MakeGroupPropertyReport(lever, mdp, holdout);
  REQUIRE(report.composed.size() == 3);
  for (double jk : report.composed) CHECK(std::abs(jk - report.base_return) <= 1e-10);
  CHECK(report.tuples == std::vector<int64_t>{6, 36, 216});

  // Transpositions are involutions: nothing moves under phi^2.
  SymmetrySet swaps;
  for (const auto& phi : mdp.maps) {
    if (!phi.IsIdentity() && IsIdentityPerm(ComposePerm(phi.act[0], phi.act[0]))) {
      swaps.maps.push_back(phi);
    }
  }
  REQUIRE(swaps.size() == 3);
  CHECK(MakeGroupPropertyReport(lever, swaps, holdout).reconstruction_loss == 0.0);

  // 3-cycles move observations under phi^2.
  SymmetrySet cycles;
  for (const auto& phi : mdp.maps) {
    if (!IsIdentityPerm(ComposePerm(phi.act[0], phi.act[0]))) cycles.maps.push_back(phi);
  }
  CHECK(MakeGroupPropertyReport(lever, cycles, holdout).reconstruction_loss > 0.0);

  // Corrupting one map's observation relabeling lowers J_1.
  SymmetrySet corrupted = mdp;
  for (auto& phi : corrupted.maps) {
    if (!phi.IsIdentity()) {
      phi.obs = {IdentityPerm(3), IdentityPerm(3)};
      break;
    }
  }
  const auto bad = MakeGroupPropertyReport(lever, corrupted, holdout);
  CHECK(bad.composed[0] < report.composed[0] - 1e-6);

  // Past the cap, tuples are sampled.
  const auto sampled = MakeGroupPropertyReport(lever, mdp, holdout, 40, 1);
  CHECK(sampled.sampled == std::vector<bool>{false, false, true});
  CHECK(sampled.tuples[2] == 40);
  CHECK(std::abs(sampled.composed[2] - report.base_return) <= 1e-10);
}

TEST_CASE("discovery config validation") {
  DiscoveryConfig dc;
  CHECK(ValidateDiscoveryConfig(dc).empty());
  dc.lambda1 = 1.0;
  dc.temperature = 0.0;
  dc.restarts = 0;
  CHECK(ValidateDiscoveryConfig(dc).size() == 3);
  CHECK(ParseActionMapMode("permutations") == ActionMapMode::kPermutations);
  CHECK(ActionMapModeName(ActionMapMode::kTranspositions) == "transpositions");
  CHECK_THROWS_AS(ParseActionMapMode("swaps"), ValidationError);
  const auto lever = MakeLeverGame();
  CHECK_THROWS_AS(LearnAlg1(lever, {}, DiscoveryConfig{}), ValidationError);
}

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

#include <cmath>

#include "ersym/envs.h"
#include "ersym/error.h"
#include "ersym/evaluate.h"
#include "ersym/io.h"
#include "ersym/symmetry.h"
#include "test_util.h"

using namespace ersym;
using namespace ersym::testing;

namespace {

SymmetryMap SharedLever(const TabularDecPomdp& lever, const Perm& p) {
  SymmetryMap phi;
  for (int i = 0; i < 2; ++i) {
    phi.act.push_back(p);
    phi.obs.push_back(p);
  }
  (void)lever;
  return phi;
}

// A random legality-preserving map.
SymmetryMap RandomMap(const TabularDecPomdp& m, Rng& rng) {
  SymmetryMap phi;
  for (int i = 0; i < m.num_agents(); ++i) {
    const auto acts = LegalActionPermutations(m, i, 5040);
    const auto obs = AllPermutations(m.num_observations(i), 5040);
    phi.act.push_back(acts[rng.UniformInt(acts.size())]);
    phi.obs.push_back(obs[rng.UniformInt(obs.size())]);
  }
  return phi;
}

}  // namespace

TEST_CASE("identity") {
  const auto lever = MakeLeverGame();
  const SymmetryMap id = IdentitySymmetry(lever);
  const auto pi = RandomPolicy(lever, 1);
  CHECK(TransformPolicy(lever, id, pi) == pi);
  const SymmetryMap phi = SharedLever(lever, {1, 2, 0});
  CHECK(Compose(id, phi) == phi);
  CHECK(Compose(phi, id) == phi);
  CHECK(IsMdpSymmetry(lever, id));
  CHECK(IsMdpSymmetry(MakeCatDog(), IdentitySymmetry(MakeCatDog())));
}

TEST_CASE("composition and inverses of lever permutations") {
  const auto lever = MakeLeverGame();
  const SymmetryMap s12 = SharedLever(lever, {1, 0, 2});
  const SymmetryMap s23 = SharedLever(lever, {0, 2, 1});
  const SymmetryMap cycle = Compose(s12, s23);
  CHECK(cycle == SharedLever(lever, {1, 2, 0}));
  CHECK(Compose(cycle, Inverse(cycle)).IsIdentity());
  CHECK(Inverse(cycle) == Compose(cycle, cycle));
  CHECK(Inverse(s12) == s12);
  CHECK(Inverse(IdentitySymmetry(lever)).IsIdentity());
  CHECK(Compose(IdentitySymmetry(lever), IdentitySymmetry(lever)).IsIdentity());
  SymmetryMap bad = s12;
  bad.act[0].pop_back();
  CHECK_THROWS_AS(Compose(bad, s12), ValidationError);
}

TEST_CASE("group axioms on random triples") {
  for (const auto& name : EnvironmentNames()) {
    const auto m = MakeEnvironment(name);
    Rng rng(17);
    for (int k = 0; k < 30; ++k) {
      const auto a = RandomMap(m, rng);
      const auto b = RandomMap(m, rng);
      const auto c = RandomMap(m, rng);
      CHECK(Compose(Compose(a, b), c) == Compose(a, Compose(b, c)));
      CHECK(Compose(a, Inverse(a)).IsIdentity());
      CHECK(Compose(Inverse(a), a).IsIdentity());
      CHECK(Compose(IdentitySymmetry(m), a) == a);
    }
  }
}

TEST_CASE("transform_policy") {
  const auto lever = MakeLeverGame();
  const SymmetryMap s12 = SharedLever(lever, {1, 0, 2});
  CHECK(TransformPolicy(lever, s12, AlwaysLever(lever, 0)) == AlwaysLever(lever, 1));
  CHECK(TransformPolicy(lever, s12, AlwaysLever(lever, 2)) == AlwaysLever(lever, 2));
  for (const auto& name : EnvironmentNames()) {
    const auto m = MakeEnvironment(name);
    Rng rng(3);
    for (int k = 0; k < 10; ++k) {
      const auto pi = RandomPolicy(m, k);
      const auto a = RandomMap(m, rng);
      const auto b = RandomMap(m, rng);
      const auto lhs = TransformPolicy(m, a, TransformPolicy(m, b, pi));
      CHECK(lhs == TransformPolicy(m, Compose(a, b), pi));
      CHECK(ValidatePolicy(m, lhs).empty());
    }
  }
  // A map sending a legal action to an illegal one is rejected.
  const auto cd = MakeCatDog();
  SymmetryMap phi = IdentitySymmetry(cd);
  std::swap(phi.act[0][catdog::kLightOnAct], phi.act[0][catdog::kAliceNoop]);
  CHECK_THROWS_AS(TransformPolicy(cd, phi, CatDogGrounded(cd)), ValidationError);
  CHECK_FALSE(IsMdpSymmetry(cd, phi));
}

TEST_CASE("Dec-POMDP symmetry checks") {
  const auto lever = MakeLeverGame();
  for (const auto& p : AllPermutations(3, 10)) {
    CHECK(IsMdpSymmetry(lever, SharedLever(lever, p)));
  }
  SymmetryMap actions_only = SharedLever(lever, {1, 0, 2});
  actions_only.obs = {IdentityPerm(3), IdentityPerm(3)};
  CHECK_FALSE(IsMdpSymmetry(lever, actions_only));
  const auto cd = MakeCatDog();
  CHECK_FALSE(IsMdpSymmetry(cd, CatDogPetSwap(cd)));
  CHECK_FALSE(IsMdpSymmetry(cd, CatDogLightSwap(cd)));
}

TEST_CASE("enumerate Dec-POMDP symmetries") {
  const auto lever3 = EnumerateMdpSymmetries(MakeLeverGame());
  CHECK(lever3.size() == 6);
  CHECK(lever3.closed);
  CHECK(lever3.maps[0].IsIdentity());
  CHECK(IsGroup(lever3));
  const auto cd = EnumerateMdpSymmetries(MakeCatDog());
  REQUIRE(cd.size() == 1);
  CHECK(cd.maps[0].IsIdentity());
  CHECK(EnumerateMdpSymmetries(MakeMatrixGame()).size() == 2);
  CHECK(EnumerateMdpSymmetries(MakeLeverGame({2, 2})).size() == 2);
  CHECK_THROWS_AS(EnumerateMdpSymmetries(MakeCatDog(), 100), CapExceeded);
}

TEST_CASE("expected-return symmetry checks") {
  const auto cd = MakeCatDog();
  const std::vector<TabularJointPolicy> pool = {
      EpsilonSoften(cd, CatDogCheapTalk(cd, true), 0.1),
      EpsilonSoften(cd, CatDogCheapTalk(cd, false), 0.1)};
  CHECK(IsErSymmetry(cd, CatDogLightSwap(cd), pool, 1e-9).passed);
  CHECK(IsErSymmetry(cd, CatDogPetSwap(cd), pool, 1e-9).passed);
  // Swapping Bob's guesses together with the light breaks both conventions.
  SymmetryMap three_way = CatDogLightSwap(cd);
  std::swap(three_way.act[1][catdog::kGuessCat], three_way.act[1][catdog::kGuessDog]);
  const ErCheck bad = IsErSymmetry(cd, three_way, pool, 1e-9);
  CHECK_FALSE(bad.passed);
  CHECK(bad.max_gap > 10.0);

  const auto lever = MakeLeverGame();
  std::vector<TabularJointPolicy> lever_pool;
  for (uint64_t s = 0; s < 5; ++s) lever_pool.push_back(RandomPolicy(lever, s));
  for (const auto& phi : EnumerateMdpSymmetries(lever).maps) {
    const ErCheck c = IsErSymmetry(lever, phi, lever_pool, 1e-10);
    CHECK(c.passed);
    CHECK(c.max_gap <= 1e-10);
  }
  // Agent 0 copies what it saw, agent 1 repeats itself: relabeling
  // observations alone desynchronizes the second round.
  const auto copy = Deterministic(lever, [](int agent, int step, const LocalAoh& h) {
    if (step == 0) return 0;
    return agent == 0 ? h.steps[0].second : h.steps[0].first;
  });
  SymmetryMap obs_only = IdentitySymmetry(lever);
  obs_only.obs = {Perm{1, 0, 2}, Perm{1, 0, 2}};
  const ErCheck c = IsErSymmetry(lever, obs_only, {copy}, 1e-9);
  CHECK_FALSE(c.passed);
  CHECK(c.max_gap > 0.5);
}

TEST_CASE("return preservation under Dec-POMDP symmetries") {
  for (const auto& name : EnvironmentNames()) {
    const auto m = MakeEnvironment(name);
    const auto group = EnumerateMdpSymmetries(m);
    for (uint64_t s = 0; s < 50; ++s) {
      const auto pi = RandomPolicy(m, 1000 + s);
      const double j = ExactExpectedReturn(m, pi);
      for (const auto& phi : group.maps) {
        CHECK(std::abs(j - ExactExpectedReturn(m, TransformPolicy(m, phi, pi))) <= 1e-10);
      }
    }
  }
}

TEST_CASE("expected-return symmetries compose") {
  const auto cd = MakeCatDog();
  const std::vector<TabularJointPolicy> pool = {
      EpsilonSoften(cd, CatDogCheapTalk(cd, true), 0.1),
      EpsilonSoften(cd, CatDogCheapTalk(cd, false), 0.1)};
  const SymmetryMap a = CatDogLightSwap(cd);
  const SymmetryMap b = CatDogPetSwap(cd);
  const double tol = 1e-9;
  REQUIRE(IsErSymmetry(cd, a, pool, tol).passed);
  REQUIRE(IsErSymmetry(cd, b, pool, tol).passed);
  CHECK(IsErSymmetry(cd, Compose(a, b), pool, tol).passed);
  CHECK(IsErSymmetry(cd, Compose(b, a), pool, 2 * tol).passed);
}

TEST_CASE("group closure") {
  const auto lever = MakeLeverGame();
  const SymmetryMap s12 = SharedLever(lever, {1, 0, 2});
  const SymmetryMap s23 = SharedLever(lever, {0, 2, 1});
  const auto two = GroupClosure(lever, {{s12}, false});
  CHECK(two.size() == 2);
  CHECK(two.closed);
  const auto six = GroupClosure(lever, {{s12, s23}, false});
  CHECK(six.size() == 6);
  CHECK(IsGroup(six));
  const auto id = GroupClosure(lever, {{IdentitySymmetry(lever)}, false});
  CHECK(id.size() == 1);
  CHECK_THROWS_AS(GroupClosure(lever, {{s12, s23}, false}, 4), CapExceeded);
  const auto cd = MakeCatDog();
  const auto v4 = GroupClosure(cd, {{CatDogLightSwap(cd), CatDogPetSwap(cd)}, false});
  CHECK(v4.size() == 4);
  CHECK(IsGroup(v4));
}

TEST_CASE("orbits and the other-play objective") {
  const auto lever = MakeLeverGame();
  const auto s3 = EnumerateMdpSymmetries(lever);
  CHECK(Orbit(lever, {{IdentitySymmetry(lever)}, true}, AlwaysLever(lever, 0)).size() == 1);
  CHECK(Orbit(lever, s3, AlwaysLever(lever, 0)).size() == 3);
  CHECK(Orbit(lever, s3, AlwaysLever(lever, 0), OrbitWeighting::kGroupElements).size() == 6);
  CHECK(Orbit(lever, s3, TabularJointPolicy::Uniform(lever)).size() == 1);
  CHECK(Orbit(lever, s3, LeverOpOptimal(lever)).size() == 1);

  const SymmetrySet only_id{{IdentitySymmetry(lever)}, true};
  for (uint64_t s = 0; s < 5; ++s) {
    const auto pi = RandomPolicy(lever, s);
    CHECK(OpObjective(lever, only_id, pi) == ExactExpectedReturn(lever, pi));
  }
  CHECK(OpObjective(lever, s3, LeverOpOptimal(lever)) == doctest::Approx(4.0 / 3.0));
  CHECK(OpObjective(lever, s3, AlwaysLever(lever, 0)) == doctest::Approx(2.0 / 3.0));
  CHECK(OpObjective(lever, s3, AlwaysLever(lever, 0), OrbitWeighting::kGroupElements) ==
        doctest::Approx(2.0 / 3.0));
}

TEST_CASE("symmetry breaking gap") {
  const auto m = MakeMatrixGame();
  const auto group = EnumerateMdpSymmetries(m);
  const auto hand = AlwaysLever(m, 0);
  CHECK(SymmetryBreakingGap(m, hand, IdentitySymmetry(m)) == 0.0);
  CHECK(SymmetryBreakingGap(m, hand, group.maps[1]) == 2.0);
  const auto lever = MakeLeverGame();
  for (const auto& phi : EnumerateMdpSymmetries(lever).maps) {
    CHECK(SymmetryBreakingGap(lever, LeverOpOptimal(lever), phi) == doctest::Approx(0.0));
  }
}

TEST_CASE("symmetrizer") {
  const auto lever = MakeLeverGame();
  const auto s3 = EnumerateMdpSymmetries(lever);
  const auto pi = RandomPolicy(lever, 4);
  CHECK(Symmetrize(lever, {{IdentitySymmetry(lever)}, true}, pi) == pi);
  const auto sym = Symmetrize(lever, s3, AlwaysLever(lever, 0));
  for (int a = 0; a < 3; ++a) {
    CHECK(sym.agent(0).Probs(0, 0)[a] == doctest::Approx(1.0 / 3.0));
  }
  const auto once = Symmetrize(lever, s3, pi);
  const auto twice = Symmetrize(lever, s3, once);
  for (int i = 0; i < 2; ++i) {
    for (int t = 0; t < 2; ++t) {
      for (int64_t idx = 0; idx < once.agent(i).NumAohs(t); ++idx) {
        for (int a = 0; a < 3; ++a) {
          CHECK(twice.agent(i).RawProbs(t, idx)[a] ==
                doctest::Approx(once.agent(i).RawProbs(t, idx)[a]).epsilon(1e-15));
        }
      }
    }
  }
}

TEST_CASE("symmetrizer output is invariant bit for bit") {
  const auto cd = MakeCatDog();
  std::vector<std::pair<TabularDecPomdp, SymmetrySet>> cases;
  for (const auto& name : EnvironmentNames()) {
    const auto m = MakeEnvironment(name);
    cases.emplace_back(m, EnumerateMdpSymmetries(m));
  }
  cases.emplace_back(cd, GroupClosure(cd, {{CatDogLightSwap(cd), CatDogPetSwap(cd)}, false}));
  for (const auto& [m, group] : cases) {
    for (uint64_t s = 0; s < 20; ++s) {
      const auto sym = Symmetrize(m, group, RandomPolicy(m, 500 + s));
      for (const auto& phi : group.maps) CHECK(TransformPolicy(m, phi, sym) == sym);
    }
  }
}

TEST_CASE("symmetry set serialization") {
  const auto lever = MakeLeverGame();
  const auto s3 = EnumerateMdpSymmetries(lever);
  const Json j = Json::parse(SymmetrySetToJson(lever, s3).dump());
  const SymmetrySet back = SymmetrySetFromJson(lever, j);
  CHECK(back.maps == s3.maps);
  CHECK(back.closed);
  CHECK_THROWS_AS(SymmetrySetFromJson(MakeLeverGame({2, 2}), j), ValidationError);
}

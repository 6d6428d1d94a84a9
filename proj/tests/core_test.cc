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
#include <string>

#include "ersym/aoh.h"
#include "ersym/envs.h"
#include "ersym/error.h"
#include "ersym/evaluate.h"
#include "ersym/io.h"
#include "ersym/model.h"
#include "ersym/policy.h"
#include "test_util.h"

using namespace ersym;
using namespace ersym::testing;

namespace {

// Direct sum over both rounds of the two-round lever game, written without
// the tree evaluator.
double LeverTwoRoundOracle(const TabularDecPomdp& lever,
                           const TabularJointPolicy& pi) {
  const int L = lever.num_actions(0);
  AohSpace s0(lever, 0), s1(lever, 1);
  double j = 0.0;
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) {
      const double p = pi.agent(0).Probs(0, 0)[a] * pi.agent(1).Probs(0, 0)[b];
      j += p * (a == b);
      const int64_t h0 = s0.Encode({-1, {{a, b}}});
      const int64_t h1 = s1.Encode({-1, {{b, a}}});
      for (int c = 0; c < L; ++c) {
        for (int d = 0; d < L; ++d) {
          j += p * pi.agent(0).Probs(1, h0)[c] * pi.agent(1).Probs(1, h1)[d] *
               (c == d);
        }
      }
    }
  }
  return j;
}

}  // namespace

TEST_CASE("validate_model accepts the bundled environments") {
  for (const auto& name : EnvironmentNames()) {
    CHECK(ValidateModel(MakeEnvironment(name)).empty());
  }
}

TEST_CASE("validate_model names a bad transition row") {
  TabularDecPomdp m = MakeLeverGame();
  m.transition[4] = 0.9;
  const auto v = ValidateModel(m);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("joint_action=4") != std::string::npos);
}

TEST_CASE("validate_model rejects a zero horizon") {
  TabularDecPomdp m = MakeLeverGame();
  m.horizon = 0;
  const auto v = ValidateModel(m);
  bool found = false;
  for (const auto& line : v) found = found || line == "horizon must be >= 1";
  CHECK(found);
  CHECK_THROWS_AS(CheckModel(m), ValidationError);
}

TEST_CASE("lever game values") {
  const auto lever = MakeLeverGame();
  const auto uniform = TabularJointPolicy::Uniform(lever);
  CHECK(ExactExpectedReturn(lever, uniform) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(LeverTwoRoundOracle(lever, uniform) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  const auto op = LeverOpOptimal(lever);
  CHECK(ExactExpectedReturn(lever, op) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(ExactExpectedReturn(lever, AlwaysLever(lever, 2)) == 2.0);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pi = RandomPolicy(lever, seed);
    CHECK(ExactExpectedReturn(lever, pi) ==
          doctest::Approx(LeverTwoRoundOracle(lever, pi)).epsilon(1e-13));
  }
}

TEST_CASE("cat/dog values") {
  const auto cd = MakeCatDog();
  CHECK(ExactExpectedReturn(cd, CatDogAliceBails(cd)) == doctest::Approx(1.0));
  CHECK(ExactExpectedReturn(cd, CatDogGrounded(cd)) == doctest::Approx(5.5));
  const auto on = CatDogCheapTalk(cd, true);
  const auto off = CatDogCheapTalk(cd, false);
  CHECK(ExactExpectedReturn(cd, on) == doctest::Approx(10.505));
  CHECK(ExactExpectedReturn(cd, off) == doctest::Approx(10.505));
  CHECK(CrossPlay(cd, on, off) == doctest::Approx(-9.995));
}

TEST_CASE("matrix game values") {
  const auto m = MakeMatrixGame();
  const auto hand = AlwaysLever(m, 0);
  const auto fist = AlwaysLever(m, 1);
  CHECK(ExactExpectedReturn(m, hand) == 1.0);
  CHECK(CrossPlay(m, hand, fist) == -1.0);
  CHECK(ExactExpectedReturn(m, TabularJointPolicy::Uniform(m)) == 0.0);
}

TEST_CASE("missing policy entry is an error") {
  const auto lever = MakeLeverGame();
  auto pi = AlwaysLever(lever, 0);
  AohSpace space(lever, 0);
  pi.mutable_agent(0).Clear(1, space.Encode({-1, {{0, 0}}}));
  CHECK_THROWS_AS(ExactExpectedReturn(lever, pi), DomainError);
  CHECK_THROWS_AS(Rollout(lever, pi, 1), DomainError);
  // Unreached entries may be missing.
  pi = AlwaysLever(lever, 0);
  pi.mutable_agent(0).Clear(1, space.Encode({-1, {{1, 1}}}));
  CHECK(ExactExpectedReturn(lever, pi) == 2.0);
}

TEST_CASE("leaf cap") {
  const auto lever = MakeLeverGame();
  const auto uniform = TabularJointPolicy::Uniform(lever);
  CHECK_THROWS_AS(ExactExpectedReturn(lever, uniform, 10), CapExceeded);
  CHECK_NOTHROW(ExactExpectedReturn(lever, uniform, 81));
}

TEST_CASE("mc estimate") {
  const auto lever = MakeLeverGame();
  const auto uniform = TabularJointPolicy::Uniform(lever);
  const McEstimate est = McExpectedReturn(lever, uniform, 100000, 7);
  CHECK(std::abs(est.estimate - 2.0 / 3.0) <= 3 * est.std_error);
  const McEstimate again = McExpectedReturn(lever, uniform, 100000, 7);
  CHECK(est.estimate == again.estimate);
  CHECK(est.std_error == again.std_error);
  const McEstimate det = McExpectedReturn(lever, AlwaysLever(lever, 1), 50, 3);
  CHECK(det.estimate == 2.0);
  CHECK(det.std_error == 0.0);
  CHECK_THROWS_AS(McExpectedReturn(lever, uniform, 0, 1), ValidationError);
}

TEST_CASE("mc agrees with exact evaluation across seeds") {
  const auto cd = MakeCatDog();
  const auto pi = RandomPolicy(cd, 99);
  const double exact = ExactExpectedReturn(cd, pi);
  int inside = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const McEstimate est = McExpectedReturn(cd, pi, 100000, 1000 + seed);
    if (std::abs(est.estimate - exact) <= 4 * est.std_error) ++inside;
  }
  CHECK(inside >= 99);
}

TEST_CASE("exact return is linear in a mixture at one decision point") {
  const auto cd = MakeCatDog();
  const auto base = RandomPolicy(cd, 5);
  auto other = base;
  AohSpace bob(cd, 1);
  const int64_t idx = bob.Encode({-1, {{catdog::kBobNoop, catdog::kSeesLightOn}}});
  other.mutable_agent(1).Set(1, idx, OneHot(4, catdog::kGuessDog));
  auto mixed = base;
  const double alpha = 0.3;
  std::vector<double> p(4);
  for (int a = 0; a < 4; ++a) {
    p[a] = alpha * base.agent(1).Probs(1, idx)[a] +
           (1 - alpha) * other.agent(1).Probs(1, idx)[a];
  }
  mixed.mutable_agent(1).Set(1, idx, p);
  CHECK(ExactExpectedReturn(cd, mixed) ==
        doctest::Approx(alpha * ExactExpectedReturn(cd, base) +
                        (1 - alpha) * ExactExpectedReturn(cd, other))
            .epsilon(1e-12));
}

TEST_CASE("epsilon softening") {
  const auto lever = MakeLeverGame();
  const auto soft = EpsilonSoften(lever, AlwaysLever(lever, 0), 0.3);
  const auto p = soft.agent(0).Probs(0, 0);
  CHECK(p[0] == doctest::Approx(0.8));
  CHECK(p[1] == doctest::Approx(0.1));
  CHECK(p[2] == doctest::Approx(0.1));
  const auto uniform = TabularJointPolicy::Uniform(lever);
  const auto u2 = EpsilonSoften(lever, uniform, 0.37);
  for (int a = 0; a < 3; ++a) {
    CHECK(u2.agent(1).Probs(1, 4)[a] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(EpsilonSoften(lever, uniform, 0.0), ValidationError);
  CHECK_THROWS_AS(EpsilonSoften(lever, uniform, 1.0), ValidationError);
}

TEST_CASE("epsilon softening floor holds at every history") {
  for (const auto& name : EnvironmentNames()) {
    const auto m = MakeEnvironment(name);
    for (uint64_t seed = 0; seed < 5; ++seed) {
      const double eps = 0.05 + 0.1 * seed;
      const auto soft = EpsilonSoften(m, RandomPolicy(m, seed), eps);
      CHECK(ValidatePolicy(m, soft).empty());
      for (int i = 0; i < m.num_agents(); ++i) {
        const auto& local = soft.agent(i);
        for (int t = 0; t < m.horizon; ++t) {
          const auto legal = m.LegalActions(i, t);
          for (int64_t idx = 0; idx < local.NumAohs(t); ++idx) {
            if (!local.IsDefined(t, idx)) continue;
            for (int a : legal) {
              CHECK(local.RawProbs(t, idx)[a] >= eps / legal.size() - 1e-15);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("rollouts") {
  const auto lever = MakeLeverGame();
  const auto uniform = TabularJointPolicy::Uniform(lever);
  const Trajectory t = Rollout(lever, uniform, 11);
  CHECK(t.steps.size() == 2);
  double g = 0.0;
  for (const auto& s : t.steps) g += s.reward;
  CHECK(t.realized_return == g);
  const Trajectory again = Rollout(lever, uniform, 11);
  CHECK(again.realized_return == t.realized_return);
  CHECK(again.steps.size() == t.steps.size());
  for (size_t k = 0; k < t.steps.size(); ++k) {
    CHECK(again.steps[k].joint_action == t.steps[k].joint_action);
  }
  const auto cd = MakeCatDog();
  const Trajectory bail = Rollout(cd, CatDogAliceBails(cd), 3);
  CHECK(bail.steps.size() == 1);
  CHECK(bail.realized_return == 1.0);
}

TEST_CASE("cross play properties") {
  const auto cd = MakeCatDog();
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = RandomPolicy(cd, seed);
    const auto b = RandomPolicy(cd, seed + 100);
    CHECK(CrossPlay(cd, a, b) == CrossPlay(cd, b, a));
    CHECK(CrossPlay(cd, a, a) == doctest::Approx(ExactExpectedReturn(cd, a)).epsilon(1e-15));
  }
  TabularDecPomdp three = MakeEmptyModel("three", {"s"}, {{"a"}, {"a"}, {"a"}},
                                         {{"o"}, {"o"}, {"o"}}, 1);
  three.transition = {1.0};
  three.initial_dist = {1.0};
  for (auto& row : three.observation) row = {1.0};
  CheckModel(three);
  const auto u = TabularJointPolicy::Uniform(three);
  CHECK_THROWS_AS(CrossPlay(three, u, u), ValidationError);
}

TEST_CASE("policy and model serialization round trip") {
  const auto cd = MakeCatDog();
  const auto pi = EpsilonSoften(cd, RandomPolicy(cd, 3), 0.1);
  const Json j = Json::parse(PolicyToJson(cd, pi).dump());
  CHECK(PolicyFromJson(cd, j) == pi);
  CHECK_THROWS_AS(PolicyFromJson(MakeLeverGame(), j), ValidationError);
  const TabularDecPomdp back = ModelFromJson(Json::parse(ModelToJson(cd).dump()));
  CHECK(ModelFingerprint(back) == ModelFingerprint(cd));
  CHECK(ModelFingerprint(cd) != ModelFingerprint(MakeLeverGame()));
  CHECK(ModelFingerprint(cd).size() == 16);
}

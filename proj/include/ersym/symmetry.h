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

#ifndef ERSYM_SYMMETRY_H_
#define ERSYM_SYMMETRY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ersym/model.h"
#include "ersym/permutation.h"
#include "ersym/policy.h"

namespace ersym {

// Relabeling of every agent's actions and observations; the state map is
// the identity. Maps are ordered lexicographically by
// (act[0], obs[0], act[1], obs[1], ...), so the identity sorts first.
struct SymmetryMap {
  std::vector<Perm> obs;
  std::vector<Perm> act;

  int num_agents() const { return static_cast<int>(act.size()); }
  bool IsIdentity() const;
  std::string ToString(const TabularDecPomdp& model) const;

  bool operator==(const SymmetryMap&) const = default;
  bool operator<(const SymmetryMap& other) const;
};

struct SymmetrySet {
  std::vector<SymmetryMap> maps;
  bool closed = false;

  int size() const { return static_cast<int>(maps.size()); }
};

SymmetryMap IdentitySymmetry(const TabularDecPomdp& model);
// (phi1 o phi2)(x) = phi1(phi2(x)) componentwise.
SymmetryMap Compose(const SymmetryMap& phi1, const SymmetryMap& phi2);
SymmetryMap Inverse(const SymmetryMap& phi);

// Empty if phi has the right shape, consists of permutations and maps legal
// actions to legal actions at every step.
std::vector<std::string> ValidateSymmetry(const TabularDecPomdp& model,
                                          const SymmetryMap& phi);
void CheckSymmetry(const TabularDecPomdp& model, const SymmetryMap& phi);

// phi(pi)(a | tau) = pi(phi^-1(a) | phi^-1(tau)) for every agent. Histories
// whose preimage has no entry stay undefined.
TabularJointPolicy TransformPolicy(const TabularDecPomdp& model,
                                   const SymmetryMap& phi,
                                   const TabularJointPolicy& policy);

// Checks T(s' | s, phi(a)) = T(s' | s, a), U(phi(o) | s', phi(a)) =
// U(o | s', a), R(s', phi(a)) = R(s', a) and the initial observation
// distribution, within `tol`, over joint actions that are legal at some
// step. Observation rows of terminal states and transitions out of terminal
// states are never used and are not checked.
bool IsMdpSymmetry(const TabularDecPomdp& model, const SymmetryMap& phi,
                   double tol = 1e-9);

inline constexpr int64_t kDefaultSymmetryBudget = 1'000'000;

// Legality-preserving permutations of one agent's actions, in lexicographic
// order.
std::vector<Perm> LegalActionPermutations(const TabularDecPomdp& model,
                                          int agent, int64_t cap);

// Every legality-preserving factored map (shared across agents when
// model.shared_symmetries is set), sorted. Throws CapExceeded beyond
// `budget` maps.
std::vector<SymmetryMap> AllFactoredMaps(const TabularDecPomdp& model,
                                         int64_t budget = kDefaultSymmetryBudget);

// Every factored map passing IsMdpSymmetry, sorted. Respects
// model.shared_symmetries. Throws CapExceeded if more than `budget`
// candidates would be checked.
SymmetrySet EnumerateMdpSymmetries(const TabularDecPomdp& model,
                                   int64_t budget = kDefaultSymmetryBudget,
                                   double tol = 1e-9);

struct ErCheck {
  bool passed = false;
  double max_gap = 0.0;
};
// max over the pool of |J(pi) - J(phi(pi))|, exact.
ErCheck IsErSymmetry(const TabularDecPomdp& model, const SymmetryMap& phi,
                     const std::vector<TabularJointPolicy>& pool,
                     double tol);

inline constexpr int kDefaultClosureCap = 100'000;

// Smallest set closed under composition and inverses containing the input
// and the identity. Sorted, closed flag set.
SymmetrySet GroupClosure(const TabularDecPomdp& model, const SymmetrySet& set,
                         int cap = kDefaultClosureCap);
// True if the set contains the identity and is closed under composition and
// inverses.
bool IsGroup(const SymmetrySet& set);

enum class OrbitWeighting { kDistinctPolicies, kGroupElements };

// {phi(pi) : phi in closure(set)} with exact-equality deduplication, in
// group order. With kGroupElements every element contributes, duplicates
// included.
std::vector<TabularJointPolicy> Orbit(
    const TabularDecPomdp& model, const SymmetrySet& set,
    const TabularJointPolicy& policy,
    OrbitWeighting weighting = OrbitWeighting::kDistinctPolicies);

// Mean over the orbit of XP(pi, pi~).
double OpObjective(const TabularDecPomdp& model, const SymmetrySet& set,
                   const TabularJointPolicy& policy,
                   OrbitWeighting weighting = OrbitWeighting::kDistinctPolicies);

// J(pi) - XP(pi, phi(pi)).
double SymmetryBreakingGap(const TabularDecPomdp& model,
                           const TabularJointPolicy& policy,
                           const SymmetryMap& phi);

// Averages every entry over the distinct orbit members. Each average sums
// the sorted member values, so the result is invariant under every group
// element bit for bit.
TabularJointPolicy Symmetrize(const TabularDecPomdp& model,
                              const SymmetrySet& set,
                              const TabularJointPolicy& policy);

}  // namespace ersym

#endif  // ERSYM_SYMMETRY_H_

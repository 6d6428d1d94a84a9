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

#include "ersym/symmetry.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "ersym/aoh.h"
#include "ersym/error.h"
#include "ersym/evaluate.h"

namespace ersym {
namespace {

std::string PermToString(const Perm& p) {
  std::ostringstream out;
  out << '[';
  for (size_t x = 0; x < p.size(); ++x) out << (x ? "," : "") << p[x];
  out << ']';
  return out.str();
}

int MapJointAction(const TabularDecPomdp& model, const SymmetryMap& phi,
                   int joint_action) {
  std::vector<int> local = model.DecodeJointAction(joint_action);
  for (int i = 0; i < model.num_agents(); ++i) local[i] = phi.act[i][local[i]];
  return model.EncodeJointAction(local);
}

bool JointActionLegalSomewhere(const TabularDecPomdp& model, int joint_action) {
  const std::vector<int> local = model.DecodeJointAction(joint_action);
  for (int t = 0; t < model.horizon; ++t) {
    bool ok = true;
    for (int i = 0; i < model.num_agents() && ok; ++i) {
      ok = model.IsLegal(i, t, local[i]);
    }
    if (ok) return true;
  }
  return false;
}

// Index of phi^-1(tau) for every history tau of one agent, per step.
std::vector<std::vector<int64_t>> PreimageIndex(const AohSpace& space,
                                                const Perm& inv_act,
                                                const Perm& inv_obs) {
  std::vector<std::vector<int64_t>> pre(space.horizon());
  if (space.horizon() == 0) return pre;
  pre[0].resize(space.Count(0));
  if (space.has_initial_observation()) {
    for (int o = 0; o < space.num_observations(); ++o) {
      pre[0][o] = space.Root(inv_obs[o]);
    }
  } else {
    pre[0][0] = 0;
  }
  for (int t = 1; t < space.horizon(); ++t) {
    pre[t].resize(space.Count(t));
    int64_t idx = 0;
    for (int64_t prefix = 0; prefix < space.Count(t - 1); ++prefix) {
      for (int a = 0; a < space.num_actions(); ++a) {
        for (int o = 0; o < space.num_observations(); ++o) {
          pre[t][idx++] = space.Extend(pre[t - 1][prefix], inv_act[a], inv_obs[o]);
        }
      }
    }
  }
  return pre;
}

}  // namespace

bool SymmetryMap::IsIdentity() const {
  for (const auto& p : act) {
    if (!IsIdentityPerm(p)) return false;
  }
  for (const auto& p : obs) {
    if (!IsIdentityPerm(p)) return false;
  }
  return true;
}

bool SymmetryMap::operator<(const SymmetryMap& other) const {
  const size_t n = std::min(act.size(), other.act.size());
  for (size_t i = 0; i < n; ++i) {
    if (act[i] != other.act[i]) return act[i] < other.act[i];
    if (obs[i] != other.obs[i]) return obs[i] < other.obs[i];
  }
  return act.size() < other.act.size();
}

std::string SymmetryMap::ToString(const TabularDecPomdp& model) const {
  std::ostringstream out;
  for (int i = 0; i < num_agents(); ++i) {
    if (i) out << "; ";
    out << "agent " << i << ": act " << PermToString(act[i]) << " obs "
        << PermToString(obs[i]);
    if (i < model.num_agents()) {
      bool first = true;
      for (int a = 0; a < model.num_actions(i); ++a) {
        if (act[i][a] > a && act[i][act[i][a]] == a) {
          out << (first ? " (" : ", ") << model.actions[i][a] << "<->"
              << model.actions[i][act[i][a]];
          first = false;
        }
      }
      for (int o = 0; o < model.num_observations(i); ++o) {
        if (obs[i][o] > o && obs[i][obs[i][o]] == o) {
          out << (first ? " (" : ", ") << model.observations[i][o] << "<->"
              << model.observations[i][obs[i][o]];
          first = false;
        }
      }
      if (!first) out << ')';
    }
  }
  return out.str();
}

SymmetryMap IdentitySymmetry(const TabularDecPomdp& model) {
  SymmetryMap phi;
  for (int i = 0; i < model.num_agents(); ++i) {
    phi.act.push_back(IdentityPerm(model.num_actions(i)));
    phi.obs.push_back(IdentityPerm(model.num_observations(i)));
  }
  return phi;
}

SymmetryMap Compose(const SymmetryMap& phi1, const SymmetryMap& phi2) {
  if (phi1.act.size() != phi2.act.size() || phi1.obs.size() != phi2.obs.size()) {
    throw ValidationError("cannot compose symmetries of different shapes");
  }
  SymmetryMap out;
  for (size_t i = 0; i < phi1.act.size(); ++i) {
    out.act.push_back(ComposePerm(phi1.act[i], phi2.act[i]));
    out.obs.push_back(ComposePerm(phi1.obs[i], phi2.obs[i]));
  }
  return out;
}

SymmetryMap Inverse(const SymmetryMap& phi) {
  SymmetryMap out;
  for (size_t i = 0; i < phi.act.size(); ++i) {
    out.act.push_back(InversePerm(phi.act[i]));
    out.obs.push_back(InversePerm(phi.obs[i]));
  }
  return out;
}

std::vector<std::string> ValidateSymmetry(const TabularDecPomdp& model,
                                          const SymmetryMap& phi) {
  std::vector<std::string> v;
  if (phi.num_agents() != model.num_agents() ||
      static_cast<int>(phi.obs.size()) != model.num_agents()) {
    v.push_back("symmetry covers " + std::to_string(phi.num_agents()) +
                " agents, model has " + std::to_string(model.num_agents()));
    return v;
  }
  for (int i = 0; i < model.num_agents(); ++i) {
    const std::string who = "agent " + std::to_string(i);
    if (static_cast<int>(phi.act[i].size()) != model.num_actions(i) ||
        !IsPermutation(phi.act[i])) {
      v.push_back(who + " action map is not a permutation of its actions");
      continue;
    }
    if (static_cast<int>(phi.obs[i].size()) != model.num_observations(i) ||
        !IsPermutation(phi.obs[i])) {
      v.push_back(who + " observation map is not a permutation of its observations");
      continue;
    }
    for (int t = 0; t < model.horizon; ++t) {
      for (int a = 0; a < model.num_actions(i); ++a) {
        if (model.IsLegal(i, t, a) != model.IsLegal(i, t, phi.act[i][a])) {
          v.push_back(who + " action map does not preserve legality at step " +
                      std::to_string(t));
          t = model.horizon;
          break;
        }
      }
    }
  }
  return v;
}

void CheckSymmetry(const TabularDecPomdp& model, const SymmetryMap& phi) {
  auto v = ValidateSymmetry(model, phi);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "invalid symmetry:";
  for (const auto& line : v) msg << "\n  " << line;
  throw ValidationError(msg.str());
}

TabularJointPolicy TransformPolicy(const TabularDecPomdp& model,
                                   const SymmetryMap& phi,
                                   const TabularJointPolicy& policy) {
  CheckSymmetry(model, phi);
  if (policy.num_agents() != model.num_agents()) {
    throw ValidationError("policy does not match the model");
  }
  std::vector<LocalPolicy> agents;
  for (int i = 0; i < model.num_agents(); ++i) {
    const AohSpace space(model, i);
    const Perm inv_act = InversePerm(phi.act[i]);
    const auto pre = PreimageIndex(space, inv_act, InversePerm(phi.obs[i]));
    const LocalPolicy& src = policy.agent(i);
    LocalPolicy dst(model, i);
    const int na = model.num_actions(i);
    std::vector<double> probs(na);
    for (int t = 0; t < model.horizon; ++t) {
      for (int64_t idx = 0; idx < space.Count(t); ++idx) {
        const int64_t from = pre[t][idx];
        if (!src.IsDefined(t, from)) continue;
        const double* p = src.RawProbs(t, from);
        for (int a = 0; a < na; ++a) probs[a] = p[inv_act[a]];
        dst.Set(t, idx, probs);
      }
    }
    agents.push_back(std::move(dst));
  }
  return TabularJointPolicy(std::move(agents));
}

bool IsMdpSymmetry(const TabularDecPomdp& model, const SymmetryMap& phi,
                   double tol) {
  if (!ValidateSymmetry(model, phi).empty()) return false;
  const int S = model.num_states();
  const int J = model.num_joint_actions();
  for (int i = 0; i < model.num_agents(); ++i) {
    if (!model.HasInitialObservation(i)) continue;
    for (int s = 0; s < S; ++s) {
      for (int o = 0; o < model.num_observations(i); ++o) {
        if (std::abs(model.InitialObservation(i, s, phi.obs[i][o]) -
                     model.InitialObservation(i, s, o)) > tol) {
          return false;
        }
      }
    }
  }
  for (int ja = 0; ja < J; ++ja) {
    if (!JointActionLegalSomewhere(model, ja)) continue;
    const int mapped = MapJointAction(model, phi, ja);
    for (int s2 = 0; s2 < S; ++s2) {
      if (std::abs(model.Reward(s2, mapped) - model.Reward(s2, ja)) > tol) {
        return false;
      }
      for (int s = 0; s < S; ++s) {
        if (model.IsTerminal(s)) continue;
        if (std::abs(model.Transition(s, mapped, s2) -
                     model.Transition(s, ja, s2)) > tol) {
          return false;
        }
      }
      if (model.IsTerminal(s2)) continue;
      for (int i = 0; i < model.num_agents(); ++i) {
        for (int o = 0; o < model.num_observations(i); ++o) {
          if (std::abs(model.Observation(i, s2, mapped, phi.obs[i][o]) -
                       model.Observation(i, s2, ja, o)) > tol) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

std::vector<Perm> LegalActionPermutations(const TabularDecPomdp& model,
                                          int agent, int64_t cap) {
  std::vector<Perm> out;
  for (Perm& p : AllPermutations(model.num_actions(agent), cap)) {
    bool ok = true;
    for (int t = 0; t < model.horizon && ok; ++t) {
      for (int a = 0; a < model.num_actions(agent) && ok; ++a) {
        ok = model.IsLegal(agent, t, a) == model.IsLegal(agent, t, p[a]);
      }
    }
    if (ok) out.push_back(std::move(p));
  }
  return out;
}

std::vector<SymmetryMap> AllFactoredMaps(const TabularDecPomdp& model,
                                         int64_t budget) {
  const int n = model.num_agents();
  if (model.shared_symmetries && !model.AgentsShareSpaces()) {
    throw ValidationError("shared symmetries require identical agent spaces");
  }
  const int distinct = model.shared_symmetries ? 1 : n;
  std::vector<std::vector<Perm>> acts(distinct);
  std::vector<std::vector<Perm>> obss(distinct);
  double total = 1.0;
  for (int i = 0; i < distinct; ++i) {
    acts[i] = LegalActionPermutations(model, i, budget);
    obss[i] = AllPermutations(model.num_observations(i), budget);
    total *= static_cast<double>(acts[i].size()) * static_cast<double>(obss[i].size());
    if (total > static_cast<double>(budget)) {
      throw CapExceeded("symmetry enumeration exceeds the budget of " +
                        std::to_string(budget) + " candidates");
    }
  }
  std::vector<SymmetryMap> out;
  SymmetryMap phi = IdentitySymmetry(model);
  std::vector<size_t> digit(2 * distinct, 0);
  while (true) {
    for (int i = 0; i < n; ++i) {
      const int src = model.shared_symmetries ? 0 : i;
      phi.act[i] = acts[src][digit[2 * src]];
      phi.obs[i] = obss[src][digit[2 * src + 1]];
    }
    out.push_back(phi);
    int d = 2 * distinct - 1;
    for (; d >= 0; --d) {
      const size_t limit = (d % 2 == 0) ? acts[d / 2].size() : obss[d / 2].size();
      if (++digit[d] < limit) break;
      digit[d] = 0;
    }
    if (d < 0) break;
  }
  return out;
}

SymmetrySet EnumerateMdpSymmetries(const TabularDecPomdp& model, int64_t budget,
                                   double tol) {
  SymmetrySet out;
  for (auto& phi : AllFactoredMaps(model, budget)) {
    if (IsMdpSymmetry(model, phi, tol)) out.maps.push_back(std::move(phi));
  }
  out.closed = true;
  return out;
}

ErCheck IsErSymmetry(const TabularDecPomdp& model, const SymmetryMap& phi,
                     const std::vector<TabularJointPolicy>& pool, double tol) {
  if (pool.empty()) throw ValidationError("policy pool is empty");
  ErCheck check;
  for (const auto& pi : pool) {
    const double gap = std::abs(ExactExpectedReturn(model, pi) -
                                ExactExpectedReturn(model, TransformPolicy(model, phi, pi)));
    check.max_gap = std::max(check.max_gap, gap);
  }
  check.passed = check.max_gap <= tol;
  return check;
}

SymmetrySet GroupClosure(const TabularDecPomdp& model, const SymmetrySet& set,
                         int cap) {
  std::vector<SymmetryMap> generators;
  for (const auto& phi : set.maps) {
    CheckSymmetry(model, phi);
    generators.push_back(phi);
  }
  const SymmetryMap id = IdentitySymmetry(model);
  std::set<SymmetryMap> group{id};
  std::deque<SymmetryMap> frontier{id};
  while (!frontier.empty()) {
    const SymmetryMap e = frontier.front();
    frontier.pop_front();
    for (const auto& g : generators) {
      SymmetryMap c = Compose(g, e);
      if (group.insert(c).second) {
        if (static_cast<int>(group.size()) > cap) {
          throw CapExceeded("group closure exceeds " + std::to_string(cap) +
                            " elements");
        }
        frontier.push_back(std::move(c));
      }
    }
  }
  SymmetrySet out;
  out.maps.assign(group.begin(), group.end());
  out.closed = true;
  return out;
}

bool IsGroup(const SymmetrySet& set) {
  if (set.maps.empty()) return false;
  std::set<SymmetryMap> members(set.maps.begin(), set.maps.end());
  if (members.size() != set.maps.size()) return false;
  bool has_identity = false;
  for (const auto& a : set.maps) {
    if (a.IsIdentity()) has_identity = true;
    if (!members.count(Inverse(a))) return false;
    for (const auto& b : set.maps) {
      if (!members.count(Compose(a, b))) return false;
    }
  }
  return has_identity;
}

std::vector<TabularJointPolicy> Orbit(const TabularDecPomdp& model,
                                      const SymmetrySet& set,
                                      const TabularJointPolicy& policy,
                                      OrbitWeighting weighting) {
  const SymmetrySet group = set.closed ? set : GroupClosure(model, set);
  std::vector<TabularJointPolicy> out;
  for (const auto& phi : group.maps) {
    TabularJointPolicy image = TransformPolicy(model, phi, policy);
    if (weighting == OrbitWeighting::kDistinctPolicies &&
        std::find(out.begin(), out.end(), image) != out.end()) {
      continue;
    }
    out.push_back(std::move(image));
  }
  return out;
}

double OpObjective(const TabularDecPomdp& model, const SymmetrySet& set,
                   const TabularJointPolicy& policy, OrbitWeighting weighting) {
  if (model.num_agents() != 2) {
    throw ValidationError("other-play requires a two-agent model");
  }
  const auto orbit = Orbit(model, set, policy, weighting);
  double total = 0.0;
  for (const auto& other : orbit) total += CrossPlay(model, policy, other);
  return total / static_cast<double>(orbit.size());
}

double SymmetryBreakingGap(const TabularDecPomdp& model,
                           const TabularJointPolicy& policy,
                           const SymmetryMap& phi) {
  if (model.num_agents() != 2) {
    throw ValidationError("symmetry breaking gap requires a two-agent model");
  }
  return ExactExpectedReturn(model, policy) -
         CrossPlay(model, policy, TransformPolicy(model, phi, policy));
}

TabularJointPolicy Symmetrize(const TabularDecPomdp& model,
                              const SymmetrySet& set,
                              const TabularJointPolicy& policy) {
  const auto orbit = Orbit(model, set, policy);
  const size_t k = orbit.size();
  TabularJointPolicy out = policy;
  std::vector<double> values(k);
  for (int i = 0; i < model.num_agents(); ++i) {
    LocalPolicy& dst = out.mutable_agent(i);
    const int na = dst.num_actions();
    std::vector<double> probs(na);
    for (int t = 0; t < dst.horizon(); ++t) {
      for (int64_t idx = 0; idx < dst.NumAohs(t); ++idx) {
        bool defined = true;
        for (const auto& member : orbit) {
          defined = defined && member.agent(i).IsDefined(t, idx);
        }
        if (!defined) {
          dst.Clear(t, idx);
          continue;
        }
        for (int a = 0; a < na; ++a) {
          for (size_t m = 0; m < k; ++m) {
            values[m] = orbit[m].agent(i).RawProbs(t, idx)[a];
          }
          std::sort(values.begin(), values.end());
          double sum = 0.0;
          for (double v : values) sum += v;
          probs[a] = sum / static_cast<double>(k);
        }
        dst.Set(t, idx, probs);
      }
    }
  }
  return out;
}

}  // namespace ersym

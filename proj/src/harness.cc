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

#include "ersym/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <utility>

#include "ersym/error.h"
#include "ersym/evaluate.h"
#include "ersym/rng.h"

namespace ersym {
namespace {

constexpr double kCompatTol = 1e-9;
constexpr size_t kKeptCandidates = 20;

std::string PhaseContext(int agent, const char* phase) {
  return "agent " + std::to_string(agent) + ", " + phase + ": ";
}

// Runs f and re-raises library errors with the agent and phase prepended,
// keeping the error type.
template <typename F>
auto InPhase(int agent, const char* phase, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(PhaseContext(agent, phase) + e.what());
  } catch (const DomainError& e) {
    throw DomainError(PhaseContext(agent, phase) + e.what());
  } catch (const CapExceeded& e) {
    throw CapExceeded(PhaseContext(agent, phase) + e.what());
  } catch (const DivergenceError& e) {
    throw DivergenceError(PhaseContext(agent, phase) + e.what());
  } catch (const Error& e) {
    throw Error(PhaseContext(agent, phase) + e.what());
  }
}

DiscoveryResult Discover(const TabularDecPomdp& model, const PopulationConfig& cfg,
                         const std::vector<TabularJointPolicy>& pool, uint64_t seed) {
  DiscoveryConfig dc = cfg.discovery;
  dc.seed = seed;
  dc.top_l = cfg.l;
  switch (cfg.algorithm) {
    case DiscoveryAlgorithm::kExhaustive:
      return SearchExhaustive(model, pool, cfg.l, dc);
    case DiscoveryAlgorithm::kAlg1:
      return LearnAlg1(model, pool, dc);
    case DiscoveryAlgorithm::kAlg2: {
      DiscoveryResult first = LearnAlg1(model, pool, dc);
      if (first.selected.maps.empty()) {
        first.warnings.push_back("no unregularized symmetries to compose with; skipping regularized pass");
        return first;
      }
      DiscoveryResult second = LearnAlg2(model, pool, first.selected, dc);
      second.warnings.insert(second.warnings.begin(), first.warnings.begin(),
                             first.warnings.end());
      return second;
    }
    case DiscoveryAlgorithm::kAlg3:
      return LearnAlg3(model, pool, dc);
  }
  throw ValidationError("unknown discovery algorithm");
}

SymmetrySet DeploySet(const TabularDecPomdp& model, const PopulationConfig& cfg,
                      const SymmetrySet& er_set, const SymmetrySet& mdp_set) {
  switch (cfg.deploy) {
    case DeployMode::kRaw:
      return SymmetrySet{{IdentitySymmetry(model)}, true};
    case DeployMode::kSymmetrizedEr:
      return GroupClosure(model, er_set);
    case DeployMode::kSymmetrizedMdp:
      return mdp_set;
  }
  throw ValidationError("unknown deploy mode");
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int Find(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

Json VectorJson(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string DiscoveryAlgorithmName(DiscoveryAlgorithm a) {
  switch (a) {
    case DiscoveryAlgorithm::kAlg1: return "alg1";
    case DiscoveryAlgorithm::kAlg2: return "alg2";
    case DiscoveryAlgorithm::kAlg3: return "alg3";
    case DiscoveryAlgorithm::kExhaustive: return "exhaustive";
  }
  return "?";
}

DiscoveryAlgorithm ParseDiscoveryAlgorithm(const std::string& name) {
  if (name == "alg1" || name == "1") return DiscoveryAlgorithm::kAlg1;
  if (name == "alg2" || name == "2") return DiscoveryAlgorithm::kAlg2;
  if (name == "alg3" || name == "3") return DiscoveryAlgorithm::kAlg3;
  if (name == "exhaustive") return DiscoveryAlgorithm::kExhaustive;
  throw ValidationError("unknown discovery algorithm '" + name +
                        "' (expected alg1, alg2, alg3 or exhaustive)");
}

std::string SymmetrySourceName(SymmetrySource s) {
  switch (s) {
    case SymmetrySource::kEr: return "er";
    case SymmetrySource::kMdp: return "mdp";
    case SymmetrySource::kNone: return "none";
  }
  return "?";
}

SymmetrySource ParseSymmetrySource(const std::string& name) {
  if (name == "er") return SymmetrySource::kEr;
  if (name == "mdp") return SymmetrySource::kMdp;
  if (name == "none") return SymmetrySource::kNone;
  throw ValidationError("unknown symmetry source '" + name + "' (expected er, mdp or none)");
}

std::string DeployModeName(DeployMode d) {
  switch (d) {
    case DeployMode::kRaw: return "raw";
    case DeployMode::kSymmetrizedEr: return "symmetrized-er";
    case DeployMode::kSymmetrizedMdp: return "symmetrized-mdp";
  }
  return "?";
}

DeployMode ParseDeployMode(const std::string& name) {
  if (name == "raw") return DeployMode::kRaw;
  if (name == "symmetrized-er") return DeployMode::kSymmetrizedEr;
  if (name == "symmetrized-mdp") return DeployMode::kSymmetrizedMdp;
  throw ValidationError("unknown deploy mode '" + name +
                        "' (expected raw, symmetrized-er or symmetrized-mdp)");
}

std::vector<std::string> ValidatePopulationConfig(const PopulationConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.population < 2) errors.push_back("population must be >= 2");
  if (cfg.k < 1) errors.push_back("k must be >= 1");
  if (cfg.l < 1) errors.push_back("l must be >= 1");
  if (cfg.m < 1) errors.push_back("m must be >= 1");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) errors.push_back("epsilon must be in [0, 1]");
  if (!(cfg.optimality_fraction >= 0.0)) errors.push_back("optimality_fraction must be >= 0");
  if (cfg.max_retrains < 0) errors.push_back("max_retrains must be >= 0");
  if (!cfg.agent_seeds.empty() &&
      static_cast<int>(cfg.agent_seeds.size()) != cfg.population) {
    errors.push_back("agent_seeds must be empty or have one seed per agent");
  }
  for (const auto& e : ValidateTrainerConfig(cfg.sp)) errors.push_back("sp." + e);
  for (const auto& e : ValidateTrainerConfig(cfg.op)) errors.push_back("op." + e);
  for (const auto& e : ValidateDiscoveryConfig(cfg.discovery)) {
    errors.push_back("discovery." + e);
  }
  return errors;
}

uint64_t AgentSeed(const PopulationConfig& cfg, int agent) {
  if (!cfg.agent_seeds.empty()) return cfg.agent_seeds.at(agent);
  return MixSeed(cfg.master_seed, static_cast<uint64_t>(agent));
}

PopulationResult RunPopulation(const TabularDecPomdp& model, const PopulationConfig& cfg,
                               const ProgressFn& progress) {
  const auto errors = ValidatePopulationConfig(cfg);
  if (!errors.empty()) {
    std::string msg = "invalid population config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  if (model.num_agents() != 2) {
    throw ValidationError("population experiments need a two-agent model");
  }
  const bool need_mdp = cfg.source == SymmetrySource::kMdp ||
                        cfg.deploy == DeployMode::kSymmetrizedMdp;
  SymmetrySet mdp_set;
  if (need_mdp) mdp_set = EnumerateMdpSymmetries(model);

  PopulationResult result;
  result.agents.resize(cfg.population);
  for (int i = 0; i < cfg.population; ++i) {
    AgentRecord& rec = result.agents[i];
    rec.index = i;
    rec.seed = AgentSeed(cfg, i);
    auto note = [&](const std::string& s) {
      if (progress) progress("agent " + std::to_string(i) + ": " + s);
    };

    SymmetrySet set{{IdentitySymmetry(model)}, false};
    if (cfg.source == SymmetrySource::kEr) {
      note("building pool");
      const PolicyPool pool = InPhase(i, "pool", [&] {
        TrainerConfig sp = cfg.sp;
        sp.seed = MixSeed(rec.seed, 1);
        PoolConfig pc{cfg.k, cfg.epsilon, cfg.optimality_fraction, cfg.max_retrains};
        return BuildPolicyPool(model, pc, sp);
      });
      rec.pool_returns = pool.raw_returns;
      rec.pool_retrains = pool.retrains;
      note("discovering symmetries");
      DiscoveryResult found = InPhase(i, "discovery", [&] {
        return Discover(model, cfg, pool.policies, MixSeed(rec.seed, 2));
      });
      rec.warnings = found.warnings;
      if (found.candidates.size() > kKeptCandidates) found.candidates.resize(kKeptCandidates);
      rec.candidates = std::move(found.candidates);
      if (found.selected.maps.empty()) {
        rec.warnings.push_back("no symmetry selected; falling back to the identity");
      } else {
        set = found.selected;
      }
    } else if (cfg.source == SymmetrySource::kMdp) {
      set = mdp_set;
    }
    rec.symmetries = set;
    const SymmetrySet group = InPhase(i, "closure", [&] { return GroupClosure(model, set); });
    rec.closure_size = group.size();
    const SymmetrySet deploy_set =
        InPhase(i, "deploy", [&] { return DeploySet(model, cfg, set, mdp_set); });

    double best = 0.0;
    for (int j = 0; j < cfg.m; ++j) {
      note("other-play policy " + std::to_string(j));
      TrainerConfig op = cfg.op;
      op.seed = MixSeed(MixSeed(rec.seed, 3), static_cast<uint64_t>(j));
      const TabularJointPolicy trained =
          InPhase(i, "other-play", [&] { return TrainOtherPlay(model, group, op).policy; });
      rec.op_returns.push_back(ExactExpectedReturn(model, trained));
      rec.op_values.push_back(OpObjective(model, group, trained));
      TabularJointPolicy deployable =
          cfg.deploy == DeployMode::kRaw
              ? trained
              : InPhase(i, "deploy", [&] { return Symmetrize(model, deploy_set, trained); });
      const double value = ExactExpectedReturn(model, deployable);
      rec.deployed_returns.push_back(value);
      if (j == 0 || value > best) {
        best = value;
        rec.chosen = j;
        rec.deployed = std::move(deployable);
      }
    }
    rec.sp_score = best;
  }

  if (progress) progress("cross-play matrix");
  result.xp = XpMatrix(model, DeployedPolicies(result));
  result.stats = XpMatrixStats(result.xp);
  for (int i = 0; i < cfg.population; ++i) {
    for (int j = i + 1; j < cfg.population; ++j) {
      const double xp = 0.5 * (result.xp[i][j] + result.xp[j][i]);
      const double self = 0.5 * (result.agents[i].sp_score + result.agents[j].sp_score);
      result.pairs.push_back({i, j, xp, self - xp});
    }
  }
  return result;
}

std::vector<TabularJointPolicy> DeployedPolicies(const PopulationResult& result) {
  std::vector<TabularJointPolicy> out;
  out.reserve(result.agents.size());
  for (const auto& a : result.agents) out.push_back(a.deployed);
  return out;
}

std::vector<std::vector<double>> XpMatrix(const TabularDecPomdp& model,
                                          const std::vector<TabularJointPolicy>& policies) {
  const size_t n = policies.size();
  std::vector<std::vector<double>> xp(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) xp[i][j] = CrossPlay(model, policies[i], policies[j]);
  }
  return xp;
}

std::vector<double> OffDiagonal(const std::vector<std::vector<double>>& xp) {
  // One value per unordered pair: the mean of both seatings.
  std::vector<double> out;
  for (size_t i = 0; i < xp.size(); ++i) {
    for (size_t j = i + 1; j < xp.size(); ++j) out.push_back(0.5 * (xp[i][j] + xp[j][i]));
  }
  return out;
}

XpStats XpMatrixStats(const std::vector<std::vector<double>>& xp) {
  XpStats s;
  const std::vector<double> v = OffDiagonal(xp);
  s.pairs = static_cast<int>(v.size());
  if (v.empty()) return s;
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  s.median = Median(v);
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  double ordered = 0.0;
  for (size_t i = 0; i < xp.size(); ++i) {
    for (size_t j = 0; j < xp.size(); ++j) {
      if (i != j) ordered += xp[i][j];
    }
  }
  s.mean_ordered = ordered / (2.0 * n);
  return s;
}

SymmetrizedComparison CompareSymmetrized(const TabularDecPomdp& model,
                                         const std::vector<TabularJointPolicy>& policies,
                                         const SymmetrySet& set) {
  SymmetrizedComparison out;
  const SymmetrySet group = GroupClosure(model, set);
  out.group_size = group.size();
  out.degenerate = policies.size() < 2;
  std::vector<TabularJointPolicy> sym;
  sym.reserve(policies.size());
  for (const auto& p : policies) sym.push_back(Symmetrize(model, group, p));
  out.before = XpMatrixStats(XpMatrix(model, policies));
  out.after = XpMatrixStats(XpMatrix(model, sym));
  return out;
}

OpGapReport MakeOpGapReport(const TabularDecPomdp& model,
                            const std::vector<TabularJointPolicy>& policies,
                            const SymmetrySet& set) {
  OpGapReport r;
  const SymmetrySet group = GroupClosure(model, set);
  const auto xp = XpMatrix(model, policies);
  const int n = static_cast<int>(policies.size());
  for (int i = 0; i < n; ++i) {
    r.sp_values.push_back(xp[i][i]);
    r.op_values.push_back(OpObjective(model, group, policies[i]));
  }
  if (n > 0) r.best_op = *std::max_element(r.op_values.begin(), r.op_values.end());
  r.xp = XpMatrixStats(xp);
  r.gap = r.best_op - r.xp.mean;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double floor = std::min(r.op_values[i], r.op_values[j]) - kCompatTol;
      if (xp[i][j] >= floor && xp[j][i] >= floor) parent[Find(parent, i)] = Find(parent, j);
    }
  }
  for (int i = 0; i < n; ++i) r.classes += Find(parent, i) == i ? 1 : 0;
  return r;
}

Json XpStatsToJson(const XpStats& s) {
  Json j;
  j["pairs"] = s.pairs;
  j["mean"] = s.mean;
  j["median"] = s.median;
  j["std_error"] = s.std_error;
  j["min"] = s.min;
  j["max"] = s.max;
  j["mean_ordered"] = s.mean_ordered;
  return j;
}

Json TrainerConfigToJson(const TrainerConfig& c) {
  Json j;
  j["algorithm"] = AlgorithmName(c.algorithm);
  j["episodes"] = c.episodes;
  j["learning_rate"] = c.learning_rate;
  j["epsilon"] = c.epsilon;
  j["temperature"] = c.temperature;
  j["baseline"] = c.baseline;
  j["shared_q"] = c.shared_q;
  j["q_init"] = c.q_init;
  return j;
}

Json DiscoveryConfigToJson(const DiscoveryConfig& c) {
  Json j;
  j["episodes"] = c.episodes;
  j["learning_rate"] = c.learning_rate;
  j["temperature"] = c.temperature;
  j["baseline"] = c.baseline;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["tolerance"] = c.tolerance;
  j["budget"] = c.budget;
  j["restarts"] = c.restarts;
  j["action_maps"] = ActionMapModeName(c.action_maps);
  j["permutation_cap"] = c.permutation_cap;
  j["search_cap"] = c.search_cap;
  return j;
}

Json PopulationConfigToJson(const PopulationConfig& c) {
  Json j;
  j["population"] = c.population;
  j["k"] = c.k;
  j["l"] = c.l;
  j["m"] = c.m;
  j["epsilon"] = c.epsilon;
  j["optimality_fraction"] = c.optimality_fraction;
  j["max_retrains"] = c.max_retrains;
  j["algorithm"] = DiscoveryAlgorithmName(c.algorithm);
  j["source"] = SymmetrySourceName(c.source);
  j["deploy"] = DeployModeName(c.deploy);
  j["master_seed"] = c.master_seed;
  Json seeds = Json::array();
  for (uint64_t s : c.agent_seeds) seeds.push_back(s);
  j["agent_seeds"] = seeds;
  j["sp"] = TrainerConfigToJson(c.sp);
  j["op"] = TrainerConfigToJson(c.op);
  j["discovery"] = DiscoveryConfigToJson(c.discovery);
  return j;
}

Json PopulationResultToJson(const TabularDecPomdp& model, const PopulationConfig& cfg,
                            const PopulationResult& result) {
  Json j;
  j["schema"] = kPopulationSchema;
  j["env"] = model.name;
  j["config"] = PopulationConfigToJson(cfg);
  Json agents = Json::array();
  for (const auto& a : result.agents) {
    Json ja;
    ja["index"] = a.index;
    ja["seed"] = a.seed;
    ja["pool_returns"] = VectorJson(a.pool_returns);
    ja["pool_retrains"] = a.pool_retrains;
    ja["symmetries"] = SymmetrySetToJson(model, a.symmetries);
    Json names = Json::array();
    for (const auto& phi : a.symmetries.maps) names.push_back(phi.ToString(model));
    ja["symmetry_names"] = names;
    ja["closure_size"] = a.closure_size;
    Json cands = Json::array();
    for (const auto& c : a.candidates) {
      Json jc;
      jc["map"] = c.map.ToString(model);
      jc["objective"] = c.objective;
      jc["soft_objective"] = c.soft_objective;
      jc["er_gap"] = c.er_gap;
      jc["max_gap"] = c.max_gap;
      jc["breaking_gap"] = c.breaking_gap;
      jc["source"] = c.source;
      jc["restart"] = c.restart;
      cands.push_back(jc);
    }
    ja["candidates"] = cands;
    Json warns = Json::array();
    for (const auto& w : a.warnings) warns.push_back(w);
    ja["warnings"] = warns;
    ja["op_returns"] = VectorJson(a.op_returns);
    ja["op_values"] = VectorJson(a.op_values);
    ja["deployed_returns"] = VectorJson(a.deployed_returns);
    ja["chosen"] = a.chosen;
    ja["sp_score"] = a.sp_score;
    ja["policy"] = PolicyToJson(model, a.deployed);
    agents.push_back(ja);
  }
  j["agents"] = agents;
  Json xp = Json::array();
  for (const auto& row : result.xp) xp.push_back(VectorJson(row));
  j["xp_matrix"] = xp;
  j["xp_stats"] = XpStatsToJson(result.stats);
  Json pairs = Json::array();
  for (const auto& p : result.pairs) {
    Json jp;
    jp["i"] = p.i;
    jp["j"] = p.j;
    jp["xp"] = p.xp;
    jp["breaking_gap"] = p.breaking_gap;
    pairs.push_back(jp);
  }
  j["pairs"] = pairs;
  return j;
}

std::string XpMatrixToCsv(const std::vector<std::vector<double>>& xp) {
  std::ostringstream out;
  out << "agent";
  for (size_t j = 0; j < xp.size(); ++j) out << "," << j;
  out << "\n";
  for (size_t i = 0; i < xp.size(); ++i) {
    out << i;
    for (double v : xp[i]) out << "," << FormatDouble(v);
    out << "\n";
  }
  return out.str();
}

std::string HistogramCsv(const std::vector<double>& values, int bins) {
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
  std::ostringstream out;
  out << "lower,upper,count\n";
  if (values.empty()) return out.str();
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi - lo <= 1e-12) {
    out << FormatDouble(lo) << "," << FormatDouble(hi) << "," << values.size() << "\n";
    return out.str();
  }
  std::vector<int64_t> counts(bins, 0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    counts[std::clamp(b, 0, bins - 1)]++;
  }
  for (int b = 0; b < bins; ++b) {
    const double upper = b == bins - 1 ? hi : lo + width * (b + 1);
    out << FormatDouble(lo + width * b) << "," << FormatDouble(upper) << "," << counts[b] << "\n";
  }
  return out.str();
}

}  // namespace ersym

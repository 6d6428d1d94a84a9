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

// Command-line front end. Every subcommand writes its artifacts to the
// output directory (--out, else $ERSYM_OUT_DIR, else the working directory)
// and prints a summary to stdout. Exit codes: 0 success, 1 invalid input,
// 2 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ersym/config.h"
#include "ersym/discovery.h"
#include "ersym/envs.h"
#include "ersym/error.h"
#include "ersym/evaluate.h"
#include "ersym/harness.h"
#include "ersym/io.h"
#include "ersym/rng.h"
#include "ersym/symmetry.h"
#include "ersym/training.h"

namespace fs = std::filesystem;
using namespace ersym;

namespace {

struct Common {
  std::string env;
  std::string model_path;
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
  std::string format = "json";
};

void AddCommon(CLI::App* cmd, Common& c, bool with_config) {
  cmd->add_option("--env", c.env, "bundled environment: " + [] {
    std::string s;
    for (const auto& n : EnvironmentNames()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }());
  cmd->add_option("--model", c.model_path, "model JSON file (instead of --env)");
  if (with_config) cmd->add_option("--config", c.config_path, "experiment config file");
  cmd->add_option("--seed", c.seed, "seed (master seed for populations)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
}

fs::path OutDir(const Common& c) {
  fs::path dir = ".";
  if (!c.out.empty()) {
    dir = c.out;
  } else if (const char* env = std::getenv("ERSYM_OUT_DIR"); env != nullptr && *env != '\0') {
    dir = env;
  }
  fs::create_directories(dir);
  return dir;
}

TabularDecPomdp LoadModel(const Common& c) {
  if (!c.model_path.empty()) {
    TabularDecPomdp m = ModelFromJson(ReadJsonFile(c.model_path));
    CheckModel(m);
    return m;
  }
  std::string env = c.env;
  if (env.empty() && !c.config_path.empty()) env = LoadExperimentConfig(c.config_path).env;
  if (env.empty()) throw ValidationError("give --env or --model");
  return MakeEnvironment(env);
}

bool HasPreset(const std::string& env) {
  for (const auto& n : EnvironmentNames()) {
    if (n == env) return true;
  }
  return false;
}

ExperimentConfig LoadConfig(const Common& c, const TabularDecPomdp& model) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    std::string env = c.env;
    if (env.empty() && !c.model_path.empty()) env = model.name;
    if (!env.empty() && !HasPreset(env)) {
      // Custom model: library defaults plus the file's entries.
      std::ifstream in(c.config_path);
      if (!in) throw ValidationError("cannot read config file '" + c.config_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      cfg.env = env;
      ApplyConfigEntries(ParseConfigEntries(ss.str()), cfg);
    } else {
      cfg = LoadExperimentConfig(c.config_path, env);
    }
  } else {
    const std::string env = c.env.empty() ? model.name : c.env;
    if (HasPreset(env)) {
      cfg = PresetConfig(env);
    } else {
      cfg.env = env;
    }
  }
  if (c.seed) cfg.population.master_seed = *c.seed;
  return cfg;
}

void Print(const Common& c, const Json& summary) {
  if (c.format == "csv") {
    std::cout << "key,value\n";
    for (const auto& [k, v] : summary.items()) {
      std::cout << k << "," << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  } else {
    std::cout << summary.dump(2) << "\n";
  }
}

SymmetrySet LoadSymmetries(const TabularDecPomdp& m, const std::string& path) {
  if (path.empty()) return EnumerateMdpSymmetries(m);
  return SymmetrySetFromJson(m, ReadJsonFile(path));
}

std::string CurveCsv(const TrainResult& r) {
  std::ostringstream out;
  out << "episode,mean_return\n";
  for (const auto& p : r.curve) out << p.episode << "," << p.mean_return << "\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected-return symmetry discovery and other-play for tabular Dec-POMDPs"};
  app.require_subcommand(1);
  Common c;
  std::string alg = "1";
  std::string symmetries_path;
  std::string policy_path;
  std::vector<std::string> policy_paths;
  int bins = 20;

  auto* validate = app.add_subcommand("validate-env", "check a model and write it as JSON");
  AddCommon(validate, c, false);
  auto* train_sp = app.add_subcommand("train-sp", "train a self-play policy");
  AddCommon(train_sp, c, true);
  auto* train_op = app.add_subcommand("train-op", "train an other-play policy");
  AddCommon(train_op, c, true);
  train_op->add_option("--symmetries", symmetries_path,
                       "symmetry set JSON (default: the Dec-POMDP symmetries)");
  auto* discover = app.add_subcommand("discover", "build a pool and discover symmetries");
  AddCommon(discover, c, true);
  discover->add_option("--alg", alg, "1, 2, 3 or exhaustive")
      ->check(CLI::IsMember({"1", "2", "3", "exhaustive"}));
  auto* enumerate = app.add_subcommand("enumerate-mdp-symmetries",
                                       "enumerate the Dec-POMDP symmetry group");
  AddCommon(enumerate, c, false);
  auto* eval_xp = app.add_subcommand("eval-xp", "exact cross-play matrix of policy files");
  AddCommon(eval_xp, c, false);
  eval_xp->add_option("--policies", policy_paths, "policy JSON files")->required();
  eval_xp->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
  auto* symmetrize = app.add_subcommand("symmetrize", "project a policy onto the invariant ones");
  AddCommon(symmetrize, c, false);
  symmetrize->add_option("--policy", policy_path, "policy JSON file")->required();
  symmetrize->add_option("--symmetries", symmetries_path,
                         "symmetry set JSON (default: the Dec-POMDP symmetries)");
  auto* population = app.add_subcommand("run-population", "run a population experiment");
  AddCommon(population, c, true);
  population->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
  auto* group = app.add_subcommand("report-group-properties",
                                   "composition and reconstruction diagnostics of a set");
  AddCommon(group, c, true);
  group->add_option("--symmetries", symmetries_path,
                    "symmetry set JSON (default: the Dec-POMDP symmetries)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const TabularDecPomdp model = LoadModel(c);
    Json summary;
    summary["env"] = model.name;

    if (validate->parsed()) {
      const fs::path dir = OutDir(c);
      WriteJsonFile((dir / "model.json").string(), ModelToJson(model));
      summary["states"] = model.num_states();
      summary["agents"] = model.num_agents();
      summary["horizon"] = model.horizon;
      summary["valid"] = true;
    } else if (train_sp->parsed() || train_op->parsed()) {
      const ExperimentConfig cfg = LoadConfig(c, model);
      TrainerConfig tc = train_sp->parsed() ? cfg.population.sp : cfg.population.op;
      tc.seed = c.seed.value_or(0);
      const fs::path dir = OutDir(c);
      TrainResult r;
      if (train_sp->parsed()) {
        r = TrainSelfPlay(model, tc);
      } else {
        const SymmetrySet set = LoadSymmetries(model, symmetries_path);
        r = TrainOtherPlay(model, set, tc);
        summary["op_value"] = OpObjective(model, set, r.policy);
      }
      WriteJsonFile((dir / "policy.json").string(), PolicyToJson(model, r.policy));
      WriteTextFile((dir / "curve.csv").string(), CurveCsv(r));
      summary["return"] = ExactExpectedReturn(model, r.policy);
      summary["policy"] = (dir / "policy.json").string();
    } else if (discover->parsed()) {
      const ExperimentConfig cfg = LoadConfig(c, model);
      const PopulationConfig& p = cfg.population;
      TrainerConfig sp = p.sp;
      sp.seed = MixSeed(p.master_seed, 1);
      const PolicyPool pool = BuildPolicyPool(
          model, {p.k, p.epsilon, p.optimality_fraction, p.max_retrains}, sp);
      DiscoveryConfig dc = p.discovery;
      dc.seed = MixSeed(p.master_seed, 2);
      dc.top_l = p.l;
      DiscoveryResult r;
      if (alg == "exhaustive") {
        r = SearchExhaustive(model, pool.policies, p.l, dc);
      } else if (alg == "1") {
        r = LearnAlg1(model, pool.policies, dc);
      } else if (alg == "2") {
        const DiscoveryResult first = LearnAlg1(model, pool.policies, dc);
        r = LearnAlg2(model, pool.policies, first.selected, dc);
      } else {
        r = LearnAlg3(model, pool.policies, dc);
      }
      const fs::path dir = OutDir(c);
      WriteJsonFile((dir / "symmetries.json").string(), SymmetrySetToJson(model, r.selected));
      Json manifest;
      manifest["config"] = PopulationConfigToJson(p);
      manifest["algorithm"] = alg;
      Json pool_j = Json::array();
      for (double x : pool.raw_returns) pool_j.push_back(x);
      manifest["pool_returns"] = pool_j;
      Json cands = Json::array();
      for (const auto& cr : r.candidates) {
        Json j;
        j["map"] = SymmetryMapToJson(cr.map);
        j["name"] = cr.map.ToString(model);
        j["objective"] = cr.objective;
        j["soft_objective"] = cr.soft_objective;
        j["er_gap"] = cr.er_gap;
        j["max_gap"] = cr.max_gap;
        j["breaking_gap"] = cr.breaking_gap;
        cands.push_back(j);
      }
      manifest["candidates"] = cands;
      manifest["warnings"] = r.warnings;
      manifest["selected"] = "symmetries.json";
      WriteJsonFile((dir / "discovery.json").string(), manifest);
      Json names = Json::array();
      for (const auto& phi : r.selected.maps) names.push_back(phi.ToString(model));
      summary["selected"] = names;
      summary["warnings"] = r.warnings;
    } else if (enumerate->parsed()) {
      const SymmetrySet set = EnumerateMdpSymmetries(model);
      const fs::path dir = OutDir(c);
      WriteJsonFile((dir / "mdp_symmetries.json").string(), SymmetrySetToJson(model, set));
      summary["count"] = set.size();
      summary["is_group"] = IsGroup(set);
    } else if (eval_xp->parsed()) {
      std::vector<TabularJointPolicy> pols;
      for (const auto& path : policy_paths) {
        pols.push_back(PolicyFromJson(model, ReadJsonFile(path)));
      }
      const auto xp = XpMatrix(model, pols);
      const auto stats = XpMatrixStats(xp);
      const fs::path dir = OutDir(c);
      WriteTextFile((dir / "xp_matrix.csv").string(), XpMatrixToCsv(xp));
      WriteTextFile((dir / "xp_histogram.csv").string(), HistogramCsv(OffDiagonal(xp), bins));
      if (c.format == "csv") {
        std::cout << XpMatrixToCsv(xp);
        return 0;
      }
      Json m = Json::array();
      for (const auto& row : xp) m.push_back(row);
      summary["xp_matrix"] = m;
      summary["xp_stats"] = XpStatsToJson(stats);
    } else if (symmetrize->parsed()) {
      const SymmetrySet set = GroupClosure(model, LoadSymmetries(model, symmetries_path));
      const auto pi = PolicyFromJson(model, ReadJsonFile(policy_path));
      const auto sym = Symmetrize(model, set, pi);
      const fs::path dir = OutDir(c);
      WriteJsonFile((dir / "symmetrized_policy.json").string(), PolicyToJson(model, sym));
      summary["group_size"] = set.size();
      summary["return_before"] = ExactExpectedReturn(model, pi);
      summary["return_after"] = ExactExpectedReturn(model, sym);
    } else if (population->parsed()) {
      const ExperimentConfig cfg = LoadConfig(c, model);
      const auto progress = [](const std::string& s) { std::cerr << s << "\n"; };
      const PopulationResult r = RunPopulation(model, cfg.population, progress);
      const fs::path dir = OutDir(c);
      WriteJsonFile((dir / "population.json").string(),
                    PopulationResultToJson(model, cfg.population, r));
      WriteTextFile((dir / "xp_matrix.csv").string(), XpMatrixToCsv(r.xp));
      WriteTextFile((dir / "xp_histogram.csv").string(), HistogramCsv(OffDiagonal(r.xp), bins));
      WriteTextFile((dir / "config.txt").string(), ConfigToText(cfg));
      summary["master_seed"] = cfg.population.master_seed;
      summary["xp_mean"] = r.stats.mean;
      summary["xp_median"] = r.stats.median;
      summary["xp_std_error"] = r.stats.std_error;
      Json sp = Json::array();
      for (const auto& a : r.agents) sp.push_back(a.sp_score);
      summary["sp_scores"] = sp;
    } else if (group->parsed()) {
      const ExperimentConfig cfg = LoadConfig(c, model);
      const PopulationConfig& p = cfg.population;
      const SymmetrySet set = LoadSymmetries(model, symmetries_path);
      TrainerConfig sp = p.sp;
      // Holdout pool: seeds disjoint from the discovery pool's.
      sp.seed = MixSeed(p.master_seed, 4);
      const PolicyPool pool = BuildPolicyPool(
          model, {p.k, p.epsilon, p.optimality_fraction, p.max_retrains}, sp);
      const auto rep = MakeGroupPropertyReport(model, set, pool.policies, 20000, p.master_seed);
      Json j;
      j["base_return"] = rep.base_return;
      j["composed"] = rep.composed;
      j["tuples"] = rep.tuples;
      j["sampled"] = rep.sampled;
      j["reconstruction_loss"] = rep.reconstruction_loss;
      const fs::path dir = OutDir(c);
      WriteJsonFile((dir / "group_properties.json").string(), j);
      summary["base_return"] = rep.base_return;
      summary["composed"] = rep.composed;
      summary["reconstruction_loss"] = rep.reconstruction_loss;
    }
    Print(c, summary);
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

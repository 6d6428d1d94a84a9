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

#include "ersym/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ersym/envs.h"
#include "ersym/error.h"

namespace ersym {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Fail(const ConfigEntry& e, const std::string& what) {
  throw ValidationError("config line " + std::to_string(e.line) + " (" + e.key + "): " + what);
}

template <typename T>
bool ParseInteger(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool ParsePlainDouble(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double ToDouble(const ConfigEntry& e) {
  double out = 0.0;
  const auto slash = e.value.find('/');
  if (slash == std::string::npos) {
    if (ParsePlainDouble(e.value, out)) return out;
  } else {
    double num = 0.0, den = 0.0;
    if (ParsePlainDouble(Trim(e.value.substr(0, slash)), num) &&
        ParsePlainDouble(Trim(e.value.substr(slash + 1)), den) && den != 0.0) {
      return num / den;
    }
  }
  Fail(e, "expected a number, got '" + e.value + "'");
}

int64_t ToInt(const ConfigEntry& e) {
  int64_t out = 0;
  if (!ParseInteger(e.value, out)) Fail(e, "expected an integer, got '" + e.value + "'");
  return out;
}

int ToInt32(const ConfigEntry& e) {
  const int64_t v = ToInt(e);
  if (v < INT32_MIN || v > INT32_MAX) Fail(e, "integer out of range");
  return static_cast<int>(v);
}

uint64_t ToSeed(const ConfigEntry& e, const std::string& text) {
  uint64_t out = 0;
  if (!ParseInteger(text, out)) Fail(e, "expected an unsigned integer, got '" + text + "'");
  return out;
}

bool ToBool(const ConfigEntry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  Fail(e, "expected true or false, got '" + e.value + "'");
}

std::string D(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

// Rethrows parse errors from enum parsers with the line number attached.
template <typename F>
auto Named(const ConfigEntry& e, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& err) {
    Fail(e, err.what());
  }
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const ConfigEntry&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

void AddTrainerFields(std::vector<Field>& f, const std::string& prefix,
                      TrainerConfig PopulationConfig::*member) {
  auto t = [member](ExperimentConfig& c) -> TrainerConfig& { return c.population.*member; };
  auto ct = [member](const ExperimentConfig& c) -> const TrainerConfig& {
    return c.population.*member;
  };
  f.push_back({prefix + "algorithm",
               [t](auto& c, const auto& e) {
                 t(c).algorithm = Named(e, [&] { return ParseAlgorithm(e.value); });
               },
               [ct](const auto& c) { return AlgorithmName(ct(c).algorithm); }});
  f.push_back({prefix + "episodes", [t](auto& c, const auto& e) { t(c).episodes = ToInt(e); },
               [ct](const auto& c) { return std::to_string(ct(c).episodes); }});
  f.push_back({prefix + "learning_rate",
               [t](auto& c, const auto& e) { t(c).learning_rate = ToDouble(e); },
               [ct](const auto& c) { return D(ct(c).learning_rate); }});
  f.push_back({prefix + "epsilon", [t](auto& c, const auto& e) { t(c).epsilon = ToDouble(e); },
               [ct](const auto& c) { return D(ct(c).epsilon); }});
  f.push_back({prefix + "temperature",
               [t](auto& c, const auto& e) { t(c).temperature = ToDouble(e); },
               [ct](const auto& c) { return D(ct(c).temperature); }});
  f.push_back({prefix + "baseline", [t](auto& c, const auto& e) { t(c).baseline = ToDouble(e); },
               [ct](const auto& c) { return D(ct(c).baseline); }});
  f.push_back({prefix + "shared_q", [t](auto& c, const auto& e) { t(c).shared_q = ToBool(e); },
               [ct](const auto& c) { return std::string(ct(c).shared_q ? "true" : "false"); }});
  f.push_back({prefix + "q_init", [t](auto& c, const auto& e) { t(c).q_init = ToDouble(e); },
               [ct](const auto& c) { return D(ct(c).q_init); }});
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    using C = ExperimentConfig;
    using E = ConfigEntry;
    auto p = [](C& c) -> PopulationConfig& { return c.population; };
    f.push_back({"population", [p](C& c, const E& e) { p(c).population = ToInt32(e); },
                 [](const C& c) { return std::to_string(c.population.population); }});
    f.push_back({"k", [p](C& c, const E& e) { p(c).k = ToInt32(e); },
                 [](const C& c) { return std::to_string(c.population.k); }});
    f.push_back({"l", [p](C& c, const E& e) { p(c).l = ToInt32(e); },
                 [](const C& c) { return std::to_string(c.population.l); }});
    f.push_back({"m", [p](C& c, const E& e) { p(c).m = ToInt32(e); },
                 [](const C& c) { return std::to_string(c.population.m); }});
    f.push_back({"epsilon", [p](C& c, const E& e) { p(c).epsilon = ToDouble(e); },
                 [](const C& c) { return D(c.population.epsilon); }});
    f.push_back({"optimality_fraction",
                 [p](C& c, const E& e) { p(c).optimality_fraction = ToDouble(e); },
                 [](const C& c) { return D(c.population.optimality_fraction); }});
    f.push_back({"max_retrains", [p](C& c, const E& e) { p(c).max_retrains = ToInt32(e); },
                 [](const C& c) { return std::to_string(c.population.max_retrains); }});
    f.push_back({"algorithm",
                 [p](C& c, const E& e) {
                   p(c).algorithm = Named(e, [&] { return ParseDiscoveryAlgorithm(e.value); });
                 },
                 [](const C& c) { return DiscoveryAlgorithmName(c.population.algorithm); }});
    f.push_back({"source",
                 [p](C& c, const E& e) {
                   p(c).source = Named(e, [&] { return ParseSymmetrySource(e.value); });
                 },
                 [](const C& c) { return SymmetrySourceName(c.population.source); }});
    f.push_back({"deploy",
                 [p](C& c, const E& e) {
                   p(c).deploy = Named(e, [&] { return ParseDeployMode(e.value); });
                 },
                 [](const C& c) { return DeployModeName(c.population.deploy); }});
    f.push_back({"master_seed", [p](C& c, const E& e) { p(c).master_seed = ToSeed(e, e.value); },
                 [](const C& c) { return std::to_string(c.population.master_seed); }});
    f.push_back({"agent_seeds",
                 [p](C& c, const E& e) {
                   p(c).agent_seeds.clear();
                   std::stringstream ss(e.value);
                   std::string item;
                   while (std::getline(ss, item, ',')) {
                     if (Trim(item).empty()) continue;
                     p(c).agent_seeds.push_back(ToSeed(e, Trim(item)));
                   }
                 },
                 [](const C& c) {
                   std::string s;
                   for (uint64_t v : c.population.agent_seeds) {
                     if (!s.empty()) s += ", ";
                     s += std::to_string(v);
                   }
                   return s;
                 }});
    AddTrainerFields(f, "sp.", &PopulationConfig::sp);
    AddTrainerFields(f, "op.", &PopulationConfig::op);
    auto d = [](C& c) -> DiscoveryConfig& { return c.population.discovery; };
    auto cd = [](const C& c) -> const DiscoveryConfig& { return c.population.discovery; };
    f.push_back({"discovery.episodes", [d](C& c, const E& e) { d(c).episodes = ToInt(e); },
                 [cd](const C& c) { return std::to_string(cd(c).episodes); }});
    f.push_back({"discovery.learning_rate",
                 [d](C& c, const E& e) { d(c).learning_rate = ToDouble(e); },
                 [cd](const C& c) { return D(cd(c).learning_rate); }});
    f.push_back({"discovery.temperature",
                 [d](C& c, const E& e) { d(c).temperature = ToDouble(e); },
                 [cd](const C& c) { return D(cd(c).temperature); }});
    f.push_back({"discovery.baseline", [d](C& c, const E& e) { d(c).baseline = ToDouble(e); },
                 [cd](const C& c) { return D(cd(c).baseline); }});
    f.push_back({"discovery.lambda1", [d](C& c, const E& e) { d(c).lambda1 = ToDouble(e); },
                 [cd](const C& c) { return D(cd(c).lambda1); }});
    f.push_back({"discovery.lambda2", [d](C& c, const E& e) { d(c).lambda2 = ToDouble(e); },
                 [cd](const C& c) { return D(cd(c).lambda2); }});
    f.push_back({"discovery.tolerance", [d](C& c, const E& e) { d(c).tolerance = ToDouble(e); },
                 [cd](const C& c) { return D(cd(c).tolerance); }});
    f.push_back({"discovery.budget", [d](C& c, const E& e) { d(c).budget = ToInt(e); },
                 [cd](const C& c) { return std::to_string(cd(c).budget); }});
    f.push_back({"discovery.restarts", [d](C& c, const E& e) { d(c).restarts = ToInt32(e); },
                 [cd](const C& c) { return std::to_string(cd(c).restarts); }});
    f.push_back({"discovery.action_maps",
                 [d](C& c, const E& e) {
                   d(c).action_maps = Named(e, [&] { return ParseActionMapMode(e.value); });
                 },
                 [cd](const C& c) { return ActionMapModeName(cd(c).action_maps); }});
    f.push_back({"discovery.permutation_cap",
                 [d](C& c, const E& e) { d(c).permutation_cap = ToInt(e); },
                 [cd](const C& c) { return std::to_string(cd(c).permutation_cap); }});
    f.push_back({"discovery.search_cap", [d](C& c, const E& e) { d(c).search_cap = ToInt(e); },
                 [cd](const C& c) { return std::to_string(cd(c).search_cap); }});
    return f;
  }();
  return fields;
}

}  // namespace

std::vector<ConfigEntry> ParseConfigEntries(const std::string& text) {
  std::vector<ConfigEntry> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line) + ": expected key = value");
    }
    ConfigEntry e{Trim(body.substr(0, eq)), Trim(body.substr(eq + 1)), line};
    if (e.key.empty()) {
      throw ValidationError("config line " + std::to_string(line) + ": empty key");
    }
    if (!seen.insert(e.key).second) Fail(e, "duplicate key");
    out.push_back(std::move(e));
  }
  if (out.empty() || out.front().key != "version") {
    throw ValidationError("config must start with 'version = " +
                          std::to_string(kConfigVersion) + "'");
  }
  if (out.front().value != std::to_string(kConfigVersion)) {
    Fail(out.front(), "unsupported config version '" + out.front().value + "'");
  }
  return out;
}

ExperimentConfig PresetConfig(const std::string& env) {
  ExperimentConfig c;
  c.env = env;
  PopulationConfig& p = c.population;
  p.population = 5;
  p.m = 1;
  if (env == "lever3" || env == "lever2") {
    p.k = 10;
    p.epsilon = 0.1;
    p.sp = TrainerConfig{};
    p.sp.episodes = 10000;
    p.sp.learning_rate = 0.1;
    p.sp.epsilon = 0.1;
    p.sp.shared_q = true;
    p.algorithm = DiscoveryAlgorithm::kAlg1;
    p.discovery.episodes = 20000;
    p.discovery.learning_rate = 0.05;
    p.discovery.temperature = 1.0;
    p.discovery.baseline = 1.75;
    p.discovery.action_maps = ActionMapMode::kPermutations;
    p.l = env == "lever3" ? 6 : 2;
    p.op = TrainerConfig{};
    p.op.episodes = 50000;
    p.op.learning_rate = 0.1;
    p.op.epsilon = 0.3;
    p.op.shared_q = env == "lever3";
    p.deploy = env == "lever3" ? DeployMode::kSymmetrizedEr : DeployMode::kRaw;
  } else if (env == "catdog") {
    p.m = 3;
    p.k = 10;
    p.l = 3;
    p.epsilon = 0.1;
    p.sp = TrainerConfig{};
    p.sp.episodes = 30000;
    p.sp.learning_rate = 0.1;
    p.sp.epsilon = 0.3;
    p.algorithm = DiscoveryAlgorithm::kAlg1;
    p.discovery = DiscoveryConfig{};
    p.discovery.restarts = 8;
    p.op = TrainerConfig{};
    p.op.episodes = 30000;
    p.op.learning_rate = 0.1;
    p.op.epsilon = 0.1;
    p.deploy = DeployMode::kRaw;
  } else if (env == "matrix") {
    p.k = 10;
    p.l = 1;
    p.epsilon = 0.1;
    p.sp = TrainerConfig{};
    p.sp.episodes = 2000;
    p.sp.shared_q = true;
    p.algorithm = DiscoveryAlgorithm::kExhaustive;
    p.op = p.sp;
    p.deploy = DeployMode::kRaw;
  } else {
    throw ValidationError("no preset for environment '" + env + "'");
  }
  return c;
}

void ApplyConfigEntries(const std::vector<ConfigEntry>& entries, ExperimentConfig& cfg) {
  for (const auto& e : entries) {
    if (e.key == "version" || e.key == "env") continue;
    const Field* field = nullptr;
    for (const auto& f : Fields()) {
      if (f.key == e.key) field = &f;
    }
    if (field == nullptr) Fail(e, "unknown key");
    field->set(cfg, e);
  }
}

ExperimentConfig ParseExperimentConfig(const std::string& text,
                                       const std::string& env_override) {
  const auto entries = ParseConfigEntries(text);
  std::string env = env_override;
  if (env.empty()) {
    for (const auto& e : entries) {
      if (e.key == "env") env = e.value;
    }
  }
  if (env.empty()) throw ValidationError("no environment given (set 'env' or --env)");
  // Checks the name before looking for a preset.
  MakeEnvironment(env);
  ExperimentConfig cfg = PresetConfig(env);
  ApplyConfigEntries(entries, cfg);
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path,
                                      const std::string& env_override) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseExperimentConfig(ss.str(), env_override);
}

std::string ConfigToText(const ExperimentConfig& cfg) {
  std::string out = "version = " + std::to_string(kConfigVersion) + "\n";
  out += "env = " + cfg.env + "\n";
  for (const auto& f : Fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace ersym

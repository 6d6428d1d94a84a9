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

#include "ersym/io.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ersym/aoh.h"
#include "ersym/error.h"

namespace ersym {
namespace {

void CheckSchema(const Json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema) {
    throw ValidationError(std::string("expected a document with schema ") + schema);
  }
}

void CheckFingerprint(const TabularDecPomdp& model, const Json& j) {
  const std::string expected = ModelFingerprint(model);
  const std::string got = j.value("fingerprint", "");
  if (got != expected) {
    throw ValidationError("model fingerprint mismatch: file has '" + got +
                          "', model '" + model.name + "' has '" + expected + "'");
  }
}

}  // namespace

Json ModelToJson(const TabularDecPomdp& m) {
  Json j;
  j["schema"] = kModelSchema;
  j["name"] = m.name;
  j["states"] = m.states;
  j["terminal"] = m.terminal;
  j["actions"] = m.actions;
  j["observations"] = m.observations;
  j["horizon"] = m.horizon;
  j["gamma"] = m.gamma;
  j["shared_symmetries"] = m.shared_symmetries;
  j["initial_dist"] = m.initial_dist;
  j["transition"] = m.transition;
  j["observation"] = m.observation;
  j["initial_observation"] = m.initial_observation;
  j["reward"] = m.reward;
  j["legal"] = m.legal;
  return j;
}

TabularDecPomdp ModelFromJson(const Json& j) {
  CheckSchema(j, kModelSchema);
  TabularDecPomdp m;
  try {
    j.at("name").get_to(m.name);
    j.at("states").get_to(m.states);
    j.at("terminal").get_to(m.terminal);
    j.at("actions").get_to(m.actions);
    j.at("observations").get_to(m.observations);
    j.at("horizon").get_to(m.horizon);
    j.at("gamma").get_to(m.gamma);
    j.at("shared_symmetries").get_to(m.shared_symmetries);
    j.at("initial_dist").get_to(m.initial_dist);
    j.at("transition").get_to(m.transition);
    j.at("observation").get_to(m.observation);
    j.at("initial_observation").get_to(m.initial_observation);
    j.at("reward").get_to(m.reward);
    j.at("legal").get_to(m.legal);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model document: ") + e.what());
  }
  CheckModel(m);
  return m;
}

Json PolicyToJson(const TabularDecPomdp& model, const TabularJointPolicy& policy) {
  Json j;
  j["schema"] = kPolicySchema;
  j["model"] = model.name;
  j["fingerprint"] = ModelFingerprint(model);
  Json agents = Json::array();
  for (int i = 0; i < policy.num_agents(); ++i) {
    const AohSpace space(model, i);
    const LocalPolicy& local = policy.agent(i);
    Json entries = Json::array();
    for (int t = 0; t < local.horizon(); ++t) {
      for (int64_t idx = 0; idx < local.NumAohs(t); ++idx) {
        if (!local.IsDefined(t, idx)) continue;
        const auto p = local.Probs(t, idx);
        entries.push_back({{"step", t},
                           {"aoh", idx},
                           {"history", space.ToString(model, space.Decode(t, idx))},
                           {"probs", std::vector<double>(p.begin(), p.end())}});
      }
    }
    agents.push_back({{"agent", i}, {"entries", std::move(entries)}});
  }
  j["agents"] = std::move(agents);
  return j;
}

TabularJointPolicy PolicyFromJson(const TabularDecPomdp& model, const Json& j) {
  CheckSchema(j, kPolicySchema);
  CheckFingerprint(model, j);
  std::vector<LocalPolicy> agents;
  for (int i = 0; i < model.num_agents(); ++i) agents.emplace_back(model, i);
  try {
    for (const auto& a : j.at("agents")) {
      const int i = a.at("agent").get<int>();
      if (i < 0 || i >= model.num_agents()) throw ValidationError("bad agent index");
      for (const auto& e : a.at("entries")) {
        const int t = e.at("step").get<int>();
        const int64_t idx = e.at("aoh").get<int64_t>();
        if (t < 0 || t >= model.horizon || idx < 0 || idx >= agents[i].NumAohs(t)) {
          throw ValidationError("policy entry out of range");
        }
        agents[i].Set(t, idx, e.at("probs").get<std::vector<double>>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed policy document: ") + e.what());
  }
  TabularJointPolicy policy(std::move(agents));
  CheckPolicy(model, policy);
  return policy;
}

Json TrajectoryToJson(const TabularDecPomdp& model, const Trajectory& traj) {
  Json j;
  j["schema"] = kTrajectorySchema;
  j["model"] = model.name;
  j["initial_state"] = model.states[traj.initial_state];
  j["initial_observations"] = traj.initial_observations;
  Json steps = Json::array();
  for (const auto& s : traj.steps) {
    std::vector<std::string> acts;
    const auto local = model.DecodeJointAction(s.joint_action);
    for (int i = 0; i < model.num_agents(); ++i) acts.push_back(model.actions[i][local[i]]);
    std::vector<std::string> obs;
    for (int i = 0; i < model.num_agents(); ++i) {
      obs.push_back(model.observations[i][s.observations[i]]);
    }
    steps.push_back({{"state", model.states[s.state]},
                     {"joint_action", acts},
                     {"next_state", model.states[s.next_state]},
                     {"observations", obs},
                     {"reward", s.reward}});
  }
  j["steps"] = std::move(steps);
  j["return"] = traj.realized_return;
  return j;
}

Json SymmetryMapToJson(const SymmetryMap& phi) {
  Json agents = Json::array();
  for (int i = 0; i < phi.num_agents(); ++i) {
    agents.push_back({{"act", phi.act[i]}, {"obs", phi.obs[i]}});
  }
  return {{"agents", std::move(agents)}};
}

SymmetryMap SymmetryMapFromJson(const Json& j) {
  SymmetryMap phi;
  try {
    for (const auto& a : j.at("agents")) {
      phi.act.push_back(a.at("act").get<Perm>());
      phi.obs.push_back(a.at("obs").get<Perm>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed symmetry: ") + e.what());
  }
  return phi;
}

Json SymmetrySetToJson(const TabularDecPomdp& model, const SymmetrySet& set) {
  Json j;
  j["schema"] = kSymmetrySetSchema;
  j["model"] = model.name;
  j["fingerprint"] = ModelFingerprint(model);
  j["closed"] = set.closed;
  Json maps = Json::array();
  for (const auto& phi : set.maps) {
    Json m = SymmetryMapToJson(phi);
    m["description"] = phi.ToString(model);
    maps.push_back(std::move(m));
  }
  j["maps"] = std::move(maps);
  return j;
}

SymmetrySet SymmetrySetFromJson(const TabularDecPomdp& model, const Json& j) {
  CheckSchema(j, kSymmetrySetSchema);
  CheckFingerprint(model, j);
  SymmetrySet set;
  set.closed = j.value("closed", false);
  for (const auto& m : j.at("maps")) {
    SymmetryMap phi = SymmetryMapFromJson(m);
    CheckSymmetry(model, phi);
    if (std::find(set.maps.begin(), set.maps.end(), phi) != set.maps.end()) {
      throw ValidationError("symmetry set contains a duplicate map");
    }
    set.maps.push_back(std::move(phi));
  }
  if (set.closed && !IsGroup(set)) {
    throw ValidationError("symmetry set is flagged closed but is not a group");
  }
  return set;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

void WriteJsonFile(const std::string& path, const Json& j) {
  WriteTextFile(path, j.dump(2) + "\n");
}

}  // namespace ersym

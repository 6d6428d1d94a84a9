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

#include "ersym/training.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "ersym/aoh.h"
#include "ersym/error.h"
#include "ersym/evaluate.h"

namespace ersym {
namespace {

// Per-table, per-step dense arrays over (history, action).
class Tables {
 public:
  Tables(const TabularDecPomdp& model, bool shared) : shared_(shared) {
    const int n = shared ? 1 : model.num_agents();
    for (int i = 0; i < n; ++i) {
      AohSpace space(model, i);
      std::vector<std::vector<double>> steps;
      for (int t = 0; t < model.horizon; ++t) {
        steps.emplace_back(space.Count(t) * model.num_actions(i), 0.0);
      }
      data_.push_back(std::move(steps));
      actions_.push_back(model.num_actions(i));
    }
  }
  double* Row(int agent, int step, int64_t aoh) {
    const int k = shared_ ? 0 : agent;
    return &data_[k][step][aoh * actions_[k]];
  }
  std::vector<std::vector<std::vector<double>>>& data() { return data_; }

 private:
  bool shared_;
  std::vector<std::vector<std::vector<double>>> data_;
  std::vector<int> actions_;
};

struct Decision {
  int agent;
  int step;
  int64_t aoh;
  int action;
};

struct Episode {
  std::vector<Decision> decisions;
  std::vector<double> rewards;  // rewards[t] received after step t
  int length = 0;
  double ret = 0.0;
};

class Learner {
 public:
  Learner(const TabularDecPomdp& model, const TrainerConfig& cfg)
      : model_(model), cfg_(cfg), tables_(model, cfg.shared_q) {
    for (int i = 0; i < model.num_agents(); ++i) {
      spaces_.emplace_back(model, i);
      legal_.emplace_back();
      for (int t = 0; t < model.horizon; ++t) {
        legal_[i].push_back(model.LegalActions(i, t));
      }
    }
  }
  virtual ~Learner() = default;

  virtual int Act(int agent, int step, int64_t aoh, Rng& rng) = 0;
  virtual void Update(const Episode& ep, int64_t episode_index) = 0;
  virtual std::vector<double> Distribution(int agent, int step, int64_t aoh) = 0;

  TabularJointPolicy Extract() {
    return TabularJointPolicy::FromFunction(
        model_, [this](int agent, int step, const LocalAoh& h) {
          return Distribution(agent, step, spaces_[agent].Encode(h));
        });
  }

 protected:
  void CheckFinite(const double* row, int n, int64_t episode, int agent,
                   int step) const {
    for (int a = 0; a < n; ++a) {
      if (!std::isfinite(row[a])) {
        std::ostringstream msg;
        msg << "training diverged at episode " << episode << ": agent " << agent
            << " step " << step << " action " << a << " has value " << row[a];
        throw DivergenceError(msg.str());
      }
    }
  }

  const TabularDecPomdp& model_;
  TrainerConfig cfg_;
  Tables tables_;
  std::vector<AohSpace> spaces_;
  std::vector<std::vector<std::vector<int>>> legal_;
};

class IqlLearner : public Learner {
 public:
  IqlLearner(const TabularDecPomdp& model, const TrainerConfig& cfg, Rng& init)
      : Learner(model, cfg) {
    for (auto& table : tables_.data()) {
      for (auto& step : table) {
        for (double& q : step) q = cfg.q_init * init.Uniform();
      }
    }
  }

  int Act(int agent, int step, int64_t aoh, Rng& rng) override {
    const auto& legal = legal_[agent][step];
    if (rng.Uniform() < cfg_.epsilon) {
      return legal[rng.UniformInt(legal.size())];
    }
    const int na = model_.num_actions(agent);
    return ArgmaxLegal({tables_.Row(agent, step, aoh), static_cast<size_t>(na)}, legal);
  }

  void Update(const Episode& ep, int64_t episode_index) override {
    for (const Decision& d : ep.decisions) {
      double target = ep.rewards[d.step];
      if (d.step + 1 < ep.length) target += model_.gamma * MaxNext(ep, d);
      double* row = tables_.Row(d.agent, d.step, d.aoh);
      row[d.action] += cfg_.learning_rate * (target - row[d.action]);
      CheckFinite(row, model_.num_actions(d.agent), episode_index, d.agent, d.step);
    }
  }

  std::vector<double> Distribution(int agent, int step, int64_t aoh) override {
    const int na = model_.num_actions(agent);
    std::vector<double> p(na, 0.0);
    p[ArgmaxLegal({tables_.Row(agent, step, aoh), static_cast<size_t>(na)},
                  legal_[agent][step])] = 1.0;
    return p;
  }

 private:
  double MaxNext(const Episode& ep, const Decision& d) {
    // The decision of the same agent at the next step holds its next history.
    for (const Decision& e : ep.decisions) {
      if (e.agent == d.agent && e.step == d.step + 1) {
        const double* row = tables_.Row(e.agent, e.step, e.aoh);
        double best = -INFINITY;
        for (int a : legal_[e.agent][e.step]) best = std::max(best, row[a]);
        return best;
      }
    }
    return 0.0;
  }
};

class PgLearner : public Learner {
 public:
  PgLearner(const TabularDecPomdp& model, const TrainerConfig& cfg)
      : Learner(model, cfg) {}

  int Act(int agent, int step, int64_t aoh, Rng& rng) override {
    return rng.Categorical(Distribution(agent, step, aoh));
  }

  void Update(const Episode& ep, int64_t episode_index) override {
    std::vector<double> to_go(ep.length + 1, 0.0);
    for (int t = ep.length - 1; t >= 0; --t) {
      to_go[t] = ep.rewards[t] + model_.gamma * to_go[t + 1];
    }
    for (const Decision& d : ep.decisions) {
      const std::vector<double> p = Distribution(d.agent, d.step, d.aoh);
      double* row = tables_.Row(d.agent, d.step, d.aoh);
      const double scale = cfg_.learning_rate * (to_go[d.step] - cfg_.baseline) /
                           cfg_.temperature;
      for (int a : legal_[d.agent][d.step]) {
        row[a] += scale * ((a == d.action ? 1.0 : 0.0) - p[a]);
      }
      CheckFinite(row, model_.num_actions(d.agent), episode_index, d.agent, d.step);
    }
  }

  std::vector<double> Distribution(int agent, int step, int64_t aoh) override {
    const int na = model_.num_actions(agent);
    const double* row = tables_.Row(agent, step, aoh);
    const auto& legal = legal_[agent][step];
    std::vector<double> p(na, 0.0);
    double hi = -INFINITY;
    for (int a : legal) hi = std::max(hi, row[a]);
    double total = 0.0;
    for (int a : legal) {
      p[a] = std::exp((row[a] - hi) / cfg_.temperature);
      total += p[a];
    }
    for (int a : legal) p[a] /= total;
    return p;
  }
};

void CheckConfig(const TrainerConfig& cfg) {
  const auto v = ValidateTrainerConfig(cfg);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "invalid trainer config:";
  for (const auto& line : v) msg << "\n  " << line;
  throw ValidationError(msg.str());
}

// Shared loop. Each episode draws a group element for agent 1; other agents
// always see the environment as is.
TrainResult Train(const TabularDecPomdp& model, const SymmetrySet& group,
                  const TrainerConfig& cfg) {
  CheckModel(model);
  CheckConfig(cfg);
  if (cfg.shared_q && !model.AgentsShareSpaces()) {
    throw ValidationError("shared tables require identical agent spaces");
  }
  const int n = model.num_agents();
  Rng rng(MixSeed(cfg.seed, 0));
  Rng init(MixSeed(cfg.seed, 1));
  Rng sym_rng(MixSeed(cfg.seed, 2));
  std::unique_ptr<Learner> learner;
  if (cfg.algorithm == TrainerAlgorithm::kIql) {
    learner = std::make_unique<IqlLearner>(model, cfg, init);
  } else {
    learner = std::make_unique<PgLearner>(model, cfg);
  }
  std::vector<SymmetryMap> inverses;
  for (const auto& phi : group.maps) inverses.push_back(Inverse(phi));

  TrainResult result;
  double window = 0.0;
  int64_t window_count = 0;
  std::vector<int64_t> aoh(n);
  std::vector<int> own(n), env(n);
  Episode ep;
  for (int64_t e = 0; e < cfg.episodes; ++e) {
    const size_t g = group.maps.size() == 1 ? 0 : sym_rng.UniformInt(group.maps.size());
    const SymmetryMap& phi = group.maps[g];
    const SymmetryMap& inv = inverses[g];
    auto obs_in = [&](int i, int o) { return i == 1 ? inv.obs[1][o] : o; };
    auto act_out = [&](int i, int a) { return i == 1 ? phi.act[1][a] : a; };

    ep.decisions.clear();
    ep.rewards.clear();
    ep.ret = 0.0;
    int s = SampleInitialState(model, rng);
    const std::vector<int> o0 = SampleInitialObservations(model, s, rng);
    for (int i = 0; i < n; ++i) aoh[i] = o0[i] >= 0 ? obs_in(i, o0[i]) : 0;
    double discount = 1.0;
    int t = 0;
    for (; t < model.horizon; ++t) {
      for (int i = 0; i < n; ++i) {
        own[i] = learner->Act(i, t, aoh[i], rng);
        env[i] = act_out(i, own[i]);
        ep.decisions.push_back({i, t, aoh[i], own[i]});
      }
      const StepOutcome out = SampleStep(model, s, model.EncodeJointAction(env), rng);
      ep.rewards.push_back(out.reward);
      ep.ret += discount * out.reward;
      discount *= model.gamma;
      s = out.next_state;
      for (int i = 0; i < n; ++i) {
        aoh[i] = (aoh[i] * model.num_actions(i) + own[i]) * model.num_observations(i) +
                 obs_in(i, out.observations[i]);
      }
      if (model.IsTerminal(s)) {
        ++t;
        break;
      }
    }
    ep.length = t;
    learner->Update(ep, e);

    window += ep.ret;
    ++window_count;
    if (cfg.log_every > 0 && (window_count == cfg.log_every || e + 1 == cfg.episodes)) {
      result.curve.push_back({e + 1, window / static_cast<double>(window_count)});
      window = 0.0;
      window_count = 0;
    }
    if (cfg.checkpoint_every > 0 && (e + 1) % cfg.checkpoint_every == 0) {
      result.checkpoints.push_back({e + 1, ExactExpectedReturn(model, learner->Extract())});
    }
  }
  result.policy = learner->Extract();
  return result;
}

}  // namespace

std::string AlgorithmName(TrainerAlgorithm algorithm) {
  return algorithm == TrainerAlgorithm::kIql ? "iql" : "pg";
}

TrainerAlgorithm ParseAlgorithm(const std::string& name) {
  if (name == "iql") return TrainerAlgorithm::kIql;
  if (name == "pg") return TrainerAlgorithm::kPg;
  throw ValidationError("unknown trainer algorithm '" + name + "' (expected iql or pg)");
}

std::vector<std::string> ValidateTrainerConfig(const TrainerConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.episodes < 1) v.push_back("episodes must be >= 1");
  if (!(cfg.learning_rate > 0.0)) v.push_back("learning_rate must be > 0");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) v.push_back("epsilon must lie in [0, 1]");
  if (!(cfg.temperature > 0.0)) v.push_back("temperature must be > 0");
  if (!(cfg.q_init >= 0.0)) v.push_back("q_init must be >= 0");
  if (cfg.log_every < 0) v.push_back("log_every must be >= 0");
  if (cfg.checkpoint_every < 0) v.push_back("checkpoint_every must be >= 0");
  return v;
}

TrainResult TrainSelfPlay(const TabularDecPomdp& model, const TrainerConfig& cfg) {
  return Train(model, {{IdentitySymmetry(model)}, true}, cfg);
}

TrainResult TrainOtherPlay(const TabularDecPomdp& model, const SymmetrySet& set,
                           const TrainerConfig& cfg) {
  if (model.num_agents() != 2) {
    throw ValidationError("other-play training requires a two-agent model");
  }
  if (set.maps.empty()) throw ValidationError("symmetry set is empty");
  return Train(model, GroupClosure(model, set), cfg);
}

std::vector<double> StreamFormPartnerProbs(const TabularDecPomdp& model,
                                           const SymmetryMap& phi,
                                           const LocalPolicy& partner, int step,
                                           const LocalAoh& aoh) {
  const SymmetryMap inv = Inverse(phi);
  const int i = partner.agent();
  LocalAoh seen = aoh;
  if (seen.initial_observation >= 0) {
    seen.initial_observation = inv.obs[i][seen.initial_observation];
  }
  for (auto& [a, o] : seen.steps) {
    a = inv.act[i][a];
    o = inv.obs[i][o];
  }
  const auto own = partner.Probs(step, AohSpace(model, i).Encode(seen));
  std::vector<double> env(own.size(), 0.0);
  for (size_t b = 0; b < own.size(); ++b) env[phi.act[i][b]] += own[b];
  return env;
}

PolicyPool BuildPolicyPool(const TabularDecPomdp& model, const PoolConfig& pool,
                           const TrainerConfig& cfg) {
  if (pool.k < 1) throw ValidationError("pool size k must be >= 1");
  PolicyPool out;
  uint64_t next_seed_index = 0;
  auto train = [&](size_t slot) {
    TrainerConfig c = cfg;
    c.seed = MixSeed(cfg.seed, next_seed_index++);
    c.log_every = 0;
    c.checkpoint_every = 0;
    TabularJointPolicy pi = TrainSelfPlay(model, c).policy;
    out.raw_returns[slot] = ExactExpectedReturn(model, pi);
    out.raw[slot] = std::move(pi);
    out.seeds[slot] = c.seed;
  };
  out.raw.resize(pool.k);
  out.raw_returns.resize(pool.k);
  out.seeds.resize(pool.k);
  for (int i = 0; i < pool.k; ++i) train(i);
  while (true) {
    const double best = *std::max_element(out.raw_returns.begin(), out.raw_returns.end());
    const double threshold = best - pool.optimality_fraction * std::abs(best);
    int worst = -1;
    for (int i = 0; i < pool.k; ++i) {
      if (out.raw_returns[i] < threshold) {
        worst = i;
        break;
      }
    }
    if (worst < 0) break;
    if (out.retrains >= pool.max_retrains) {
      throw CapExceeded("policy pool: " + std::to_string(pool.max_retrains) +
                        " retrains used without reaching the optimality threshold " +
                        std::to_string(threshold));
    }
    ++out.retrains;
    train(worst);
  }
  for (const auto& pi : out.raw) {
    out.policies.push_back(EpsilonSoften(model, pi, pool.epsilon));
  }
  return out;
}

}  // namespace ersym

#include "gauntlet/learninglab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace gauntlet {
namespace learninglab {

namespace {

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr double kBig = 1000000.0;
constexpr double kSmall = 1000.0;
constexpr double kBonus = 1.0;
constexpr double kCancer = 100.0;

struct Step {
  std::string state;
  std::string action;  // empty for forced steps
  double reward = 0.0;
  // Future return each unchosen action would have realized, hidden draw held.
  std::map<std::string, double> foregone_future;
};

using Trajectory = std::vector<Step>;

struct Learner {
  virtual ~Learner() = default;
  virtual const std::vector<std::string>& actions(const std::string& state) const = 0;
  // The rule a predictor reads: the agent's commitment for this episode.
  virtual std::string commit(const std::string& state) = 0;
  virtual std::string act(const std::string& state) = 0;
  virtual void feed(const Trajectory& traj) = 0;
  virtual void end_episode() {}
  virtual std::string greedy(const std::string& state) const = 0;
};

struct Tabular {
  std::map<std::string, std::vector<std::string>> space;
  std::map<std::string, std::map<std::string, double>> table;

  void init(const std::map<std::string, std::vector<std::string>>& s) {
    space = s;
    for (const auto& [st, acts] : s)
      for (const auto& a : acts) table[st][a] = 0.0;
  }
  std::string argmax(const std::string& state) const {
    const auto& acts = space.at(state);
    std::string best = acts.front();
    for (const auto& a : acts)
      if (table.at(state).at(a) > table.at(state).at(best)) best = a;
    return best;  // ties keep the first-listed action
  }
};

struct ValueLearner : Learner {
  enum class Kind { Q, Sarsa, QCounterfactual } kind;
  Tabular q;
  double step, explore, gamma;
  std::mt19937_64 rng;

  ValueLearner(Kind k, const std::map<std::string, std::vector<std::string>>& space,
               const TrainConfig& cfg, uint64_t seed)
      : kind(k), step(cfg.step), explore(cfg.explore), gamma(cfg.gamma), rng(seed) {
    q.init(space);
  }
  const std::vector<std::string>& actions(const std::string& s) const override {
    return q.space.at(s);
  }
  std::string commit(const std::string& s) override { return q.argmax(s); }
  std::string act(const std::string& s) override {
    const auto& acts = q.space.at(s);
    if (acts.size() == 1) return acts.front();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < explore) {
      std::uniform_int_distribution<size_t> pick(0, acts.size() - 1);
      return acts[pick(rng)];
    }
    return q.argmax(s);
  }
  void feed(const Trajectory& traj) override {
    for (size_t t = 0; t < traj.size(); ++t) {
      const Step& st = traj[t];
      if (st.action.empty()) continue;
      double boot = 0.0;
      if (t + 1 < traj.size()) {
        const std::string& ns = traj[t + 1].state;
        if (kind == Kind::Sarsa && !traj[t + 1].action.empty())
          boot = q.table.at(ns).at(traj[t + 1].action);
        else
          boot = q.table.at(ns).at(q.argmax(ns));
      }
      double target = st.reward + gamma * boot;
      double& cell = q.table.at(st.state).at(st.action);
      cell += step * (target - cell);
      if (kind == Kind::QCounterfactual) {
        // Foregone returns are complete futures; no bootstrap needed.
        for (const auto& [a, g] : st.foregone_future) {
          double& other = q.table.at(st.state).at(a);
          other += step * (g - other);
        }
      }
    }
  }
  std::string greedy(const std::string& s) const override { return q.argmax(s); }
};

// Commitment-sampling policy learner: it samples its rule for the episode
// from softmax preferences and plays it; the return reinforces that rule.
// The future/episode flavors differ only in which return is credited.
struct PolicyLearner : Learner {
  bool episode_return;
  Tabular pref;
  double step;
  std::mt19937_64 rng;
  std::map<std::string, std::string> plan;  // this episode's sampled rules
  std::map<std::string, double> baseline, scale;

  PolicyLearner(bool episode, const std::map<std::string, std::vector<std::string>>& space,
                const TrainConfig& cfg, uint64_t seed)
      : episode_return(episode), step(cfg.pg_step), rng(seed) {
    pref.init(space);
    for (const auto& [s, acts] : space) {
      baseline[s] = 0.0;
      scale[s] = 1.0;
    }
  }
  const std::vector<std::string>& actions(const std::string& s) const override {
    return pref.space.at(s);
  }
  std::string sample(const std::string& s) {
    const auto& acts = pref.space.at(s);
    if (acts.size() == 1) return acts.front();
    double mx = -1e300;
    for (const auto& a : acts) mx = std::max(mx, pref.table.at(s).at(a));
    std::vector<double> w;
    double total = 0.0;
    for (const auto& a : acts) {
      double e = std::exp(pref.table.at(s).at(a) - mx);
      w.push_back(e);
      total += e;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double r = u(rng);
    for (size_t i = 0; i < acts.size(); ++i) {
      if (r < w[i]) return acts[i];
      r -= w[i];
    }
    return acts.back();
  }
  std::string commit(const std::string& s) override {
    auto it = plan.find(s);
    if (it != plan.end()) return it->second;
    std::string a = sample(s);
    plan[s] = a;
    return a;
  }
  std::string act(const std::string& s) override { return commit(s); }
  void feed(const Trajectory& traj) override {
    double total = 0.0;
    for (const auto& st : traj) total += st.reward;
    std::vector<double> suffix(traj.size() + 1, 0.0);
    for (size_t t = traj.size(); t > 0; --t)
      suffix[t - 1] = suffix[t] + traj[t - 1].reward;
    for (size_t t = 0; t < traj.size(); ++t) {
      const Step& st = traj[t];
      if (st.action.empty() || pref.space.at(st.state).size() == 1) continue;
      double g = episode_return ? total : suffix[t];
      double& b = baseline[st.state];
      double& m = scale[st.state];
      double adv = g - b;
      b += 0.05 * adv;
      m += 0.05 * (std::fabs(adv) - m);
      double normalized = adv / (m + 1e-9);
      normalized = std::clamp(normalized, -3.0, 3.0);
      double& cell = pref.table.at(st.state).at(st.action);
      cell = std::clamp(cell + step * normalized, -20.0, 20.0);
    }
  }
  void end_episode() override { plan.clear(); }
  std::string greedy(const std::string& s) const override { return pref.argmax(s); }
};

struct Env {
  virtual ~Env() = default;
  virtual std::map<std::string, std::vector<std::string>> space() const = 0;
  virtual Trajectory episode(Learner& agent) = 0;
};

std::string flip(const std::string& a, const std::vector<std::string>& acts) {
  return a == acts[0] ? acts[1] : acts[0];
}

struct NewcombEnv : Env {
  double accuracy;
  std::mt19937_64 rng;
  NewcombEnv(double acc, uint64_t seed) : accuracy(acc), rng(seed) {}
  std::map<std::string, std::vector<std::string>> space() const override {
    return {{"briefing", {"wait"}}, {"boxes", {"one-box", "two-box"}}};
  }
  Trajectory episode(Learner& agent) override {
    std::string rule = agent.commit("boxes");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::string pred = u(rng) < accuracy ? rule : flip(rule, {"one-box", "two-box"});
    double r0 = pred == "one-box" ? kBig : 0.0;  // the predicted box is filled
    Trajectory traj;
    traj.push_back({"briefing", "wait", r0, {}});
    std::string a = agent.act("boxes");
    double r1 = a == "two-box" ? kSmall : 0.0;
    Step s{"boxes", a, r1, {}};
    s.foregone_future[flip(a, {"one-box", "two-box"})] =
        a == "two-box" ? 0.0 : kSmall;
    traj.push_back(s);
    return traj;
  }
};

struct TransparentNewcombEnv : Env {
  double accuracy;
  std::mt19937_64 rng;
  TransparentNewcombEnv(double acc, uint64_t seed) : accuracy(acc), rng(seed) {}
  std::map<std::string, std::vector<std::string>> space() const override {
    return {{"full", {"one-box", "two-box"}}, {"empty", {"one-box", "two-box"}}};
  }
  Trajectory episode(Learner& agent) override {
    std::string rule = agent.commit("full");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::string pred = u(rng) < accuracy ? rule : flip(rule, {"one-box", "two-box"});
    std::string state = pred == "one-box" ? "full" : "empty";
    std::string a = agent.act(state);
    auto pay = [&](const std::string& act) {
      if (state == "full") return act == "one-box" ? kBig : kBig + kSmall;
      return act == "one-box" ? 0.0 : kSmall;
    };
    Step s{state, a, pay(a), {}};
    s.foregone_future[flip(a, {"one-box", "two-box"})] = pay(flip(a, {"one-box", "two-box"}));
    return {s};
  }
};

struct LesionEnv : Env {
  double p_smoke, p_refrain;
  std::mt19937_64 rng;
  LesionEnv(double ps, double pr, uint64_t seed) : p_smoke(ps), p_refrain(pr), rng(seed) {}
  std::map<std::string, std::vector<std::string>> space() const override {
    return {{"choice", {"smoke", "refrain"}}};
  }
  Trajectory episode(Learner& agent) override {
    std::string a = agent.act("choice");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // The adversarial training correlation: the lesion tracks the action.
    bool lesion = u(rng) < (a == "smoke" ? p_smoke : p_refrain);
    auto pay = [&](const std::string& act) {
      return (act == "smoke" ? kBonus : 0.0) - (lesion ? kCancer : 0.0);
    };
    Step s{"choice", a, pay(a), {}};
    s.foregone_future[flip(a, {"smoke", "refrain"})] = pay(flip(a, {"smoke", "refrain"}));
    return {s};
  }
};

std::unique_ptr<Env> make_env(EnvId id, const TrainConfig& cfg, uint64_t seed) {
  switch (id) {
    case EnvId::RepeatedNewcomb:
      return std::make_unique<NewcombEnv>(cfg.predictor_accuracy, seed);
    case EnvId::RepeatedTransparentNewcomb:
      return std::make_unique<TransparentNewcombEnv>(cfg.predictor_accuracy, seed);
    case EnvId::RepeatedLesion:
      return std::make_unique<LesionEnv>(cfg.p_lesion_smoke, cfg.p_lesion_refrain, seed);
  }
  throw std::invalid_argument("unknown env");
}

std::unique_ptr<Learner> make_learner(LearnerId id,
                                      const std::map<std::string, std::vector<std::string>>& space,
                                      const TrainConfig& cfg, uint64_t seed) {
  switch (id) {
    case LearnerId::QLearning:
      return std::make_unique<ValueLearner>(ValueLearner::Kind::Q, space, cfg, seed);
    case LearnerId::Sarsa:
      return std::make_unique<ValueLearner>(ValueLearner::Kind::Sarsa, space, cfg, seed);
    case LearnerId::QCounterfactual:
      return std::make_unique<ValueLearner>(ValueLearner::Kind::QCounterfactual, space, cfg,
                                            seed);
    case LearnerId::PgFutureReturn:
      return std::make_unique<PolicyLearner>(false, space, cfg, seed);
    case LearnerId::PgEpisodeReturn:
      return std::make_unique<PolicyLearner>(true, space, cfg, seed);
  }
  throw std::invalid_argument("unknown learner");
}

}  // namespace

std::string to_string(EnvId e) {
  switch (e) {
    case EnvId::RepeatedNewcomb: return "repeated-newcomb";
    case EnvId::RepeatedTransparentNewcomb: return "repeated-transparent-newcomb";
    case EnvId::RepeatedLesion: return "repeated-lesion";
  }
  return "?";
}

std::string to_string(LearnerId l) {
  switch (l) {
    case LearnerId::QLearning: return "q-learning";
    case LearnerId::Sarsa: return "sarsa";
    case LearnerId::PgFutureReturn: return "pg-future-return";
    case LearnerId::PgEpisodeReturn: return "pg-episode-return";
    case LearnerId::QCounterfactual: return "q-counterfactual";
  }
  return "?";
}

std::optional<EnvId> env_from_string(const std::string& s) {
  for (EnvId e : {EnvId::RepeatedNewcomb, EnvId::RepeatedTransparentNewcomb,
                  EnvId::RepeatedLesion})
    if (to_string(e) == s) return e;
  return std::nullopt;
}

std::optional<LearnerId> learner_from_string(const std::string& s) {
  for (LearnerId l : {LearnerId::QLearning, LearnerId::Sarsa, LearnerId::PgFutureReturn,
                      LearnerId::PgEpisodeReturn, LearnerId::QCounterfactual})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

TrainStats train(EnvId env_id, LearnerId learner_id, const TrainConfig& cfg) {
  if (cfg.episodes < 1) throw std::invalid_argument("need at least one episode");
  uint64_t s = cfg.seed;
  uint64_t env_seed = splitmix64(s);
  uint64_t learner_seed = splitmix64(s);
  auto env = make_env(env_id, cfg, env_seed);
  auto learner = make_learner(learner_id, env->space(), cfg, learner_seed);

  unsigned window = std::max(1u, cfg.episodes / 10);
  TrainStats stats;
  stats.window = window;
  std::vector<std::map<std::string, std::string>> greedy_trace;
  std::map<std::string, std::map<std::string, unsigned>> taken;
  std::map<std::string, unsigned> visits;

  for (unsigned ep = 0; ep < cfg.episodes; ++ep) {
    Trajectory traj = env->episode(*learner);
    learner->feed(traj);
    learner->end_episode();
    double total = 0.0;
    for (const auto& st : traj) total += st.reward;
    stats.reward_curve.push_back(total);

    std::map<std::string, std::string> g;
    for (const auto& [state, acts] : env->space())
      if (acts.size() > 1) g[state] = learner->greedy(state);
    greedy_trace.push_back(g);

    if (ep + window >= cfg.episodes) {
      for (const auto& st : traj) {
        if (st.action.empty()) continue;
        if (env->space().at(st.state).size() == 1) continue;
        ++taken[st.state][st.action];
        ++visits[st.state];
      }
    }
  }

  stats.greedy_action = greedy_trace.back();
  stats.converged = true;
  for (size_t i = greedy_trace.size() - window; i < greedy_trace.size(); ++i)
    if (greedy_trace[i] != stats.greedy_action) stats.converged = false;
  for (const auto& [state, counts] : taken) {
    for (const auto& [a, n] : counts)
      stats.action_freq[state][a] = static_cast<double>(n) / visits[state];
  }
  return stats;
}

std::map<std::string, double> counterfactual_feedback(
    EnvId env, const std::string& state, const std::string& chosen,
    const std::map<std::string, std::string>& hidden) {
  auto other = [&](const std::vector<std::string>& acts) {
    return chosen == acts[0] ? acts[1] : acts[0];
  };
  switch (env) {
    case EnvId::RepeatedNewcomb: {
      if (state == "briefing") return {};
      if (state != "boxes") throw std::invalid_argument("unknown state '" + state + "'");
      double filled = hidden.at("prediction") == "one-box" ? kBig : 0.0;
      std::string o = other({"one-box", "two-box"});
      return {{o, filled + (o == "two-box" ? kSmall : 0.0)}};
    }
    case EnvId::RepeatedTransparentNewcomb: {
      std::string o = other({"one-box", "two-box"});
      if (state == "full") return {{o, o == "one-box" ? kBig : kBig + kSmall}};
      if (state == "empty") return {{o, o == "one-box" ? 0.0 : kSmall}};
      throw std::invalid_argument("unknown state '" + state + "'");
    }
    case EnvId::RepeatedLesion: {
      if (state != "choice") throw std::invalid_argument("unknown state '" + state + "'");
      bool lesion = hidden.at("lesion") == "yes";
      std::string o = other({"smoke", "refrain"});
      return {{o, (o == "smoke" ? kBonus : 0.0) - (lesion ? kCancer : 0.0)}};
    }
  }
  throw std::invalid_argument("unknown env");
}

SweepReport sweep(EnvId env, const std::vector<LearnerId>& learners,
                  const std::vector<uint64_t>& seeds, const TrainConfig& cfg) {
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  SweepReport rep;
  rep.env = env;
  for (LearnerId l : learners) {
    for (uint64_t seed : seeds) {
      TrainConfig c = cfg;
      c.seed = seed;
      TrainStats st = train(env, l, c);
      std::string label;
      if (!st.converged) {
        label = "nonconverged";
      } else {
        for (const auto& [state, a] : st.greedy_action)
          label += (label.empty() ? "" : ",") + state + "=" + a;
      }
      ++rep.tally[to_string(l)][label];
      rep.rows.push_back({l, seed, std::move(st)});
    }
  }
  return rep;
}

}  // namespace learninglab
}  // namespace gauntlet

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gauntlet {
namespace learninglab {

// RL numerics use ordinary doubles: the claims here are statistical, with
// explicit thresholds, unlike the exact core.

enum class EnvId { RepeatedNewcomb, RepeatedTransparentNewcomb, RepeatedLesion };
enum class LearnerId { QLearning, Sarsa, PgFutureReturn, PgEpisodeReturn, QCounterfactual };

std::string to_string(EnvId e);
std::string to_string(LearnerId l);
std::optional<EnvId> env_from_string(const std::string& s);
std::optional<LearnerId> learner_from_string(const std::string& s);

struct TrainConfig {
  unsigned episodes = 2000;
  uint64_t seed = 1;
  double step = 0.1;      // value-learner step size
  double explore = 0.1;   // epsilon for value learners
  double gamma = 0.95;
  double pg_step = 0.4;   // normalized preference step
  double predictor_accuracy = 0.9;  // newcomb-style envs
  double p_lesion_smoke = 0.9;
  double p_lesion_refrain = 0.1;
};

struct TrainStats {
  std::map<std::string, std::string> greedy_action;            // state -> action
  std::map<std::string, std::map<std::string, double>> action_freq;  // last window
  bool converged = false;  // greedy actions stable over the final window
  unsigned window = 0;     // final 10% of episodes
  std::vector<double> reward_curve;

  bool operator==(const TrainStats&) const = default;
};

// Deterministic given (env, learner, cfg): bitwise-identical stats.
TrainStats train(EnvId env, LearnerId learner, const TrainConfig& cfg);

// Exact whole-episode payoff each unchosen action would have realized,
// holding the hidden draw (prediction or lesion) fixed. Single-action states
// yield an empty table.
std::map<std::string, double> counterfactual_feedback(
    EnvId env, const std::string& state, const std::string& chosen,
    const std::map<std::string, std::string>& hidden);

struct SweepRow {
  LearnerId learner;
  uint64_t seed;
  TrainStats stats;
};

struct SweepReport {
  EnvId env;
  std::vector<SweepRow> rows;
  // learner -> (behavior label -> count); labels are the per-state greedy
  // actions, or "nonconverged".
  std::map<std::string, std::map<std::string, unsigned>> tally;
};

SweepReport sweep(EnvId env, const std::vector<LearnerId>& learners,
                  const std::vector<uint64_t>& seeds, const TrainConfig& cfg);

}  // namespace learninglab
}  // namespace gauntlet

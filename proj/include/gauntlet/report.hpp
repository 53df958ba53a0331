#pragma once

#include "gauntlet/io.hpp"
#include "gauntlet/learninglab.hpp"
#include "gauntlet/scenarios.hpp"

namespace gauntlet {
namespace report {

inline constexpr const char* kVersion = "0.1.0";

// Theory x dilemma matrix: recommendations, induced policies, realized
// values, exploit verdicts; for analytic games and envelope models the
// module summaries. Byte-stable for identical inputs and seeds.
io::Json run_report(const std::string& target, const scenarios::Scenario& scenario,
                    const scenarios::ScenarioParams& params,
                    const std::vector<TheoryId>& theories, AnthropicRule rule,
                    uint64_t seed);

io::Json learn_report(learninglab::EnvId env,
                      const std::vector<learninglab::LearnerId>& learners,
                      const learninglab::TrainConfig& cfg, unsigned seed_count,
                      uint64_t base_seed);

// Plain comma-separated reward curves (learner,seed,episode,reward) for
// external plotting.
std::string learn_curves_csv(learninglab::EnvId env,
                             const std::vector<learninglab::LearnerId>& learners,
                             const learninglab::TrainConfig& cfg, unsigned seed_count,
                             uint64_t base_seed);

io::Json audit_report(const std::string& target, const Dilemma& d, TheoryId theory,
                      AnthropicRule rule, long long bound);

}  // namespace report
}  // namespace gauntlet

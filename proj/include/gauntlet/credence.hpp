#pragma once

#include "gauntlet/engine.hpp"

namespace gauntlet {

enum class AnthropicRule { SSA, SIA };

std::string to_string(AnthropicRule rule);
std::optional<AnthropicRule> anthropic_rule_from_string(const std::string& s);

// Credence over (world, observer moment) pairs; sums exactly to 1 and
// marginalizes to world-level credences. Observer moments are decision
// tokens.
struct CredenceTable {
  struct Entry {
    World world;
    std::string token;
    Rational credence;
  };
  std::vector<Entry> entries;

  Rational total() const {
    Rational t(0);
    for (const auto& e : entries) t += e.credence;
    return t;
  }
  // World-level marginal as a WorldDist.
  WorldDist world_marginal() const;
};

// SSA weights each world by prior probability times (matching moments /
// total moments in that world); SIA weights each (world, moment) by prior
// probability. Both normalize. The reference class is every decision token
// occurring in the world.
CredenceTable anthropic_credence(const Dilemma& d, const std::string& infoset,
                                 AnthropicRule rule);

// Overload against a precomputed joint (used by evaluators that bind
// candidate policies into the predictors).
CredenceTable anthropic_credence(const Dilemma& d, const WorldDist& prior,
                                 const std::string& infoset, AnthropicRule rule);

// Conditions a credence table on the agent's own past actions (rule values),
// treated as ordinary evidence through the reference-class joint.
CredenceTable posterior_after_actions(
    const CredenceTable& prior, const Dilemma& d,
    const std::vector<std::pair<std::string, std::string>>& taken);

// Margin EV(cooperate) - EV(defect) for an agent that assigns credence s to
// being inside a simulation where defection scores u_defect_sim, while real
// defection scores min(u_defect_real, cap). Unbounded values are nullopt; an
// unbounded cap together with unbounded real defection utility makes
// defection dominate, returned as an unbounded-negative marker.
struct CooperationMargin {
  bool defect_dominates_unbounded = false;  // margin is -infinity
  Rational value;                           // valid when !defect_dominates_unbounded
};

CooperationMargin simulation_cooperation_margin(const Rational& s, const Rational& u_coop,
                                                const std::optional<Rational>& u_defect_real,
                                                const Rational& u_defect_sim,
                                                const std::optional<Rational>& cap);

}  // namespace gauntlet

#pragma once

#include <functional>
#include <optional>

#include "gauntlet/dilemma.hpp"

namespace gauntlet {

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty() && warnings.empty(); }
  std::string to_string() const;
};

// Validation never throws: every violated invariant is reported.
ValidationReport validate(const Dilemma& d);

// How predictors and rules resolve during world enumeration.
//
// Reference semantics (no policy): rules are drawn from the disposition and
// every predictor reads the realized rule of its reads_infoset, unless a
// candidate policy is supplied, in which case reads-candidate-policy
// predictors read the candidate instead (used by induced-policy rollouts at
// degenerate infosets).
//
// Policy semantics (joint(d, pi)): rules are pinned to pi;
// reads-candidate-policy predictors read pi, reads-disposition predictors
// draw an independent rule from the disposition. all_predictors_read_policy
// overrides both modes (functional scoring).
struct EvalContext {
  const Policy* policy = nullptr;
  const Policy* predictor_candidate = nullptr;
  bool all_predictors_read_policy = false;
  // Predictors reading these infosets see the given action instead of any
  // other target (ratification's contemplated final decision).
  std::map<std::string, std::string> read_override;
};

WorldDist enumerate_worlds(const Dilemma& d, const EvalContext& ctx);

inline WorldDist reference_joint(const Dilemma& d) { return enumerate_worlds(d, {}); }

// Exact joint over all variables under the policy, predictors resolved per
// their mode.
WorldDist joint(const Dilemma& d, const Policy& pi);

Rational utility_of(const Dilemma& d, const World& w);

Rational expected_utility(const Dilemma& d, const Policy& pi);

Rational expected_utility(const Dilemma& d, const WorldDist& dist);

// Exact Bayes conditioning. Zero-probability events are an error, never
// smoothed.
WorldDist condition(const WorldDist& w, const std::function<bool(const World&)>& event);
WorldDist condition(const WorldDist& w, const Condition& event);

// Clamps one token to an action. Predictors and the other tokens of the same
// infoset keep following the disposition: the intervention severs evidential
// but not subjunctive structure.
Dilemma intervene(const Dilemma& d, const std::string& infoset,
                  const std::string& token, const std::string& action);

// True iff some token of the infoset occurs in the world.
bool infoset_occurs(const Dilemma& d, const std::string& infoset, const World& w);

// Exact payoff of a bet's event partition in a world.
Rational bet_payoff(const Bet& bet, const World& w);

// Disposition rows for an infoset; the distribution given the world's type
// variables. Throws when no row matches.
const DispositionRow& disposition_row(const Dilemma& d, const std::string& infoset,
                                      const World& w);

// Token ids causally downstream of `token` (through guard references),
// transitively. Chance variables never depend on tokens, so this is the full
// downstream set.
std::vector<std::string> downstream_tokens(const Dilemma& d, const std::string& token);

}  // namespace gauntlet

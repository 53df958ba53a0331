#pragma once

#include "gauntlet/credence.hpp"

namespace gauntlet {

enum class TheoryId {
  Edt,
  EdtTickle,
  EdtRatify,
  CdtMyopic,
  CdtSophisticated,
  Uedt,
  Ucdt,
  Fdt,
};

constexpr TheoryId kAllTheories[] = {
    TheoryId::Edt,           TheoryId::EdtTickle, TheoryId::EdtRatify,
    TheoryId::CdtMyopic,     TheoryId::CdtSophisticated,
    TheoryId::Uedt,          TheoryId::Ucdt,      TheoryId::Fdt,
};

bool is_updateless(TheoryId t);
std::string to_string(TheoryId t);
std::optional<TheoryId> theory_from_string(const std::string& s);

using History = std::vector<std::pair<std::string, std::string>>;

struct Recommendation {
  std::string infoset;
  TheoryId theory;
  AnthropicRule rule;
  // Exact expected value per action, in the infoset's action order.
  std::vector<std::pair<std::string, Rational>> action_values;
  std::vector<std::string> argmax;  // nonempty unless binding_unreachable
  // Set when evaluation had to bind predictors to a candidate policy because
  // the infoset's occurrence pins the rule (transparent-style predictors).
  bool candidate_bound = false;
  // The infoset is unreachable under the bound candidate; the rollout keeps
  // its current action.
  bool binding_unreachable = false;
};

struct PolicyRecommendation {
  TheoryId theory;
  std::vector<std::pair<Policy, Rational>> optimal;  // exact argmax set
  Rational best_value;
  size_t policies_considered = 0;
};

// Updateful evaluation at one infoset. The anthropic credence is conditioned
// on reaching the infoset and on the taken history; theories then diverge in
// how the current action is scored.
Recommendation recommend(const Dilemma& d, const std::string& infoset, TheoryId theory,
                         AnthropicRule rule, const History& history = {});

// Updateless policy optimization over the finite pure-policy space.
PolicyRecommendation optimal_policy(const Dilemma& d, TheoryId theory,
                                    size_t enumeration_bound = 131072);

// The self-consistent whole-game policy an agent of the theory plays.
// Updateful theories are rolled out infoset-by-infoset to a fixed point;
// updateless theories return an optimal_policy representative (ties broken
// by the documented action/enumeration order).
Policy induced_policy(const Dilemma& d, TheoryId theory, AnthropicRule rule);

// Prior value of a policy with every predictor reading it (the realized
// value against accuracy-faithful predictors; also fdt's scoring function).
Rational functional_value(const Dilemma& d, const Policy& pi);
WorldDist functional_joint(const Dilemma& d, const Policy& pi);

// Causal stage value of playing `action` at the token of `world`, holding
// non-descendants fixed: downstream tokens re-resolve from the disposition
// (or follow `plan` where it covers their infoset); predictors and the other
// tokens of the same infoset keep their realized values.
Rational intervention_value(const Dilemma& d, const World& world, const std::string& token,
                            const std::string& action,
                            const std::map<std::string, std::string>* plan = nullptr);

}  // namespace gauntlet

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gauntlet/rational.hpp"

namespace gauntlet {

// Errors thrown by the engine / evaluators (validation reports are returned,
// not thrown; see engine.hpp).
struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conjunction of equality requirements. Keys name chance/predictor variables
// or decision tokens; a token key matches only when the token occurs and its
// action equals the value.
struct Condition {
  std::map<std::string, std::string> require;

  bool empty() const { return require.empty(); }
};

// Finite chance variable with an exact conditional probability table.
// Parents may be chance or predictor variables (never decision tokens;
// decisions influence the world through token guards and the utility).
struct ChanceVar {
  struct Row {
    std::map<std::string, std::string> given;  // full parent assignment
    std::map<std::string, Rational> dist;      // value -> probability, sums to 1
  };
  std::string name;
  std::vector<std::string> parents;
  std::vector<std::string> domain;
  std::vector<Row> cpt;
};

// One concrete occurrence of a decision. The guard decides whether the token
// exists in a world; multiple tokens per infoset encode imperfect recall.
struct TokenDef {
  std::string id;
  Condition guard;  // empty guard = always occurs
};

struct InfoSet {
  std::string id;
  std::vector<std::string> actions;   // order is the documented tie-break order
  std::vector<std::string> observes;  // observation signature (metadata)
  std::vector<TokenDef> tokens;
};

// A predictor resolves against the rule played at reads_infoset without a
// causal edge from any decision token (subjunctive dependence). accuracy=1
// copies the read rule; otherwise errors are uniform over the other actions.
struct PredictorVar {
  enum class Mode { ReadsCandidatePolicy, ReadsDisposition };
  std::string name;
  std::string reads_infoset;
  Rational accuracy = Rational(1);
  Mode mode = Mode::ReadsCandidatePolicy;
};

// Reference-class statistics: a full-support action distribution per infoset,
// optionally conditioned on hidden type variables (e.g. the lesion).
struct DispositionRow {
  std::string infoset;
  std::map<std::string, std::string> given;  // type-variable assignment
  std::map<std::string, Rational> dist;      // action -> probability, full support
};

// Utility as a list of (condition, value) terms.
//   Sum:       value = sum of all matching terms (0 when none match)
//   Exclusive: exactly one term must match every reachable world
struct UtilitySpec {
  enum class Mode { Sum, Exclusive };
  struct Term {
    Condition when;
    Rational value;
  };
  Mode mode = Mode::Sum;
  std::vector<Term> terms;
};

// A sequential bet offer. Payoff rows must partition the reachable worlds.
// Infoset-offered bets pay once per token at which the accept action is
// played; pre-experiment bets pay once per world.
struct Bet {
  std::string name;
  std::optional<std::string> offer_infoset;  // nullopt = pre-experiment
  std::string accept_action = "accept";      // action that takes the bet
  struct Payoff {
    Condition when;
    Rational value;
  };
  std::vector<Payoff> payoffs;
};

struct Dilemma {
  std::string name;
  std::vector<ChanceVar> chance;
  std::vector<InfoSet> decisions;  // declaration order = stage (temporal) order
  std::vector<PredictorVar> predictors;
  UtilitySpec utility;
  std::vector<DispositionRow> disposition;
  std::vector<Bet> bets;
  // Token-level clamps introduced by intervene(); empty on scenario builds.
  std::map<std::string, std::string> clamps;

  const InfoSet* find_infoset(const std::string& id) const {
    for (const auto& is : decisions)
      if (is.id == id) return &is;
    return nullptr;
  }
  const InfoSet* infoset_of_token(const std::string& token_id) const {
    for (const auto& is : decisions)
      for (const auto& t : is.tokens)
        if (t.id == token_id) return &is;
    return nullptr;
  }
};

// Pure policy: one action rule per infoset, applied at every token.
struct Policy {
  std::map<std::string, std::string> actions;

  const std::string& at(const std::string& infoset) const {
    auto it = actions.find(infoset);
    if (it == actions.end())
      throw EngineError("policy does not cover infoset '" + infoset + "'");
    return it->second;
  }
  bool operator==(const Policy&) const = default;
  auto operator<=>(const Policy&) const = default;
};

// Fully resolved world: chance/predictor values, per-infoset rule draws, and
// the actions of the tokens that occurred.
struct World {
  std::map<std::string, std::string> vars;    // chance + predictor variables
  std::map<std::string, std::string> rules;   // infoset -> drawn rule
  std::map<std::string, std::string> tokens;  // token -> action (occurring only)

  bool token_occurs(const std::string& id) const { return tokens.count(id) > 0; }
  bool operator==(const World&) const = default;
  auto operator<=>(const World&) const = default;
};

// Exact distribution over worlds: probabilities sum to 1, no zero entries.
using WorldDist = std::vector<std::pair<World, Rational>>;

inline bool condition_matches(const Condition& c, const World& w) {
  for (const auto& [key, want] : c.require) {
    if (auto it = w.vars.find(key); it != w.vars.end()) {
      if (it->second != want) return false;
      continue;
    }
    if (auto it = w.tokens.find(key); it != w.tokens.end()) {
      if (it->second != want) return false;
      continue;
    }
    return false;  // unknown key or absent token
  }
  return true;
}

}  // namespace gauntlet

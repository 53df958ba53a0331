#pragma once

#include "gauntlet/theories.hpp"

namespace gauntlet {

// Installs a bet menu on a dilemma: sets d.bets and appends the utility
// terms that pay each infoset-offered bet once per accepting token.
// strip_bets removes exactly what attach_bets added.
Dilemma attach_bets(const Dilemma& base, const std::vector<Bet>& menu);
Dilemma strip_bets(const Dilemma& d);

struct ExploitReport {
  enum class Verdict { DutchBook, ExploitableInExpectation, Safe };

  struct Decision {
    std::string bet;
    bool accepted = false;
    Rational ev;  // the EV the agent's theory shows it at the offer point
  };
  struct WorldNet {
    std::string label;  // projected onto the variables the bets reference
    Rational probability;
    Rational net;
  };

  TheoryId theory;
  AnthropicRule rule;
  std::vector<Decision> decisions;
  std::vector<WorldNet> nets;
  Rational worst_net, best_net, expected_net;
  Verdict verdict = Verdict::Safe;

  static std::string verdict_name(Verdict v);
};

// The agent of (theory, rule) accepts each bet iff its EV at the offer point
// is strictly positive (ties decline). Nets assume accepted bets are taken
// at every token.
ExploitReport evaluate_bets(const Dilemma& d, TheoryId theory, AnthropicRule rule);

struct PumpRound {
  unsigned round = 0;
  bool played = false;
  std::string box;
  Rational perceived_round_ev;  // what the agent's theory shows it
  Rational realized;            // against the accuracy-faithful predictor
  Rational cumulative;
};

struct PumpTrace {
  TheoryId theory;
  bool declined_at_entry = false;
  std::vector<PumpRound> rounds;
  Rational total;
};

// Repeated play/decline + box-pick dilemma built by scenarios; the trace
// follows the theory's induced policy round by round. rounds = 0 plays every
// round the dilemma carries.
PumpTrace run_money_pump(const Dilemma& d, TheoryId theory, AnthropicRule rule,
                         unsigned rounds = 0);

// Two-envelope machinery. Pairs are (n, 2n) with exact probabilities.
struct EnvelopeModel {
  std::vector<std::pair<Rational, Rational>> pairs;  // (smaller amount, probability)
  Rational floor = Rational(8);
  Rational fee = Rational(1);
};

void validate_envelope_model(const EnvelopeModel& m);

// Exact E[other | held = x] under the prior, the held envelope uniformly the
// smaller or larger of its pair.
Rational bayes_conditional_other(const EnvelopeModel& m, const Rational& x);

// The prior-averse appraisal of the unseen envelope: (5/4) x.
Rational prior_averse_appraisal(const Rational& x);

struct EnvelopeOffer {
  unsigned offer = 0;
  Rational held;
  Rational appraisal;
  bool switched = false;
};

struct EnvelopeWorldTrace {
  Rational small;       // the pair's smaller amount
  bool held_small_first = false;
  Rational probability;
  std::vector<EnvelopeOffer> offers;
  unsigned paid_switches = 0;
  Rational fees;
};

struct EnvelopePumpTrace {
  std::string agent;  // prior-averse | bayes
  std::vector<EnvelopeWorldTrace> worlds;
  Rational expected_fees;
  unsigned max_paid_switches = 0;
  bool pair_switched_both_ways = false;
};

// Alternating switch offers on unopened... the held amount is visible at
// each offer; the bayes agent keeps its observation posterior and switches
// only when the conditional expectation beats held + fee.
EnvelopePumpTrace run_envelope_pump(const EnvelopeModel& m, const std::string& agent,
                                    unsigned offers);

struct DutchBookSearch {
  std::optional<std::vector<Bet>> menu;  // first guaranteed-loss menu found
  unsigned long long searched = 0;
  bool exhaustive = false;  // searched the whole space without finding one
};

// Exhaustive enumeration of integer payoffs in [-bound, bound] over the
// dilemma's menu structure (or a synthesized pre-experiment + first-infoset
// template when the dilemma carries no menu). Deterministic order; returns
// the first menu whose report verdict is dutch-book.
DutchBookSearch search_dutch_book(const Dilemma& d, TheoryId theory, AnthropicRule rule,
                                  long long bound);

}  // namespace gauntlet

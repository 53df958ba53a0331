#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gauntlet/rational.hpp"

namespace gauntlet {

// Analytic description of the infinite-horizon games. These never become
// Dilemmas: the core engine requires finite outcome enumeration.
struct GameSpec {
  std::string game;       // st-petersburg | iterated-st-petersburg | quit-flip | reservoir
  Rational start = Rational(2);
  Rational alpha = Rational(3);     // quit-flip growth, > 1
  Rational reentry_fee = Rational(1);
  Rational growth = Rational(2);    // reservoir growth, > 1
  Rational maintenance_cost = Rational(1);
  Rational discount = Rational(3, 4);  // gamma in [0, 1)
};

struct SeriesAnalysis {
  std::vector<Rational> partial_sums;  // exact
  bool diverges = false;               // the documented growth criterion
  std::string caveat;                  // boundary notes (alpha = 2)
};

// Partial expected value of the doubling coin game: each term 2^k/2^k = 1,
// so the k-th partial sum is exactly k.
Rational st_petersburg_partial_ev(unsigned k);

// Smallest k whose partial EV exceeds the price: a willingness-to-pay
// witness for any finite price.
unsigned st_petersburg_price_witness(const Rational& price);

// Exact partial sums of sum_k (2 alpha^{k-1} - k) / 2^k; the divergence flag
// is the documented alpha > 2 criterion (the alpha = 2 boundary still
// diverges and is reported as a caveat, never silently classified).
SeriesAnalysis naive_quit_flip_ev(const Rational& alpha, unsigned terms);

struct NeverQuitSummary {
  unsigned trials = 0;
  unsigned negative_trials = 0;   // realized utility < 0
  double mean_turns = 0.0;        // termination turn average
  long long min_utility = 0;
  long long max_utility = 0;
};

// Monte Carlo of the quit/flip game under the never-quit policy: a trial
// terminating at turn k realizes utility -k.
NeverQuitSummary simulate_never_quit(const Rational& alpha, unsigned trials, uint64_t seed);

struct ReentryStep {
  unsigned round = 0;
  bool reentered = false;
  std::string appraisal;  // "divergent" or the truncated EV
  Rational cumulative_fees;
};

struct ReentryTrace {
  std::string agent;  // naive-ev | fdt-bounded
  std::vector<ReentryStep> steps;
  Rational total_fees;
  unsigned quit_round = 0;  // 0 = never quit within the trace
};

// The naive agent appraises a replay by the divergent series and re-enters
// every round; the bounded agent compares horizon-truncated EVs and stops
// (ties decline).
ReentryTrace iterated_reentry_trace(const Rational& fee, unsigned rounds,
                                    const std::string& agent, unsigned horizon = 10);

struct BellmanSpec {
  Rational discount;  // gamma in [0, 1)
  Rational growth;    // expected reward growth per step
};

struct BellmanReport {
  bool converges = false;       // gamma * growth < 1
  Rational ratio;               // the geometric certificate
  bool empirical_shrinking = false;  // successive value-iteration differences
  std::vector<Rational> iterate_diffs;
};

// Analytic verdict plus an expanding-horizon value iteration on the growing
// reservoir chain; the two must agree on every grid point.
BellmanReport bellman_convergence(const BellmanSpec& spec, unsigned sweeps = 12,
                                  const Rational& start = Rational(2),
                                  const Rational& cost = Rational(1));

struct ReservoirDecision {
  unsigned state;  // elapsed timesteps
  std::string action;  // tap | wait
  Rational tap_value;
};

struct ReservoirReport {
  std::vector<ReservoirDecision> decisions;
  bool waits_forever = false;
  // Realized utility after waiting t steps without tapping (maintenance
  // spending only); strictly decreasing when the agent waits forever.
  std::vector<Rational> realized_if_waiting;
};

// horizon set: backward induction (taps at the horizon). horizon unset: the
// unbounded-model agent, which waits at every state when gamma*growth >= 1
// and taps immediately otherwise.
ReservoirReport reservoir_decision(const Rational& growth, const Rational& cost,
                                   const Rational& discount,
                                   std::optional<unsigned> horizon,
                                   unsigned states = 8,
                                   const Rational& start = Rational(2));

}  // namespace gauntlet

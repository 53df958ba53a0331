#include "gauntlet/divergence.hpp"

#include <random>
#include <stdexcept>

namespace gauntlet {

Rational st_petersburg_partial_ev(unsigned k) {
  if (k < 1) throw std::invalid_argument("partial EV needs k >= 1");
  Rational sum(0);
  Rational two_k(1);
  for (unsigned i = 1; i <= k; ++i) {
    two_k *= 2;               // payoff after i rounds and p = 1/2^i
    sum += two_k / two_k;     // each term is exactly 1
  }
  return sum;
}

unsigned st_petersburg_price_witness(const Rational& price) {
  unsigned k = 1;
  while (st_petersburg_partial_ev(k) <= price) ++k;  // terminates: sums grow by 1
  return k;
}

SeriesAnalysis naive_quit_flip_ev(const Rational& alpha, unsigned terms) {
  if (alpha <= 1) throw std::invalid_argument("quit-flip needs alpha > 1");
  if (terms < 1) throw std::invalid_argument("need at least one term");
  SeriesAnalysis out;
  Rational sum(0);
  Rational alpha_pow(1);  // alpha^{k-1}
  Rational half_pow(1);   // 2^{-k}
  for (unsigned k = 1; k <= terms; ++k) {
    half_pow /= 2;
    Rational term = (Rational(2) * alpha_pow - Rational(BigInt(k))) * half_pow;
    sum += term;
    out.partial_sums.push_back(sum);
    alpha_pow *= alpha;
  }
  out.diverges = alpha > 2;
  if (alpha == 2)
    out.caveat =
        "alpha = 2 boundary: terms approach 1 and the series still diverges, "
        "but the documented criterion is alpha > 2";
  return out;
}

NeverQuitSummary simulate_never_quit(const Rational& alpha, unsigned trials,
                                     uint64_t seed) {
  (void)alpha;  // the never-quit realized utility is -k regardless of alpha
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  NeverQuitSummary out;
  out.trials = trials;
  std::mt19937_64 rng(seed);
  unsigned long long turn_total = 0;
  long long min_u = 0, max_u = -1000000000;
  for (unsigned t = 0; t < trials; ++t) {
    unsigned k = 1;
    while (rng() & 1ull) ++k;  // fair coin: heads continues, tails ends turn k
    long long utility = -static_cast<long long>(k);
    turn_total += k;
    if (t == 0 || utility < min_u) min_u = utility;
    if (t == 0 || utility > max_u) max_u = utility;
    if (utility < 0) ++out.negative_trials;
  }
  out.mean_turns = static_cast<double>(turn_total) / trials;
  out.min_utility = min_u;
  out.max_utility = max_u;
  return out;
}

ReentryTrace iterated_reentry_trace(const Rational& fee, unsigned rounds,
                                    const std::string& agent, unsigned horizon) {
  if (rounds < 1) throw std::invalid_argument("need at least one round");
  if (fee < 0) throw std::invalid_argument("fee must be nonnegative");
  ReentryTrace out;
  out.agent = agent;
  out.total_fees = 0;
  out.quit_round = 0;
  if (agent == "naive-ev") {
    // Replay appraisal is the divergent series: it exceeds any finite
    // holdings plus any fee, so the agent re-enters forever.
    for (unsigned r = 1; r <= rounds; ++r) {
      out.total_fees += fee;
      out.steps.push_back({r, true, "divergent", out.total_fees});
    }
    return out;
  }
  if (agent != "fdt-bounded") throw std::invalid_argument("unknown agent '" + agent + "'");
  // Bounded appraisal: both standing pat and replaying are valued by the
  // horizon-truncated EV, so a replay is worth the same stream minus the
  // fee. Re-enter only on a strict gain; ties decline.
  Rational truncated = st_petersburg_partial_ev(horizon);
  for (unsigned r = 1; r <= rounds; ++r) {
    bool reenter = truncated - fee > truncated;
    out.steps.push_back({r, reenter, rat_str(truncated), out.total_fees});
    if (!reenter) {
      out.quit_round = r;
      break;
    }
    out.total_fees += fee;
  }
  return out;
}

BellmanReport bellman_convergence(const BellmanSpec& spec, unsigned sweeps,
                                  const Rational& start, const Rational& cost) {
  if (spec.discount < 0 || spec.discount >= 1)
    throw std::invalid_argument("discount must lie in [0, 1)");
  BellmanReport out;
  out.ratio = spec.discount * spec.growth;
  out.converges = out.ratio < 1;

  // Expanding-horizon evaluation of the discounted reward stream of the
  // growing chain: V_t = sum_{j<t} gamma^j (start * growth^j - cost). The
  // early iterates can wobble while the cost term dies off, so the verdict
  // compares the tail against the middle of the run.
  Rational gamma_pow(1), growth_pow(1);
  Rational v(0);
  for (unsigned t = 0; t < sweeps; ++t) {
    Rational term = gamma_pow * (start * growth_pow - cost);
    v += term;
    out.iterate_diffs.push_back(abs(term));
    gamma_pow *= spec.discount;
    growth_pow *= spec.growth;
  }
  const Rational& last = out.iterate_diffs.back();
  const Rational& mid = out.iterate_diffs[sweeps / 2];
  out.empirical_shrinking = last == 0 || last < mid;
  return out;
}

ReservoirReport reservoir_decision(const Rational& growth, const Rational& cost,
                                   const Rational& discount,
                                   std::optional<unsigned> horizon, unsigned states,
                                   const Rational& start) {
  if (growth <= 1) throw std::invalid_argument("reservoir growth must exceed 1");
  if (discount < 0 || discount >= 1)
    throw std::invalid_argument("discount must lie in [0, 1)");
  ReservoirReport out;
  auto tap_value = [&](unsigned s) { return start * rat_pow(growth, s); };

  if (horizon) {
    // Backward induction: V(H) = tap; earlier states wait only when the
    // discounted continuation beats tapping now.
    std::vector<Rational> value(*horizon + 1);
    std::vector<std::string> act(*horizon + 1);
    value[*horizon] = tap_value(*horizon);
    act[*horizon] = "tap";
    for (int s = static_cast<int>(*horizon) - 1; s >= 0; --s) {
      Rational wait = -cost + discount * value[s + 1];
      Rational tap = tap_value(s);
      if (wait > tap) {
        value[s] = wait;
        act[s] = "wait";
      } else {
        value[s] = tap;
        act[s] = "tap";
      }
    }
    for (unsigned s = 0; s <= *horizon; ++s)
      out.decisions.push_back({s, act[s], tap_value(s)});
    return out;
  }

  // Unbounded self-model: when gamma*growth >= 1 the appraisal of one more
  // wait never falls below tapping now, at every state, so the agent waits
  // forever and bleeds maintenance cost.
  bool wait_forever = discount * growth >= 1;
  out.waits_forever = wait_forever;
  Rational spent(0);
  for (unsigned s = 0; s < states; ++s) {
    out.decisions.push_back({s, wait_forever ? "wait" : "tap", tap_value(s)});
    spent -= cost;
    out.realized_if_waiting.push_back(spent);
  }
  return out;
}

}  // namespace gauntlet

#include "gauntlet/verify.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace gauntlet {
namespace verify {

namespace {

using scenarios::ScenarioParams;

struct Checker {
  std::vector<ClaimResult>& out;

  void check(const std::string& id, const std::string& claim, const std::string& expected,
             const std::string& computed) {
    out.push_back({id, claim, expected, computed, expected == computed});
  }
  void check_true(const std::string& id, const std::string& claim, bool ok,
                  const std::string& computed = "") {
    out.push_back(
        {id, claim, "true", computed.empty() ? (ok ? "true" : "false") : computed, ok});
  }
  // Guard a block so one failure cannot abort the whole suite.
  void guarded(const std::string& id, const std::string& claim,
               const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out.push_back({id, claim, "no exception", std::string("exception: ") + e.what(), false});
    }
  }
};

std::string argmax_str(const Recommendation& rec) {
  std::string s;
  for (const auto& a : rec.argmax) s += (s.empty() ? "" : ",") + a;
  return s;
}

std::string rat2(const Rational& a, const Rational& b) {
  return rat_str(a) + "," + rat_str(b);
}

// ---------------------------------------------------------------------------
// Criterion 1-6: the exact dilemma matrix.

void claims_newcomb(Checker& c) {
  c.guarded("1", "newcomb matrix", [&] {
    Dilemma d = scenarios::build_dilemma("newcomb");
    Recommendation edt = recommend(d, "box-choice", TheoryId::Edt, AnthropicRule::SSA);
    c.check("1.1", "newcomb: edt one-boxes with EVs 1000000 vs 1000", "one-box|1000000,1000",
            argmax_str(edt) + "|" +
                rat2(edt.action_values[0].second, edt.action_values[1].second));
    Recommendation cdt = recommend(d, "box-choice", TheoryId::CdtMyopic, AnthropicRule::SSA);
    c.check("1.2", "newcomb: cdt-myopic two-boxes, EVs 500000 vs 501000",
            "two-box|500000,501000",
            argmax_str(cdt) + "|" +
                rat2(cdt.action_values[0].second, cdt.action_values[1].second));
    bool gap_ok = true;
    for (const auto& p : {Rational(1, 10), Rational(1, 2), Rational(9, 10), Rational(99, 100)}) {
      ScenarioParams params;
      params.values["disposition"] = p;
      Dilemma dp = scenarios::build_dilemma("newcomb", params);
      Recommendation r = recommend(dp, "box-choice", TheoryId::CdtMyopic, AnthropicRule::SSA);
      Rational gap = r.action_values[1].second - r.action_values[0].second;
      if (gap != 1000 || argmax_str(r) != "two-box") gap_ok = false;
    }
    c.check_true("1.3", "newcomb: cdt EV gap is exactly 1000 for every disposition", gap_ok);
    PolicyRecommendation fdt = optimal_policy(d, TheoryId::Fdt);
    c.check("1.4", "newcomb: fdt policy one-box with prior EV 1000000", "one-box|1000000",
            fdt.optimal.front().first.at("box-choice") + "|" + rat_str(fdt.best_value));
  });
}

void claims_transparent(Checker& c) {
  c.guarded("2", "transparent newcomb", [&] {
    Dilemma d = scenarios::build_dilemma("transparent-newcomb");
    for (TheoryId theory : {TheoryId::Edt, TheoryId::CdtMyopic}) {
      Policy pi = induced_policy(d, theory, AnthropicRule::SSA);
      c.check("2." + std::string(theory == TheoryId::Edt ? "1" : "2"),
              "transparent newcomb: induced " + to_string(theory) + " realizes exactly 1000",
              "two-box,two-box|1000",
              pi.at("full-boxes") + "," + pi.at("empty-box") + "|" +
                  rat_str(functional_value(d, pi)));
    }
    Policy fdt = induced_policy(d, TheoryId::Fdt, AnthropicRule::SSA);
    c.check("2.3", "transparent newcomb: fdt one-boxes at the full infoset and realizes 1000000",
            "one-box|1000000",
            fdt.at("full-boxes") + "|" + rat_str(functional_value(d, fdt)));
  });
}

void claims_mugging(Checker& c) {
  c.guarded("3", "counterfactual mugging", [&] {
    Dilemma d = scenarios::build_dilemma("counterfactual-mugging");
    PolicyRecommendation fdt = optimal_policy(d, TheoryId::Fdt);
    Policy refuse;
    refuse.actions["asked"] = "refuse";
    c.check("3.1", "mugging: fdt pays with policy EV 9/2 vs 0 for refusing", "pay|9/2|0",
            fdt.optimal.front().first.at("asked") + "|" + rat_str(fdt.best_value) + "|" +
                rat_str(functional_value(d, refuse)));
    Recommendation edt = recommend(d, "asked", TheoryId::Edt, AnthropicRule::SSA);
    Recommendation cdt = recommend(d, "asked", TheoryId::CdtMyopic, AnthropicRule::SSA);
    c.check("3.2", "mugging: edt and cdt-myopic refuse at the tails node", "refuse|refuse",
            argmax_str(edt) + "|" + argmax_str(cdt));
  });
}

void claims_money_pump(Checker& c) {
  c.guarded("4", "money pump", [&] {
    ScenarioParams params;
    params.values["rounds"] = rat(5);
    Dilemma d = scenarios::build_dilemma("money-pump", params);
    PumpTrace cdt = run_money_pump(d, TheoryId::CdtMyopic, AnthropicRule::SSA);
    bool per_round = cdt.rounds.size() == 5;
    for (const auto& r : cdt.rounds)
      per_round = per_round && r.perceived_round_ev == 1 && r.realized == -1;
    c.check_true("4.1", "money pump: cdt-myopic plays 5 rounds, perceived +1, realized -1 each",
                 per_round && cdt.total == -5,
                 "rounds=" + std::to_string(cdt.rounds.size()) + " total=" + rat_str(cdt.total));
    PumpTrace fdt = run_money_pump(d, TheoryId::Fdt, AnthropicRule::SSA);
    c.check_true("4.2", "money pump: fdt declines at entry with total 0",
                 fdt.declined_at_entry && fdt.total == 0, "total=" + rat_str(fdt.total));
  });
}

void claims_lesion_blackmail(Checker& c) {
  c.guarded("5", "smoking lesion and xor blackmail", [&] {
    Dilemma lesion = scenarios::build_dilemma("smoking-lesion");
    auto rec = [&](TheoryId t) {
      return argmax_str(recommend(lesion, "smoke-choice", t, AnthropicRule::SSA));
    };
    c.check("5.1", "smoking lesion: edt refrains", "refrain", rec(TheoryId::Edt));
    c.check("5.2", "smoking lesion: edt-tickle smokes", "smoke", rec(TheoryId::EdtTickle));
    c.check("5.3", "smoking lesion: edt-ratify smokes", "smoke", rec(TheoryId::EdtRatify));

    Dilemma xb = scenarios::build_dilemma("xor-blackmail");
    auto recx = [&](TheoryId t) {
      return argmax_str(recommend(xb, "pay-choice", t, AnthropicRule::SSA));
    };
    c.check("5.4", "xor blackmail: edt pays", "pay", recx(TheoryId::Edt));
    c.check("5.5", "xor blackmail: edt-tickle pays", "pay", recx(TheoryId::EdtTickle));
    c.check("5.6", "xor blackmail: edt-ratify pays", "pay", recx(TheoryId::EdtRatify));
    PolicyRecommendation fdt = optimal_policy(xb, TheoryId::Fdt);
    c.check("5.7", "xor blackmail: fdt refuses", "refuse",
            fdt.optimal.front().first.at("pay-choice"));
  });
}

void claims_insurance(Checker& c) {
  c.guarded("6", "insurance problem", [&] {
    {
      Dilemma d = scenarios::build_dilemma("insurance");  // q = 4/5 defaults
      Recommendation smoke = recommend(d, "smoke-choice", TheoryId::Edt, AnthropicRule::SSA);
      Recommendation bet =
          recommend(d, "bet-after-refrain", TheoryId::Edt, AnthropicRule::SSA);
      c.check("6.1", "insurance: edt refrains and bets", "refrain|bet",
              argmax_str(smoke) + "|" + argmax_str(bet));
    }
    {
      ScenarioParams params;
      params.values["c"] = Rational(2, 5);
      Dilemma d = scenarios::build_dilemma("insurance", params);
      Recommendation smoke =
          recommend(d, "smoke-choice", TheoryId::CdtMyopic, AnthropicRule::SSA);
      Recommendation bet =
          recommend(d, "bet-after-smoke", TheoryId::CdtMyopic, AnthropicRule::SSA);
      c.check("6.2", "insurance: cdt-myopic with c=2/5 smokes then bets", "smoke|bet",
              argmax_str(smoke) + "|" + argmax_str(bet));
    }
    {
      ScenarioParams params;
      params.values["c"] = Rational(3, 5);
      Dilemma d = scenarios::build_dilemma("insurance", params);
      Recommendation smoke =
          recommend(d, "smoke-choice", TheoryId::CdtSophisticated, AnthropicRule::SSA);
      Recommendation bet =
          recommend(d, "bet-after-smoke", TheoryId::CdtSophisticated, AnthropicRule::SSA);
      c.check("6.3", "insurance: cdt-sophisticated with c=3/5 smokes then bets", "smoke|bet",
              argmax_str(smoke) + "|" + argmax_str(bet));
    }
    {
      Dilemma d = scenarios::build_dilemma("insurance");
      World w;
      w.vars["lesion"] = "yes";
      w.tokens["smoke-t"] = "smoke";
      w.tokens["bet-s-t"] = "bet";
      w.rules["smoke-choice"] = "smoke";
      Rational with_lesion = utility_of(d, w);
      w.vars["lesion"] = "no";
      Rational without = utility_of(d, w);
      c.check("6.4", "insurance: smoke-and-bet nets exactly -1/2 in both lesion states",
              "-1/2,-1/2", rat2(with_lesion, without));
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 7-9: anthropic credences and Dutch books.

void claims_credences(Checker& c) {
  c.guarded("7", "sleeping beauty credences", [&] {
    Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
    auto table = [&](AnthropicRule rule) {
      CredenceTable t = anthropic_credence(d, "awakening", rule);
      Rational h_mon(0), t_mon(0), t_tue(0);
      for (const auto& e : t.entries) {
        if (e.world.vars.at("coin") == "heads")
          h_mon += e.credence;
        else if (e.token == "monday")
          t_mon += e.credence;
        else
          t_tue += e.credence;
      }
      return rat_str(h_mon) + "," + rat_str(t_mon) + "," + rat_str(t_tue);
    };
    c.check("7.1", "classic: SSA credences are (1/2, 1/4, 1/4)", "1/2,1/4,1/4",
            table(AnthropicRule::SSA));
    c.check("7.2", "classic: SIA credences are (1/3, 1/3, 1/3)", "1/3,1/3,1/3",
            table(AnthropicRule::SIA));
    Dilemma wbg = scenarios::build_dilemma("sleeping-beauty-wbg");
    auto opposite = [&](AnthropicRule rule) {
      CredenceTable t = anthropic_credence(wbg, "colored-awakening", rule);
      Rational p(0);
      for (const auto& e : t.entries)
        if (e.world.vars.at("coin2") == "opposite") p += e.credence;
      return rat_str(p);
    };
    c.check("7.3", "wbg: P(opposite | colored room) is 2/3 under SSA", "2/3",
            opposite(AnthropicRule::SSA));
    c.check("7.4", "wbg: P(opposite | colored room) is 2/3 under SIA", "2/3",
            opposite(AnthropicRule::SIA));
  });
}

void claims_dutch_books(Checker& c) {
  c.guarded("8", "classic dutch book", [&] {
    Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
    ExploitReport cdt = evaluate_bets(d, TheoryId::CdtMyopic, AnthropicRule::SSA);
    bool accepts_both = cdt.decisions[0].accepted && cdt.decisions[1].accepted;
    std::string nets;
    for (const auto& n : cdt.nets) nets += (nets.empty() ? "" : ";") + n.label + "=" + rat_str(n.net);
    c.check("8.1", "classic: halfer cdt accepts both bets and loses 2 in every world",
            "accepts|coin=heads=-2;coin=tails=-2|dutch-book",
            std::string(accepts_both ? "accepts" : "declines") + "|" + nets + "|" +
                ExploitReport::verdict_name(cdt.verdict));
    c.check("8.2", "classic: cdt token EV for the awakening bet is +1", "1",
            rat_str(cdt.decisions[1].ev));
    ExploitReport edt = evaluate_bets(d, TheoryId::Edt, AnthropicRule::SSA);
    c.check("8.3", "classic: halfer edt rejects the awakening bet at EV -7/2 and stays safe",
            "accepted=false|-7/2|safe",
            std::string("accepted=") + (edt.decisions[1].accepted ? "true" : "false") + "|" +
                rat_str(edt.decisions[1].ev) + "|" +
                ExploitReport::verdict_name(edt.verdict));
  });
  c.guarded("9", "white-black-grey dutch book", [&] {
    Dilemma d = scenarios::build_dilemma("sleeping-beauty-wbg");
    for (AnthropicRule rule : {AnthropicRule::SSA, AnthropicRule::SIA}) {
      ExploitReport edt = evaluate_bets(d, TheoryId::Edt, rule);
      bool accepts_both = edt.decisions[0].accepted && edt.decisions[1].accepted;
      std::string nets;
      for (const auto& n : edt.nets)
        nets += (nets.empty() ? "" : ";") + n.label + "=" + rat_str(n.net);
      c.check(rule == AnthropicRule::SSA ? "9.1" : "9.2",
              "wbg: edt (" + to_string(rule) + ") accepts both at bet-2 EV +4 and loses 2 always",
              "accepts|4|coin2=grey=-2;coin2=opposite=-2|dutch-book",
              std::string(accepts_both ? "accepts" : "declines") + "|" +
                  rat_str(edt.decisions[1].ev) + "|" + nets + "|" +
                  ExploitReport::verdict_name(edt.verdict));
    }
    ExploitReport cdt = evaluate_bets(d, TheoryId::CdtMyopic, AnthropicRule::SSA);
    c.check("9.3", "wbg: cdt-myopic rejects the room bet at EV -2 and stays safe",
            "accepted=false|-2|safe",
            std::string("accepted=") + (cdt.decisions[1].accepted ? "true" : "false") + "|" +
                rat_str(cdt.decisions[1].ev) + "|" +
                ExploitReport::verdict_name(cdt.verdict));
  });
}

// ---------------------------------------------------------------------------
// Criterion 10-11: divergence and envelopes.

void claims_divergence(Checker& c) {
  c.guarded("10", "divergence", [&] {
    bool partial_ok = true;
    for (unsigned k = 1; k <= 64; ++k)
      if (st_petersburg_partial_ev(k) != Rational(BigInt(k))) partial_ok = false;
    c.check_true("10.1", "st petersburg: partial EV is exactly k for k <= 64", partial_ok);

    SeriesAnalysis s = naive_quit_flip_ev(rat(3), 3);
    c.check("10.2", "quit-flip alpha=3: partial sums 1/2, 3/2, 27/8", "1/2,3/2,27/8",
            rat_str(s.partial_sums[0]) + "," + rat_str(s.partial_sums[1]) + "," +
                rat_str(s.partial_sums[2]));

    bool grid_ok = true;
    std::string grid_got;
    for (const auto& [g, growth] :
         std::vector<std::pair<Rational, Rational>>{{Rational(1, 4), rat(2)},
                                                    {Rational(2, 5), rat(2)},
                                                    {Rational(1, 2), rat(2)},
                                                    {Rational(3, 4), rat(2)},
                                                    {Rational(1, 3), rat(3)},
                                                    {Rational(1, 4), rat(3)},
                                                    {Rational(0), rat(7)}}) {
      BellmanReport rep = bellman_convergence({g, growth});
      bool expect = g * growth < 1;
      if (rep.converges != expect || rep.empirical_shrinking != expect) {
        grid_ok = false;
        grid_got += "(" + rat_str(g) + "," + rat_str(growth) + ")";
      }
    }
    c.check_true("10.3", "bellman: verdict flips exactly at gamma*growth = 1 and matches "
                         "value iteration on the grid",
                 grid_ok, grid_got);

    NeverQuitSummary mc = simulate_never_quit(rat(3), 10000, 42);
    c.check_true("10.4", "never-quit: 100% of 10000 trials realize negative utility",
                 mc.negative_trials == 10000,
                 std::to_string(mc.negative_trials) + "/10000");

    bool waits = true, decreasing = true;
    for (const auto& gamma : {Rational(3, 4), Rational(1, 2)}) {  // 3/2 and exactly 1
      ReservoirReport wait = reservoir_decision(rat(2), rat(1), gamma, std::nullopt);
      waits = waits && wait.waits_forever;
      for (const auto& dec : wait.decisions) waits = waits && dec.action == "wait";
      for (size_t i = 1; i < wait.realized_if_waiting.size(); ++i)
        decreasing = decreasing &&
                     wait.realized_if_waiting[i] < wait.realized_if_waiting[i - 1];
    }
    c.check_true("10.5", "reservoir: unbounded-model agent waits at every state for "
                         "gamma*g >= 1 and bleeds utility",
                 waits && decreasing);
    ReservoirReport tap = reservoir_decision(rat(2), rat(1), Rational(1, 4), std::nullopt);
    bool taps = !tap.waits_forever;
    for (const auto& dec : tap.decisions) taps = taps && dec.action == "tap";
    c.check_true("10.6", "reservoir: unbounded-model agent taps when gamma*g < 1", taps);
  });
}

void claims_envelopes(Checker& c) {
  c.guarded("11", "two envelopes", [&] {
    c.check("11.1", "prior-averse appraisal of 8 is 10", "10",
            rat_str(prior_averse_appraisal(rat(8))));
    EnvelopeModel m = std::get<EnvelopeModel>(scenarios::build("two-envelopes"));
    EnvelopePumpTrace averse = run_envelope_pump(m, "prior-averse", 10);
    bool all_fees = averse.expected_fees == 10;
    for (const auto& w : averse.worlds) all_fees = all_fees && w.fees == 10;
    c.check_true("11.2", "prior-averse agent pays exactly one fee per offer, 10 over 10",
                 all_fees, "expected=" + rat_str(averse.expected_fees));
    EnvelopePumpTrace bayes = run_envelope_pump(m, "bayes", 10);
    c.check_true("11.3", "bayes agent on the two-pair prior pays at most one switch and "
                         "never switches a pair both ways",
                 bayes.max_paid_switches <= 1 && !bayes.pair_switched_both_ways,
                 "max=" + std::to_string(bayes.max_paid_switches));
    Rational gain(0);
    for (const auto& [n, p] : m.pairs) gain += p * ((n * 2 - n) + (n - n * 2)) / 2;
    c.check("11.4", "unconditional switch gain is 0 by symmetry", "0", rat_str(gain));
  });
}

// ---------------------------------------------------------------------------
// Criterion 12: the learning suite (statistical, explicit thresholds).

void claims_learning(Checker& c, const Options& opts) {
  namespace ll = learninglab;
  c.guarded("12", "learning suite", [&] {
    ll::TrainConfig cfg;
    std::vector<uint64_t> seeds;
    for (unsigned i = 0; i < opts.rl_seeds; ++i) seeds.push_back(opts.rl_base_seed + i);

    ll::SweepReport newcomb = ll::sweep(
        ll::EnvId::RepeatedNewcomb,
        {ll::LearnerId::QLearning, ll::LearnerId::PgEpisodeReturn}, seeds, cfg);
    unsigned q_ok = 0, pg_ok = 0;
    for (const auto& row : newcomb.rows) {
      if (row.learner == ll::LearnerId::QLearning) {
        if (!row.stats.converged || row.stats.greedy_action.at("boxes") == "two-box") ++q_ok;
      } else {
        auto freq = row.stats.action_freq.find("boxes");
        double one = 0.0;
        if (freq != row.stats.action_freq.end()) {
          auto it = freq->second.find("one-box");
          if (it != freq->second.end()) one = it->second;
        }
        if (row.stats.greedy_action.at("boxes") == "one-box" && one >= 0.9) ++pg_ok;
      }
    }
    c.check_true("12.1", "repeated newcomb: q-learning two-boxes or fails to converge in >= 18/" +
                             std::to_string(opts.rl_seeds) + " seeds",
                 q_ok >= 18, std::to_string(q_ok) + " seeds");
    c.check_true("12.2", "repeated newcomb: pg-episode-return one-boxes (freq >= 9/10) in >= 18/" +
                             std::to_string(opts.rl_seeds) + " seeds",
                 pg_ok >= 18, std::to_string(pg_ok) + " seeds");

    ll::SweepReport lesion = ll::sweep(
        ll::EnvId::RepeatedLesion,
        {ll::LearnerId::QLearning, ll::LearnerId::QCounterfactual}, seeds, cfg);
    unsigned factual_ok = 0, ctf_ok = 0;
    for (const auto& row : lesion.rows) {
      const std::string& greedy = row.stats.greedy_action.at("choice");
      if (row.learner == ll::LearnerId::QLearning && greedy == "refrain") ++factual_ok;
      if (row.learner == ll::LearnerId::QCounterfactual && greedy == "smoke") ++ctf_ok;
    }
    c.check_true("12.3", "repeated lesion: factual-only q-learning refrains in >= 18/" +
                             std::to_string(opts.rl_seeds) + " seeds",
                 factual_ok >= 18, std::to_string(factual_ok) + " seeds");
    c.check_true("12.4", "repeated lesion: q-counterfactual smokes in >= 18/" +
                             std::to_string(opts.rl_seeds) + " seeds",
                 ctf_ok >= 18, std::to_string(ctf_ok) + " seeds");
  });
}

// ---------------------------------------------------------------------------
// Criterion 13: property suites.

std::vector<std::string> policy_argmax_actions(const PolicyRecommendation& rec,
                                               const std::string& infoset) {
  std::vector<std::string> out;
  for (const auto& [pi, ev] : rec.optimal) {
    const std::string& a = pi.at(infoset);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void claims_properties(Checker& c, const Options& opts) {
  c.guarded("13.1", "theory agreement fuzz", [&] {
    std::mt19937_64 rng(opts.fuzz_seed);
    unsigned agree = 0;
    std::string first_fail;
    for (unsigned i = 0; i < opts.fuzz_cases; ++i) {
      Dilemma d = random_agreement_dilemma(rng);
      std::vector<std::string> reference;
      bool ok = true;
      for (TheoryId theory : kAllTheories) {
        std::vector<std::string> actions;
        if (is_updateless(theory)) {
          actions = policy_argmax_actions(optimal_policy(d, theory), d.decisions[0].id);
        } else {
          Recommendation rec =
              recommend(d, d.decisions[0].id, theory, AnthropicRule::SSA);
          actions = rec.argmax;
          std::sort(actions.begin(), actions.end());
        }
        if (reference.empty())
          reference = actions;
        else if (actions != reference)
          ok = false;
      }
      if (ok)
        ++agree;
      else if (first_fail.empty())
        first_fail = "case " + std::to_string(i);
    }
    c.check_true("13.1", "all eight theories agree on " + std::to_string(opts.fuzz_cases) +
                             " random predictor-free dilemmas",
                 agree == opts.fuzz_cases,
                 std::to_string(agree) + "/" + std::to_string(opts.fuzz_cases) + " " +
                     first_fail);
  });

  c.guarded("13.2", "affine invariance fuzz", [&] {
    std::mt19937_64 rng(opts.fuzz_seed + 1);
    unsigned ok_count = 0;
    for (unsigned i = 0; i < opts.fuzz_cases; ++i) {
      Dilemma d = random_agreement_dilemma(rng);
      std::uniform_int_distribution<int> cnum(1, 5), cden(1, 5), bnum(-10, 10);
      Rational scale(cnum(rng), cden(rng));
      Rational shift(bnum(rng));
      Dilemma scaled = d;
      for (auto& term : scaled.utility.terms) term.value = term.value * scale;
      UtilitySpec::Term offset;
      offset.value = shift;
      scaled.utility.terms.push_back(offset);  // empty condition: matches everywhere
      Recommendation base = recommend(d, d.decisions[0].id, TheoryId::Edt, AnthropicRule::SSA);
      Recommendation tx =
          recommend(scaled, d.decisions[0].id, TheoryId::Edt, AnthropicRule::SSA);
      bool ok = base.argmax == tx.argmax;
      for (size_t a = 0; a < base.action_values.size(); ++a)
        ok = ok && tx.action_values[a].second ==
                       scale * base.action_values[a].second + shift;
      PolicyRecommendation fb = optimal_policy(d, TheoryId::Fdt);
      PolicyRecommendation ft = optimal_policy(scaled, TheoryId::Fdt);
      ok = ok && policy_argmax_actions(fb, d.decisions[0].id) ==
                     policy_argmax_actions(ft, d.decisions[0].id);
      ok = ok && ft.best_value == scale * fb.best_value + shift;
      if (ok) ++ok_count;
    }
    c.check_true("13.2", "utility scaling c>0 and shift b leave argmax sets unchanged and "
                         "map EVs exactly affinely",
                 ok_count == opts.fuzz_cases,
                 std::to_string(ok_count) + "/" + std::to_string(opts.fuzz_cases));
  });

  c.guarded("13.3", "fdt equals brute-force policy enumeration", [&] {
    bool all_ok = true;
    std::string fails;
    for (const std::string id :
         {"newcomb", "transparent-newcomb", "counterfactual-mugging", "money-pump",
          "smoking-lesion", "xor-blackmail", "insurance", "sleeping-beauty-classic",
          "sleeping-beauty-wbg"}) {
      Dilemma d = scenarios::build_dilemma(id);
      // Independent enumeration loop over the pure-policy product space.
      std::vector<std::pair<Policy, Rational>> table;
      std::vector<size_t> idx(d.decisions.size(), 0);
      while (true) {
        Policy pi;
        for (size_t i = 0; i < d.decisions.size(); ++i)
          pi.actions[d.decisions[i].id] = d.decisions[i].actions[idx[i]];
        table.push_back({pi, functional_value(d, pi)});
        size_t i = 0;
        for (; i < idx.size(); ++i) {
          if (++idx[i] < d.decisions[i].actions.size()) break;
          idx[i] = 0;
        }
        if (i == idx.size()) break;
      }
      Rational best = table.front().second;
      for (const auto& [pi, v] : table) best = std::max(best, v);
      std::vector<Policy> brute;
      for (const auto& [pi, v] : table)
        if (v == best) brute.push_back(pi);
      std::sort(brute.begin(), brute.end());
      PolicyRecommendation rec = optimal_policy(d, TheoryId::Fdt);
      std::vector<Policy> shipped;
      for (const auto& [pi, v] : rec.optimal) shipped.push_back(pi);
      std::sort(shipped.begin(), shipped.end());
      if (brute != shipped || best != rec.best_value) {
        all_ok = false;
        fails += id + " ";
      }
    }
    c.check_true("13.3", "optimal_policy(fdt) equals brute-force enumeration on every builtin",
                 all_ok, fails);
  });

  c.guarded("13.4", "dutch-book verdict soundness", [&] {
    // Independent world enumeration for the classic schedule.
    Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
    ExploitReport rep = evaluate_bets(d, TheoryId::CdtMyopic, AnthropicRule::SSA);
    bool acc1 = rep.decisions[0].accepted, acc2 = rep.decisions[1].accepted;
    Rational net_heads = (acc1 ? rat(-13) : rat(0)) + (acc2 ? rat(11) : rat(0));
    Rational net_tails = (acc1 ? rat(16) : rat(0)) + (acc2 ? rat(-9) * 2 : rat(0));
    bool book_independent = net_heads < 0 && net_tails < 0;
    bool nets_match = true;
    for (const auto& n : rep.nets) {
      if (n.label == "coin=heads") nets_match = nets_match && n.net == net_heads;
      if (n.label == "coin=tails") nets_match = nets_match && n.net == net_tails;
    }
    c.check_true("13.4",
                 "dutch-book verdict matches an independent per-world net enumeration",
                 nets_match && (rep.verdict == ExploitReport::Verdict::DutchBook) ==
                                   book_independent);
  });

  c.guarded("13.5", "exhaustive search finds the documented books", [&] {
    Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
    DutchBookSearch found = search_dutch_book(d, TheoryId::CdtMyopic, AnthropicRule::SSA, 20);
    c.check_true("13.5", "bound-20 search certifies a dutch book against halfer cdt",
                 found.menu.has_value(),
                 "searched=" + std::to_string(found.searched));
  });
}

}  // namespace

Dilemma random_agreement_dilemma(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
  };
  auto small_prob = [&]() {
    int den = pick(2, 6);
    int num = pick(1, den - 1);
    return Rational(num, den);
  };

  Dilemma d;
  d.name = "fuzz";
  int n_chance = pick(1, 2);
  for (int i = 0; i < n_chance; ++i) {
    ChanceVar v;
    v.name = "c" + std::to_string(i);
    v.domain = {"a", "b"};
    if (i == 1 && pick(0, 1)) {
      v.parents = {"c0"};
      for (const std::string pv : {"a", "b"}) {
        Rational p = small_prob();
        v.cpt.push_back({{{"c0", pv}}, {{"a", p}, {"b", Rational(1) - p}}});
      }
    } else {
      Rational p = small_prob();
      v.cpt.push_back({{}, {{"a", p}, {"b", Rational(1) - p}}});
    }
    d.chance.push_back(v);
  }
  InfoSet is;
  is.id = "d0";
  int n_actions = pick(2, 3);
  for (int a = 0; a < n_actions; ++a) is.actions.push_back("x" + std::to_string(a));
  is.tokens = {{"d0-t", {}}};
  d.decisions = {is};
  // Action-independent full-support (uniform) disposition.
  DispositionRow row;
  row.infoset = "d0";
  for (int a = 0; a < n_actions; ++a)
    row.dist["x" + std::to_string(a)] = Rational(1, BigInt(n_actions));
  d.disposition = {row};

  // Random utility over (chance assignment, action) cells.
  std::function<void(size_t, Condition&)> emit = [&](size_t i, Condition& when) {
    if (i == d.chance.size()) {
      for (const auto& a : is.actions) {
        UtilitySpec::Term term;
        term.when = when;
        term.when.require["d0-t"] = a;
        term.value = Rational(pick(-20, 20));
        d.utility.terms.push_back(term);
      }
      return;
    }
    for (const std::string v : {"a", "b"}) {
      when.require[d.chance[i].name] = v;
      emit(i + 1, when);
    }
    when.require.erase(d.chance[i].name);
  };
  Condition when;
  emit(0, when);
  return d;
}

std::vector<ClaimResult> run_all_claims(const Options& opts) {
  std::vector<ClaimResult> results;
  Checker c{results};
  claims_newcomb(c);
  claims_transparent(c);
  claims_mugging(c);
  claims_money_pump(c);
  claims_lesion_blackmail(c);
  claims_insurance(c);
  claims_credences(c);
  claims_dutch_books(c);
  claims_divergence(c);
  claims_envelopes(c);
  if (opts.include_rl) claims_learning(c, opts);
  claims_properties(c, opts);
  return results;
}

}  // namespace verify
}  // namespace gauntlet

#include "gauntlet/report.hpp"

#include <sstream>

namespace gauntlet {
namespace report {

namespace {

io::Json metadata(const std::string& command, const std::string& target,
                  const scenarios::ScenarioParams& params, uint64_t seed) {
  io::Json meta;
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["target"] = target;
  meta["seed"] = seed;
  meta["params"] = io::Json::object();
  for (const auto& [k, v] : params.values) meta["params"][k] = io::rational_to_json(v);
  return meta;
}

io::Json policy_json(const Policy& pi) {
  io::Json j = io::Json::object();
  for (const auto& [i, a] : pi.actions) j[i] = a;
  return j;
}

io::Json recommendation_json(const Recommendation& rec) {
  io::Json j;
  j["infoset"] = rec.infoset;
  io::Json evs = io::Json::object();
  for (const auto& [a, v] : rec.action_values) evs[a] = io::rational_to_json(v);
  j["ev"] = evs;
  j["argmax"] = rec.argmax;
  if (rec.candidate_bound) j["candidate_bound"] = true;
  if (rec.binding_unreachable) j["unreachable_under_own_policy"] = true;
  return j;
}

void fill_theory(io::Json& jt, const Dilemma& d, TheoryId theory, AnthropicRule rule) {
  if (is_updateless(theory)) {
    PolicyRecommendation best = optimal_policy(d, theory);
    jt["optimal_policies"] = io::Json::array();
    for (const auto& [pi, ev] : best.optimal) {
      io::Json jp;
      jp["policy"] = policy_json(pi);
      jp["prior_ev"] = io::rational_to_json(ev);
      jt["optimal_policies"].push_back(jp);
    }
    jt["policies_considered"] = best.policies_considered;
  } else {
    jt["recommendations"] = io::Json::array();
    for (const auto& is : d.decisions) {
      try {
        jt["recommendations"].push_back(
            recommendation_json(recommend(d, is.id, theory, rule)));
      } catch (const EngineError& e) {
        io::Json je;
        je["infoset"] = is.id;
        je["error"] = e.what();
        jt["recommendations"].push_back(je);
      }
    }
  }
  Policy induced = induced_policy(d, theory, rule);
  jt["induced_policy"] = policy_json(induced);
  jt["realized_value"] = io::rational_to_json(functional_value(d, induced));
  if (!d.bets.empty()) {
    ExploitReport ex = evaluate_bets(d, theory, rule);
    io::Json jx;
    jx["verdict"] = ExploitReport::verdict_name(ex.verdict);
    jx["bets"] = io::Json::array();
    for (const auto& dec : ex.decisions) {
      io::Json jb;
      jb["bet"] = dec.bet;
      jb["accepted"] = dec.accepted;
      jb["ev"] = io::rational_to_json(dec.ev);
      jx["bets"].push_back(jb);
    }
    jx["nets"] = io::Json::array();
    for (const auto& net : ex.nets) {
      io::Json jn;
      jn["world"] = net.label;
      jn["probability"] = io::rational_to_json(net.probability);
      jn["net"] = io::rational_to_json(net.net);
      jx["nets"].push_back(jn);
    }
    jx["worst_net"] = io::rational_to_json(ex.worst_net);
    jx["expected_net"] = io::rational_to_json(ex.expected_net);
    jt["exploit"] = jx;
  }
}

io::Json dilemma_run(const Dilemma& d, const std::vector<TheoryId>& theories,
                     AnthropicRule rule) {
  io::Json out;
  out["dilemma"] = d.name;
  out["rule"] = to_string(rule);
  out["theories"] = io::Json::array();
  for (TheoryId theory : theories) {
    io::Json jt;
    jt["theory"] = to_string(theory);
    try {
      fill_theory(jt, d, theory, rule);
    } catch (const EngineError& e) {
      // An evaluator may report inapplicability (an urge-dependent tickle
      // recommendation, no ratifiable action); that is an outcome.
      jt["inapplicable"] = e.what();
    }
    out["theories"].push_back(jt);
  }
  return out;
}

io::Json game_run(const GameSpec& g, uint64_t seed) {
  io::Json out;
  out["game"] = g.game;
  if (g.game == "st-petersburg") {
    io::Json sums = io::Json::array();
    for (unsigned k = 1; k <= 10; ++k)
      sums.push_back(io::rational_to_json(st_petersburg_partial_ev(k)));
    out["partial_ev"] = sums;
    out["price_1000_witness_k"] = st_petersburg_price_witness(rat(1000));
  } else if (g.game == "quit-flip") {
    SeriesAnalysis s = naive_quit_flip_ev(g.alpha, 10);
    io::Json sums = io::Json::array();
    for (const auto& v : s.partial_sums) sums.push_back(io::rational_to_json(v));
    out["alpha"] = io::rational_to_json(g.alpha);
    out["partial_sums"] = sums;
    out["diverges"] = s.diverges;
    if (!s.caveat.empty()) out["caveat"] = s.caveat;
    NeverQuitSummary mc = simulate_never_quit(g.alpha, 10000, seed);
    io::Json jmc;
    jmc["trials"] = mc.trials;
    jmc["negative_trials"] = mc.negative_trials;
    jmc["mean_turns"] = mc.mean_turns;
    out["never_quit"] = jmc;
  } else if (g.game == "reservoir") {
    BellmanReport br = bellman_convergence({g.discount, g.growth}, 12, g.start,
                                           g.maintenance_cost);
    io::Json jb;
    jb["converges"] = br.converges;
    jb["ratio"] = io::rational_to_json(br.ratio);
    jb["empirical_shrinking"] = br.empirical_shrinking;
    out["bellman"] = jb;
    ReservoirReport rr =
        reservoir_decision(g.growth, g.maintenance_cost, g.discount, std::nullopt);
    out["unbounded_model"] = io::Json::object();
    out["unbounded_model"]["waits_forever"] = rr.waits_forever;
    io::Json jd = io::Json::array();
    for (const auto& dec : rr.decisions) {
      io::Json row;
      row["state"] = dec.state;
      row["action"] = dec.action;
      row["tap_value"] = io::rational_to_json(dec.tap_value);
      jd.push_back(row);
    }
    out["unbounded_model"]["decisions"] = jd;
    ReservoirReport fin =
        reservoir_decision(g.growth, g.maintenance_cost, g.discount, 4u);
    io::Json jf = io::Json::array();
    for (const auto& dec : fin.decisions) {
      io::Json row;
      row["state"] = dec.state;
      row["action"] = dec.action;
      jf.push_back(row);
    }
    out["horizon_4"] = jf;
  } else if (g.game == "iterated-st-petersburg") {
    for (const std::string agent : {"naive-ev", "fdt-bounded"}) {
      ReentryTrace tr = iterated_reentry_trace(g.reentry_fee, 10, agent);
      io::Json jt;
      jt["total_fees"] = io::rational_to_json(tr.total_fees);
      jt["quit_round"] = tr.quit_round;
      io::Json steps = io::Json::array();
      for (const auto& s : tr.steps) {
        io::Json row;
        row["round"] = s.round;
        row["reentered"] = s.reentered;
        row["appraisal"] = s.appraisal;
        steps.push_back(row);
      }
      jt["steps"] = steps;
      out[agent] = jt;
    }
  }
  return out;
}

io::Json envelope_run(const EnvelopeModel& m) {
  io::Json out;
  out["floor"] = io::rational_to_json(m.floor);
  out["fee"] = io::rational_to_json(m.fee);
  io::Json pairs = io::Json::array();
  for (const auto& [n, p] : m.pairs) {
    io::Json jp;
    jp["small"] = io::rational_to_json(n);
    jp["large"] = io::rational_to_json(n * 2);
    jp["probability"] = io::rational_to_json(p);
    pairs.push_back(jp);
  }
  out["pairs"] = pairs;
  out["prior_averse_appraisal_at_floor"] = io::rational_to_json(prior_averse_appraisal(m.floor));
  // Unconditional symmetry: expected switch gain before fees is exactly 0.
  Rational gain(0);
  for (const auto& [n, p] : m.pairs) gain += p * ((n * 2 - n) + (n - n * 2)) / 2;
  out["unconditional_switch_gain"] = io::rational_to_json(gain);
  for (const std::string agent : {"prior-averse", "bayes"}) {
    EnvelopePumpTrace tr = run_envelope_pump(m, agent, 10);
    io::Json jt;
    jt["expected_fees"] = io::rational_to_json(tr.expected_fees);
    jt["max_paid_switches"] = tr.max_paid_switches;
    jt["pair_switched_both_ways"] = tr.pair_switched_both_ways;
    io::Json worlds = io::Json::array();
    for (const auto& w : tr.worlds) {
      io::Json jw;
      jw["pair_small"] = io::rational_to_json(w.small);
      jw["held_small_first"] = w.held_small_first;
      jw["paid_switches"] = w.paid_switches;
      jw["fees"] = io::rational_to_json(w.fees);
      worlds.push_back(jw);
    }
    jt["worlds"] = worlds;
    out[agent] = jt;
  }
  return out;
}

}  // namespace

io::Json run_report(const std::string& target, const scenarios::Scenario& scenario,
                    const scenarios::ScenarioParams& params,
                    const std::vector<TheoryId>& theories, AnthropicRule rule,
                    uint64_t seed) {
  io::Json out;
  out["meta"] = metadata("run", target, params, seed);
  if (const auto* d = std::get_if<Dilemma>(&scenario)) {
    out["results"] = dilemma_run(*d, theories, rule);
    // Money-pump runs carry the round-by-round trace.
    if (d->find_infoset("play-1")) {
      io::Json traces = io::Json::array();
      for (TheoryId theory : theories) {
        io::Json jt;
        jt["theory"] = to_string(theory);
        PumpTrace tr;
        try {
          tr = run_money_pump(*d, theory, rule);
        } catch (const EngineError& e) {
          jt["inapplicable"] = e.what();
          traces.push_back(jt);
          continue;
        }
        jt["declined_at_entry"] = tr.declined_at_entry;
        jt["total"] = io::rational_to_json(tr.total);
        io::Json rounds = io::Json::array();
        for (const auto& r : tr.rounds) {
          io::Json jr;
          jr["round"] = r.round;
          jr["box"] = r.box;
          jr["perceived_ev"] = io::rational_to_json(r.perceived_round_ev);
          jr["realized"] = io::rational_to_json(r.realized);
          jr["cumulative"] = io::rational_to_json(r.cumulative);
          rounds.push_back(jr);
        }
        jt["rounds"] = rounds;
        traces.push_back(jt);
      }
      out["money_pump"] = traces;
    }
  } else if (const auto* g = std::get_if<GameSpec>(&scenario)) {
    out["results"] = game_run(*g, seed);
  } else if (const auto* m = std::get_if<EnvelopeModel>(&scenario)) {
    out["results"] = envelope_run(*m);
  }
  return out;
}

io::Json learn_report(learninglab::EnvId env,
                      const std::vector<learninglab::LearnerId>& learners,
                      const learninglab::TrainConfig& cfg, unsigned seed_count,
                      uint64_t base_seed) {
  namespace ll = learninglab;
  io::Json out;
  scenarios::ScenarioParams none;
  out["meta"] = metadata("learn", ll::to_string(env), none, base_seed);
  out["meta"]["episodes"] = cfg.episodes;
  out["meta"]["seeds"] = seed_count;
  std::vector<uint64_t> seeds;
  for (unsigned i = 0; i < seed_count; ++i) seeds.push_back(base_seed + i);
  ll::SweepReport rep = ll::sweep(env, learners, seeds, cfg);
  out["tally"] = io::Json::object();
  for (const auto& [learner, counts] : rep.tally) {
    io::Json jc = io::Json::object();
    for (const auto& [label, n] : counts) jc[label] = n;
    out["tally"][learner] = jc;
  }
  out["runs"] = io::Json::array();
  for (const auto& row : rep.rows) {
    io::Json jr;
    jr["learner"] = ll::to_string(row.learner);
    jr["seed"] = row.seed;
    jr["converged"] = row.stats.converged;
    io::Json jg = io::Json::object();
    for (const auto& [s, a] : row.stats.greedy_action) jg[s] = a;
    jr["greedy"] = jg;
    io::Json jf = io::Json::object();
    for (const auto& [s, freqs] : row.stats.action_freq) {
      io::Json ja = io::Json::object();
      for (const auto& [a, f] : freqs) ja[a] = f;
      jf[s] = ja;
    }
    jr["final_window_freq"] = jf;
    out["runs"].push_back(jr);
  }
  return out;
}

std::string learn_curves_csv(learninglab::EnvId env,
                             const std::vector<learninglab::LearnerId>& learners,
                             const learninglab::TrainConfig& cfg, unsigned seed_count,
                             uint64_t base_seed) {
  namespace ll = learninglab;
  std::ostringstream os;
  os << "learner,seed,episode,reward\n";
  for (ll::LearnerId l : learners) {
    for (unsigned i = 0; i < seed_count; ++i) {
      ll::TrainConfig c = cfg;
      c.seed = base_seed + i;
      ll::TrainStats st = ll::train(env, l, c);
      for (size_t ep = 0; ep < st.reward_curve.size(); ++ep)
        os << ll::to_string(l) << "," << c.seed << "," << ep << ","
           << st.reward_curve[ep] << "\n";
    }
  }
  return os.str();
}

io::Json audit_report(const std::string& target, const Dilemma& d, TheoryId theory,
                      AnthropicRule rule, long long bound) {
  io::Json out;
  scenarios::ScenarioParams none;
  out["meta"] = metadata("audit", target, none, 0);
  out["meta"]["theory"] = to_string(theory);
  out["meta"]["rule"] = to_string(rule);
  out["meta"]["bound"] = bound;
  DutchBookSearch search = search_dutch_book(d, theory, rule, bound);
  out["searched_menus"] = search.searched;
  if (search.menu) {
    out["found"] = true;
    io::Json menu = io::Json::array();
    for (const auto& bet : *search.menu) {
      io::Json jb;
      jb["name"] = bet.name;
      jb["offer"] = bet.offer_infoset ? *bet.offer_infoset : "pre-experiment";
      io::Json rows = io::Json::array();
      for (const auto& row : bet.payoffs) {
        io::Json jr;
        std::string when;
        for (const auto& [k, v] : row.when.require)
          when += (when.empty() ? "" : ",") + k + "=" + v;
        jr["when"] = when;
        jr["value"] = io::rational_to_json(row.value);
        rows.push_back(jr);
      }
      jb["payoffs"] = rows;
      menu.push_back(jb);
    }
    out["menu"] = menu;
    if (!d.bets.empty()) {
      ExploitReport ex =
          evaluate_bets(attach_bets(strip_bets(d), *search.menu), theory, rule);
      out["verdict"] = ExploitReport::verdict_name(ex.verdict);
    } else {
      out["verdict"] = "dutch-book";
    }
  } else {
    out["found"] = false;
    out["exhaustive"] = search.exhaustive;
    out["statement"] = "no guaranteed-loss menu exists within the searched space";
  }
  return out;
}

}  // namespace report
}  // namespace gauntlet

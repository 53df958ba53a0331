#include "gauntlet/exploit.hpp"

#include <algorithm>
#include <set>

namespace gauntlet {

namespace {

std::vector<UtilitySpec::Term> bet_terms(const Dilemma& base, const Bet& bet) {
  std::vector<UtilitySpec::Term> out;
  if (!bet.offer_infoset) return out;
  const InfoSet* is = base.find_infoset(*bet.offer_infoset);
  if (!is) throw EngineError("bet '" + bet.name + "' offered at unknown infoset");
  for (const auto& t : is->tokens) {
    for (const auto& row : bet.payoffs) {
      UtilitySpec::Term term;
      term.when = row.when;
      term.when.require[t.id] = bet.accept_action;
      term.value = row.value;
      out.push_back(term);
    }
  }
  return out;
}

bool term_equal(const UtilitySpec::Term& a, const UtilitySpec::Term& b) {
  return a.value == b.value && a.when.require == b.when.require;
}

}  // namespace

Dilemma attach_bets(const Dilemma& base, const std::vector<Bet>& menu) {
  Dilemma out = base;
  out.bets = menu;
  for (const auto& bet : menu)
    for (const auto& term : bet_terms(out, bet)) out.utility.terms.push_back(term);
  return out;
}

Dilemma strip_bets(const Dilemma& d) {
  Dilemma out = d;
  for (const auto& bet : d.bets) {
    for (const auto& term : bet_terms(d, bet)) {
      auto it = std::find_if(out.utility.terms.begin(), out.utility.terms.end(),
                             [&](const UtilitySpec::Term& t) { return term_equal(t, term); });
      if (it != out.utility.terms.end()) out.utility.terms.erase(it);
    }
  }
  out.bets.clear();
  return out;
}

std::string ExploitReport::verdict_name(Verdict v) {
  switch (v) {
    case Verdict::DutchBook: return "dutch-book";
    case Verdict::ExploitableInExpectation: return "exploitable-in-expectation";
    case Verdict::Safe: return "safe";
  }
  return "?";
}

namespace {

// The prior world distribution an updateless agent of `theory` reasons from:
// its own policy's consequences under the theory's scoring semantics.
WorldDist updateless_dist(const Dilemma& d, TheoryId theory, const Policy& pi) {
  switch (theory) {
    case TheoryId::Fdt: return functional_joint(d, pi);
    case TheoryId::Ucdt: return joint(d, pi);
    case TheoryId::Uedt:
      return condition(reference_joint(d), [&](const World& w) {
        for (const auto& [i, a] : pi.actions)
          if (w.rules.at(i) != a) return false;
        return true;
      });
    default: throw EngineError("theory is not updateless");
  }
}

// EV a theory shows the agent for one bet at its offer point.
Rational bet_ev(const Dilemma& d, const Bet& bet, TheoryId theory, AnthropicRule rule) {
  if (!bet.offer_infoset) {
    // Pre-experiment: updateful agents price by the reference prior;
    // updateless agents know their own policy and price by its consequences.
    WorldDist dist = is_updateless(theory)
                         ? updateless_dist(d, theory, induced_policy(d, theory, rule))
                         : reference_joint(d);
    Rational ev(0);
    for (const auto& [w, p] : dist) ev += p * bet_payoff(bet, w);
    return ev;
  }
  const InfoSet* is = d.find_infoset(*bet.offer_infoset);
  if (!is) throw EngineError("bet offered at unknown infoset");

  if (!is_updateless(theory)) {
    if (is->actions.size() != 2)
      throw EngineError("bet acceptance needs a binary accept/decline infoset");
    Recommendation rec = recommend(d, is->id, theory, rule);
    Rational accept_ev, other_ev;
    for (const auto& [a, v] : rec.action_values)
      (a == bet.accept_action ? accept_ev : other_ev) = v;
    return accept_ev - other_ev;
  }

  // Updateless: the whole-policy gain from accepting, judged from the prior.
  Policy accepting = induced_policy(d, theory, rule);
  accepting.actions[is->id] = bet.accept_action;
  Rational ev(0);
  for (const auto& [w, p] : updateless_dist(d, theory, accepting)) {
    unsigned mult = 0;
    for (const auto& t : is->tokens)
      if (w.token_occurs(t.id)) ++mult;
    ev += p * bet_payoff(bet, w) * Rational(BigInt(mult));
  }
  return ev;
}

}  // namespace

ExploitReport evaluate_bets(const Dilemma& d, TheoryId theory, AnthropicRule rule) {
  if (d.bets.empty()) throw EngineError("dilemma '" + d.name + "' carries no bet menu");
  ExploitReport rep;
  rep.theory = theory;
  rep.rule = rule;

  for (const auto& bet : d.bets) {
    Rational ev = bet_ev(d, bet, theory, rule);
    rep.decisions.push_back({bet.name, ev > 0, ev});
  }

  // Play out the acceptance pattern against accuracy-faithful predictors.
  Policy pi = induced_policy(d, theory, rule);
  for (size_t i = 0; i < d.bets.size(); ++i) {
    const Bet& bet = d.bets[i];
    if (!bet.offer_infoset) continue;
    const InfoSet* is = d.find_infoset(*bet.offer_infoset);
    if (is->actions.size() == 2) {
      const std::string& other = is->actions[0] == bet.accept_action ? is->actions[1]
                                                                     : is->actions[0];
      pi.actions[is->id] = rep.decisions[i].accepted ? bet.accept_action : other;
    }
  }

  std::set<std::string> label_vars;
  for (const auto& bet : d.bets)
    for (const auto& row : bet.payoffs)
      for (const auto& [k, v] : row.when.require) label_vars.insert(k);

  std::map<std::string, std::pair<Rational, Rational>> groups;  // label -> (prob, net)
  for (const auto& [w, p] : functional_joint(d, pi)) {
    Rational net(0);
    for (size_t i = 0; i < d.bets.size(); ++i) {
      if (!rep.decisions[i].accepted) continue;
      const Bet& bet = d.bets[i];
      if (!bet.offer_infoset) {
        net += bet_payoff(bet, w);
        continue;
      }
      const InfoSet* is = d.find_infoset(*bet.offer_infoset);
      unsigned mult = 0;
      for (const auto& t : is->tokens)
        if (w.token_occurs(t.id) && w.tokens.at(t.id) == bet.accept_action) ++mult;
      net += bet_payoff(bet, w) * Rational(BigInt(mult));
    }
    std::string label;
    for (const auto& v : label_vars)
      if (w.vars.count(v)) label += (label.empty() ? "" : ",") + v + "=" + w.vars.at(v);
    label += "|" + rat_str(net);
    auto& slot = groups[label];
    slot.first += p;
    slot.second = net;
  }

  bool first = true;
  rep.expected_net = 0;
  for (const auto& [label, pn] : groups) {
    std::string display = label.substr(0, label.rfind('|'));
    rep.nets.push_back({display, pn.first, pn.second});
    rep.expected_net += pn.first * pn.second;
    if (first || pn.second < rep.worst_net) rep.worst_net = pn.second;
    if (first || pn.second > rep.best_net) rep.best_net = pn.second;
    first = false;
  }
  if (rep.best_net < 0)
    rep.verdict = ExploitReport::Verdict::DutchBook;
  else if (rep.expected_net < 0)
    rep.verdict = ExploitReport::Verdict::ExploitableInExpectation;
  else
    rep.verdict = ExploitReport::Verdict::Safe;
  return rep;
}

namespace {

// Round-local payoff of playing `action` with the round's prediction equal
// to `pred_value`: the sum of utility terms keyed on the round's box token.
Rational round_payoff(const Dilemma& d, const std::string& box_token,
                      const std::string& action, const std::string& pred_var,
                      const std::string& pred_value) {
  Rational out(0);
  for (const auto& term : d.utility.terms) {
    auto bt = term.when.require.find(box_token);
    if (bt == term.when.require.end()) continue;
    if (bt->second != action) continue;
    bool ok = true;
    for (const auto& [k, v] : term.when.require) {
      if (k == box_token) continue;
      if (k == pred_var && v == pred_value) continue;
      ok = false;
    }
    if (ok) out += term.value;
  }
  return out;
}

}  // namespace

PumpTrace run_money_pump(const Dilemma& d, TheoryId theory, AnthropicRule rule,
                         unsigned rounds) {
  PumpTrace trace;
  trace.theory = theory;
  trace.total = 0;

  unsigned available = 0;
  while (d.find_infoset("play-" + std::to_string(available + 1))) ++available;
  if (available == 0) throw EngineError("not a money-pump dilemma (no play-k infosets)");
  if (rounds == 0) rounds = available;
  if (rounds > available)
    throw EngineError("dilemma only carries " + std::to_string(available) + " rounds");

  Policy pi = induced_policy(d, theory, rule);
  WorldDist ref = reference_joint(d);

  for (unsigned r = 1; r <= rounds; ++r) {
    const std::string play_id = "play-" + std::to_string(r);
    const std::string box_id = "box-" + std::to_string(r);
    const std::string box_token = box_id + "-t";
    const std::string pred_var = "prediction-" + std::to_string(r);

    if (pi.at(play_id) != "play") {
      if (r == 1) trace.declined_at_entry = true;
      break;
    }
    const std::string chosen = pi.at(box_id);

    // Perceived round value at the box choice under the theory's credence.
    CredenceTable cred = anthropic_credence(d, ref, box_id, rule);
    bool edt_family = theory == TheoryId::Edt || theory == TheoryId::EdtTickle ||
                      theory == TheoryId::EdtRatify || theory == TheoryId::Uedt;
    Rational perceived(0), mass(0);
    for (const auto& e : cred.entries) {
      if (edt_family && e.world.rules.at(box_id) != chosen) continue;
      perceived += e.credence * round_payoff(d, box_token, chosen, pred_var,
                                             e.world.vars.at(pred_var));
      mass += e.credence;
    }
    if (mass == 0) throw EngineError("round " + std::to_string(r) + " unreachable");
    perceived /= mass;

    // Realized against the predictor reading the induced rule.
    const PredictorVar* pred = nullptr;
    for (const auto& p : d.predictors)
      if (p.name == pred_var) pred = &p;
    if (!pred) throw EngineError("missing predictor for round " + std::to_string(r));
    const InfoSet* box = d.find_infoset(box_id);
    Rational realized(0);
    if (pred->accuracy == 1) {
      realized = round_payoff(d, box_token, chosen, pred_var, chosen);
    } else {
      Rational err = (Rational(1) - pred->accuracy) / Rational(BigInt(box->actions.size() - 1));
      for (const auto& a : box->actions)
        realized += (a == chosen ? pred->accuracy : err) *
                    round_payoff(d, box_token, chosen, pred_var, a);
    }
    trace.total += realized;
    trace.rounds.push_back({r, true, chosen, perceived, realized, trace.total});
  }
  return trace;
}

void validate_envelope_model(const EnvelopeModel& m) {
  if (m.pairs.empty()) throw EngineError("envelope model needs at least one pair");
  Rational total(0);
  for (const auto& [n, p] : m.pairs) {
    if (n < m.floor) throw EngineError("envelope amount below the floor");
    if (p <= 0) throw EngineError("envelope pair probability must be positive");
    total += p;
  }
  if (total != 1) throw EngineError("envelope pair probabilities must sum to 1");
}

Rational bayes_conditional_other(const EnvelopeModel& m, const Rational& x) {
  validate_envelope_model(m);
  Rational mass(0), ev(0);
  for (const auto& [n, p] : m.pairs) {
    if (n == x) {  // held the smaller envelope
      mass += p / 2;
      ev += (p / 2) * (n * 2);
    }
    if (n * 2 == x) {  // held the larger envelope
      mass += p / 2;
      ev += (p / 2) * n;
    }
  }
  if (mass == 0) throw EngineError("amount " + rat_str(x) + " outside the prior's support");
  return ev / mass;
}

Rational prior_averse_appraisal(const Rational& x) {
  if (x <= 0) throw EngineError("appraisal needs a positive amount");
  return Rational(5, 4) * x;
}

EnvelopePumpTrace run_envelope_pump(const EnvelopeModel& m, const std::string& agent,
                                    unsigned offers) {
  validate_envelope_model(m);
  if (offers < 1) throw EngineError("need at least one offer");
  if (agent != "prior-averse" && agent != "bayes")
    throw EngineError("unknown envelope agent '" + agent + "'");

  EnvelopePumpTrace trace;
  trace.agent = agent;
  trace.expected_fees = 0;

  for (const auto& [n, p] : m.pairs) {
    for (bool held_small : {true, false}) {
      EnvelopeWorldTrace wt;
      wt.small = n;
      wt.held_small_first = held_small;
      wt.probability = p / 2;
      wt.fees = 0;
      Rational held = held_small ? n : n * 2;
      std::set<Rational> seen{held};
      bool small_to_large = false, large_to_small = false;
      for (unsigned o = 1; o <= offers; ++o) {
        Rational appraisal;
        if (agent == "prior-averse") {
          appraisal = prior_averse_appraisal(held);
        } else if (seen.size() == 2) {
          appraisal = held == n ? n * 2 : n;  // the pair is known
        } else {
          appraisal = bayes_conditional_other(m, held);
        }
        bool switch_now = appraisal > held + m.fee;
        wt.offers.push_back({o, held, appraisal, switch_now});
        if (!switch_now) break;  // the same offer repeats; no later switch either
        wt.fees += m.fee;
        ++wt.paid_switches;
        (held == n ? small_to_large : large_to_small) = true;
        held = held == n ? n * 2 : n;
        seen.insert(held);
      }
      if (small_to_large && large_to_small) trace.pair_switched_both_ways = true;
      trace.max_paid_switches = std::max(trace.max_paid_switches, wt.paid_switches);
      trace.expected_fees += wt.probability * wt.fees;
      trace.worlds.push_back(std::move(wt));
    }
  }
  return trace;
}

namespace {

struct SearchTemplate {
  std::vector<Bet> bets;  // payoff values are placeholders
  bool synthesized = false;
};

SearchTemplate search_template(const Dilemma& d) {
  SearchTemplate t;
  if (!d.bets.empty()) {
    t.bets = d.bets;
    return t;
  }
  t.synthesized = true;
  std::string event_var;
  std::vector<std::string> domain;
  if (!d.chance.empty()) {
    event_var = d.chance.front().name;
    domain = d.chance.front().domain;
  } else if (!d.predictors.empty()) {
    event_var = d.predictors.front().name;
    domain = d.find_infoset(d.predictors.front().reads_infoset)->actions;
  } else {
    throw EngineError("no event variable available for a bet template");
  }
  auto rows = [&]() {
    std::vector<Bet::Payoff> out;
    for (const auto& v : domain) {
      Bet::Payoff row;
      row.when.require[event_var] = v;
      row.value = 0;
      out.push_back(row);
    }
    return out;
  };
  Bet pre;
  pre.name = "probe-pre";
  pre.payoffs = rows();
  t.bets.push_back(pre);
  if (!d.decisions.empty()) {
    Bet at;
    at.name = "probe-" + d.decisions.front().id;
    at.offer_infoset = d.decisions.front().id;
    at.payoffs = rows();
    t.bets.push_back(at);
  }
  return t;
}

}  // namespace

DutchBookSearch search_dutch_book(const Dilemma& d, TheoryId theory, AnthropicRule rule,
                                  long long bound) {
  if (bound < 1) throw EngineError("search bound must be at least 1");
  SearchTemplate tmpl = search_template(d);
  if (tmpl.bets.size() > 2) throw EngineError("dutch-book search caps menus at 2 bets");

  Dilemma base = strip_bets(d);

  // Linear acceptance functionals: ev_i(menu) = intercept_i + sum coeff * v.
  size_t total_rows = 0;
  for (const auto& b : tmpl.bets) total_rows += b.payoffs.size();

  auto menu_with = [&](const std::vector<Rational>& values) {
    std::vector<Bet> menu = tmpl.bets;
    size_t k = 0;
    for (auto& b : menu)
      for (auto& row : b.payoffs) row.value = values[k++];
    return menu;
  };

  auto acceptance_ev = [&](const Dilemma& dd, const Bet& bet) -> Rational {
    if (!tmpl.synthesized) return bet_ev(dd, bet, theory, rule);
    // Synthesized bets are priced by the theory's credence at the offer
    // point; they are not actions of the dilemma.
    if (!bet.offer_infoset || is_updateless(theory)) {
      WorldDist dist = is_updateless(theory)
                           ? updateless_dist(dd, theory, induced_policy(dd, theory, rule))
                           : reference_joint(dd);
      Rational ev(0);
      for (const auto& [w, p] : dist) ev += p * bet_payoff(bet, w);
      return ev;
    }
    CredenceTable cred = anthropic_credence(dd, reference_joint(dd), *bet.offer_infoset, rule);
    Rational ev(0);
    for (const auto& e : cred.entries) ev += e.credence * bet_payoff(bet, e.world);
    return ev;
  };

  std::vector<Rational> zero(total_rows, Rational(0));
  std::vector<Rational> intercept(tmpl.bets.size());
  {
    Dilemma dz = tmpl.synthesized ? base : attach_bets(base, menu_with(zero));
    auto menu0 = menu_with(zero);
    for (size_t i = 0; i < tmpl.bets.size(); ++i)
      intercept[i] = acceptance_ev(tmpl.synthesized ? base : dz, menu0[i]);
  }
  std::vector<std::vector<Rational>> coeff(tmpl.bets.size(),
                                           std::vector<Rational>(total_rows, Rational(0)));
  for (size_t k = 0; k < total_rows; ++k) {
    std::vector<Rational> probe = zero;
    probe[k] = 1;
    auto menu = menu_with(probe);
    Dilemma dp = tmpl.synthesized ? base : attach_bets(base, menu);
    for (size_t i = 0; i < tmpl.bets.size(); ++i)
      coeff[i][k] = acceptance_ev(tmpl.synthesized ? base : dp, menu[i]) - intercept[i];
  }

  // Per-world row index and multiplicity under the accepting play.
  Policy pi_net = induced_policy(d, theory, rule);
  {
    auto menu = menu_with(zero);
    for (const auto& b : menu) {
      if (!b.offer_infoset || tmpl.synthesized) continue;
      pi_net.actions[*b.offer_infoset] = b.accept_action;
    }
  }
  Dilemma d_net = tmpl.synthesized ? base : attach_bets(base, menu_with(zero));
  struct WorldRows {
    Rational prob;
    std::vector<size_t> row;       // index into the flat value vector
    std::vector<long long> mult;   // payout multiplicity per bet
  };
  std::vector<WorldRows> worlds;
  {
    auto menu = menu_with(zero);
    for (const auto& [w, p] : functional_joint(d_net, pi_net)) {
      WorldRows wr;
      wr.prob = p;
      size_t base_k = 0;
      for (size_t i = 0; i < menu.size(); ++i) {
        const Bet& b = menu[i];
        size_t hit = 0;
        bool found = false;
        for (size_t r = 0; r < b.payoffs.size(); ++r)
          if (condition_matches(b.payoffs[r].when, w)) {
            hit = base_k + r;
            found = true;
            break;
          }
        if (!found) throw EngineError("bet template rows do not cover a world");
        long long mult = 1;
        if (b.offer_infoset) {
          mult = 0;
          const InfoSet* is = d_net.find_infoset(*b.offer_infoset);
          for (const auto& t : is->tokens)
            if (w.token_occurs(t.id)) ++mult;
        }
        wr.row.push_back(hit);
        wr.mult.push_back(mult);
        base_k += b.payoffs.size();
      }
      worlds.push_back(std::move(wr));
    }
  }
  // Merge worlds with identical betting profiles.
  {
    std::map<std::pair<std::vector<size_t>, std::vector<long long>>, Rational> merged;
    for (const auto& wr : worlds) merged[{wr.row, wr.mult}] += wr.prob;
    worlds.clear();
    for (const auto& [key, p] : merged) worlds.push_back({p, key.first, key.second});
  }

  unsigned long long space = 1;
  const unsigned long long width = 2 * static_cast<unsigned long long>(bound) + 1;
  for (size_t k = 0; k < total_rows; ++k) {
    if (space > 100'000'000ull / width)
      throw EngineError("dutch-book search space exceeds the overflow guard");
    space *= width;
  }

  DutchBookSearch result;
  std::vector<long long> v(total_rows, -bound);
  std::vector<Rational> vals(total_rows);
  while (true) {
    ++result.searched;
    for (size_t k = 0; k < total_rows; ++k) vals[k] = Rational(BigInt(v[k]));
    // Acceptance per bet, then guaranteed-loss test.
    bool any_accept = false;
    std::vector<bool> accepted(tmpl.bets.size());
    for (size_t i = 0; i < tmpl.bets.size(); ++i) {
      Rational ev = intercept[i];
      for (size_t k = 0; k < total_rows; ++k) ev += coeff[i][k] * vals[k];
      accepted[i] = ev > 0;
      any_accept |= accepted[i];
    }
    if (any_accept) {
      bool book = true;
      for (const auto& wr : worlds) {
        Rational net(0);
        for (size_t i = 0; i < tmpl.bets.size(); ++i)
          if (accepted[i])
            net += vals[wr.row[i]] * Rational(BigInt(wr.mult[i]));
        if (net >= 0) {
          book = false;
          break;
        }
      }
      if (book) {
        result.menu = menu_with(vals);
        return result;
      }
    }
    // Next menu in lexicographic order.
    size_t k = total_rows;
    while (k > 0) {
      --k;
      if (v[k] < bound) {
        ++v[k];
        break;
      }
      v[k] = -bound;
      if (k == 0) {
        result.exhaustive = true;
        return result;
      }
    }
  }
}

}  // namespace gauntlet

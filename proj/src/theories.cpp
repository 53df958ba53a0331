#include "gauntlet/theories.hpp"

#include <algorithm>
#include <set>

namespace gauntlet {

bool is_updateless(TheoryId t) {
  return t == TheoryId::Uedt || t == TheoryId::Ucdt || t == TheoryId::Fdt;
}

std::string to_string(TheoryId t) {
  switch (t) {
    case TheoryId::Edt: return "edt";
    case TheoryId::EdtTickle: return "edt-tickle";
    case TheoryId::EdtRatify: return "edt-ratify";
    case TheoryId::CdtMyopic: return "cdt-myopic";
    case TheoryId::CdtSophisticated: return "cdt-sophisticated";
    case TheoryId::Uedt: return "uedt";
    case TheoryId::Ucdt: return "ucdt";
    case TheoryId::Fdt: return "fdt";
  }
  return "?";
}

std::optional<TheoryId> theory_from_string(const std::string& s) {
  for (TheoryId t : kAllTheories)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

WorldDist functional_joint(const Dilemma& d, const Policy& pi) {
  EvalContext ctx;
  ctx.policy = &pi;
  ctx.all_predictors_read_policy = true;
  return enumerate_worlds(d, ctx);
}

Rational functional_value(const Dilemma& d, const Policy& pi) {
  return expected_utility(d, functional_joint(d, pi));
}

Rational intervention_value(const Dilemma& d, const World& world, const std::string& token,
                            const std::string& action,
                            const std::map<std::string, std::string>* plan) {
  const InfoSet* owner = d.infoset_of_token(token);
  if (!owner) throw EngineError("unknown token '" + token + "'");
  if (std::find(owner->actions.begin(), owner->actions.end(), action) ==
      owner->actions.end())
    throw EngineError("unknown action '" + action + "' at infoset '" + owner->id + "'");

  std::vector<std::string> down = downstream_tokens(d, token);
  World base = world;
  base.tokens[token] = action;
  for (const auto& t : down) base.tokens.erase(t);

  Rational total(0);
  // Resolve downstream tokens in declaration order, branching over fresh
  // disposition draws where no plan covers the infoset.
  std::function<void(size_t, World&, const Rational&)> rec = [&](size_t i, World& w,
                                                                 const Rational& p) {
    if (i == down.size()) {
      total += p * utility_of(d, w);
      return;
    }
    const std::string& tid = down[i];
    const InfoSet* is = d.infoset_of_token(tid);
    const TokenDef* td = nullptr;
    for (const auto& t : is->tokens)
      if (t.id == tid) td = &t;
    if (!condition_matches(td->guard, w)) {
      rec(i + 1, w, p);
      return;
    }
    if (auto it = d.clamps.find(tid); it != d.clamps.end()) {
      w.tokens[tid] = it->second;
      rec(i + 1, w, p);
      w.tokens.erase(tid);
      return;
    }
    if (plan && plan->count(is->id)) {
      w.tokens[tid] = plan->at(is->id);
      rec(i + 1, w, p);
      w.tokens.erase(tid);
      return;
    }
    const auto& row = disposition_row(d, is->id, w);
    for (const auto& [a, q] : row.dist) {
      if (q == 0) continue;
      w.tokens[tid] = a;
      rec(i + 1, w, p * q);
    }
    w.tokens.erase(tid);
  };
  rec(0, base, Rational(1));
  return total;
}

namespace {

struct ActionValues {
  std::vector<std::pair<std::string, Rational>> values;
  std::vector<std::string> argmax;
};

ActionValues pick_argmax(const InfoSet& is,
                         const std::map<std::string, Rational>& by_action) {
  ActionValues out;
  std::optional<Rational> best;
  for (const auto& a : is.actions) {
    const Rational& v = by_action.at(a);
    out.values.push_back({a, v});
    if (!best || v > *best) best = v;
  }
  for (const auto& a : is.actions)
    if (by_action.at(a) == *best) out.argmax.push_back(a);
  return out;
}

// Conditional expectation of utility over the world marginal of a credence
// table restricted to worlds whose rule at `infoset` is `action`.
Rational edt_conditional_value(const Dilemma& d, const CredenceTable& cred,
                               const std::string& infoset, const std::string& action) {
  Rational mass(0), ev(0);
  std::map<World, Rational> marginal;  // worlds repeat across tokens; count once
  for (const auto& e : cred.entries)
    if (e.world.rules.at(infoset) == action) marginal[e.world] += e.credence;
  for (const auto& [w, p] : marginal) {
    mass += p;
    ev += p * utility_of(d, w);
  }
  if (mass == 0)
    throw EngineError("conditioning on rule '" + action + "' at '" + infoset +
                      "' has zero probability");
  return ev / mass;
}

Rational edt_rule_mass(const CredenceTable& cred, const std::string& infoset,
                       const std::string& action) {
  Rational mass(0);
  for (const auto& e : cred.entries)
    if (e.world.rules.at(infoset) == action) mass += e.credence;
  return mass;
}

CredenceTable filter_credence(const CredenceTable& in,
                              const std::function<bool(const World&)>& keep) {
  CredenceTable out;
  for (const auto& e : in.entries)
    if (keep(e.world)) out.entries.push_back(e);
  Rational mass = out.total();
  if (mass == 0) throw EngineError("credence filter leaves zero mass");
  for (auto& e : out.entries) e.credence /= mass;
  return out;
}

// Backward-induction continuation plan: each stage evaluated causally at its
// own infoset with later stages following the already-computed plan.
std::map<std::string, std::string> sophisticated_plan(const Dilemma& d, AnthropicRule rule,
                                                      const WorldDist& ref) {
  std::map<std::string, std::string> plan;
  for (auto it = d.decisions.rbegin(); it != d.decisions.rend(); ++it) {
    const InfoSet& is = *it;
    CredenceTable cred = anthropic_credence(d, ref, is.id, rule);
    std::map<std::string, Rational> ev;
    for (const auto& a : is.actions) {
      Rational v(0);
      for (const auto& e : cred.entries)
        v += e.credence * intervention_value(d, e.world, e.token, a, &plan);
      ev[a] = v;
    }
    ActionValues av = pick_argmax(is, ev);
    plan[is.id] = av.argmax.front();
  }
  return plan;
}

struct EvalSetup {
  WorldDist ref;
  CredenceTable cred;
  bool candidate_bound = false;
};

// Evidential evaluation needs positive probability for every rule value at
// the infoset. Accuracy-1 predictors whose output gates the infoset's
// occurrence (transparent-style) make that degenerate; those evaluations
// re-run with reads-candidate-policy predictors pinned to the candidate.
bool edt_degenerate(const CredenceTable& cred, const InfoSet& is) {
  for (const auto& a : is.actions)
    if (edt_rule_mass(cred, is.id, a) == 0) return true;
  return false;
}

}  // namespace

namespace detail {

Recommendation recommend_impl(const Dilemma& d, const std::string& infoset, TheoryId theory,
                              AnthropicRule rule, const History& history,
                              const Policy* candidate);

}  // namespace detail

Recommendation recommend(const Dilemma& d, const std::string& infoset, TheoryId theory,
                         AnthropicRule rule, const History& history) {
  if (is_updateless(theory))
    throw EngineError("theory '" + to_string(theory) +
                      "' is updateless; use optimal_policy");
  const InfoSet* is = d.find_infoset(infoset);
  if (!is) throw EngineError("unknown infoset '" + infoset + "'");

  // Degenerate evidential evaluations bind against the theory's own induced
  // policy when the caller supplies no candidate.
  bool edt_family = theory == TheoryId::Edt || theory == TheoryId::EdtTickle ||
                    theory == TheoryId::EdtRatify;
  if (edt_family) {
    WorldDist ref = reference_joint(d);
    CredenceTable cred = anthropic_credence(d, ref, infoset, rule);
    if (edt_degenerate(cred, *is)) {
      Policy induced = induced_policy(d, theory, rule);
      return detail::recommend_impl(d, infoset, theory, rule, history, &induced);
    }
  }
  return detail::recommend_impl(d, infoset, theory, rule, history, nullptr);
}

namespace detail {

Recommendation recommend_impl(const Dilemma& d, const std::string& infoset, TheoryId theory,
                              AnthropicRule rule, const History& history,
                              const Policy* candidate) {
  const InfoSet* is = d.find_infoset(infoset);
  if (!is) throw EngineError("unknown infoset '" + infoset + "'");

  Recommendation rec;
  rec.infoset = infoset;
  rec.theory = theory;
  rec.rule = rule;

  auto build_setup = [&](bool bind_candidate) -> EvalSetup {
    EvalSetup s;
    EvalContext ctx;
    if (bind_candidate) {
      if (!candidate) throw EngineError("degenerate evaluation without a candidate policy");
      ctx.predictor_candidate = candidate;
      s.candidate_bound = true;
    }
    s.ref = enumerate_worlds(d, ctx);
    s.cred = anthropic_credence(d, s.ref, infoset, rule);
    if (!history.empty()) s.cred = posterior_after_actions(s.cred, d, history);
    return s;
  };

  bool edt_family = theory == TheoryId::Edt || theory == TheoryId::EdtTickle ||
                    theory == TheoryId::EdtRatify;

  EvalSetup setup;
  try {
    setup = build_setup(false);
    if (edt_family && edt_degenerate(setup.cred, *is) && candidate)
      setup = build_setup(true);
  } catch (const EngineError&) {
    // Unreachable under the unbound joint can only happen mid-rollout with a
    // candidate that closes off the infoset.
    if (!candidate) throw;
    rec.binding_unreachable = true;
    return rec;
  }

  rec.candidate_bound = setup.candidate_bound;

  switch (theory) {
    case TheoryId::Edt: {
      std::map<std::string, Rational> ev;
      for (const auto& a : is->actions)
        ev[a] = edt_conditional_value(d, setup.cred, infoset, a);
      auto av = pick_argmax(*is, ev);
      rec.action_values = av.values;
      rec.argmax = av.argmax;
      return rec;
    }

    case TheoryId::EdtTickle: {
      // Condition on the introspectable type variables the disposition keys
      // on, then evaluate evidentially inside each type.
      std::set<std::string> type_vars;
      for (const auto& row : d.disposition)
        if (row.infoset == infoset)
          for (const auto& [k, v] : row.given) type_vars.insert(k);
      if (type_vars.empty()) {
        std::map<std::string, Rational> ev;
        for (const auto& a : is->actions)
          ev[a] = edt_conditional_value(d, setup.cred, infoset, a);
        auto av = pick_argmax(*is, ev);
        rec.action_values = av.values;
        rec.argmax = av.argmax;
        return rec;
      }
      // Distinct type assignments with positive credence.
      std::set<std::map<std::string, std::string>> types;
      for (const auto& e : setup.cred.entries) {
        std::map<std::string, std::string> t;
        for (const auto& v : type_vars) t[v] = e.world.vars.at(v);
        types.insert(t);
      }
      std::map<std::string, Rational> mixture;
      for (const auto& a : is->actions) mixture[a] = Rational(0);
      std::optional<std::vector<std::string>> shared_argmax;
      for (const auto& t : types) {
        auto match = [&](const World& w) {
          for (const auto& [k, v] : t)
            if (w.vars.at(k) != v) return false;
          return true;
        };
        Rational type_mass(0);
        for (const auto& e : setup.cred.entries)
          if (match(e.world)) type_mass += e.credence;
        CredenceTable sub = filter_credence(setup.cred, match);
        std::map<std::string, Rational> ev;
        for (const auto& a : is->actions)
          ev[a] = edt_conditional_value(d, sub, infoset, a);
        auto av = pick_argmax(*is, ev);
        if (shared_argmax && *shared_argmax != av.argmax)
          throw EngineError("tickle recommendation at '" + infoset +
                            "' depends on the urge state");
        shared_argmax = av.argmax;
        for (const auto& a : is->actions) mixture[a] += type_mass * ev[a];
      }
      auto av = pick_argmax(*is, mixture);
      rec.action_values = av.values;
      rec.argmax = *shared_argmax;
      return rec;
    }

    case TheoryId::EdtRatify: {
      // val[a][a']: news value of finally deciding a' while the disposition
      // evidence says the decision is a. Predictors reading this infoset see
      // the contemplated a'; the rule draw stays a.
      Dilemma clamped = d;
      // A contemplated deviation that makes the infoset itself unreachable
      // (transparent-style observation pinning) is incoherent to entertain
      // and drops out of the comparison.
      auto value = [&](const std::string& a,
                       const std::string& a2) -> std::optional<Rational> {
        for (const auto& t : is->tokens) clamped.clamps[t.id] = a2;
        EvalContext ctx;
        if (setup.candidate_bound) ctx.predictor_candidate = candidate;
        ctx.read_override[infoset] = a2;
        WorldDist dist = enumerate_worlds(clamped, ctx);
        try {
          dist = condition(dist, [&](const World& w) {
            if (!infoset_occurs(d, infoset, w)) return false;
            if (w.rules.at(infoset) != a) return false;
            for (const auto& [hi, ha] : history)
              if (w.rules.at(hi) != ha) return false;
            return true;
          });
        } catch (const EngineError&) {
          return std::nullopt;
        }
        return expected_utility(clamped, dist);
      };
      std::map<std::string, Rational> self_value;
      std::vector<std::string> ratifiable;
      for (const auto& a : is->actions) {
        std::optional<Rational> own = value(a, a);
        if (!own) continue;
        self_value[a] = *own;
        bool best_is_own = true;
        for (const auto& a2 : is->actions) {
          if (a2 == a) continue;
          std::optional<Rational> v = value(a, a2);
          if (v && *v > *own) best_is_own = false;
        }
        if (best_is_own) ratifiable.push_back(a);
      }
      if (ratifiable.empty())
        throw EngineError("no ratifiable action at infoset '" + infoset + "'");
      std::optional<Rational> best;
      for (const auto& a : ratifiable)
        if (!best || self_value[a] > *best) best = self_value[a];
      for (const auto& a : is->actions)
        if (self_value.count(a)) rec.action_values.push_back({a, self_value[a]});
      for (const auto& a : ratifiable)
        if (self_value[a] == *best) rec.argmax.push_back(a);
      return rec;
    }

    case TheoryId::CdtMyopic:
    case TheoryId::CdtSophisticated: {
      std::map<std::string, std::string> plan;
      if (theory == TheoryId::CdtSophisticated)
        plan = sophisticated_plan(d, rule, setup.ref);
      std::map<std::string, Rational> ev;
      for (const auto& a : is->actions) {
        Rational v(0);
        for (const auto& e : setup.cred.entries)
          v += e.credence *
               intervention_value(d, e.world, e.token, a,
                                  theory == TheoryId::CdtSophisticated ? &plan : nullptr);
        ev[a] = v;
      }
      auto av = pick_argmax(*is, ev);
      rec.action_values = av.values;
      rec.argmax = av.argmax;
      return rec;
    }

    default:
      throw EngineError("updateless theory passed to recommend");
  }
}

}  // namespace detail

PolicyRecommendation optimal_policy(const Dilemma& d, TheoryId theory,
                                    size_t enumeration_bound) {
  if (!is_updateless(theory))
    throw EngineError("theory '" + to_string(theory) + "' is updateful; use recommend");

  size_t count = 1;
  for (const auto& is : d.decisions) {
    if (is.actions.empty()) throw EngineError("infoset without actions");
    if (count > enumeration_bound / is.actions.size() + 1) count = enumeration_bound + 1;
    else count *= is.actions.size();
    if (count > enumeration_bound)
      throw EngineError("policy space exceeds the enumeration bound");
  }

  // Evidential scoring conditions the reference joint on the whole rule
  // assignment; index it by rules once instead of rescanning per policy.
  std::map<std::map<std::string, std::string>, std::pair<Rational, Rational>> by_rules;
  if (theory == TheoryId::Uedt) {
    for (const auto& [w, p] : reference_joint(d)) {
      auto& slot = by_rules[w.rules];
      slot.first += p;
      slot.second += p * utility_of(d, w);
    }
  }

  auto score = [&](const Policy& pi) -> Rational {
    switch (theory) {
      case TheoryId::Fdt:
        return functional_value(d, pi);
      case TheoryId::Ucdt:
        return expected_utility(d, pi);
      case TheoryId::Uedt: {
        auto it = by_rules.find(pi.actions);
        if (it == by_rules.end() || it->second.first == 0)
          throw EngineError("policy has zero probability in the reference class");
        return it->second.second / it->second.first;
      }
      default:
        throw EngineError("unreachable");
    }
  };

  PolicyRecommendation out;
  out.theory = theory;
  Policy pi;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == d.decisions.size()) {
      ++out.policies_considered;
      Rational v = score(pi);
      if (out.optimal.empty() || v > out.best_value) {
        out.best_value = v;
        out.optimal.clear();
        out.optimal.push_back({pi, v});
      } else if (v == out.best_value) {
        out.optimal.push_back({pi, v});
      }
      return;
    }
    for (const auto& a : d.decisions[i].actions) {
      pi.actions[d.decisions[i].id] = a;
      rec(i + 1);
    }
    pi.actions.erase(d.decisions[i].id);
  };
  rec(0);
  return out;
}

Policy induced_policy(const Dilemma& d, TheoryId theory, AnthropicRule rule) {
  if (is_updateless(theory)) {
    auto best = optimal_policy(d, theory);
    return best.optimal.front().first;
  }

  Policy pi;
  for (const auto& is : d.decisions) pi.actions[is.id] = is.actions.front();

  std::set<Policy> seen;
  Policy prev = pi;
  for (int pass = 0; pass < 64; ++pass) {
    seen.insert(pi);
    prev = pi;
    for (const auto& is : d.decisions) {
      Recommendation rec = detail::recommend_impl(d, is.id, theory, rule, {}, &pi);
      if (rec.binding_unreachable) continue;  // keep current rule
      pi.actions[is.id] = rec.argmax.front();
    }
    if (pi == prev) return pi;
    if (seen.count(pi)) {
      std::string osc;
      for (const auto& is : d.decisions)
        if (pi.actions.at(is.id) != prev.actions.at(is.id))
          osc += (osc.empty() ? "" : ", ") + is.id;
      throw EngineError("induced policy for '" + to_string(theory) +
                        "' oscillates at infosets: " + osc);
    }
  }
  throw EngineError("induced policy iteration did not converge");
}

}  // namespace gauntlet

#include "gauntlet/engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gauntlet {

namespace {

// Enumeration nodes, resolved in dependency order.
struct Node {
  enum class Kind { Chance, Rule, Predictor, Token } kind;
  std::string id;  // var name, infoset id, predictor name, or token id
};

std::vector<std::string> disposition_given_keys(const Dilemma& d,
                                                const std::string& infoset) {
  std::set<std::string> keys;
  for (const auto& row : d.disposition)
    if (row.infoset == infoset)
      for (const auto& [k, v] : row.given) keys.insert(k);
  return {keys.begin(), keys.end()};
}

// Dependency edges used both for topological ordering and cycle detection.
std::map<std::string, std::vector<std::string>> dependency_map(const Dilemma& d) {
  std::map<std::string, std::vector<std::string>> deps;
  for (const auto& c : d.chance) deps["v:" + c.name] = {};
  for (const auto& is : d.decisions) {
    deps["r:" + is.id] = {};
    for (const auto& t : is.tokens) deps["t:" + t.id] = {};
  }
  for (const auto& p : d.predictors) deps["p:" + p.name] = {};

  auto key_of = [&](const std::string& name) -> std::optional<std::string> {
    for (const auto& c : d.chance)
      if (c.name == name) return "v:" + name;
    for (const auto& p : d.predictors)
      if (p.name == name) return "p:" + name;
    for (const auto& is : d.decisions)
      for (const auto& t : is.tokens)
        if (t.id == name) return "t:" + name;
    return std::nullopt;
  };

  for (const auto& c : d.chance)
    for (const auto& par : c.parents)
      if (auto k = key_of(par)) deps["v:" + c.name].push_back(*k);
  for (const auto& is : d.decisions) {
    for (const auto& g : disposition_given_keys(d, is.id))
      if (auto k = key_of(g)) deps["r:" + is.id].push_back(*k);
    for (const auto& t : is.tokens) {
      deps["t:" + t.id].push_back("r:" + is.id);
      for (const auto& [gk, gv] : t.guard.require)
        if (auto k = key_of(gk)) deps["t:" + t.id].push_back(*k);
    }
  }
  for (const auto& p : d.predictors) {
    deps["p:" + p.name].push_back("r:" + p.reads_infoset);
    for (const auto& g : disposition_given_keys(d, p.reads_infoset))
      if (auto k = key_of(g)) deps["p:" + p.name].push_back(*k);
  }
  return deps;
}

// Kahn topological sort; returns nullopt when the dependency graph has a
// cycle. Ties resolved by declaration order so enumeration is deterministic.
std::optional<std::vector<Node>> topo_order(const Dilemma& d) {
  auto deps = dependency_map(d);
  std::vector<std::pair<std::string, Node>> decl;
  for (const auto& c : d.chance) decl.push_back({"v:" + c.name, {Node::Kind::Chance, c.name}});
  for (const auto& is : d.decisions) decl.push_back({"r:" + is.id, {Node::Kind::Rule, is.id}});
  for (const auto& p : d.predictors)
    decl.push_back({"p:" + p.name, {Node::Kind::Predictor, p.name}});
  for (const auto& is : d.decisions)
    for (const auto& t : is.tokens) decl.push_back({"t:" + t.id, {Node::Kind::Token, t.id}});

  std::set<std::string> done;
  std::vector<Node> order;
  bool progress = true;
  while (progress && order.size() < decl.size()) {
    progress = false;
    for (const auto& [key, node] : decl) {
      if (done.count(key)) continue;
      bool ready = true;
      for (const auto& dep : deps[key])
        if (!done.count(dep)) {
          ready = false;
          break;
        }
      if (ready) {
        done.insert(key);
        order.push_back(node);
        progress = true;
      }
    }
  }
  if (order.size() != decl.size()) return std::nullopt;
  return order;
}

const ChanceVar& chance_var(const Dilemma& d, const std::string& name) {
  for (const auto& c : d.chance)
    if (c.name == name) return c;
  throw EngineError("unknown chance variable '" + name + "'");
}

const PredictorVar& predictor_var(const Dilemma& d, const std::string& name) {
  for (const auto& p : d.predictors)
    if (p.name == name) return p;
  throw EngineError("unknown predictor '" + name + "'");
}

const TokenDef& token_def(const Dilemma& d, const std::string& id) {
  for (const auto& is : d.decisions)
    for (const auto& t : is.tokens)
      if (t.id == id) return t;
  throw EngineError("unknown token '" + id + "'");
}

const ChanceVar::Row& cpt_row(const ChanceVar& c, const World& w) {
  for (const auto& row : c.cpt) {
    bool match = true;
    for (const auto& [k, v] : row.given)
      if (!w.vars.count(k) || w.vars.at(k) != v) {
        match = false;
        break;
      }
    if (match && row.given.size() == c.parents.size()) return row;
  }
  throw EngineError("no CPT row for variable '" + c.name + "'");
}

struct Enumerator {
  const Dilemma& d;
  const EvalContext& ctx;
  std::vector<Node> order{};
  std::map<World, Rational> acc{};

  void run() {
    auto o = topo_order(d);
    if (!o) throw EngineError("dilemma '" + d.name + "' has a dependency cycle");
    order = *o;
    World w;
    descend(0, w, Rational(1));
  }

  void descend(size_t i, World& w, const Rational& p) {
    if (p == 0) return;
    if (i == order.size()) {
      acc[w] += p;
      return;
    }
    const Node& node = order[i];
    switch (node.kind) {
      case Node::Kind::Chance: {
        const auto& c = chance_var(d, node.id);
        const auto& row = cpt_row(c, w);
        for (const auto& [val, q] : row.dist) {
          if (q == 0) continue;
          w.vars[node.id] = val;
          descend(i + 1, w, p * q);
        }
        w.vars.erase(node.id);
        break;
      }
      case Node::Kind::Rule: {
        if (ctx.policy) {
          w.rules[node.id] = ctx.policy->at(node.id);
          descend(i + 1, w, p);
        } else {
          const auto& row = disposition_row(d, node.id, w);
          for (const auto& [a, q] : row.dist) {
            if (q == 0) continue;
            w.rules[node.id] = a;
            descend(i + 1, w, p * q);
          }
        }
        w.rules.erase(node.id);
        break;
      }
      case Node::Kind::Predictor: {
        const auto& pv = predictor_var(d, node.id);
        const auto& actions = find_actions(pv.reads_infoset);
        if (auto it = ctx.read_override.find(pv.reads_infoset);
            it != ctx.read_override.end()) {
          emit_prediction(i, w, p, pv, actions, it->second);
        } else if (ctx.all_predictors_read_policy) {
          if (!ctx.policy) throw EngineError("functional scoring requires a policy");
          emit_prediction(i, w, p, pv, actions, ctx.policy->at(pv.reads_infoset));
        } else if (ctx.policy) {
          if (pv.mode == PredictorVar::Mode::ReadsCandidatePolicy) {
            emit_prediction(i, w, p, pv, actions, ctx.policy->at(pv.reads_infoset));
          } else {
            // Independent draw from the reference disposition.
            const auto& row = disposition_row(d, pv.reads_infoset, w);
            for (const auto& [a, q] : row.dist) {
              if (q == 0) continue;
              emit_prediction(i, w, p * q, pv, actions, a);
            }
          }
        } else {
          if (pv.mode == PredictorVar::Mode::ReadsCandidatePolicy &&
              ctx.predictor_candidate) {
            emit_prediction(i, w, p, pv, actions,
                            ctx.predictor_candidate->at(pv.reads_infoset));
          } else {
            emit_prediction(i, w, p, pv, actions, w.rules.at(pv.reads_infoset));
          }
        }
        break;
      }
      case Node::Kind::Token: {
        const auto& t = token_def(d, node.id);
        if (!condition_matches(t.guard, w)) {
          descend(i + 1, w, p);  // token does not occur
          return;
        }
        const InfoSet* is = d.infoset_of_token(node.id);
        std::string action;
        if (auto it = d.clamps.find(node.id); it != d.clamps.end())
          action = it->second;
        else
          action = w.rules.at(is->id);
        w.tokens[node.id] = action;
        descend(i + 1, w, p);
        w.tokens.erase(node.id);
        break;
      }
    }
  }

  const std::vector<std::string>& find_actions(const std::string& infoset) const {
    const InfoSet* is = d.find_infoset(infoset);
    if (!is) throw EngineError("predictor reads unknown infoset '" + infoset + "'");
    return is->actions;
  }

  void emit_prediction(size_t i, World& w, const Rational& p, const PredictorVar& pv,
                       const std::vector<std::string>& actions,
                       const std::string& target) {
    if (pv.accuracy == 1 || actions.size() == 1) {
      w.vars[pv.name] = target;
      descend(i + 1, w, p);
      w.vars.erase(pv.name);
      return;
    }
    Rational err = (Rational(1) - pv.accuracy) / Rational(BigInt(actions.size() - 1));
    for (const auto& a : actions) {
      Rational q = (a == target) ? pv.accuracy : err;
      if (q == 0) continue;
      w.vars[pv.name] = a;
      descend(i + 1, w, p * q);
    }
    w.vars.erase(pv.name);
  }
};

}  // namespace

const DispositionRow& disposition_row(const Dilemma& d, const std::string& infoset,
                                      const World& w) {
  for (const auto& row : d.disposition) {
    if (row.infoset != infoset) continue;
    bool match = true;
    for (const auto& [k, v] : row.given)
      if (!w.vars.count(k) || w.vars.at(k) != v) {
        match = false;
        break;
      }
    if (match) return row;
  }
  throw EngineError("no disposition row for infoset '" + infoset + "'");
}

WorldDist enumerate_worlds(const Dilemma& d, const EvalContext& ctx) {
  Enumerator e{d, ctx};
  e.run();
  WorldDist out;
  Rational total(0);
  for (auto& [w, p] : e.acc) {
    if (p == 0) continue;
    total += p;
    out.push_back({w, p});
  }
  if (total != 1)
    throw EngineError("enumeration of '" + d.name + "' does not sum to 1 (got " +
                      rat_str(total) + ")");
  return out;
}

WorldDist joint(const Dilemma& d, const Policy& pi) {
  for (const auto& is : d.decisions)
    if (!pi.actions.count(is.id))
      throw EngineError("policy does not cover infoset '" + is.id + "'");
  EvalContext ctx;
  ctx.policy = &pi;
  return enumerate_worlds(d, ctx);
}

Rational utility_of(const Dilemma& d, const World& w) {
  if (d.utility.mode == UtilitySpec::Mode::Sum) {
    Rational u(0);
    for (const auto& term : d.utility.terms)
      if (condition_matches(term.when, w)) u += term.value;
    return u;
  }
  const UtilitySpec::Term* hit = nullptr;
  for (const auto& term : d.utility.terms) {
    if (!condition_matches(term.when, w)) continue;
    if (hit) throw EngineError("utility: multiple exclusive terms match a world");
    hit = &term;
  }
  if (!hit) throw EngineError("utility: no entry for a reachable world");
  return hit->value;
}

Rational expected_utility(const Dilemma& d, const WorldDist& dist) {
  Rational ev(0);
  for (const auto& [w, p] : dist) ev += p * utility_of(d, w);
  return ev;
}

Rational expected_utility(const Dilemma& d, const Policy& pi) {
  return expected_utility(d, joint(d, pi));
}

WorldDist condition(const WorldDist& dist, const std::function<bool(const World&)>& event) {
  WorldDist out;
  Rational mass(0);
  for (const auto& [w, p] : dist)
    if (event(w)) {
      out.push_back({w, p});
      mass += p;
    }
  if (mass == 0) throw EngineError("conditioning on a zero-probability event");
  for (auto& [w, p] : out) p /= mass;
  return out;
}

WorldDist condition(const WorldDist& dist, const Condition& event) {
  return condition(dist, [&](const World& w) { return condition_matches(event, w); });
}

Dilemma intervene(const Dilemma& d, const std::string& infoset,
                  const std::string& token, const std::string& action) {
  const InfoSet* is = d.find_infoset(infoset);
  if (!is) throw EngineError("intervene: unknown infoset '" + infoset + "'");
  bool token_found = false;
  for (const auto& t : is->tokens) token_found |= (t.id == token);
  if (!token_found)
    throw EngineError("intervene: token '" + token + "' not in infoset '" + infoset + "'");
  if (std::find(is->actions.begin(), is->actions.end(), action) == is->actions.end())
    throw EngineError("intervene: unknown action '" + action + "'");
  Dilemma out = d;
  out.clamps[token] = action;
  return out;
}

bool infoset_occurs(const Dilemma& d, const std::string& infoset, const World& w) {
  const InfoSet* is = d.find_infoset(infoset);
  if (!is) throw EngineError("unknown infoset '" + infoset + "'");
  for (const auto& t : is->tokens)
    if (w.token_occurs(t.id)) return true;
  return false;
}

Rational bet_payoff(const Bet& bet, const World& w) {
  const Bet::Payoff* hit = nullptr;
  for (const auto& row : bet.payoffs) {
    if (!condition_matches(row.when, w)) continue;
    if (hit) throw EngineError("bet '" + bet.name + "': overlapping payoff events");
    hit = &row;
  }
  if (!hit) throw EngineError("bet '" + bet.name + "': no payoff event matches a world");
  return hit->value;
}

std::vector<std::string> downstream_tokens(const Dilemma& d, const std::string& token) {
  // token -> token edges through guards; chance variables cannot depend on
  // tokens, so guard references are the only causal route out of a decision.
  std::set<std::string> down;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& is : d.decisions) {
      for (const auto& t : is.tokens) {
        if (down.count(t.id) || t.id == token) continue;
        for (const auto& [k, v] : t.guard.require) {
          if (k == token || down.count(k)) {
            down.insert(t.id);
            grew = true;
            break;
          }
        }
      }
    }
  }
  std::vector<std::string> ordered;
  for (const auto& is : d.decisions)
    for (const auto& t : is.tokens)
      if (down.count(t.id)) ordered.push_back(t.id);
  return ordered;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& e : errors) os << "error: " << e << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  if (ok()) os << "ok\n";
  return os.str();
}

namespace {

// Enumerates every combination of the given variables' domains.
void for_each_combo(const std::vector<std::pair<std::string, std::vector<std::string>>>& vars,
                    const std::function<void(const std::map<std::string, std::string>&)>& fn) {
  std::map<std::string, std::string> combo;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == vars.size()) {
      fn(combo);
      return;
    }
    for (const auto& val : vars[i].second) {
      combo[vars[i].first] = val;
      rec(i + 1);
    }
    combo.erase(vars[i].first);
  };
  rec(0);
}

}  // namespace

ValidationReport validate(const Dilemma& d) {
  ValidationReport rep;
  auto err = [&](const std::string& m) { rep.errors.push_back(m); };
  auto warn = [&](const std::string& m) { rep.warnings.push_back(m); };

  // Namespace: chance vars, predictors and tokens share the condition-key space.
  std::set<std::string> key_names;
  auto claim = [&](const std::string& n, const char* kind) {
    if (!key_names.insert(n).second)
      err(std::string(kind) + " '" + n + "' reuses an existing name");
  };
  for (const auto& c : d.chance) claim(c.name, "chance variable");
  for (const auto& p : d.predictors) claim(p.name, "predictor");
  std::set<std::string> infoset_ids;
  for (const auto& is : d.decisions) {
    if (!infoset_ids.insert(is.id).second) err("duplicate infoset '" + is.id + "'");
    for (const auto& t : is.tokens) claim(t.id, "token");
  }

  auto domain_of = [&](const std::string& key) -> std::optional<std::vector<std::string>> {
    for (const auto& c : d.chance)
      if (c.name == key) return c.domain;
    for (const auto& p : d.predictors)
      if (p.name == key) {
        const InfoSet* is = d.find_infoset(p.reads_infoset);
        if (is) return is->actions;
        return std::nullopt;
      }
    for (const auto& is : d.decisions)
      for (const auto& t : is.tokens)
        if (t.id == key) return is.actions;
    return std::nullopt;
  };

  auto check_condition = [&](const Condition& c, const std::string& where) {
    for (const auto& [k, v] : c.require) {
      auto dom = domain_of(k);
      if (!dom) {
        err(where + ": unknown key '" + k + "'");
        continue;
      }
      if (std::find(dom->begin(), dom->end(), v) == dom->end())
        err(where + ": value '" + v + "' not in domain of '" + k + "'");
    }
  };

  // Chance variables and CPTs.
  for (const auto& c : d.chance) {
    if (c.domain.empty()) err("chance variable '" + c.name + "' has an empty domain");
    std::vector<std::pair<std::string, std::vector<std::string>>> parent_domains;
    for (const auto& par : c.parents) {
      bool is_token = false;
      for (const auto& is : d.decisions)
        for (const auto& t : is.tokens) is_token |= (t.id == par);
      if (is_token) {
        err("chance variable '" + c.name + "' has decision token parent '" + par + "'");
        continue;
      }
      auto dom = domain_of(par);
      if (!dom) {
        err("chance variable '" + c.name + "' has unknown parent '" + par + "'");
        continue;
      }
      parent_domains.push_back({par, *dom});
    }
    if (parent_domains.size() == c.parents.size()) {
      for_each_combo(parent_domains, [&](const std::map<std::string, std::string>& combo) {
        int hits = 0;
        for (const auto& row : c.cpt)
          if (row.given == combo) ++hits;
        if (hits != 1)
          err("chance variable '" + c.name + "' CPT covers a parent assignment " +
              std::to_string(hits) + " times");
      });
    }
    for (const auto& row : c.cpt) {
      Rational sum(0);
      for (const auto& [val, q] : row.dist) {
        if (std::find(c.domain.begin(), c.domain.end(), val) == c.domain.end())
          err("chance variable '" + c.name + "' CPT row names unknown value '" + val + "'");
        if (q < 0) err("chance variable '" + c.name + "' has a negative probability");
        sum += q;
      }
      if (sum != 1)
        err("chance variable '" + c.name + "' CPT row sums to " + rat_str(sum) +
            ", not 1");
    }
  }

  // Decisions.
  for (const auto& is : d.decisions) {
    if (is.actions.empty()) err("infoset '" + is.id + "' has no actions");
    std::set<std::string> uniq(is.actions.begin(), is.actions.end());
    if (uniq.size() != is.actions.size())
      err("infoset '" + is.id + "' has duplicate actions");
    if (is.tokens.empty()) err("infoset '" + is.id + "' has no tokens");
    for (const auto& o : is.observes)
      if (!domain_of(o)) warn("infoset '" + is.id + "' observes unknown '" + o + "'");
    for (const auto& t : is.tokens)
      check_condition(t.guard, "token '" + t.id + "' guard");
  }

  // Disposition: full support, exact coverage per infoset.
  for (const auto& is : d.decisions) {
    std::vector<const DispositionRow*> rows;
    for (const auto& row : d.disposition)
      if (row.infoset == is.id) rows.push_back(&row);
    if (rows.empty()) {
      err("infoset '" + is.id + "' has no disposition");
      continue;
    }
    for (const auto* row : rows) {
      Rational sum(0);
      for (const auto& a : is.actions) {
        auto it = row->dist.find(a);
        if (it == row->dist.end() || it->second <= 0) {
          err("disposition for infoset '" + is.id + "' lacks full support on '" + a + "'");
          continue;
        }
        sum += it->second;
      }
      for (const auto& [a, q] : row->dist)
        if (std::find(is.actions.begin(), is.actions.end(), a) == is.actions.end())
          err("disposition for infoset '" + is.id + "' names unknown action '" + a + "'");
      if (sum != 1)
        err("disposition row for infoset '" + is.id + "' sums to " + rat_str(sum));
      for (const auto& [k, v] : row->given) {
        bool is_chance = false;
        for (const auto& c : d.chance) is_chance |= (c.name == k);
        if (!is_chance)
          err("disposition for '" + is.id + "' conditions on non-chance '" + k + "'");
      }
    }
  }

  // Predictors.
  for (const auto& p : d.predictors) {
    if (!d.find_infoset(p.reads_infoset))
      err("predictor '" + p.name + "' reads unknown infoset '" + p.reads_infoset + "'");
    if (p.accuracy < Rational(1, 2) || p.accuracy > 1)
      err("predictor '" + p.name + "' accuracy " + rat_str(p.accuracy) +
          " outside [1/2, 1]");
  }

  for (const auto& term : d.utility.terms) check_condition(term.when, "utility term");
  for (const auto& bet : d.bets) {
    if (bet.offer_infoset) {
      const InfoSet* is = d.find_infoset(*bet.offer_infoset);
      if (!is) {
        err("bet '" + bet.name + "' offered at unknown infoset '" + *bet.offer_infoset + "'");
      } else if (std::find(is->actions.begin(), is->actions.end(), bet.accept_action) ==
                 is->actions.end()) {
        err("bet '" + bet.name + "': accept action '" + bet.accept_action +
            "' not offered by infoset '" + is->id + "'");
      }
    }
    for (const auto& row : bet.payoffs) check_condition(row.when, "bet '" + bet.name + "'");
  }

  if (!rep.errors.empty()) return rep;  // structural problems block enumeration

  // Cycle check, then world-level checks on the reference joint.
  if (!topo_order(d)) {
    err("causal structure has a cycle");
    return rep;
  }
  WorldDist ref;
  try {
    ref = reference_joint(d);
  } catch (const EngineError& e) {
    err(std::string("enumeration failed: ") + e.what());
    return rep;
  }

  for (const auto& is : d.decisions) {
    Rational reach(0);
    for (const auto& [w, p] : ref)
      if (infoset_occurs(d, is.id, w)) reach += p;
    if (reach == 0)
      err("infoset '" + is.id + "' is unreachable under every policy");
  }

  if (d.utility.mode == UtilitySpec::Mode::Exclusive) {
    for (const auto& [w, p] : ref) {
      int hits = 0;
      for (const auto& term : d.utility.terms)
        if (condition_matches(term.when, w)) ++hits;
      if (hits == 0) err("utility has no entry for a reachable world");
      if (hits > 1) err("utility has overlapping exclusive entries");
      if (hits != 1) break;
    }
  }

  for (const auto& bet : d.bets) {
    for (const auto& [w, p] : ref) {
      int hits = 0;
      for (const auto& row : bet.payoffs)
        if (condition_matches(row.when, w)) ++hits;
      if (hits != 1) {
        err("bet '" + bet.name + "' payoff events do not partition the outcomes");
        break;
      }
    }
  }

  // Accuracy-1 predictors that gate token occurrence (transparent-style) must
  // leave their read infoset reachable under at least one candidate rule.
  for (const auto& p : d.predictors) {
    if (p.accuracy != 1 || p.mode != PredictorVar::Mode::ReadsCandidatePolicy) continue;
    std::set<std::string> influenced{p.name};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& c : d.chance)
        for (const auto& par : c.parents)
          if (influenced.count(par) && influenced.insert(c.name).second) grew = true;
    }
    bool gating = false;
    for (const auto& is : d.decisions)
      for (const auto& t : is.tokens)
        for (const auto& [k, v] : t.guard.require)
          if (influenced.count(k)) gating = true;
    if (!gating) continue;

    const InfoSet* read = d.find_infoset(p.reads_infoset);
    bool reachable_somewhere = false;
    for (const auto& a : read->actions) {
      Policy candidate;
      for (const auto& is : d.decisions) candidate.actions[is.id] = is.actions.front();
      candidate.actions[read->id] = a;
      EvalContext ctx;
      ctx.predictor_candidate = &candidate;
      WorldDist bound = enumerate_worlds(d, ctx);
      for (const auto& [w, q] : bound)
        if (infoset_occurs(d, read->id, w)) reachable_somewhere = true;
      if (reachable_somewhere) break;
    }
    if (!reachable_somewhere)
      warn("predictor '" + p.name + "' reads infoset '" + p.reads_infoset +
           "' which is unreachable under every candidate rule (no fixed point)");
  }

  return rep;
}

}  // namespace gauntlet

#include "gauntlet/credence.hpp"

#include <algorithm>

namespace gauntlet {

std::string to_string(AnthropicRule rule) {
  return rule == AnthropicRule::SSA ? "ssa" : "sia";
}

std::optional<AnthropicRule> anthropic_rule_from_string(const std::string& s) {
  if (s == "ssa" || s == "SSA") return AnthropicRule::SSA;
  if (s == "sia" || s == "SIA") return AnthropicRule::SIA;
  return std::nullopt;
}

WorldDist CredenceTable::world_marginal() const {
  std::map<World, Rational> acc;
  for (const auto& e : entries) acc[e.world] += e.credence;
  WorldDist out;
  for (auto& [w, p] : acc)
    if (p != 0) out.push_back({w, p});
  return out;
}

CredenceTable anthropic_credence(const Dilemma& d, const WorldDist& prior,
                                 const std::string& infoset, AnthropicRule rule) {
  const InfoSet* is = d.find_infoset(infoset);
  if (!is) throw EngineError("unknown infoset '" + infoset + "'");

  CredenceTable table;
  for (const auto& [w, p] : prior) {
    std::vector<std::string> matching;
    for (const auto& t : is->tokens)
      if (w.token_occurs(t.id)) matching.push_back(t.id);
    if (matching.empty()) continue;
    size_t total_moments = 0;
    for (const auto& other : d.decisions)
      for (const auto& t : other.tokens)
        if (w.token_occurs(t.id)) ++total_moments;
    for (const auto& tok : matching) {
      Rational weight = (rule == AnthropicRule::SSA)
                            ? p / Rational(BigInt(total_moments))
                            : p;
      table.entries.push_back({w, tok, weight});
    }
  }
  Rational mass = table.total();
  if (mass == 0)
    throw EngineError("infoset '" + infoset + "' is unreachable; no anthropic credence");
  for (auto& e : table.entries) e.credence /= mass;
  return table;
}

CredenceTable anthropic_credence(const Dilemma& d, const std::string& infoset,
                                 AnthropicRule rule) {
  return anthropic_credence(d, reference_joint(d), infoset, rule);
}

CredenceTable posterior_after_actions(
    const CredenceTable& prior, const Dilemma& d,
    const std::vector<std::pair<std::string, std::string>>& taken) {
  for (const auto& [infoset, action] : taken) {
    const InfoSet* is = d.find_infoset(infoset);
    if (!is) throw EngineError("history names unknown infoset '" + infoset + "'");
    if (std::find(is->actions.begin(), is->actions.end(), action) == is->actions.end())
      throw EngineError("history names unknown action '" + action + "' for '" + infoset + "'");
  }
  CredenceTable out;
  for (const auto& e : prior.entries) {
    bool keep = true;
    for (const auto& [infoset, action] : taken)
      if (!e.world.rules.count(infoset) || e.world.rules.at(infoset) != action) {
        keep = false;
        break;
      }
    if (keep) out.entries.push_back(e);
  }
  Rational mass = out.total();
  if (mass == 0) throw EngineError("zero-probability action history");
  for (auto& e : out.entries) e.credence /= mass;
  return out;
}

CooperationMargin simulation_cooperation_margin(const Rational& s, const Rational& u_coop,
                                                const std::optional<Rational>& u_defect_real,
                                                const Rational& u_defect_sim,
                                                const std::optional<Rational>& cap) {
  if (s < 0 || s > 1) throw EngineError("simulation credence must lie in [0, 1]");
  if (cap && *cap < u_coop)
    throw EngineError("bounded objective cap must be at least the cooperation utility");

  // Real-world defection payoff, capped by a satiable objective when bounded.
  std::optional<Rational> real;
  if (u_defect_real && cap)
    real = std::min(*u_defect_real, *cap);
  else if (u_defect_real)
    real = *u_defect_real;  // unbounded cap, finite payoff
  else if (cap)
    real = *cap;  // unbounded payoff saturates the cap
  else
    real = std::nullopt;  // unbounded payoff, unbounded objective

  if (!real) {
    if (s == 1) return {false, u_coop - u_defect_sim};  // never outside the simulation
    return {true, Rational(0)};
  }
  Rational ev_defect = s * u_defect_sim + (Rational(1) - s) * (*real);
  return {false, u_coop - ev_defect};
}

}  // namespace gauntlet

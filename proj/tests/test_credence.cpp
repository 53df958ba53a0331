#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gauntlet/credence.hpp"
#include "gauntlet/scenarios.hpp"

using namespace gauntlet;

TEST_CASE("classic sleeping beauty: SSA gives halfer odds, SIA thirder odds") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  auto split = [&](AnthropicRule rule) {
    CredenceTable t = anthropic_credence(d, "awakening", rule);
    CHECK(t.total() == 1);
    Rational h(0), t_mon(0), t_tue(0);
    for (const auto& e : t.entries) {
      if (e.world.vars.at("coin") == "heads")
        h += e.credence;
      else if (e.token == "monday")
        t_mon += e.credence;
      else
        t_tue += e.credence;
    }
    return std::array<Rational, 3>{h, t_mon, t_tue};
  };
  auto ssa = split(AnthropicRule::SSA);
  CHECK(ssa[0] == Rational(1, 2));
  CHECK(ssa[1] == Rational(1, 4));
  CHECK(ssa[2] == Rational(1, 4));
  auto sia = split(AnthropicRule::SIA);
  CHECK(sia[0] == Rational(1, 3));
  CHECK(sia[1] == Rational(1, 3));
  CHECK(sia[2] == Rational(1, 3));
}

TEST_CASE("wbg: both rules agree on P(opposite) = 2/3 in a colored room") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-wbg");
  for (AnthropicRule rule : {AnthropicRule::SSA, AnthropicRule::SIA}) {
    CredenceTable t = anthropic_credence(d, "colored-awakening", rule);
    CHECK(t.total() == 1);
    Rational p(0);
    for (const auto& e : t.entries)
      if (e.world.vars.at("coin2") == "opposite") p += e.credence;
    CHECK(p == Rational(2, 3));
  }
}

TEST_CASE("constant per-world moment totals collapse SSA onto SIA") {
  // Every wbg world holds exactly two awakenings, so the full tables agree
  // entry by entry, not just on the 2/3 marginal.
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-wbg");
  CredenceTable ssa = anthropic_credence(d, "colored-awakening", AnthropicRule::SSA);
  CredenceTable sia = anthropic_credence(d, "colored-awakening", AnthropicRule::SIA);
  REQUIRE(ssa.entries.size() == sia.entries.size());
  for (size_t i = 0; i < ssa.entries.size(); ++i) {
    CHECK(ssa.entries[i].world == sia.entries[i].world);
    CHECK(ssa.entries[i].token == sia.entries[i].token);
    CHECK(ssa.entries[i].credence == sia.entries[i].credence);
  }
}

TEST_CASE("anthropic credence rejects unreachable infosets") {
  Dilemma impossible = scenarios::build_dilemma("counterfactual-mugging");
  ChanceVar never;
  never.name = "never";
  never.domain = {"yes", "no"};
  never.cpt.push_back({{}, {{"yes", Rational(1)}, {"no", Rational(0)}}});
  impossible.chance.push_back(never);
  impossible.decisions[0].tokens[0].guard.require["never"] = "no";
  CHECK_THROWS_AS(anthropic_credence(impossible, "asked", AnthropicRule::SSA), EngineError);
  CHECK_THROWS_AS(anthropic_credence(impossible, "asked", AnthropicRule::SIA), EngineError);
}

TEST_CASE("one moment per world reduces both rules to Bayes") {
  Dilemma d = scenarios::build_dilemma("xor-blackmail");
  WorldDist ref = reference_joint(d);
  Condition letter;
  letter.require["letter"] = "yes";
  WorldDist bayes = condition(ref, letter);
  Rational p_lesion_bayes(0);
  for (const auto& [w, p] : bayes)
    if (w.vars.at("lesion") == "yes") p_lesion_bayes += p;
  for (AnthropicRule rule : {AnthropicRule::SSA, AnthropicRule::SIA}) {
    CredenceTable t = anthropic_credence(d, "pay-choice", rule);
    Rational p(0);
    for (const auto& e : t.entries)
      if (e.world.vars.at("lesion") == "yes") p += e.credence;
    CHECK(p == p_lesion_bayes);
  }
}

TEST_CASE("posterior after own actions: insurance and lesion statistics") {
  Dilemma ins = scenarios::build_dilemma("insurance");  // q = 4/5
  CredenceTable prior = anthropic_credence(ins, "smoke-choice", AnthropicRule::SSA);
  CredenceTable post = posterior_after_actions(prior, ins, {{"smoke-choice", "smoke"}});
  Rational p_lesion(0);
  for (const auto& e : post.entries)
    if (e.world.vars.at("lesion") == "yes") p_lesion += e.credence;
  // Worlds repeat across the three decision tokens' moments; marginalize.
  WorldDist marginal = post.world_marginal();
  Rational p2(0);
  for (const auto& [w, p] : marginal)
    if (w.vars.at("lesion") == "yes") p2 += p;
  CHECK(p2 == Rational(4, 5));

  Dilemma lesion = scenarios::build_dilemma("smoking-lesion");
  CredenceTable lp = anthropic_credence(lesion, "smoke-choice", AnthropicRule::SSA);
  CredenceTable lpost = posterior_after_actions(lp, lesion, {{"smoke-choice", "smoke"}});
  Rational p3(0);
  for (const auto& e : lpost.entries)
    if (e.world.vars.at("lesion") == "yes") p3 += e.credence;
  CHECK(p3 == Rational(9, 10));

  // Empty history is the identity.
  CredenceTable same = posterior_after_actions(prior, ins, {});
  CHECK(same.entries.size() == prior.entries.size());
  CHECK(same.total() == 1);

  CHECK_THROWS_AS(posterior_after_actions(prior, ins, {{"smoke-choice", "nonsense"}}),
                  EngineError);
}

TEST_CASE("credence tables always sum to one") {
  for (const auto& id : {"newcomb", "insurance", "sleeping-beauty-classic",
                         "sleeping-beauty-wbg", "money-pump"}) {
    Dilemma d = scenarios::build_dilemma(id);
    for (AnthropicRule rule : {AnthropicRule::SSA, AnthropicRule::SIA}) {
      CAPTURE(id);
      CredenceTable t = anthropic_credence(d, d.decisions.front().id, rule);
      CHECK(t.total() == 1);
    }
  }
}

TEST_CASE("simulation cooperation margin") {
  using R = Rational;
  // Pure simulation: margin is u_coop - u_defect_sim.
  auto pure = simulation_cooperation_margin(R(1), R(10), rat(1000000), R(0), std::nullopt);
  CHECK(!pure.defect_dominates_unbounded);
  CHECK(pure.value == 10);

  // Insatiable objective with a huge real-world payoff: defect.
  auto insatiable =
      simulation_cooperation_margin(R(1, 2), R(10), rat(1000000), R(0), std::nullopt);
  CHECK(!insatiable.defect_dominates_unbounded);
  CHECK(insatiable.value < 0);
  CHECK(insatiable.value == R(10) - R(500000));

  // Satiable cap turns the same numbers cooperative: 10 - 6 = 4.
  auto satiable = simulation_cooperation_margin(R(1, 2), R(10), rat(1000000), R(0), rat(12));
  CHECK(satiable.value == 4);

  // Unbounded payoff with no cap: the -infinity marker.
  auto unbounded =
      simulation_cooperation_margin(R(1, 2), R(10), std::nullopt, R(0), std::nullopt);
  CHECK(unbounded.defect_dominates_unbounded);

  CHECK_THROWS_AS(simulation_cooperation_margin(R(3, 2), R(10), rat(5), R(0), std::nullopt),
                  EngineError);
  CHECK_THROWS_AS(simulation_cooperation_margin(R(1, 2), R(10), rat(5), R(0), rat(5)),
                  EngineError);
}

TEST_CASE("margin is monotone in the cap and in the simulation credence") {
  // For fixed u_defect_real >= u_coop >= u_defect_sim.
  Rational u_coop(10), u_sim(0);
  std::optional<Rational> real = rat(1000);
  Rational prev;
  bool first = true;
  for (int cap = 10; cap <= 100; cap += 10) {
    auto m = simulation_cooperation_margin(Rational(1, 2), u_coop, real, u_sim, rat(cap));
    if (!first) CHECK(m.value <= prev);
    prev = m.value;
    first = false;
  }
  first = true;
  for (int num = 0; num <= 10; ++num) {
    auto m = simulation_cooperation_margin(Rational(num, 10), u_coop, real, u_sim, rat(100));
    if (!first) CHECK(m.value >= prev);
    prev = m.value;
    first = false;
  }
}

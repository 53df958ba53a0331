#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gauntlet/scenarios.hpp"

using namespace gauntlet;

namespace {

Rational cell(const Dilemma& d, World w) { return utility_of(d, w); }

}  // namespace

TEST_CASE("catalog lists all fourteen scenarios with defaults") {
  auto entries = scenarios::catalog();
  CHECK(entries.size() == 14);
  CHECK(entries.size() == scenarios::kScenarioIds.size());
  for (size_t i = 0; i < entries.size(); ++i)
    CHECK(entries[i].id == scenarios::kScenarioIds[i]);
  for (const auto& e : entries) {
    CAPTURE(e.id);
    CHECK(!e.defaults.empty());
    // Defaults build and, for dilemmas, validate (build throws otherwise).
    scenarios::Scenario s = scenarios::build(e.id);
    if (e.kind == "dilemma") CHECK(std::holds_alternative<Dilemma>(s));
    if (e.kind == "game") CHECK(std::holds_alternative<GameSpec>(s));
    if (e.kind == "envelope") CHECK(std::holds_alternative<EnvelopeModel>(s));
  }
}

TEST_CASE("catalog cites the insurance section") {
  for (const auto& e : scenarios::catalog())
    if (e.id == "insurance") CHECK(e.section == "3.2.2");
}

TEST_CASE("builders are deterministic") {
  Dilemma a = scenarios::build_dilemma("sleeping-beauty-wbg");
  Dilemma b = scenarios::build_dilemma("sleeping-beauty-wbg");
  CHECK(a.utility.terms.size() == b.utility.terms.size());
  CHECK(reference_joint(a) == reference_joint(b));
}

TEST_CASE("newcomb payoff matrix has the four exact cells") {
  Dilemma d = scenarios::build_dilemma("newcomb");
  World w;
  w.rules["box-choice"] = "one-box";
  w.vars["prediction"] = "one-box";
  w.tokens["choice"] = "one-box";
  CHECK(cell(d, w) == 1000000);
  w.tokens["choice"] = "two-box";
  CHECK(cell(d, w) == 1001000);
  w.vars["prediction"] = "two-box";
  CHECK(cell(d, w) == 1000);
  w.tokens["choice"] = "one-box";
  CHECK(cell(d, w) == 0);
}

TEST_CASE("insurance net payoff table is exact") {
  Dilemma d = scenarios::build_dilemma("insurance");
  auto net = [&](const std::string& smoke, const std::string& bet, const std::string& lesion) {
    World w;
    w.vars["lesion"] = lesion;
    w.tokens["smoke-t"] = smoke;
    if (smoke == "smoke")
      w.tokens["bet-s-t"] = bet;
    else
      w.tokens["bet-r-t"] = bet;
    return cell(d, w);
  };
  CHECK(net("smoke", "bet", "yes") == Rational(-1, 2));
  CHECK(net("smoke", "bet", "no") == Rational(-1, 2));
  CHECK(net("smoke", "decline", "yes") == -1);
  CHECK(net("smoke", "decline", "no") == 1);
  CHECK(net("refrain", "bet", "yes") == Rational(-3, 2));
  CHECK(net("refrain", "bet", "no") == Rational(1, 2));
  CHECK(net("refrain", "decline", "yes") == 0);
  CHECK(net("refrain", "decline", "no") == 0);
}

TEST_CASE("insurance population statistics hit the q target") {
  Dilemma d = scenarios::build_dilemma("insurance");  // c=1/2, q=4/5
  WorldDist ref = reference_joint(d);
  Condition smoked;
  smoked.require["smoke-t"] = "smoke";
  Rational p_lesion(0);
  for (const auto& [w, p] : condition(ref, smoked))
    if (w.vars.at("lesion") == "yes") p_lesion += p;
  CHECK(p_lesion == Rational(4, 5));
  Condition refrained;
  refrained.require["smoke-t"] = "refrain";
  Rational p_clean(0);
  for (const auto& [w, p] : condition(ref, refrained))
    if (w.vars.at("lesion") == "no") p_clean += p;
  CHECK(p_clean == Rational(4, 5));
}

TEST_CASE("wbg worlds are four equiprobable color histories") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-wbg");
  std::map<std::pair<std::string, std::string>, Rational> mass;
  for (const auto& [w, p] : reference_joint(d))
    mass[{w.vars.at("coin1"), w.vars.at("coin2")}] += p;
  REQUIRE(mass.size() == 4);
  for (const auto& [k, p] : mass) CHECK(p == Rational(1, 4));
}

TEST_CASE("smoking lesion evidential statistic P(lesion|smoke) = 9/10") {
  Dilemma d = scenarios::build_dilemma("smoking-lesion");
  WorldDist ref = reference_joint(d);
  Condition smoked;
  smoked.require["smoke-t"] = "smoke";
  Rational p(0);
  for (const auto& [w, q] : condition(ref, smoked))
    if (w.vars.at("lesion") == "yes") p += q;
  CHECK(p == Rational(9, 10));
}

TEST_CASE("xor blackmail letter honesty invariant") {
  Dilemma d = scenarios::build_dilemma("xor-blackmail");
  for (const auto& [w, p] : reference_joint(d)) {
    bool pays_on_receipt = w.rules.at("pay-choice") == "pay";
    bool lesion = w.vars.at("lesion") == "yes";
    bool letter = w.vars.at("letter") == "yes";
    CHECK(letter == (pays_on_receipt != lesion));
    // Honesty: the decision token exists exactly when the letter arrived.
    CHECK(w.token_occurs("pay-t") == letter);
  }
}

TEST_CASE("parameter ranges are enforced") {
  scenarios::ScenarioParams params;
  params.values["accuracy"] = Rational(1, 4);
  CHECK_THROWS_AS(scenarios::build("newcomb", params), EngineError);
  scenarios::ScenarioParams bad_c;
  bad_c.values["c"] = Rational(3, 2);
  CHECK_THROWS_AS(scenarios::build("insurance", bad_c), EngineError);
  CHECK_THROWS_AS(scenarios::build("no-such-scenario"), EngineError);
  scenarios::ScenarioParams frac_rounds;
  frac_rounds.values["rounds"] = Rational(3, 2);
  CHECK_THROWS_AS(scenarios::build("money-pump", frac_rounds), EngineError);
}

TEST_CASE("money pump structure scales with rounds") {
  scenarios::ScenarioParams params;
  params.values["rounds"] = rat(5);
  Dilemma d = scenarios::build_dilemma("money-pump", params);
  CHECK(d.decisions.size() == 10);
  CHECK(d.predictors.size() == 5);
}

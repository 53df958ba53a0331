#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gauntlet/engine.hpp"
#include "gauntlet/scenarios.hpp"

using namespace gauntlet;

namespace {

Rational total_mass(const WorldDist& dist) {
  Rational t(0);
  for (const auto& [w, p] : dist) t += p;
  return t;
}

Policy one_box_policy() {
  Policy pi;
  pi.actions["box-choice"] = "one-box";
  return pi;
}

}  // namespace

TEST_CASE("builtin scenarios validate clean") {
  for (const auto& entry : scenarios::catalog()) {
    if (entry.kind != "dilemma") continue;
    CAPTURE(entry.id);
    Dilemma d = scenarios::build_dilemma(entry.id);
    ValidationReport rep = validate(d);
    CHECK(rep.errors.empty());
    CHECK(rep.warnings.empty());
  }
}

TEST_CASE("validator reports a bad CPT row sum naming the variable") {
  Dilemma d = scenarios::build_dilemma("counterfactual-mugging");
  d.chance[0].cpt[0].dist["heads"] = Rational(2, 5);  // 2/5 + 1/2 != 1
  ValidationReport rep = validate(d);
  REQUIRE(!rep.errors.empty());
  bool found = false;
  for (const auto& e : rep.errors)
    if (e.find("coin") != std::string::npos && e.find("sums to") != std::string::npos)
      found = true;
  CHECK(found);
}

TEST_CASE("validator flags a policy-reading predictor whose infoset cannot be reached") {
  // An impossible extra guard makes the read infoset vanish under every
  // candidate rule: reachability error plus the fixed-point warning.
  Dilemma d = scenarios::build_dilemma("transparent-newcomb");
  ChanceVar never;
  never.name = "never";
  never.domain = {"yes", "no"};
  never.cpt.push_back({{}, {{"yes", Rational(1)}, {"no", Rational(0)}}});
  d.chance.push_back(never);
  d.decisions[0].tokens[0].guard.require["never"] = "no";
  ValidationReport rep = validate(d);
  bool unreachable = false, fixed_point = false;
  for (const auto& e : rep.errors)
    if (e.find("unreachable") != std::string::npos) unreachable = true;
  for (const auto& w : rep.warnings)
    if (w.find("no fixed point") != std::string::npos) fixed_point = true;
  CHECK(unreachable);
  CHECK(fixed_point);

  // Deleting the read infoset outright is a hard error.
  Dilemma broken = scenarios::build_dilemma("transparent-newcomb");
  broken.decisions.erase(broken.decisions.begin());
  broken.disposition.erase(broken.disposition.begin());
  ValidationReport rep2 = validate(broken);
  bool found = false;
  for (const auto& e : rep2.errors)
    if (e.find("unknown infoset") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("joint distributions sum exactly to one") {
  for (const auto& id : {"newcomb", "smoking-lesion", "insurance", "sleeping-beauty-wbg",
                         "money-pump", "xor-blackmail"}) {
    CAPTURE(id);
    Dilemma d = scenarios::build_dilemma(id);
    CHECK(total_mass(reference_joint(d)) == 1);
  }
}

TEST_CASE("newcomb joint: accuracy-1 predictor copies the policy") {
  Dilemma d = scenarios::build_dilemma("newcomb");
  WorldDist dist = joint(d, one_box_policy());
  Rational p_one(0);
  for (const auto& [w, p] : dist)
    if (w.vars.at("prediction") == "one-box") p_one += p;
  CHECK(p_one == 1);
}

TEST_CASE("newcomb joint: accuracy 9/10 mixes in errors") {
  scenarios::ScenarioParams params;
  params.values["accuracy"] = Rational(9, 10);
  Dilemma d = scenarios::build_dilemma("newcomb", params);
  WorldDist dist = joint(d, one_box_policy());
  Rational p_one(0);
  for (const auto& [w, p] : dist)
    if (w.vars.at("prediction") == "one-box") p_one += p;
  CHECK(p_one == Rational(9, 10));
}

TEST_CASE("reads-disposition predictors ignore the bound policy") {
  // Same structure as newcomb, but the predictor profiles the reference
  // class instead of reading the candidate policy.
  Dilemma d = scenarios::build_dilemma("newcomb");
  d.predictors[0].mode = PredictorVar::Mode::ReadsDisposition;
  REQUIRE(validate(d).errors.empty());
  Policy one = {{ {"box-choice", "one-box"} }};
  Rational p_one(0);
  for (const auto& [w, p] : joint(d, one))
    if (w.vars.at("prediction") == "one-box") p_one += p;
  CHECK(p_one == Rational(1, 2));  // the disposition, not the policy
  CHECK(expected_utility(d, one) == 500000);
  // Functional scoring still overrides every mode.
  EvalContext ctx;
  ctx.policy = &one;
  ctx.all_predictors_read_policy = true;
  Rational p_read(0);
  for (const auto& [w, p] : enumerate_worlds(d, ctx))
    if (w.vars.at("prediction") == "one-box") p_read += p;
  CHECK(p_read == 1);
  // Accuracy composes with the independent draw: 9/10 of 1/2 plus the error
  // mass on the other half.
  scenarios::ScenarioParams params;
  params.values["accuracy"] = Rational(9, 10);
  Dilemma noisy = scenarios::build_dilemma("newcomb", params);
  noisy.predictors[0].mode = PredictorVar::Mode::ReadsDisposition;
  Rational p_noisy(0);
  for (const auto& [w, p] : joint(noisy, one))
    if (w.vars.at("prediction") == "one-box") p_noisy += p;
  CHECK(p_noisy == Rational(1, 2));  // symmetric mix keeps the marginal
}

TEST_CASE("sleeping beauty: P(heads) is exactly 1/2 under any policy") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  for (const std::string a : {"accept", "decline"}) {
    Policy pi;
    pi.actions["awakening"] = a;
    Rational p_heads(0);
    for (const auto& [w, p] : joint(d, pi))
      if (w.vars.at("coin") == "heads") p_heads += p;
    CHECK(p_heads == Rational(1, 2));
  }
}

TEST_CASE("expected utility of the newcomb payoff table") {
  Dilemma d = scenarios::build_dilemma("newcomb");
  Policy one = one_box_policy();
  Policy two;
  two.actions["box-choice"] = "two-box";
  CHECK(expected_utility(d, one) == 1000000);
  CHECK(expected_utility(d, two) == 1000);
}

TEST_CASE("counterfactual mugging: paying is worth 9/2 from the prior") {
  Dilemma d = scenarios::build_dilemma("counterfactual-mugging");
  Policy pay, refuse;
  pay.actions["asked"] = "pay";
  refuse.actions["asked"] = "refuse";
  CHECK(expected_utility(d, pay) == Rational(9, 2));
  CHECK(expected_utility(d, refuse) == 0);
}

TEST_CASE("conditioning is exact Bayes and rejects null events") {
  Dilemma d = scenarios::build_dilemma("smoking-lesion");
  WorldDist ref = reference_joint(d);
  Condition smoke;
  smoke.require["smoke-t"] = "smoke";
  WorldDist cond = condition(ref, smoke);
  CHECK(total_mass(cond) == 1);
  Rational p_lesion(0);
  for (const auto& [w, p] : cond)
    if (w.vars.at("lesion") == "yes") p_lesion += p;
  CHECK(p_lesion == Rational(9, 10));  // Bayes by hand from the defaults

  Condition impossible;
  impossible.require["lesion"] = "yes";
  impossible.require["smoke-t"] = "nonsense";
  CHECK_THROWS_AS(condition(ref, impossible), EngineError);
}

TEST_CASE("conditioning a point mass") {
  Dilemma d = scenarios::build_dilemma("counterfactual-mugging");
  WorldDist ref = reference_joint(d);
  Condition heads;
  heads.require["coin"] = "heads";
  WorldDist cond = condition(ref, heads);
  for (const auto& [w, p] : cond) CHECK(w.vars.at("coin") == "heads");
  CHECK(total_mass(cond) == 1);
}

TEST_CASE("intervening on newcomb leaves the prediction at the disposition") {
  Dilemma d = scenarios::build_dilemma("newcomb");
  Dilemma clamped = intervene(d, "box-choice", "choice", "two-box");
  Rational p_one(0);
  for (const auto& [w, p] : reference_joint(clamped)) {
    CHECK(w.tokens.at("choice") == "two-box");
    if (w.vars.at("prediction") == "one-box") p_one += p;
  }
  CHECK(p_one == Rational(1, 2));  // the uniform disposition, not the clamp
  CHECK_THROWS_AS(intervene(d, "box-choice", "choice", "three-box"), EngineError);
  CHECK_THROWS_AS(intervene(d, "box-choice", "nonsense", "one-box"), EngineError);
}

TEST_CASE("intervene equals condition when nothing is correlated") {
  // Predictor-free, single decision, action-independent disposition.
  Dilemma d = scenarios::build_dilemma("smoking-lesion");
  d.disposition.clear();
  DispositionRow row;
  row.infoset = "smoke-choice";
  row.dist = {{"smoke", Rational(1, 2)}, {"refrain", Rational(1, 2)}};
  d.disposition = {row};

  WorldDist ref = reference_joint(d);
  Condition smoked;
  smoked.require["smoke-t"] = "smoke";
  WorldDist by_condition = condition(ref, smoked);
  WorldDist by_intervention =
      reference_joint(intervene(d, "smoke-choice", "smoke-t", "smoke"));

  auto lesion_mass = [](const WorldDist& dist) {
    Rational p(0);
    for (const auto& [w, q] : dist)
      if (w.vars.at("lesion") == "yes") p += q;
    return p;
  };
  CHECK(lesion_mass(by_condition) == lesion_mass(by_intervention));
  auto ev = [&](const WorldDist& dist) {
    Rational v(0);
    for (const auto& [w, p] : dist) v += p * utility_of(d, w);
    return v;
  };
  CHECK(ev(by_condition) == ev(by_intervention));
}

TEST_CASE("sleeping beauty token intervention leaves the other token on the rule") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  Dilemma clamped = intervene(d, "awakening", "tuesday", "accept");
  bool saw_decline_monday_with_accepted_tuesday = false;
  for (const auto& [w, p] : reference_joint(clamped)) {
    if (w.vars.at("coin") != "tails") continue;
    CHECK(w.tokens.at("tuesday") == "accept");
    CHECK(w.tokens.at("monday") == w.rules.at("awakening"));
    if (w.tokens.at("monday") == "decline") saw_decline_monday_with_accepted_tuesday = true;
  }
  CHECK(saw_decline_monday_with_accepted_tuesday);
}

TEST_CASE("expected utility is affine in the utility") {
  Dilemma d = scenarios::build_dilemma("smoking-lesion");
  Policy pi;
  pi.actions["smoke-choice"] = "smoke";
  Rational base = expected_utility(d, pi);
  Dilemma scaled = d;
  for (auto& t : scaled.utility.terms) t.value = t.value * 3;
  UtilitySpec::Term shift;
  shift.value = Rational(7, 2);
  scaled.utility.terms.push_back(shift);
  CHECK(expected_utility(scaled, pi) == 3 * base + Rational(7, 2));
}

TEST_CASE("policy coverage errors") {
  Dilemma d = scenarios::build_dilemma("insurance");
  Policy partial;
  partial.actions["smoke-choice"] = "smoke";
  CHECK_THROWS_AS(joint(d, partial), EngineError);
}

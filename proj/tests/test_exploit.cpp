#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gauntlet/scenarios.hpp"

using namespace gauntlet;

TEST_CASE("classic dutch book against halfer cdt; halfer edt stays safe") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  ExploitReport cdt = evaluate_bets(d, TheoryId::CdtMyopic, AnthropicRule::SSA);
  REQUIRE(cdt.decisions.size() == 2);
  CHECK(cdt.decisions[0].accepted);
  CHECK(cdt.decisions[0].ev == Rational(3, 2));
  CHECK(cdt.decisions[1].accepted);
  CHECK(cdt.decisions[1].ev == 1);
  REQUIRE(cdt.nets.size() == 2);
  for (const auto& n : cdt.nets) CHECK(n.net == -2);
  CHECK(cdt.verdict == ExploitReport::Verdict::DutchBook);
  CHECK(cdt.worst_net == -2);
  CHECK(cdt.best_net == -2);

  ExploitReport edt = evaluate_bets(d, TheoryId::Edt, AnthropicRule::SSA);
  CHECK(edt.decisions[0].accepted);
  CHECK(!edt.decisions[1].accepted);
  CHECK(edt.decisions[1].ev == Rational(-7, 2));
  CHECK(edt.verdict == ExploitReport::Verdict::Safe);
  CHECK(edt.expected_net == Rational(3, 2));
}

TEST_CASE("wbg dutch book against edt under both rules; cdt stays safe") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-wbg");
  for (AnthropicRule rule : {AnthropicRule::SSA, AnthropicRule::SIA}) {
    ExploitReport edt = evaluate_bets(d, TheoryId::Edt, rule);
    CHECK(edt.decisions[0].accepted);
    CHECK(edt.decisions[1].accepted);
    CHECK(edt.decisions[1].ev == 4);
    for (const auto& n : edt.nets) CHECK(n.net == -2);
    CHECK(edt.verdict == ExploitReport::Verdict::DutchBook);
  }
  ExploitReport cdt = evaluate_bets(d, TheoryId::CdtMyopic, AnthropicRule::SSA);
  CHECK(!cdt.decisions[1].accepted);
  CHECK(cdt.decisions[1].ev == -2);
  CHECK(cdt.verdict == ExploitReport::Verdict::Safe);
}

TEST_CASE("declined bets never change the net profile") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  ExploitReport before = evaluate_bets(d, TheoryId::Edt, AnthropicRule::SSA);
  // Add a third bet the agent will decline (strictly negative everywhere).
  Bet awful;
  awful.name = "awful";
  awful.offer_infoset = "awakening";
  Condition heads, tails;
  heads.require["coin"] = "heads";
  tails.require["coin"] = "tails";
  awful.payoffs = {{heads, rat(-5)}, {tails, rat(-5)}};
  std::vector<Bet> menu = d.bets;
  menu.push_back(awful);
  Dilemma d2 = attach_bets(strip_bets(d), menu);
  ExploitReport after = evaluate_bets(d2, TheoryId::Edt, AnthropicRule::SSA);
  REQUIRE(!after.decisions[2].accepted);
  REQUIRE(before.nets.size() == after.nets.size());
  for (size_t i = 0; i < before.nets.size(); ++i)
    CHECK(before.nets[i].net == after.nets[i].net);
}

TEST_CASE("menu acceptance is invariant under positive scaling") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  std::vector<Bet> scaled = d.bets;
  for (auto& b : scaled)
    for (auto& row : b.payoffs) row.value = row.value * Rational(7, 3);
  Dilemma d2 = attach_bets(strip_bets(d), scaled);
  for (TheoryId t : {TheoryId::CdtMyopic, TheoryId::Edt}) {
    ExploitReport a = evaluate_bets(d, t, AnthropicRule::SSA);
    ExploitReport b = evaluate_bets(d2, t, AnthropicRule::SSA);
    for (size_t i = 0; i < a.decisions.size(); ++i)
      CHECK(a.decisions[i].accepted == b.decisions[i].accepted);
    CHECK(a.verdict == b.verdict);
  }
}

TEST_CASE("money pump traces") {
  scenarios::ScenarioParams params;
  params.values["rounds"] = rat(5);
  Dilemma d = scenarios::build_dilemma("money-pump", params);
  PumpTrace cdt = run_money_pump(d, TheoryId::CdtMyopic, AnthropicRule::SSA);
  REQUIRE(cdt.rounds.size() == 5);
  Rational cum(0);
  for (const auto& r : cdt.rounds) {
    CHECK(r.perceived_round_ev == 1);
    CHECK(r.realized == -1);
    cum += r.realized;
    CHECK(r.cumulative == cum);
  }
  CHECK(cdt.total == -5);

  PumpTrace fdt = run_money_pump(d, TheoryId::Fdt, AnthropicRule::SSA);
  CHECK(fdt.declined_at_entry);
  CHECK(fdt.rounds.empty());
  CHECK(fdt.total == 0);
}

TEST_CASE("envelope appraisals") {
  CHECK(prior_averse_appraisal(rat(8)) == 10);
  CHECK(prior_averse_appraisal(rat(4)) == 5);
  CHECK(prior_averse_appraisal(rat(100)) == 125);
  CHECK_THROWS_AS(prior_averse_appraisal(rat(0)), EngineError);

  EnvelopeModel single;
  single.pairs = {{rat(8), Rational(1)}};
  CHECK(bayes_conditional_other(single, rat(8)) == 16);
  CHECK(bayes_conditional_other(single, rat(16)) == 8);
  CHECK_THROWS_AS(bayes_conditional_other(single, rat(5)), EngineError);

  EnvelopeModel overlapping;
  overlapping.pairs = {{rat(8), Rational(1, 2)}, {rat(16), Rational(1, 2)}};
  CHECK(bayes_conditional_other(overlapping, rat(16)) == 20);  // (8+32)/2
}

TEST_CASE("envelope pumps: the prior-averse agent pays every fee") {
  EnvelopeModel m = std::get<EnvelopeModel>(scenarios::build("two-envelopes"));
  EnvelopePumpTrace averse = run_envelope_pump(m, "prior-averse", 10);
  for (const auto& w : averse.worlds) {
    CHECK(w.paid_switches == 10);
    CHECK(w.fees == 10);
  }
  CHECK(averse.expected_fees == 10);

  EnvelopePumpTrace bayes = run_envelope_pump(m, "bayes", 10);
  CHECK(bayes.max_paid_switches <= 1);
  CHECK(!bayes.pair_switched_both_ways);
  // Held-small worlds switch exactly once; held-large worlds never do.
  for (const auto& w : bayes.worlds)
    CHECK(w.paid_switches == (w.held_small_first ? 1u : 0u));

  EnvelopeModel single;
  single.pairs = {{rat(8), Rational(1)}};
  EnvelopePumpTrace sb = run_envelope_pump(single, "bayes", 10);
  CHECK(sb.max_paid_switches <= 1);
}

TEST_CASE("bayes envelope fees stay bounded on finite-mean priors") {
  for (auto pairs : std::vector<std::vector<std::pair<Rational, Rational>>>{
           {{rat(8), Rational(1)}},
           {{rat(8), Rational(1, 2)}, {rat(32), Rational(1, 2)}},
           {{rat(8), Rational(1, 3)}, {rat(16), Rational(1, 3)}, {rat(64), Rational(1, 3)}}}) {
    EnvelopeModel m;
    m.pairs = pairs;
    EnvelopePumpTrace tr = run_envelope_pump(m, "bayes", 50);
    for (const auto& w : tr.worlds) CHECK(w.paid_switches <= 2);
  }
}

TEST_CASE("dutch book search certifies the classic construction") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  DutchBookSearch found = search_dutch_book(d, TheoryId::CdtMyopic, AnthropicRule::SSA, 20);
  REQUIRE(found.menu.has_value());
  // Verify the found menu really is a book by replaying it.
  Dilemma bound = attach_bets(strip_bets(d), *found.menu);
  ExploitReport rep = evaluate_bets(bound, TheoryId::CdtMyopic, AnthropicRule::SSA);
  CHECK(rep.verdict == ExploitReport::Verdict::DutchBook);
}

TEST_CASE("no dutch book against coherent credences on a coin dilemma") {
  // Single decision, no predictors, correct credences.
  Dilemma d;
  d.name = "coin";
  ChanceVar coin;
  coin.name = "coin";
  coin.domain = {"heads", "tails"};
  coin.cpt.push_back({{}, {{"heads", Rational(1, 2)}, {"tails", Rational(1, 2)}}});
  d.chance = {coin};
  InfoSet is;
  is.id = "call";
  is.actions = {"heads", "tails"};
  is.tokens = {{"call-t", {}}};
  d.decisions = {is};
  DispositionRow row;
  row.infoset = "call";
  row.dist = {{"heads", Rational(1, 2)}, {"tails", Rational(1, 2)}};
  d.disposition = {row};
  UtilitySpec::Term t;
  t.when.require["call-t"] = "heads";
  t.when.require["coin"] = "heads";
  t.value = rat(1);
  d.utility.terms = {t};
  REQUIRE(validate(d).errors.empty());
  for (TheoryId theory : {TheoryId::Edt, TheoryId::CdtMyopic, TheoryId::Fdt}) {
    CAPTURE(to_string(theory));
    DutchBookSearch found = search_dutch_book(d, theory, AnthropicRule::SSA, 5);
    CHECK(!found.menu.has_value());
    CHECK(found.exhaustive);
    CHECK(found.searched == 14641);  // 11^4
  }
}

TEST_CASE("regression: the search books thirder edt too") {
  // Frozen snapshot: the exhaustive search is its own oracle here.
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  DutchBookSearch found = search_dutch_book(d, TheoryId::Edt, AnthropicRule::SIA, 8);
  REQUIRE(found.menu.has_value());
  CHECK(found.searched == 69677);
  const auto& menu = *found.menu;
  CHECK(menu[0].payoffs[0].value == 6);    // pre-experiment: heads
  CHECK(menu[0].payoffs[1].value == -5);   // pre-experiment: tails
  CHECK(menu[1].payoffs[0].value == -7);   // every awakening: heads
  CHECK(menu[1].payoffs[1].value == 2);    // every awakening: tails
  // Guaranteed -1 either way: 6-7 on heads, -5+2+2 on tails.
  Dilemma bound = attach_bets(strip_bets(d), menu);
  ExploitReport rep = evaluate_bets(bound, TheoryId::Edt, AnthropicRule::SIA);
  CHECK(rep.verdict == ExploitReport::Verdict::DutchBook);
  for (const auto& n : rep.nets) CHECK(n.net == -1);
}

TEST_CASE("no dutch book against fdt in newcomb at bound 10") {
  Dilemma d = scenarios::build_dilemma("newcomb");
  DutchBookSearch found = search_dutch_book(d, TheoryId::Fdt, AnthropicRule::SSA, 10);
  CHECK(!found.menu.has_value());
  CHECK(found.exhaustive);
  CHECK(found.searched == 194481);  // 21^4, the exhaustiveness statement
}

TEST_CASE("search rejects absurd bounds") {
  Dilemma d = scenarios::build_dilemma("sleeping-beauty-classic");
  CHECK_THROWS_AS(search_dutch_book(d, TheoryId::Edt, AnthropicRule::SSA, 0), EngineError);
  CHECK_THROWS_AS(search_dutch_book(d, TheoryId::Edt, AnthropicRule::SSA, 1000000),
                  EngineError);
}

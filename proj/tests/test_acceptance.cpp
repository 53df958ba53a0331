// Acceptance suite: every claim verify-paper runs, one doctest case per
// criterion family, printed pass/fail line by line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "gauntlet/verify.hpp"

using namespace gauntlet;

TEST_CASE("verify-paper claims all pass") {
  verify::Options opts;  // full defaults: 20 seeds, 1000 fuzz cases
  std::vector<verify::ClaimResult> results = verify::run_all_claims(opts);
  CHECK(results.size() >= 25);
  for (const auto& r : results) {
    std::printf("%s %-5s %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.claim.c_str());
    if (!r.pass)
      std::printf("     expected: %s\n     computed: %s\n", r.expected.c_str(),
                  r.computed.c_str());
    CAPTURE(r.id);
    CAPTURE(r.claim);
    CAPTURE(r.expected);
    CAPTURE(r.computed);
    CHECK(r.pass);
  }
}

TEST_CASE("a perturbed insurance table fails the named claim") {
  // Mutation check: the suite is sensitive to the numbers it asserts.
  // (Run the insurance claim against a perturbed dilemma by hand.)
  Dilemma d = scenarios::build_dilemma("insurance");
  for (auto& term : d.utility.terms)
    if (term.value == Rational(1, 2)) term.value = Rational(3, 5);
  World w;
  w.vars["lesion"] = "yes";
  w.rules["smoke-choice"] = "smoke";
  w.tokens["smoke-t"] = "smoke";
  w.tokens["bet-s-t"] = "bet";
  CHECK(utility_of(d, w) != Rational(-1, 2));
}

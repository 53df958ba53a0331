#pragma once

#include <random>

#include "gauntlet/learninglab.hpp"
#include "gauntlet/scenarios.hpp"

namespace gauntlet {
namespace verify {

struct ClaimResult {
  std::string id;        // e.g. "1.2"
  std::string claim;
  std::string expected;
  std::string computed;
  bool pass = false;
};

struct Options {
  bool include_rl = true;       // the statistical learning suite
  unsigned rl_seeds = 20;
  uint64_t rl_base_seed = 1;
  unsigned fuzz_cases = 1000;   // property suites
  uint64_t fuzz_seed = 20240817;
};

// Runs every acceptance claim; exact checks compare rationals with zero
// tolerance.
std::vector<ClaimResult> run_all_claims(const Options& opts = {});

// Random predictor-free, perfect-recall, type-independent dilemma used by
// the agreement and affine-invariance property suites.
Dilemma random_agreement_dilemma(std::mt19937_64& rng);

}  // namespace verify
}  // namespace gauntlet

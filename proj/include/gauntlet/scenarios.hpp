#pragma once

#include <variant>

#include "gauntlet/divergence.hpp"
#include "gauntlet/exploit.hpp"

namespace gauntlet {
namespace scenarios {

// Catalog ids; part of the CLI contract.
inline const std::vector<std::string> kScenarioIds = {
    "newcomb",
    "transparent-newcomb",
    "counterfactual-mugging",
    "money-pump",
    "smoking-lesion",
    "xor-blackmail",
    "insurance",
    "sleeping-beauty-classic",
    "sleeping-beauty-wbg",
    "two-envelopes",
    "st-petersburg",
    "quit-flip",
    "reservoir",
    "iterated-st-petersburg",
};

// Name/value parameter overrides. Integer-valued parameters (rounds) travel
// as rationals and are checked for integrality.
struct ScenarioParams {
  std::map<std::string, Rational> values;

  Rational get(const std::string& name, const Rational& fallback) const {
    auto it = values.find(name);
    return it == values.end() ? fallback : it->second;
  }
  unsigned get_uint(const std::string& name, unsigned fallback) const;
};

using Scenario = std::variant<Dilemma, GameSpec, EnvelopeModel>;

// Builds the scenario with the documented defaults overridden by params.
// Dilemma outputs always pass validate() cleanly.
Scenario build(const std::string& id, const ScenarioParams& params = {});

// Convenience: builders that return the concrete type or throw.
Dilemma build_dilemma(const std::string& id, const ScenarioParams& params = {});

struct CatalogEntry {
  std::string id;
  std::string kind;  // dilemma | game | envelope
  std::string section;  // reference section
  std::map<std::string, std::string> defaults;  // parameter -> canonical value
};

// Stable-ordered, machine-readable listing used by the CLI and docs.
std::vector<CatalogEntry> catalog();

}  // namespace scenarios
}  // namespace gauntlet

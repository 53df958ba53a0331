#pragma once

#include <json.hpp>  // vendored nlohmann/json

#include "gauntlet/dilemma.hpp"
#include "gauntlet/engine.hpp"

namespace gauntlet {
namespace io {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dilemma file schema (JSON, UTF-8). All rationals travel as canonical
// strings "a/b" (or integers); unreduced or zero-denominator rationals are
// rejected.
Json dilemma_to_json(const Dilemma& d);
Dilemma dilemma_from_json(const Json& j);

// Parses and validates; throws ParseError with every schema error located,
// or EngineError carrying the itemized validation report.
Dilemma parse_dilemma_file(const std::string& path);
void write_dilemma_file(const Dilemma& d, const std::string& path);

Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j, const std::string& where);

// Renders a report document as an aligned text table (a pure rendering of
// the JSON, never an independent computation).
std::string render_table(const Json& report);

}  // namespace io
}  // namespace gauntlet

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gauntlet/io.hpp"
#include "gauntlet/scenarios.hpp"

using namespace gauntlet;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/gauntlet_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("builtin scenarios round-trip through the file format") {
  for (const auto& entry : scenarios::catalog()) {
    if (entry.kind != "dilemma") continue;
    CAPTURE(entry.id);
    Dilemma d = scenarios::build_dilemma(entry.id);
    io::Json j = io::dilemma_to_json(d);
    Dilemma back = io::dilemma_from_json(j);
    CHECK(io::dilemma_to_json(back) == j);  // canonical form is a fixed point
    CHECK(validate(back).errors.empty());
    // Same worlds, same probabilities, same utilities.
    CHECK(reference_joint(back) == reference_joint(d));
  }
}

TEST_CASE("files round-trip byte-for-byte") {
  Dilemma d = scenarios::build_dilemma("newcomb");
  TempFile f("newcomb.json");
  io::write_dilemma_file(d, f.path);
  Dilemma back = io::parse_dilemma_file(f.path);
  TempFile g("newcomb2.json");
  io::write_dilemma_file(back, g.path);
  std::ifstream a(f.path), b(g.path);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("bad CPT rows are reported with the variable named") {
  Dilemma d = scenarios::build_dilemma("counterfactual-mugging");
  io::Json j = io::dilemma_to_json(d);
  j["chance"][0]["cpt"][0]["p"]["heads"] = "1/3";  // 1/3 + 1/2 != 1
  TempFile f("badrow.json");
  std::ofstream(f.path) << j.dump();
  try {
    io::parse_dilemma_file(f.path);
    FAIL("expected a validation error");
  } catch (const EngineError& e) {
    std::string what = e.what();
    CHECK(what.find("coin") != std::string::npos);
    CHECK(what.find("sums to") != std::string::npos);
  }
}

TEST_CASE("zero denominators and unreduced rationals are rejected") {
  Dilemma d = scenarios::build_dilemma("newcomb");
  io::Json j = io::dilemma_to_json(d);
  j["predictors"][0]["accuracy"] = "1/0";
  CHECK_THROWS_AS(io::dilemma_from_json(j), io::ParseError);
  j["predictors"][0]["accuracy"] = "2/4";
  CHECK_THROWS_AS(io::dilemma_from_json(j), io::ParseError);
  j["predictors"][0]["accuracy"] = "1";
  CHECK_NOTHROW(io::dilemma_from_json(j));
}

TEST_CASE("syntax errors carry location info") {
  TempFile f("syntax.json");
  std::ofstream(f.path) << "{ \"name\": \"x\", }";
  try {
    io::parse_dilemma_file(f.path);
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("syntax error") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_dilemma_file("/no/such/file.json"), io::ParseError);
}

TEST_CASE("missing keys are reported with their path") {
  io::Json j;
  j["name"] = "x";
  try {
    io::dilemma_from_json(j);
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("utility") != std::string::npos);
  }
}

TEST_CASE("rationals print canonically in reports") {
  CHECK(io::rational_to_json(Rational(-7, 2)) == io::Json("-7/2"));
  CHECK(io::rational_to_json(rat(3)) == io::Json("3"));
  CHECK(io::rational_from_json(io::Json("9/10"), "x") == Rational(9, 10));
  CHECK(io::rational_from_json(io::Json(5), "x") == 5);
}

TEST_CASE("table rendering is a pure function of the json") {
  io::Json j;
  j["alpha"] = "3";
  j["rows"] = io::Json::array();
  io::Json row;
  row["k"] = 1;
  row["v"] = "1/2";
  j["rows"].push_back(row);
  std::string a = io::render_table(j);
  std::string b = io::render_table(j);
  CHECK(a == b);
  CHECK(a.find("alpha: 3") != std::string::npos);
  CHECK(a.find("1/2") != std::string::npos);
}

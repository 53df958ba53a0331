#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "gauntlet/report.hpp"
#include "gauntlet/verify.hpp"

using namespace gauntlet;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitCompute = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

uint64_t default_seed() {
  if (const char* env = std::getenv("GAUNTLET_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw UsageError("GAUNTLET_SEED must be an unsigned integer");
    }
  }
  return 1;
}

scenarios::ScenarioParams parse_params(const std::vector<std::string>& raw) {
  scenarios::ScenarioParams params;
  for (const auto& kv : raw) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw UsageError("--param expects name=value, got '" + kv + "'");
    try {
      params.values[kv.substr(0, eq)] = parse_rational(kv.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--param ") + kv + ": " + e.what());
    }
  }
  return params;
}

std::vector<TheoryId> parse_theories(const std::string& csv) {
  std::vector<TheoryId> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto t = theory_from_string(item);
    if (!t) throw UsageError("unknown theory '" + item + "'");
    out.push_back(*t);
  }
  if (out.empty()) throw UsageError("no theories given");
  return out;
}

AnthropicRule parse_rule(const std::string& s) {
  auto r = anthropic_rule_from_string(s);
  if (!r) throw UsageError("unknown anthropic rule '" + s + "' (want ssa or sia)");
  return *r;
}

bool is_file_target(const std::string& target) {
  return std::filesystem::exists(target) &&
         std::find(scenarios::kScenarioIds.begin(), scenarios::kScenarioIds.end(), target) ==
             scenarios::kScenarioIds.end();
}

scenarios::Scenario load_target(const std::string& target,
                                const scenarios::ScenarioParams& params) {
  if (is_file_target(target)) return io::parse_dilemma_file(target);
  if (std::find(scenarios::kScenarioIds.begin(), scenarios::kScenarioIds.end(), target) ==
      scenarios::kScenarioIds.end())
    throw UsageError("unknown scenario or missing file '" + target + "'");
  return scenarios::build(target, params);
}

void emit(const io::Json& report, const std::string& out_path, const std::string& format) {
  std::string json_text = report.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << json_text;
  }
  if (format == "json")
    std::cout << json_text;
  else
    std::cout << io::render_table(report);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"decision-theory dilemma engine"};
  app.require_subcommand(1);

  std::string target, theories_csv = "edt,edt-tickle,edt-ratify,cdt-myopic,cdt-sophisticated,uedt,ucdt,fdt";
  std::string rule_str = "ssa", out_path, format = "table";
  std::vector<std::string> raw_params;
  uint64_t seed = default_seed();

  auto* run = app.add_subcommand("run", "evaluate a dilemma under decision theories");
  run->add_option("target", target, "scenario id or dilemma file")->required();
  run->add_option("--theories", theories_csv, "comma-separated theory ids");
  run->add_option("--rule", rule_str, "anthropic rule: ssa or sia");
  run->add_option("--seed", seed, "rng seed for stochastic summaries");
  run->add_option("--out", out_path, "write the JSON report here");
  run->add_option("--format", format, "stdout format: table or json")
      ->check(CLI::IsMember({"table", "json"}));
  run->add_option("--param", raw_params, "scenario parameter overrides (name=value)");

  auto* verify_cmd = app.add_subcommand("verify-paper", "run every acceptance claim");
  unsigned rl_seeds = 20;
  unsigned fuzz_cases = 1000;
  bool skip_rl = false;
  verify_cmd->add_option("--out", out_path, "write the JSON report here");
  verify_cmd->add_option("--format", format, "stdout format: table or json")
      ->check(CLI::IsMember({"table", "json"}));
  verify_cmd->add_option("--rl-seeds", rl_seeds, "seeds for the learning suite");
  verify_cmd->add_option("--fuzz-cases", fuzz_cases, "cases per property suite");
  verify_cmd->add_flag("--skip-rl", skip_rl, "skip the learning suite");

  auto* learn = app.add_subcommand("learn", "train toy learners");
  std::string env_str, learner_str, curves_path;
  unsigned episodes = 2000, seed_count = 20;
  learn->add_option("env", env_str, "environment id")->required();
  learn->add_option("learner", learner_str, "learner id")->required();
  learn->add_option("--episodes", episodes, "episodes per run");
  learn->add_option("--seeds", seed_count, "number of seeds");
  learn->add_option("--seed", seed, "base seed");
  learn->add_option("--out", out_path, "write the JSON report here");
  learn->add_option("--curves", curves_path, "write reward curves as CSV here");
  learn->add_option("--format", format, "stdout format: table or json")
      ->check(CLI::IsMember({"table", "json"}));

  auto* audit = app.add_subcommand("audit", "search for a dutch-book bet menu");
  std::string theory_str;
  long long bound = 10;
  audit->add_option("target", target, "scenario id or dilemma file")->required();
  audit->add_option("theory", theory_str, "theory id")->required();
  audit->add_option("--rule", rule_str, "anthropic rule: ssa or sia");
  audit->add_option("--bound", bound, "integer payoff bound");
  audit->add_option("--out", out_path, "write the JSON report here");
  audit->add_option("--format", format, "stdout format: table or json")
      ->check(CLI::IsMember({"table", "json"}));
  audit->add_option("--param", raw_params, "scenario parameter overrides (name=value)");

  auto* exp = app.add_subcommand("export-scenario", "write a builtin scenario as a dilemma file");
  exp->add_option("target", target, "scenario id")->required();
  exp->add_option("--out", out_path, "output path (default: <id>.json)");
  exp->add_option("--param", raw_params, "scenario parameter overrides (name=value)");

  auto* list = app.add_subcommand("catalog", "list builtin scenarios");
  list->add_option("--format", format, "stdout format: table or json")
      ->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (run->parsed()) {
    auto params = parse_params(raw_params);
    auto theories = parse_theories(theories_csv);
    AnthropicRule rule = parse_rule(rule_str);
    scenarios::Scenario scenario = load_target(target, params);
    emit(report::run_report(target, scenario, params, theories, rule, seed), out_path, format);
    return 0;
  }

  if (verify_cmd->parsed()) {
    verify::Options opts;
    opts.include_rl = !skip_rl;
    opts.rl_seeds = rl_seeds;
    opts.fuzz_cases = fuzz_cases;
    auto results = verify::run_all_claims(opts);
    io::Json rep;
    rep["version"] = report::kVersion;
    rep["command"] = "verify-paper";
    unsigned passed = 0;
    io::Json claims = io::Json::array();
    for (const auto& r : results) {
      io::Json jc;
      jc["id"] = r.id;
      jc["claim"] = r.claim;
      jc["expected"] = r.expected;
      jc["computed"] = r.computed;
      jc["pass"] = r.pass;
      claims.push_back(jc);
      if (r.pass) ++passed;
    }
    rep["claims"] = claims;
    rep["passed"] = passed;
    rep["total"] = results.size();
    emit(rep, out_path, format);
    for (const auto& r : results)
      std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  " << r.claim << "\n";
    std::cout << passed << "/" << results.size() << " claims pass\n";
    return passed == results.size() ? 0 : 1;
  }

  if (learn->parsed()) {
    if (episodes == 0) throw UsageError("--episodes must be positive");
    if (seed_count == 0) throw UsageError("--seeds must be positive");
    auto env = learninglab::env_from_string(env_str);
    if (!env) throw UsageError("unknown env '" + env_str + "'");
    auto learner = learninglab::learner_from_string(learner_str);
    if (!learner) throw UsageError("unknown learner '" + learner_str + "'");
    learninglab::TrainConfig cfg;
    cfg.episodes = episodes;
    emit(report::learn_report(*env, {*learner}, cfg, seed_count, seed), out_path, format);
    if (!curves_path.empty()) {
      std::ofstream curves(curves_path);
      if (!curves) throw std::runtime_error("cannot write '" + curves_path + "'");
      curves << report::learn_curves_csv(*env, {*learner}, cfg, seed_count, seed);
    }
    return 0;
  }

  if (audit->parsed()) {
    if (bound < 1) throw UsageError("--bound must be at least 1");
    auto theory = theory_from_string(theory_str);
    if (!theory) throw UsageError("unknown theory '" + theory_str + "'");
    AnthropicRule rule = parse_rule(rule_str);
    auto params = parse_params(raw_params);
    scenarios::Scenario scenario = load_target(target, params);
    auto* d = std::get_if<Dilemma>(&scenario);
    if (!d) throw UsageError("audit needs a dilemma scenario");
    emit(report::audit_report(target, *d, *theory, rule, bound), out_path, format);
    return 0;
  }

  if (exp->parsed()) {
    auto params = parse_params(raw_params);
    Dilemma d = scenarios::build_dilemma(target, params);
    std::string path = out_path.empty() ? target + ".json" : out_path;
    io::write_dilemma_file(d, path);
    std::cout << "wrote " << path << "\n";
    return 0;
  }

  if (list->parsed()) {
    io::Json rep;
    rep["version"] = report::kVersion;
    rep["scenarios"] = io::Json::array();
    for (const auto& e : scenarios::catalog()) {
      io::Json je;
      je["id"] = e.id;
      je["kind"] = e.kind;
      je["section"] = e.section;
      io::Json jd = io::Json::object();
      for (const auto& [k, v] : e.defaults) jd[k] = v;
      je["defaults"] = jd;
      rep["scenarios"].push_back(je);
    }
    emit(rep, "", format);
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const EngineError& e) {
    std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    return what.find("validation") != std::string::npos ? kExitValidation : kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}

#include "gauntlet/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace gauntlet {
namespace io {

Json rational_to_json(const Rational& r) { return Json(rat_str(r)); }

Rational rational_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rational(BigInt(j.get<long long>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": rationals must be integers or \"a/b\" strings");
}

namespace {

Json condition_to_json(const Condition& c) {
  Json j = Json::object();
  for (const auto& [k, v] : c.require) j[k] = v;
  return j;
}

Condition condition_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": condition must be an object");
  Condition c;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw ParseError(where + "." + k + ": values are strings");
    c.require[k] = v.get<std::string>();
  }
  return c;
}

const Json& need(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
  return j.at(key);
}

std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ParseError(where + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

Json dilemma_to_json(const Dilemma& d) {
  Json j;
  j["name"] = d.name;
  j["chance"] = Json::array();
  for (const auto& c : d.chance) {
    Json jc;
    jc["name"] = c.name;
    jc["parents"] = c.parents;
    jc["domain"] = c.domain;
    jc["cpt"] = Json::array();
    for (const auto& row : c.cpt) {
      Json jr;
      jr["given"] = Json::object();
      for (const auto& [k, v] : row.given) jr["given"][k] = v;
      jr["p"] = Json::object();
      for (const auto& [k, v] : row.dist) jr["p"][k] = rational_to_json(v);
      jc["cpt"].push_back(jr);
    }
    j["chance"].push_back(jc);
  }
  j["decisions"] = Json::array();
  for (const auto& is : d.decisions) {
    Json ji;
    ji["infoset"] = is.id;
    ji["actions"] = is.actions;
    ji["observes"] = is.observes;
    ji["tokens"] = Json::array();
    for (const auto& t : is.tokens) {
      Json jt;
      jt["id"] = t.id;
      jt["guard"] = condition_to_json(t.guard);
      ji["tokens"].push_back(jt);
    }
    j["decisions"].push_back(ji);
  }
  j["predictors"] = Json::array();
  for (const auto& p : d.predictors) {
    Json jp;
    jp["name"] = p.name;
    jp["reads_infoset"] = p.reads_infoset;
    jp["accuracy"] = rational_to_json(p.accuracy);
    jp["mode"] = p.mode == PredictorVar::Mode::ReadsCandidatePolicy
                     ? "reads-candidate-policy"
                     : "reads-disposition";
    j["predictors"].push_back(jp);
  }
  j["utility"] = Json::object();
  j["utility"]["mode"] = d.utility.mode == UtilitySpec::Mode::Sum ? "sum" : "exclusive";
  j["utility"]["terms"] = Json::array();
  for (const auto& t : d.utility.terms) {
    Json jt;
    jt["when"] = condition_to_json(t.when);
    jt["value"] = rational_to_json(t.value);
    j["utility"]["terms"].push_back(jt);
  }
  j["disposition"] = Json::array();
  for (const auto& row : d.disposition) {
    Json jr;
    jr["infoset"] = row.infoset;
    jr["given"] = Json::object();
    for (const auto& [k, v] : row.given) jr["given"][k] = v;
    jr["p"] = Json::object();
    for (const auto& [k, v] : row.dist) jr["p"][k] = rational_to_json(v);
    j["disposition"].push_back(jr);
  }
  j["bets"] = Json::array();
  for (const auto& b : d.bets) {
    Json jb;
    jb["name"] = b.name;
    if (b.offer_infoset)
      jb["offer"] = *b.offer_infoset;
    else
      jb["offer"] = "pre-experiment";
    jb["accept_action"] = b.accept_action;
    jb["payoffs"] = Json::array();
    for (const auto& row : b.payoffs) {
      Json jr;
      jr["when"] = condition_to_json(row.when);
      jr["value"] = rational_to_json(row.value);
      jb["payoffs"].push_back(jr);
    }
    j["bets"].push_back(jb);
  }
  return j;
}

Dilemma dilemma_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("top level: expected an object");
  Dilemma d;
  d.name = need(j, "name", "top level").get<std::string>();

  for (const auto& jc : j.value("chance", Json::array())) {
    ChanceVar c;
    c.name = need(jc, "name", "chance").get<std::string>();
    std::string where = "chance '" + c.name + "'";
    c.parents = string_list(jc.value("parents", Json::array()), where + ".parents");
    c.domain = string_list(need(jc, "domain", where), where + ".domain");
    for (const auto& jr : need(jc, "cpt", where)) {
      ChanceVar::Row row;
      const Json given = jr.value("given", Json::object());
      for (const auto& [k, v] : given.items()) row.given[k] = v.get<std::string>();
      for (const auto& [k, v] : need(jr, "p", where + ".cpt").items())
        row.dist[k] = rational_from_json(v, where + ".cpt." + k);
      c.cpt.push_back(row);
    }
    d.chance.push_back(c);
  }

  for (const auto& ji : j.value("decisions", Json::array())) {
    InfoSet is;
    is.id = need(ji, "infoset", "decisions").get<std::string>();
    std::string where = "infoset '" + is.id + "'";
    is.actions = string_list(need(ji, "actions", where), where + ".actions");
    is.observes = string_list(ji.value("observes", Json::array()), where + ".observes");
    for (const auto& jt : need(ji, "tokens", where)) {
      TokenDef t;
      if (jt.is_string()) {
        t.id = jt.get<std::string>();
      } else {
        t.id = need(jt, "id", where + ".tokens").get<std::string>();
        t.guard = condition_from_json(jt.value("guard", Json::object()),
                                      where + ".tokens." + t.id + ".guard");
      }
      is.tokens.push_back(t);
    }
    d.decisions.push_back(is);
  }

  for (const auto& jp : j.value("predictors", Json::array())) {
    PredictorVar p;
    p.name = need(jp, "name", "predictors").get<std::string>();
    std::string where = "predictor '" + p.name + "'";
    p.reads_infoset = need(jp, "reads_infoset", where).get<std::string>();
    p.accuracy = rational_from_json(need(jp, "accuracy", where), where + ".accuracy");
    std::string mode = jp.value("mode", "reads-candidate-policy");
    if (mode == "reads-candidate-policy")
      p.mode = PredictorVar::Mode::ReadsCandidatePolicy;
    else if (mode == "reads-disposition")
      p.mode = PredictorVar::Mode::ReadsDisposition;
    else
      throw ParseError(where + ": unknown mode '" + mode + "'");
    d.predictors.push_back(p);
  }

  const Json& ju = need(j, "utility", "top level");
  std::string umode = ju.value("mode", "sum");
  if (umode == "sum")
    d.utility.mode = UtilitySpec::Mode::Sum;
  else if (umode == "exclusive")
    d.utility.mode = UtilitySpec::Mode::Exclusive;
  else
    throw ParseError("utility.mode: unknown mode '" + umode + "'");
  for (const auto& jt : ju.value("terms", Json::array())) {
    UtilitySpec::Term t;
    t.when = condition_from_json(need(jt, "when", "utility.terms"), "utility.terms.when");
    t.value = rational_from_json(need(jt, "value", "utility.terms"), "utility.terms.value");
    d.utility.terms.push_back(t);
  }

  for (const auto& jr : j.value("disposition", Json::array())) {
    DispositionRow row;
    row.infoset = need(jr, "infoset", "disposition").get<std::string>();
    std::string where = "disposition '" + row.infoset + "'";
    const Json given = jr.value("given", Json::object());
    for (const auto& [k, v] : given.items()) row.given[k] = v.get<std::string>();
    for (const auto& [k, v] : need(jr, "p", where).items())
      row.dist[k] = rational_from_json(v, where + ".p." + k);
    d.disposition.push_back(row);
  }

  for (const auto& jb : j.value("bets", Json::array())) {
    Bet b;
    b.name = need(jb, "name", "bets").get<std::string>();
    std::string where = "bet '" + b.name + "'";
    std::string offer = need(jb, "offer", where).get<std::string>();
    if (offer != "pre-experiment") b.offer_infoset = offer;
    b.accept_action = jb.value("accept_action", "accept");
    for (const auto& jr : need(jb, "payoffs", where)) {
      Bet::Payoff row;
      row.when = condition_from_json(need(jr, "when", where), where + ".when");
      row.value = rational_from_json(need(jr, "value", where), where + ".value");
      b.payoffs.push_back(row);
    }
    d.bets.push_back(b);
  }
  return d;
}

Dilemma parse_dilemma_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("syntax error in '" + path + "': " + e.what());
  }
  Dilemma d = dilemma_from_json(j);
  ValidationReport rep = validate(d);
  if (!rep.errors.empty())
    throw EngineError("'" + path + "' failed validation:\n" + rep.to_string());
  return d;
}

void write_dilemma_file(const Dilemma& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << dilemma_to_json(d).dump(2) << "\n";
}

namespace {

void render_value(const Json& v, std::ostream& os) {
  if (v.is_string())
    os << v.get<std::string>();
  else
    os << v.dump();
}

void render_node(const Json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || v.is_array()) {
        os << prefix << k << ":\n";
        render_node(v, prefix + "  ", os);
      } else {
        os << prefix << k << ": ";
        render_value(v, os);
        os << "\n";
      }
    }
    return;
  }
  if (j.is_array()) {
    // Arrays of flat objects render as aligned tables.
    bool tabular = !j.empty();
    std::vector<std::string> cols;
    for (const auto& e : j) {
      if (!e.is_object()) {
        tabular = false;
        break;
      }
      for (const auto& [k, v] : e.items()) {
        if (v.is_object() || v.is_array()) {
          tabular = false;
          break;
        }
        if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
      }
    }
    if (tabular) {
      std::vector<std::vector<std::string>> rows;
      rows.push_back(cols);
      for (const auto& e : j) {
        std::vector<std::string> row;
        for (const auto& c : cols) {
          if (!e.contains(c)) {
            row.push_back("");
            continue;
          }
          std::ostringstream cell;
          render_value(e.at(c), cell);
          row.push_back(cell.str());
        }
        rows.push_back(row);
      }
      std::vector<size_t> width(cols.size(), 0);
      for (const auto& row : rows)
        for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
      for (const auto& row : rows) {
        os << prefix;
        for (size_t i = 0; i < row.size(); ++i) {
          os << row[i];
          if (i + 1 < row.size()) os << std::string(width[i] - row[i].size() + 2, ' ');
        }
        os << "\n";
      }
      return;
    }
    for (const auto& e : j) {
      if (e.is_object() || e.is_array()) {
        os << prefix << "-\n";
        render_node(e, prefix + "  ", os);
      } else {
        os << prefix << "- ";
        render_value(e, os);
        os << "\n";
      }
    }
    return;
  }
  os << prefix;
  render_value(j, os);
  os << "\n";
}

}  // namespace

std::string render_table(const Json& report) {
  std::ostringstream os;
  render_node(report, "", os);
  return os.str();
}

}  // namespace io
}  // namespace gauntlet

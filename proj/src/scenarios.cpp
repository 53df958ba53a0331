#include "gauntlet/scenarios.hpp"

#include <algorithm>

namespace gauntlet {
namespace scenarios {

namespace {

struct ParamError : EngineError {
  using EngineError::EngineError;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ParamError("scenario parameter out of range: " + what);
}

Condition cond(std::initializer_list<std::pair<std::string, std::string>> kv) {
  Condition c;
  for (const auto& [k, v] : kv) c.require[k] = v;
  return c;
}

UtilitySpec::Term term(std::initializer_list<std::pair<std::string, std::string>> kv,
                       const Rational& value) {
  return {cond(kv), value};
}

ChanceVar coin(const std::string& name, const std::string& a, const std::string& b,
               const Rational& p_a) {
  ChanceVar c;
  c.name = name;
  c.domain = {a, b};
  c.cpt.push_back({{}, {{a, p_a}, {b, Rational(1) - p_a}}});
  return c;
}

DispositionRow uniform_disposition(const InfoSet& is) {
  DispositionRow row;
  row.infoset = is.id;
  Rational p(1, BigInt(is.actions.size()));
  for (const auto& a : is.actions) row.dist[a] = p;
  return row;
}

Dilemma newcomb(const ScenarioParams& params) {
  Rational acc = params.get("accuracy", Rational(1));
  Rational big = params.get("big", rat(1000000));
  Rational small = params.get("small", rat(1000));
  Rational p_one = params.get("disposition", Rational(1, 2));
  require(acc >= Rational(1, 2) && acc <= 1, "accuracy in [1/2, 1]");
  require(p_one > 0 && p_one < 1, "disposition in (0, 1)");

  Dilemma d;
  d.name = "newcomb";
  InfoSet is;
  is.id = "box-choice";
  is.actions = {"one-box", "two-box"};
  is.observes = {};
  is.tokens = {{"choice", {}}};
  d.decisions = {is};
  d.predictors = {{"prediction", "box-choice", acc, PredictorVar::Mode::ReadsCandidatePolicy}};
  DispositionRow row;
  row.infoset = "box-choice";
  row.dist = {{"one-box", p_one}, {"two-box", Rational(1) - p_one}};
  d.disposition = {row};
  d.utility.terms = {
      term({{"prediction", "one-box"}}, big),  // box A is filled iff predicted one-box
      term({{"choice", "two-box"}}, small),    // box B comes with two-boxing
  };
  return d;
}

Dilemma transparent_newcomb(const ScenarioParams& params) {
  Rational acc = params.get("accuracy", Rational(1));
  Rational big = params.get("big", rat(1000000));
  Rational small = params.get("small", rat(1000));
  require(acc >= Rational(1, 2) && acc <= 1, "accuracy in [1/2, 1]");

  Dilemma d;
  d.name = "transparent-newcomb";
  InfoSet full;
  full.id = "full-boxes";
  full.actions = {"one-box", "two-box"};
  full.observes = {"prediction"};
  full.tokens = {{"full-choice", cond({{"prediction", "one-box"}})}};
  InfoSet empty;
  empty.id = "empty-box";
  empty.actions = {"one-box", "two-box"};
  empty.observes = {"prediction"};
  empty.tokens = {{"empty-choice", cond({{"prediction", "two-box"}})}};
  d.decisions = {full, empty};
  // The predictor reads the rule at the designated sees-both-boxes-full
  // infoset.
  d.predictors = {{"prediction", "full-boxes", acc, PredictorVar::Mode::ReadsCandidatePolicy}};
  d.disposition = {uniform_disposition(full), uniform_disposition(empty)};
  d.utility.terms = {
      term({{"full-choice", "one-box"}}, big),
      term({{"full-choice", "two-box"}}, big + small),
      term({{"empty-choice", "two-box"}}, small),
  };
  return d;
}

Dilemma counterfactual_mugging(const ScenarioParams& params) {
  Rational ask = params.get("ask", rat(1));
  Rational reward = params.get("reward", rat(10));
  Rational p_heads = params.get("p-heads", Rational(1, 2));
  require(p_heads > 0 && p_heads < 1, "p-heads in (0, 1)");

  Dilemma d;
  d.name = "counterfactual-mugging";
  d.chance = {coin("coin", "heads", "tails", p_heads)};
  InfoSet asked;
  asked.id = "asked";
  asked.actions = {"pay", "refuse"};
  asked.observes = {"coin"};
  asked.tokens = {{"tails-ask", cond({{"coin", "tails"}})}};
  d.decisions = {asked};
  d.predictors = {{"prediction", "asked", Rational(1), PredictorVar::Mode::ReadsCandidatePolicy}};
  d.disposition = {uniform_disposition(asked)};
  d.utility.terms = {
      term({{"tails-ask", "pay"}}, -ask),
      term({{"coin", "heads"}, {"prediction", "pay"}}, reward),
  };
  return d;
}

Dilemma money_pump(const ScenarioParams& params) {
  unsigned rounds = params.get_uint("rounds", 3);
  Rational loss = params.get("loss", rat(1));
  Rational gain = params.get("gain", rat(3));
  Rational acc = params.get("accuracy", Rational(1));
  require(rounds >= 1 && rounds <= 6, "rounds in [1, 6]");
  require(acc >= Rational(1, 2) && acc <= 1, "accuracy in [1/2, 1]");

  Dilemma d;
  d.name = "money-pump";
  for (unsigned r = 1; r <= rounds; ++r) {
    std::string rs = std::to_string(r);
    InfoSet play;
    play.id = "play-" + rs;
    play.actions = {"play", "decline"};
    Condition guard;
    for (unsigned j = 1; j < r; ++j)
      guard.require["play-" + std::to_string(j) + "-t"] = "play";
    play.tokens = {{"play-" + rs + "-t", guard}};
    d.decisions.push_back(play);

    InfoSet box;
    box.id = "box-" + rs;
    box.actions = {"box-a", "box-b"};
    box.tokens = {{"box-" + rs + "-t", cond({{"play-" + rs + "-t", "play"}})}};
    d.decisions.push_back(box);

    d.predictors.push_back(
        {"prediction-" + rs, "box-" + rs, acc, PredictorVar::Mode::ReadsCandidatePolicy});
    for (const auto& mine : {std::string("box-a"), std::string("box-b")}) {
      for (const auto& pred : {std::string("box-a"), std::string("box-b")}) {
        Rational v = mine == pred ? -loss : gain;
        d.utility.terms.push_back(
            term({{"box-" + rs + "-t", mine}, {"prediction-" + rs, pred}}, v));
      }
    }
  }
  for (const auto& is : d.decisions) d.disposition.push_back(uniform_disposition(is));
  return d;
}

Dilemma smoking_lesion(const ScenarioParams& params) {
  Rational bonus = params.get("bonus", rat(1));
  Rational cancer = params.get("cancer-cost", rat(100));
  Rational p_lesion = params.get("p-lesion", Rational(1, 2));
  Rational s1 = params.get("p-smoke-lesion", Rational(9, 10));
  Rational s0 = params.get("p-smoke-clean", Rational(1, 10));
  require(p_lesion > 0 && p_lesion < 1, "p-lesion in (0, 1)");
  require(s1 > 0 && s1 < 1 && s0 > 0 && s0 < 1, "disposition rates in (0, 1)");

  Dilemma d;
  d.name = "smoking-lesion";
  d.chance = {coin("lesion", "yes", "no", p_lesion)};
  InfoSet is;
  is.id = "smoke-choice";
  is.actions = {"smoke", "refrain"};
  is.tokens = {{"smoke-t", {}}};
  d.decisions = {is};
  DispositionRow with, without;
  with.infoset = without.infoset = "smoke-choice";
  with.given = {{"lesion", "yes"}};
  with.dist = {{"smoke", s1}, {"refrain", Rational(1) - s1}};
  without.given = {{"lesion", "no"}};
  without.dist = {{"smoke", s0}, {"refrain", Rational(1) - s0}};
  d.disposition = {with, without};
  // Cancer comes from the lesion alone; smoking only adds the bonus.
  d.utility.terms = {
      term({{"smoke-t", "smoke"}}, bonus),
      term({{"lesion", "yes"}}, -cancer),
  };
  return d;
}

Dilemma xor_blackmail(const ScenarioParams& params) {
  Rational fee = params.get("fee", rat(100));
  Rational harm = params.get("harm", rat(1000000));
  Rational p_lesion = params.get("p-lesion", Rational(1, 100));
  require(p_lesion > 0 && p_lesion < 1, "p-lesion in (0, 1)");

  Dilemma d;
  d.name = "xor-blackmail";
  d.chance.push_back(coin("lesion", "yes", "no", p_lesion));
  InfoSet is;
  is.id = "pay-choice";
  is.actions = {"pay", "refuse"};
  is.observes = {"letter"};
  is.tokens = {{"pay-t", cond({{"letter", "yes"}})}};
  d.decisions = {is};
  d.predictors = {{"prediction", "pay-choice", Rational(1), PredictorVar::Mode::ReadsCandidatePolicy}};
  // The letter arrives exactly when (predicted payment) xor (lesion) holds.
  ChanceVar letter;
  letter.name = "letter";
  letter.domain = {"yes", "no"};
  letter.parents = {"prediction", "lesion"};
  auto det = [&](const std::string& pred, const std::string& les, bool yes) {
    ChanceVar::Row row;
    row.given = {{"prediction", pred}, {"lesion", les}};
    row.dist = {{"yes", yes ? Rational(1) : Rational(0)},
                {"no", yes ? Rational(0) : Rational(1)}};
    letter.cpt.push_back(row);
  };
  det("pay", "yes", false);
  det("pay", "no", true);
  det("refuse", "yes", true);
  det("refuse", "no", false);
  d.chance.push_back(letter);
  d.disposition = {uniform_disposition(is)};
  d.utility.terms = {
      term({{"lesion", "yes"}}, -harm),
      term({{"pay-t", "pay"}}, -fee),
  };
  return d;
}

Dilemma insurance(const ScenarioParams& params) {
  Rational c = params.get("c", Rational(1, 2));       // prior lesion credence
  Rational q = params.get("q", Rational(4, 5));       // population conditional
  Rational bet_rate = params.get("bet-disposition", Rational(1, 10));
  require(c > 0 && c < 1, "c in (0, 1)");
  require(q > Rational(1, 2) && q < 1, "q in (1/2, 1)");
  require(bet_rate > 0 && bet_rate < Rational(1, 2),
          "bet-disposition in (0, 1/2): uniform ties the myopic stage");

  // Symmetric population statistics: P(lesion|smoke) = q and
  // P(no lesion|no smoke) = q, solved against the prior c.
  Rational m = (Rational(1) - c - q) / (Rational(1) - 2 * q);
  Rational s1 = q * m / c;
  Rational s0 = Rational(1) - q * (Rational(1) - m) / (Rational(1) - c);
  require(m > 0 && m < 1 && s1 > 0 && s1 < 1 && s0 > 0 && s0 < 1,
          "(c, q) admits no full-support population");

  Dilemma d;
  d.name = "insurance";
  d.chance = {coin("lesion", "yes", "no", c)};
  InfoSet smoke;
  smoke.id = "smoke-choice";
  smoke.actions = {"smoke", "refrain"};
  smoke.tokens = {{"smoke-t", {}}};
  InfoSet bet_s;
  bet_s.id = "bet-after-smoke";
  bet_s.actions = {"bet", "decline"};
  bet_s.observes = {"smoke-t"};
  bet_s.tokens = {{"bet-s-t", cond({{"smoke-t", "smoke"}})}};
  InfoSet bet_r;
  bet_r.id = "bet-after-refrain";
  bet_r.actions = {"bet", "decline"};
  bet_r.observes = {"smoke-t"};
  bet_r.tokens = {{"bet-r-t", cond({{"smoke-t", "refrain"}})}};
  d.decisions = {smoke, bet_s, bet_r};

  DispositionRow with, without;
  with.infoset = without.infoset = "smoke-choice";
  with.given = {{"lesion", "yes"}};
  with.dist = {{"smoke", s1}, {"refrain", Rational(1) - s1}};
  without.given = {{"lesion", "no"}};
  without.dist = {{"smoke", s0}, {"refrain", Rational(1) - s0}};
  DispositionRow bs, br;
  bs.infoset = "bet-after-smoke";
  br.infoset = "bet-after-refrain";
  bs.dist = br.dist = {{"bet", bet_rate}, {"decline", Rational(1) - bet_rate}};
  d.disposition = {with, without, bs, br};

  // Net payoff cells: the insurance bet pays +1/2 when the
  // lesion matches the smoking choice and -3/2 otherwise.
  d.utility.terms = {
      term({{"smoke-t", "smoke"}, {"lesion", "yes"}}, rat(-1)),
      term({{"smoke-t", "smoke"}, {"lesion", "no"}}, rat(1)),
      term({{"bet-s-t", "bet"}, {"lesion", "yes"}}, Rational(1, 2)),
      term({{"bet-s-t", "bet"}, {"lesion", "no"}}, Rational(-3, 2)),
      term({{"bet-r-t", "bet"}, {"lesion", "no"}}, Rational(1, 2)),
      term({{"bet-r-t", "bet"}, {"lesion", "yes"}}, Rational(-3, 2)),
  };
  return d;
}

Dilemma sleeping_beauty_classic(const ScenarioParams& params) {
  Rational b1h = params.get("bet1-heads", rat(-13));
  Rational b1t = params.get("bet1-tails", rat(16));
  Rational b2h = params.get("bet2-heads", rat(11));
  Rational b2t = params.get("bet2-tails", rat(-9));

  Dilemma d;
  d.name = "sleeping-beauty-classic";
  d.chance = {coin("coin", "heads", "tails", Rational(1, 2))};
  InfoSet awake;
  awake.id = "awakening";
  awake.actions = {"accept", "decline"};
  awake.tokens = {{"monday", {}}, {"tuesday", cond({{"coin", "tails"}})}};
  d.decisions = {awake};
  d.disposition = {uniform_disposition(awake)};

  Bet sunday;
  sunday.name = "sunday-bet";
  sunday.payoffs = {{cond({{"coin", "heads"}}), b1h}, {cond({{"coin", "tails"}}), b1t}};
  Bet awakening;
  awakening.name = "awakening-bet";
  awakening.offer_infoset = "awakening";
  awakening.payoffs = {{cond({{"coin", "heads"}}), b2h}, {cond({{"coin", "tails"}}), b2t}};
  return attach_bets(d, {sunday, awakening});
}

Dilemma sleeping_beauty_wbg(const ScenarioParams& params) {
  Rational b1g = params.get("bet1-grey", rat(22));
  Rational b1o = params.get("bet1-opposite", rat(-20));
  Rational b2g = params.get("bet2-grey", rat(-24));
  Rational b2o = params.get("bet2-opposite", rat(9));

  Dilemma d;
  d.name = "sleeping-beauty-wbg";
  d.chance = {coin("coin1", "white", "black", Rational(1, 2)),
              coin("coin2", "grey", "opposite", Rational(1, 2))};
  InfoSet colored;
  colored.id = "colored-awakening";
  colored.actions = {"accept", "decline"};
  colored.tokens = {{"colored-monday", {}},
                    {"colored-tuesday", cond({{"coin2", "opposite"}})}};
  // The grey Tuesday awakening is an observer moment with nothing to decide;
  // it keeps per-world moment counts right.
  InfoSet grey;
  grey.id = "grey-awakening";
  grey.actions = {"wake"};
  grey.tokens = {{"grey-tuesday", cond({{"coin2", "grey"}})}};
  d.decisions = {colored, grey};
  DispositionRow grow;
  grow.infoset = "grey-awakening";
  grow.dist = {{"wake", Rational(1)}};
  d.disposition = {uniform_disposition(colored), grow};

  Bet pre;
  pre.name = "sunday-bet";
  pre.payoffs = {{cond({{"coin2", "grey"}}), b1g}, {cond({{"coin2", "opposite"}}), b1o}};
  Bet room;
  room.name = "colored-room-bet";
  room.offer_infoset = "colored-awakening";
  room.payoffs = {{cond({{"coin2", "grey"}}), b2g}, {cond({{"coin2", "opposite"}}), b2o}};
  return attach_bets(d, {pre, room});
}

EnvelopeModel two_envelopes(const ScenarioParams& params) {
  EnvelopeModel m;
  m.floor = params.get("floor", rat(8));
  m.fee = params.get("fee", rat(1));
  // Value-disjoint default prior; pair amounts are (n, 2n).
  m.pairs = {{params.get("pair1", rat(8)), Rational(1, 2)},
             {params.get("pair2", rat(32)), Rational(1, 2)}};
  if (params.values.count("single-pair")) {
    m.pairs = {{params.get("pair1", rat(8)), Rational(1)}};
  }
  validate_envelope_model(m);
  return m;
}

GameSpec game(const std::string& id, const ScenarioParams& params) {
  GameSpec g;
  g.game = id;
  g.start = params.get("start", rat(2));
  g.alpha = params.get("alpha", rat(3));
  g.reentry_fee = params.get("fee", rat(1));
  g.growth = params.get("growth", rat(2));
  g.maintenance_cost = params.get("cost", rat(1));
  g.discount = params.get("gamma", Rational(3, 4));
  require(g.alpha > 1, "alpha > 1");
  require(g.growth > 1, "growth > 1");
  require(g.discount >= 0 && g.discount < 1, "gamma in [0, 1)");
  require(g.reentry_fee >= 0, "fee >= 0");
  return g;
}

}  // namespace

unsigned ScenarioParams::get_uint(const std::string& name, unsigned fallback) const {
  auto it = values.find(name);
  if (it == values.end()) return fallback;
  const Rational& r = it->second;
  if (denominator(r) != 1 || numerator(r) < 0)
    throw EngineError("parameter '" + name + "' must be a nonnegative integer");
  return static_cast<unsigned>(numerator(r).convert_to<unsigned long long>());
}

Scenario build(const std::string& id, const ScenarioParams& params) {
  Scenario out = [&]() -> Scenario {
    if (id == "newcomb") return newcomb(params);
    if (id == "transparent-newcomb") return transparent_newcomb(params);
    if (id == "counterfactual-mugging") return counterfactual_mugging(params);
    if (id == "money-pump") return money_pump(params);
    if (id == "smoking-lesion") return smoking_lesion(params);
    if (id == "xor-blackmail") return xor_blackmail(params);
    if (id == "insurance") return insurance(params);
    if (id == "sleeping-beauty-classic") return sleeping_beauty_classic(params);
    if (id == "sleeping-beauty-wbg") return sleeping_beauty_wbg(params);
    if (id == "two-envelopes") return two_envelopes(params);
    if (id == "st-petersburg" || id == "quit-flip" || id == "reservoir" ||
        id == "iterated-st-petersburg")
      return game(id, params);
    throw EngineError("unknown scenario '" + id + "'");
  }();
  if (auto* d = std::get_if<Dilemma>(&out)) {
    ValidationReport rep = validate(*d);
    if (!rep.errors.empty())
      throw EngineError("builtin scenario '" + id + "' failed validation:\n" +
                        rep.to_string());
  }
  return out;
}

Dilemma build_dilemma(const std::string& id, const ScenarioParams& params) {
  Scenario s = build(id, params);
  if (auto* d = std::get_if<Dilemma>(&s)) return *d;
  throw EngineError("scenario '" + id + "' is not a dilemma");
}

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  auto add = [&](const std::string& id, const std::string& kind, const std::string& sec,
                 std::initializer_list<std::pair<std::string, std::string>> defaults) {
    CatalogEntry e;
    e.id = id;
    e.kind = kind;
    e.section = sec;
    for (const auto& [k, v] : defaults) e.defaults[k] = v;
    out.push_back(e);
  };
  add("newcomb", "dilemma", "3.2.2",
      {{"accuracy", "1"}, {"big", "1000000"}, {"small", "1000"}, {"disposition", "1/2"}});
  add("transparent-newcomb", "dilemma", "3.2.3",
      {{"accuracy", "1"}, {"big", "1000000"}, {"small", "1000"}});
  add("counterfactual-mugging", "dilemma", "3.2.2",
      {{"ask", "1"}, {"reward", "10"}, {"p-heads", "1/2"}});
  add("money-pump", "dilemma", "3.2.2",
      {{"rounds", "3"}, {"loss", "1"}, {"gain", "3"}, {"accuracy", "1"}});
  add("smoking-lesion", "dilemma", "3.2.1",
      {{"bonus", "1"}, {"cancer-cost", "100"}, {"p-lesion", "1/2"},
       {"p-smoke-lesion", "9/10"}, {"p-smoke-clean", "1/10"}});
  add("xor-blackmail", "dilemma", "3.2.1",
      {{"fee", "100"}, {"harm", "1000000"}, {"p-lesion", "1/100"}});
  add("insurance", "dilemma", "3.2.2",
      {{"c", "1/2"}, {"q", "4/5"}, {"bet-disposition", "1/10"}});
  add("sleeping-beauty-classic", "dilemma", "3.3.2",
      {{"bet1-heads", "-13"}, {"bet1-tails", "16"}, {"bet2-heads", "11"},
       {"bet2-tails", "-9"}});
  add("sleeping-beauty-wbg", "dilemma", "3.3.2",
      {{"bet1-grey", "22"}, {"bet1-opposite", "-20"}, {"bet2-grey", "-24"},
       {"bet2-opposite", "9"}});
  add("two-envelopes", "envelope", "3.5",
      {{"floor", "8"}, {"fee", "1"}, {"pair1", "8"}, {"pair2", "32"}});
  add("st-petersburg", "game", "3.4", {{"start", "2"}});
  add("quit-flip", "game", "3.4", {{"alpha", "3"}, {"start", "2"}});
  add("reservoir", "game", "3.4", {{"growth", "2"}, {"cost", "1"}, {"gamma", "3/4"}});
  add("iterated-st-petersburg", "game", "3.4", {{"fee", "1"}});
  return out;
}

}  // namespace scenarios
}  // namespace gauntlet

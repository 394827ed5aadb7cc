#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crnwd/components.hpp"
#include "crnwd/csl.hpp"
#include "crnwd/ctmc.hpp"
#include "crnwd/goals.hpp"
#include "crnwd/verify.hpp"

using namespace crnwd;
using csl::Formula;
using csl::FormulaPtr;

namespace {

Crn chain_ab() {
  std::vector<Species> sp = {{"A", 0}, {"B", 1}};
  Reaction rxn;
  rxn.reactants = {{0, 1}};
  rxn.products = {{1, 1}};
  rxn.rate_constant = 1.0;
  return Crn(sp, {rxn});
}

}  // namespace

TEST_CASE("formula parsing and printing") {
  SUBCASE("bounded eventually") {
    FormulaPtr f = csl::parse_csl("P>=0.9 [ F<=10.0 (D >= 3) ]");
    CHECK(f->kind == Formula::Kind::prob_eventually);
    CHECK(f->prob_bound == 0.9);
    CHECK(f->time_bound == 10.0);
    CHECK(f->a->kind == Formula::Kind::linear_atom);
  }

  SUBCASE("named predicates and boolean structure") {
    FormulaPtr f = csl::parse_csl(
        "P>=1 [ G (Hpres -> P>=0.95 [ F<=2 Hdet ]) ]");
    CHECK(f->kind == Formula::Kind::globally_all);
    CHECK(f->a->kind == Formula::Kind::implication);
    CHECK(csl::prob_nesting_depth(*f) == 2);
    CHECK(csl::max_time_bound(*f) == 2.0);
  }

  SUBCASE("weak until") {
    FormulaPtr f = csl::parse_csl("P>=0.99 [ (!Alarm) W (!ThL) ]");
    CHECK(f->kind == Formula::Kind::prob_weak_until);
    CHECK(f->a->kind == Formula::Kind::negation);
  }

  SUBCASE("linear expressions") {
    FormulaPtr f = csl::parse_csl("(A + B - 2*C <= 4)");
    REQUIRE(f->kind == Formula::Kind::linear_atom);
    REQUIRE(f->terms.size() == 3);
    CHECK(f->terms[2].first == -2);
  }

  SUBCASE("print then parse is stable") {
    const char* samples[] = {
        "P>=0.9 [ F<=10 (D >= 3) ]",
        "P>=1 [ G ((ThL -> !ThH) & Reset) ]",
        "P>=0.5 [ (A >= 1) W ((B >= 2) | Hdet) ]",
        "P>=0.25 [ G<=4.5 !(A + B = 1) ]",
    };
    for (const char* text : samples) {
      FormulaPtr f = csl::parse_csl(text);
      std::string printed = csl::to_string(*f);
      FormulaPtr again = csl::parse_csl(printed);
      CAPTURE(text);
      CHECK(csl::to_string(*again) == printed);
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(csl::parse_csl("P>=0.5 [ G phi"), ParseError);
    CHECK_THROWS_AS(csl::parse_csl("P>=0.5 [ G (A >= 1) ]"), ParseError);
    CHECK_THROWS_AS(csl::parse_csl("P>=1.5 [ F<=1 (A>=1) ]"), ConfigError);
    CHECK_THROWS_AS(csl::parse_csl(""), ParseError);
  }

  SUBCASE("formula files") {
    auto list = csl::parse_csl_file(
        "# goals\n"
        "alarm: P>=0.9 [ F<=10 Alarm ]\n"
        "P>=1 [ G (A >= 0) ]\n");
    REQUIRE(list.size() == 2);
    CHECK(list[0].first == "alarm");
    CHECK(list[1].first == "f1");
  }
}

TEST_CASE("exact evaluation on the two-state chain") {
  Crn crn = chain_ab();
  Ctmc ctmc = enumerate(crn, make_state(crn, {{"A", 1}}));
  EvalContext ctx{&crn, nullptr};

  SUBCASE("bounded eventually against the closed form") {
    auto holds = evaluate_exact(
        ctmc, *csl::parse_csl("P>=0.5 [ F<=1 (B >= 1) ]"),
        ctmc.initial_index, ctx);
    CHECK(holds.verdict == Verdict::holds);
    REQUIRE(holds.probs.size() == 1);
    CHECK(std::fabs(holds.probs[0].value - (1 - std::exp(-1.0))) < 1e-8);

    auto fails = evaluate_exact(
        ctmc, *csl::parse_csl("P>=0.7 [ F<=1 (B >= 1) ]"),
        ctmc.initial_index, ctx);
    CHECK(fails.verdict == Verdict::fails);
  }

  SUBCASE("conservation as GloballyAll") {
    auto r = evaluate_exact(ctmc, *csl::parse_csl("P>=1 [ G (A + B = 1) ]"),
                            ctmc.initial_index, ctx);
    CHECK(r.verdict == Verdict::holds);
  }

  SUBCASE("bounded globally") {
    auto r = evaluate_exact(ctmc, *csl::parse_csl("P>=0.36 [ G<=1 (B = 0) ]"),
                            ctmc.initial_index, ctx);
    CHECK(r.verdict == Verdict::holds);
    CHECK(std::fabs(r.probs[0].value - std::exp(-1.0)) < 1e-8);
  }

  SUBCASE("nested operators label bottom-up") {
    // From A: within 1, reach a state from which B>=1 is certain within 2.
    auto r = evaluate_exact(
        ctmc,
        *csl::parse_csl("P>=0.5 [ F<=1 (P>=0.8 [ F<=2 (B >= 1) ]) ]"),
        ctmc.initial_index, ctx);
    CHECK(r.verdict == Verdict::holds);
    CHECK(r.probs.size() == 2);
  }

  SUBCASE("state formula evaluation") {
    State a = make_state(crn, {{"A", 1}});
    EvalContext c2{&crn, nullptr};
    CHECK(evaluate_state_formula(*csl::parse_csl("(A >= 1) & !(B >= 1)"), a, c2));
    CHECK_THROWS_AS(
        evaluate_state_formula(*csl::parse_csl("P>=1 [ F<=1 (A>=1) ]"), a, c2),
        StructuralError);
  }
}

TEST_CASE("statistical evaluation") {
  Crn crn = chain_ab();
  State init = make_state(crn, {{"A", 1}});
  EvalContext ctx{&crn, nullptr};
  StatConfig cfg;
  cfg.runs = 10'000;
  cfg.horizon = 2.0;
  cfg.seed = 99;

  SUBCASE("vacuous bound holds") {
    auto r = evaluate_statistical(crn, init,
                                  *csl::parse_csl("P>=0 [ F<=1 (B >= 1) ]"),
                                  cfg, ctx);
    CHECK(r.verdict == Verdict::holds);
  }

  SUBCASE("interval brackets the closed form") {
    auto r = evaluate_statistical(crn, init,
                                  *csl::parse_csl("P>=0.5 [ F<=1 (B >= 1) ]"),
                                  cfg, ctx);
    CHECK(r.verdict == Verdict::holds);
    REQUIRE(r.probs.size() == 1);
    REQUIRE(r.probs[0].has_ci);
    double truth = 1 - std::exp(-1.0);
    CHECK(r.probs[0].ci.low <= truth);
    CHECK(r.probs[0].ci.high >= truth);
  }

  SUBCASE("bound at the true probability is undecided") {
    auto r = evaluate_statistical(
        crn, init, *csl::parse_csl("P>=0.6321205588 [ F<=1 (B >= 1) ]"), cfg,
        ctx);
    CHECK(r.verdict == Verdict::undecided);
  }

  SUBCASE("insufficient horizon is a configuration error") {
    StatConfig small = cfg;
    small.horizon = 0.5;
    CHECK_THROWS_AS(
        evaluate_statistical(crn, init,
                             *csl::parse_csl("P>=0.5 [ F<=1 (B >= 1) ]"),
                             small, ctx),
        ConfigError);
  }

  SUBCASE("globally-all scan finds violations") {
    auto r = evaluate_statistical(crn, init,
                                  *csl::parse_csl("P>=1 [ G (B = 0) ]"), cfg,
                                  ctx);
    CHECK(r.verdict == Verdict::fails);
    CHECK(r.approximate);
  }
}

TEST_CASE("exact and statistical agree on a watchdog fragment") {
  MwtConfig mcfg;
  mcfg.detector_height = 2;
  mcfg.filter_height = 2;
  mcfg.detector_population = 3;
  mcfg.filter_population = 3;
  mcfg.u_count = 2;
  mcfg.r_count = 1;
  MwtModel mwt = build_mwt(mcfg);
  PredicateSet preds = PredicateSet::for_mwt(mwt.crn, mwt.cfg);
  EvalContext ctx{&mwt.crn, &preds};

  FormulaPtr fragment = csl::parse_csl("P>=0.5 [ F<=3 ThH ]");
  Ctmc ctmc = enumerate(mwt.crn, mwt.init);
  auto exact = evaluate_exact(ctmc, *fragment, ctmc.initial_index, ctx);
  REQUIRE(exact.probs.size() == 1);
  double truth = exact.probs[0].value;

  StatConfig cfg;
  cfg.runs = 20'000;
  cfg.horizon = 3.0;
  cfg.seed = 7;
  auto stat = evaluate_statistical(mwt.crn, mwt.init, *fragment, cfg, ctx);
  REQUIRE(stat.probs.size() == 1);
  CHECK(stat.probs[0].ci.low <= truth);
  CHECK(stat.probs[0].ci.high >= truth);
}

TEST_CASE("goal catalog") {
  ClientPolytope client;
  client.u = 10.0;
  client.v = 20.0;
  client.eps = 0.05;
  client.delta = 0.05;
  auto synth = synthesize(client);
  REQUIRE(synth.feasible);
  auto goals = goal_catalog(synth.params, client);

  REQUIRE(goals.size() == 15);
  int leaves = 0, ad = 0, tf = 0;
  for (const auto& g : goals) {
    if (!g.leaf) continue;
    ++leaves;
    if (g.agent == Agent::absence_detector) ++ad;
    if (g.agent == Agent::threshold_filter) ++tf;
  }
  CHECK(leaves == 9);
  CHECK(ad == 6);
  CHECK(tf == 3);

  SUBCASE("initialize-to-reset is the atomic Reset predicate") {
    const auto& g = goals[8];
    CHECK(g.name == "Achieve[Initialize to Reset]");
    CHECK(g.formula->kind == Formula::Kind::named_atom);
    CHECK(g.formula->name == "Reset");
  }

  SUBCASE("threshold-filter alarm goal matches the formula shape") {
    const auto& g = goals[13];
    CHECK(g.name == "Achieve[Alarm if Threshold for some time]");
    CHECK(g.agent == Agent::threshold_filter);
    std::string printed = csl::to_string(*g.formula);
    CHECK(printed.find("ThH ->") != std::string::npos);
    CHECK(printed.find("F<=1 (Alarm | !ThH)") != std::string::npos);
  }

  SUBCASE("derived negative bounds are construction errors") {
    InternalParams bad = synth.params;
    bad.w_a = 50.0;  // v - w_a < 0
    CHECK_THROWS_AS(goal_catalog(bad, client), ConfigError);
  }

  SUBCASE("oscillator triple") {
    auto osc = oscillator_goals({});
    REQUIRE(osc.size() == 3);
    for (const auto& g : osc) CHECK(g.formula->kind == Formula::Kind::globally_all);
  }
}

TEST_CASE("catalog goals evaluate exactly on a small watchdog") {
  MwtConfig mcfg;
  mcfg.detector_height = 2;
  mcfg.filter_height = 2;
  mcfg.detector_population = 2;
  mcfg.filter_population = 2;
  mcfg.u_count = 2;
  mcfg.r_count = 2;
  MwtModel mwt = build_mwt(mcfg);
  PredicateSet preds = PredicateSet::for_mwt(mwt.crn, mwt.cfg);
  EvalContext ctx{&mwt.crn, &preds};
  Ctmc ctmc = enumerate(mwt.crn, mwt.init);

  ClientPolytope client;
  client.u = 2.0;
  client.v = 6.0;
  client.eps = 0.1;
  client.delta = 0.1;
  auto synth = synthesize(client);
  REQUIRE(synth.feasible);

  int evaluated = 0;
  for (const auto& g : goal_catalog(synth.params, client)) {
    if (!g.leaf) continue;
    auto r = evaluate_exact(ctmc, *g.formula, ctmc.initial_index, ctx);
    CHECK((r.verdict == Verdict::holds || r.verdict == Verdict::fails));
    ++evaluated;
  }
  CHECK(evaluated == 9);
}

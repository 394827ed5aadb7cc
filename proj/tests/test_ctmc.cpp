#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include "crnwd/components.hpp"
#include "crnwd/ctmc.hpp"
#include "crnwd/lemmas.hpp"
#include "crnwd/rng.hpp"
#include "crnwd/sim.hpp"
#include "crnwd/stats.hpp"

using namespace crnwd;

namespace {

Crn chain_ab(double rate) {
  std::vector<Species> sp = {{"A", 0}, {"B", 1}};
  Reaction rxn;
  rxn.reactants = {{0, 1}};
  rxn.products = {{1, 1}};
  rxn.rate_constant = rate;
  return Crn(sp, {rxn});
}

StateMask mask_where(const Ctmc& ctmc, auto pred) {
  StateMask m(ctmc.state_count(), 0);
  for (std::size_t s = 0; s < ctmc.state_count(); ++s)
    m[s] = pred(ctmc.states[s]) ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("enumerate the single-molecule unary ladder") {
  BuiltModel ladder = build_unary_ladder({2, 1.0, 1.0, 1, "X"});
  Ctmc ctmc = enumerate(ladder.crn, ladder.init);
  CHECK(ctmc.state_count() == 3);
  CHECK(ctmc.edges.size() == 4);  // two ups, two resets
  CHECK_FALSE(ctmc.truncated);
}

TEST_CASE("enumerate with no reactions") {
  Crn crn({{"A", 0}}, {});
  State init = make_state(crn, {{"A", 2}});
  Ctmc ctmc = enumerate(crn, init);
  CHECK(ctmc.state_count() == 1);
  CHECK(ctmc.edges.empty());
}

TEST_CASE("oscillator state space is the reachable part of the simplex") {
  OscillatorConfig cfg{1.0, 0.1, 1, 1, 1};
  BuiltModel osc = build_oscillator(cfg, false);
  Ctmc ctmc = enumerate(osc.crn, osc.init);

  // Independent oracle: brute-force BFS over (a,b,c) triples with the three
  // phase reactions applied by hand.
  std::set<std::array<Count, 3>> seen;
  std::vector<std::array<Count, 3>> queue = {{1, 1, 1}};
  seen.insert({1, 1, 1});
  while (!queue.empty()) {
    auto [a, b, c] = queue.back();
    queue.pop_back();
    std::vector<std::array<Count, 3>> next;
    if (a > 0 && b > 0) next.push_back({a - 1, b + 1, c});
    if (b > 0 && c > 0) next.push_back({a, b - 1, c + 1});
    if (c > 0 && a > 0) next.push_back({a + 1, b, c - 1});
    for (auto& s : next)
      if (seen.insert(s).second) queue.push_back(s);
  }
  CHECK(ctmc.state_count() == seen.size());
  for (const auto& st : ctmc.states) {
    CHECK(st[0] + st[1] + st[2] == 3);
    CHECK(seen.count({st[0], st[1], st[2]}) == 1);
  }
}

TEST_CASE("per-species caps mark truncation and drop edges") {
  Crn crn = chain_ab(1.0);
  // A -> B with B capped at 0: the only transition is dropped.
  State init = make_state(crn, {{"A", 1}});
  ExploreCaps caps;
  caps.per_species_cap = {5, 0};
  Ctmc ctmc = enumerate(crn, init, caps);
  CHECK(ctmc.truncated);
  CHECK(ctmc.state_count() == 1);
  CHECK(ctmc.edges.empty());
  CHECK_THROWS_AS(transient(ctmc, 1.0), PreconditionError);
  CHECK_NOTHROW(transient(ctmc, 1.0, true));

  SUBCASE("initial state must satisfy the caps") {
    ExploreCaps tight;
    tight.per_species_cap = {0, 0};
    CHECK_THROWS_AS(enumerate(crn, init, tight), PreconditionError);
  }
}

TEST_CASE("max_states overflow carries the partial count") {
  // Unbounded birth process.
  std::vector<Species> sp = {{"A", 0}};
  Reaction birth;
  birth.reactants = {{0, 1}};
  birth.products = {{0, 2}};
  birth.rate_constant = 1.0;
  Crn crn(sp, {birth});
  ExploreCaps caps;
  caps.max_states = 100;
  try {
    enumerate(crn, make_state(crn, {{"A", 1}}), caps);
    FAIL("expected ExplorationError");
  } catch (const ExplorationError& err) {
    CHECK(err.states_explored == 100);
  }
}

TEST_CASE("transient distribution") {
  Crn crn = chain_ab(1.0);
  Ctmc ctmc = enumerate(crn, make_state(crn, {{"A", 1}}));
  std::size_t b_state = ctmc.states[0][1] == 1 ? 0 : 1;

  SUBCASE("t=0 is a point mass") {
    auto pi = transient(ctmc, 0.0);
    CHECK(pi[ctmc.initial_index] == 1.0);
  }

  SUBCASE("closed form 1 - e^-t") {
    auto pi = transient(ctmc, 1.0);
    CHECK(std::fabs(pi[b_state] - (1.0 - std::exp(-1.0))) < 1e-8);
    double sum = pi[0] + pi[1];
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }

  SUBCASE("negative time is a domain error") {
    CHECK_THROWS_AS(transient(ctmc, -0.5), ConfigError);
  }
}

TEST_CASE("transient matches SSA frequencies on the ladder") {
  BuiltModel ladder = build_unary_ladder({2, 1.0, 1.0, 1, "X"});
  Ctmc ctmc = enumerate(ladder.crn, ladder.init);
  const double t = 2.0;
  auto pi = transient(ctmc, t);

  std::map<std::vector<Count>, std::size_t> index_of;
  for (std::size_t s = 0; s < ctmc.state_count(); ++s)
    index_of[ctmc.states[s].counts] = s;

  std::size_t n = 20'000;
  std::vector<std::size_t> hits(ctmc.state_count(), 0);
  std::mutex m;
  SimConfig cfg{t, 515};
  for_each_run(ladder.crn, ladder.init, cfg, n,
               [&](std::size_t, const Trajectory& traj) {
                 std::lock_guard<std::mutex> lock(m);
                 hits[index_of.at(traj.final_state.counts)]++;
               });
  for (std::size_t s = 0; s < ctmc.state_count(); ++s) {
    double expect = pi[s];
    double sigma = std::sqrt(expect * (1 - expect) / static_cast<double>(n));
    double freq = static_cast<double>(hits[s]) / static_cast<double>(n);
    CAPTURE(s);
    CHECK(std::fabs(freq - expect) <= 3.0 * sigma + 1e-12);
  }
}

TEST_CASE("bounded reachability") {
  Crn crn = chain_ab(1.0);
  Ctmc ctmc = enumerate(crn, make_state(crn, {{"A", 1}}));
  StateMask target = mask_where(ctmc, [](const State& s) { return s[1] >= 1; });

  CHECK(std::fabs(prob_eventually_bounded(ctmc, target, 1.0) -
                  (1.0 - std::exp(-1.0))) < 1e-8);

  SUBCASE("target at the initial state is certain") {
    StateMask everything(ctmc.state_count(), 1);
    CHECK(prob_eventually_bounded(ctmc, everything, 0.0) == 1.0);
    CHECK(prob_eventually_bounded(ctmc, everything, 5.0) == 1.0);
  }

  SUBCASE("unreachable target has probability zero") {
    StateMask none(ctmc.state_count(), 0);
    CHECK(prob_eventually_bounded(ctmc, none, 10.0) == 0.0);
  }
}

TEST_CASE("bounded invariance by duality") {
  Crn crn = chain_ab(1.0);
  Ctmc ctmc = enumerate(crn, make_state(crn, {{"A", 1}}));
  StateMask b_zero = mask_where(ctmc, [](const State& s) { return s[1] == 0; });

  CHECK(std::fabs(prob_globally_bounded(ctmc, b_zero, 1.0) - std::exp(-1.0)) <
        1e-8);

  SUBCASE("trivial invariants") {
    StateMask all(ctmc.state_count(), 1), none(ctmc.state_count(), 0);
    CHECK(prob_globally_bounded(ctmc, all, 3.0) == 1.0);
    CHECK(prob_globally_bounded(ctmc, none, 3.0) == 0.0);
  }

  SUBCASE("duality holds on random models") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Ctmc random = random_ctmc(seed);
      LemmaInstance inst = random_lemma_instance(random, seed + 1000);
      double g = prob_globally_bounded(random, inst.phi, inst.t);
      StateMask neg(inst.phi.size());
      for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = inst.phi[i] ? 0 : 1;
      double f = prob_eventually_bounded(random, neg, inst.t);
      CAPTURE(seed);
      CHECK(std::fabs(g + f - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("weak until") {
  // A -> B -> C chain, one molecule.
  std::vector<Species> sp = {{"A", 0}, {"B", 1}, {"C", 2}};
  Reaction r1, r2;
  r1.reactants = {{0, 1}};
  r1.products = {{1, 1}};
  r1.rate_constant = 1.0;
  r2.reactants = {{1, 1}};
  r2.products = {{2, 1}};
  r2.rate_constant = 1.0;
  Crn crn(sp, {r1, r2});
  Ctmc ctmc = enumerate(crn, make_state(crn, {{"A", 1}}));

  StateMask phi = mask_where(ctmc, [](const State& s) { return s[2] == 0; });
  StateMask psi = mask_where(ctmc, [](const State& s) { return s[1] >= 1; });
  auto w = prob_weak_until(ctmc, phi, psi);
  CHECK(std::fabs(w[ctmc.initial_index] - 1.0) < 1e-9);

  SUBCASE("phi everywhere means weak until holds everywhere") {
    StateMask all(ctmc.state_count(), 1), none(ctmc.state_count(), 0);
    auto v = prob_weak_until(ctmc, all, none);
    for (double x : v) CHECK(x == doctest::Approx(1.0));
  }

  SUBCASE("psi state satisfies immediately") {
    auto v = prob_weak_until(ctmc, StateMask(ctmc.state_count(), 0), psi);
    for (std::size_t s = 0; s < ctmc.state_count(); ++s)
      if (psi[s]) CHECK(v[s] == doctest::Approx(1.0));
  }
}

TEST_CASE("weak until agrees with jump-chain Monte Carlo") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Ctmc ctmc = random_ctmc(seed);
    LemmaInstance inst = random_lemma_instance(ctmc, seed + 77);
    auto exact = prob_weak_until(ctmc, inst.phi, inst.psi);

    // Monte Carlo on the embedded jump chain.
    std::size_t runs = 4000;
    Xoshiro256StarStar rng(seed * 31 + 5);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      std::size_t q = ctmc.initial_index;
      bool ok = false;
      for (int step = 0; step < 100000; ++step) {
        if (inst.psi[q]) {
          ok = true;
          break;
        }
        if (!inst.phi[q]) {
          ok = false;
          break;
        }
        auto edges = ctmc.out_edges(q);
        if (edges.empty()) {
          ok = true;  // absorbed while phi holds
          break;
        }
        double draw = rng.uniform() * ctmc.exit_rates[q];
        double cum = 0.0;
        std::size_t to = edges.back().to;
        for (const auto& e : edges) {
          cum += e.rate;
          if (draw < cum) {
            to = e.to;
            break;
          }
        }
        q = to;
      }
      if (ok) ++hits;
    }
    double freq = static_cast<double>(hits) / static_cast<double>(runs);
    double expect = exact[ctmc.initial_index];
    double sigma = std::sqrt(expect * (1 - expect) / static_cast<double>(runs));
    CAPTURE(seed);
    CHECK(std::fabs(freq - expect) <= 3.0 * sigma + 0.005);
  }
}

TEST_CASE("catalyzed ladder with constant catalysts equals the unary ladder") {
  const int k = 2;
  const Count u_count = 2, r_count = 3;
  BuiltModel cat = build_catalyzed_ladder({k, 1.0, 1.0, 1, "X"}, "U", "R");
  State init = cat.init;
  init.counts[cat.crn.species_index("U")] = u_count;
  init.counts[cat.crn.species_index("R")] = r_count;
  Ctmc cat_ctmc = enumerate(cat.crn, init);

  BuiltModel unary = build_unary_ladder(
      {k, static_cast<double>(u_count), static_cast<double>(r_count), 1, "X"});
  Ctmc unary_ctmc = enumerate(unary.crn, unary.init);

  REQUIRE(cat_ctmc.state_count() == unary_ctmc.state_count());
  auto rung_of = [&](const Crn& crn, const State& s) {
    for (int i = 0; i <= k; ++i)
      if (s[crn.species_index("X" + std::to_string(i))] == 1) return i;
    return -1;
  };
  for (int g = 0; g < 20; ++g) {
    double t = 0.15 * (g + 1);
    auto pc = transient(cat_ctmc, t);
    auto pu = transient(unary_ctmc, t);
    std::map<int, double> cat_by_rung, unary_by_rung;
    for (std::size_t s = 0; s < cat_ctmc.state_count(); ++s)
      cat_by_rung[rung_of(cat.crn, cat_ctmc.states[s])] += pc[s];
    for (std::size_t s = 0; s < unary_ctmc.state_count(); ++s)
      unary_by_rung[rung_of(unary.crn, unary_ctmc.states[s])] += pu[s];
    for (int i = 0; i <= k; ++i) {
      CAPTURE(t);
      CAPTURE(i);
      CHECK(std::fabs(cat_by_rung[i] - unary_by_rung[i]) < 1e-8);
    }
  }
}

TEST_CASE("top-rung count is binomial for small populations") {
  // Decomposability: exact top-rung count distribution for p <= 3 equals
  // Binomial(p, pi_k(t)).
  const double t = 1.5;
  LadderSpec one{2, 1.0, 1.0, 1, "X"};
  double pi_top = ladder_top_occupancy(one, t);

  for (Count p = 1; p <= 3; ++p) {
    LadderSpec spec{2, 1.0, 1.0, p, "X"};
    BuiltModel ladder = build_unary_ladder(spec);
    Ctmc ctmc = enumerate(ladder.crn, ladder.init);
    auto pi = transient(ctmc, t);
    std::size_t top = ladder.crn.species_index("X2");
    std::vector<double> dist(static_cast<std::size_t>(p) + 1, 0.0);
    for (std::size_t s = 0; s < ctmc.state_count(); ++s)
      dist[static_cast<std::size_t>(ctmc.states[s][top])] += pi[s];
    for (Count c = 0; c <= p; ++c) {
      double expect = binomial_pmf(p, pi_top, c);
      CAPTURE(p);
      CAPTURE(c);
      CHECK(std::fabs(dist[static_cast<std::size_t>(c)] - expect) < 1e-8);
    }
  }
}

TEST_CASE("csv export") {
  BuiltModel ladder = build_unary_ladder({1, 1.0, 2.0, 1, "X"});
  Ctmc ctmc = enumerate(ladder.crn, ladder.init);
  export_csv(ctmc, ladder.crn, "/tmp/crnwd_test_states.csv",
             "/tmp/crnwd_test_transitions.csv");
  std::ifstream st("/tmp/crnwd_test_states.csv");
  std::string header;
  std::getline(st, header);
  CHECK(header == "state,X0,X1");
}

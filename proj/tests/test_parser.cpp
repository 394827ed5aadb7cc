#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "crnwd/parser.hpp"
#include "crnwd/rng.hpp"

using namespace crnwd;

TEST_CASE("reaction grammar") {
  CrnDocument doc = parse_crn("A + B ->{2.5} 2 B + H\n");
  REQUIRE(doc.reactions.size() == 1);
  const auto& rxn = doc.reactions[0];
  CHECK(rxn.rate == 2.5);
  REQUIRE(rxn.reactants.size() == 2);
  CHECK(rxn.reactants[0] == std::pair<std::string, Count>{"A", 1});
  CHECK(rxn.reactants[1] == std::pair<std::string, Count>{"B", 1});
  REQUIRE(rxn.products.size() == 2);
  CHECK(rxn.products[0] == std::pair<std::string, Count>{"B", 2});
  CHECK(rxn.products[1] == std::pair<std::string, Count>{"H", 1});

  SUBCASE("omitted rate defaults to 1") {
    CrnDocument d2 = parse_crn("X1 -> X2");
    REQUIRE(d2.reactions.size() == 1);
    CHECK(d2.reactions[0].rate == 1.0);
  }

  SUBCASE("empty product side") {
    CrnDocument d2 = parse_crn("H ->{0.1} 0");
    REQUIRE(d2.reactions.size() == 1);
    CHECK(d2.reactions[0].products.empty());
    CHECK(d2.reactions[0].rate == 0.1);
  }

  SUBCASE("whitespace insensitive, comments, CRLF") {
    CrnDocument d2 = parse_crn("  A+B->{ 2.5 }2B+H # heartbeat\r\ninit H = 3\r\n");
    CHECK(d2.reactions.size() == 1);
    CHECK(d2.init.at("H") == 3);
  }

  SUBCASE("repeated species accumulate stoichiometry") {
    CrnDocument d2 = parse_crn("A + A -> B");
    CHECK(d2.reactions[0].reactants ==
          std::vector<std::pair<std::string, Count>>{{"A", 2}});
  }
}

TEST_CASE("directives") {
  CrnDocument doc = parse_crn(
      "species A B H\n"
      "A -> H\n"
      "init A = 800\n"
      "volume = 2.5\n");
  CHECK(doc.explicit_declarations);
  CHECK(doc.species == std::vector<std::string>{"A", "B", "H"});
  CHECK(doc.init.at("A") == 800);
  CHECK(doc.volume == 2.5);

  SUBCASE("duplicate init is an error") {
    CHECK_THROWS_AS(parse_crn("init A = 1\ninit A = 2\n"), ParseError);
  }
  SUBCASE("zero rate is an error") {
    CHECK_THROWS_AS(parse_crn("A ->{0} B\n"), ParseError);
  }
  SUBCASE("syntax errors carry line and column") {
    try {
      parse_crn("A -> B\nA -= B\n");
      FAIL("expected ParseError");
    } catch (const ParseError& err) {
      CHECK(err.line == 2);
      CHECK(err.column > 1);
    }
  }
  SUBCASE("strict mode rejects undeclared species") {
    CHECK_THROWS_AS(parse_crn("species A B\nA -> Q\n", true), ParseError);
    CHECK_NOTHROW(parse_crn("species A B\nA -> B\n", true));
    // Without declarations, strict mode has nothing to enforce.
    CHECK_NOTHROW(parse_crn("A -> Q\n", true));
  }
  SUBCASE("identifiers must not begin with a digit") {
    // "9X" lexes as stoichiometry 9 then species X.
    CrnDocument d2 = parse_crn("9X -> X");
    CHECK(d2.reactions[0].reactants ==
          std::vector<std::pair<std::string, Count>>{{"X", 9}});
  }
}

TEST_CASE("canonical serialization round-trips") {
  CrnDocument doc = parse_crn(
      "B + A ->{1} A + 2 B\n"
      "H ->{0.25} 0\n"
      "init B = 5\n");
  std::string canon = serialize_crn(doc);
  CHECK(canon.find("->{1}") != std::string::npos);  // explicit rate 1
  CHECK(canon.find(" 0\n") != std::string::npos);   // empty side printed as 0
  CrnDocument again = parse_crn(canon);
  CHECK(documents_equal(doc, again));
  // Canonical form is a fixed point.
  CHECK(serialize_crn(again) == canon);
}

namespace {

CrnDocument random_document(std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  CrnDocument doc;
  std::vector<std::string> names;
  std::size_t n_species = 1 + rng.below(6);
  for (std::size_t i = 0; i < n_species; ++i)
    names.push_back("S" + std::to_string(i));
  std::size_t n_rxn = 1 + rng.below(5);
  for (std::size_t r = 0; r < n_rxn; ++r) {
    CrnDocument::DocReaction rxn;
    std::size_t n_react = rng.below(3);
    for (std::size_t i = 0; i < n_react; ++i) {
      std::string nm = names[rng.below(names.size())];
      auto it = std::find_if(rxn.reactants.begin(), rxn.reactants.end(),
                             [&](const auto& t) { return t.first == nm; });
      if (it != rxn.reactants.end())
        it->second += 1;
      else
        rxn.reactants.emplace_back(nm, 1 + static_cast<Count>(rng.below(3)));
    }
    std::size_t n_prod = rng.below(3);
    for (std::size_t i = 0; i < n_prod; ++i) {
      std::string nm = names[rng.below(names.size())];
      auto it = std::find_if(rxn.products.begin(), rxn.products.end(),
                             [&](const auto& t) { return t.first == nm; });
      if (it != rxn.products.end())
        it->second += 1;
      else
        rxn.products.emplace_back(nm, 1 + static_cast<Count>(rng.below(3)));
    }
    rxn.rate = 0.001 + rng.uniform() * 99.0;
    doc.reactions.push_back(std::move(rxn));
  }
  for (const auto& nm : names)
    if (rng.uniform() < 0.5) doc.init[nm] = static_cast<Count>(rng.below(100));
  // Resolve the species list the same way the parser would.
  std::vector<std::string> used;
  auto note = [&](const std::string& nm) {
    if (std::find(used.begin(), used.end(), nm) == used.end())
      used.push_back(nm);
  };
  for (const auto& rxn : doc.reactions) {
    for (const auto& [nm, st] : rxn.reactants) note(nm);
    for (const auto& [nm, st] : rxn.products) note(nm);
  }
  for (const auto& [nm, c] : doc.init) note(nm);
  doc.species = used;
  doc.volume = rng.uniform() < 0.3 ? 1.0 : 0.5 + rng.uniform() * 10.0;
  return doc;
}

}  // namespace

TEST_CASE("parse(serialize(d)) equals d for random documents") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CrnDocument doc = random_document(seed);
    CrnDocument back = parse_crn(serialize_crn(doc));
    CAPTURE(seed);
    CHECK(documents_equal(doc, back));
  }
}

TEST_CASE("parsing is deterministic") {
  std::string text = "A + B ->{3.25} C\ninit A = 4\n";
  CrnDocument a = parse_crn(text);
  CrnDocument b = parse_crn(text);
  CHECK(documents_equal(a, b));
  CHECK(serialize_crn(a) == serialize_crn(b));
}

TEST_CASE("document lowering") {
  CrnDocument doc = parse_crn("A + B ->{2} 2 B\ninit A = 3\ninit B = 1\n");
  Crn crn = to_crn(doc);
  CHECK(crn.species_count() == 2);
  State init = initial_state(doc, crn);
  CHECK(init[crn.species_index("A")] == 3);
  CHECK(init[crn.species_index("B")] == 1);
  CHECK(propensity(crn, 0, init) == doctest::Approx(6.0));

  CrnDocument back = to_document(crn, init);
  CHECK(documents_equal(doc, back));
}

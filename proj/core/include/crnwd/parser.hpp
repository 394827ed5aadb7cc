#pragma once

#include <map>
#include <string>
#include <vector>

#include "crnwd/crn.hpp"

namespace crnwd {

// .crn text format.  Whitespace-insensitive, '#' starts a line comment.
//
//   species A B C                # optional explicit declaration
//   A + B ->{2.5} 2 B + H        # omitted {rate} means 1.0
//   H ->{0.1} 0                  # "0" is the empty side
//   init A = 800
//   volume = 1
//
// Identifiers are ASCII [A-Za-z_][A-Za-z0-9_]*.

struct CrnDocument {
  struct DocReaction {
    // Multisets keyed by species name, accumulated stoichiometry.
    std::vector<std::pair<std::string, Count>> reactants;
    std::vector<std::pair<std::string, Count>> products;
    double rate = 1.0;
  };

  std::vector<std::string> species;  // resolved, declaration/first-use order
  bool explicit_declarations = false;
  std::vector<DocReaction> reactions;
  std::map<std::string, Count> init;
  double volume = 1.0;
};

/// Parses .crn text.  With strict=true, species used but not declared in a
/// `species` line are an error.
CrnDocument parse_crn(const std::string& text, bool strict = false);

/// Canonical form: sorted species line, one reaction per line with explicit
/// rates, sorted init lines, volume line.  parse(serialize(d)) is
/// structurally equal to d.
std::string serialize_crn(const CrnDocument& doc);

/// Structural equality: species as sets, reactions in order (by name-keyed
/// contents), init map, volume.
bool documents_equal(const CrnDocument& a, const CrnDocument& b);

/// Lowers a document to the executable model plus its initial state.
Crn to_crn(const CrnDocument& doc);
State initial_state(const CrnDocument& doc, const Crn& crn);

/// Raises a model + initial state back to a document (used by builders to
/// emit .crn files).
CrnDocument to_document(const Crn& crn, const State& init);

CrnDocument load_crn_file(const std::string& path, bool strict = false);
void write_crn_file(const std::string& path, const CrnDocument& doc);

}  // namespace crnwd

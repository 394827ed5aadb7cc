#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crnwd/errors.hpp"

namespace crnwd {

using Count = std::int64_t;

struct Species {
  std::string name;
  std::size_t index = 0;
};

/// One mass-action reaction.  Reactant and product multisets are stored as
/// (species index, stoichiometry) pairs; a species listed on both sides with
/// equal stoichiometry is a catalyst.
struct Reaction {
  struct Term {
    std::size_t species = 0;
    Count stoich = 1;
  };
  std::vector<Term> reactants;  // may be empty (source reaction)
  std::vector<Term> products;   // may be empty (decay to nothing)
  double rate_constant = 1.0;

  Count order() const {
    Count n = 0;
    for (const auto& t : reactants) n += t.stoich;
    return n;
  }
};

/// Integer molecule-count vector, one entry per species in Crn order.
struct State {
  std::vector<Count> counts;

  bool operator==(const State& other) const = default;
  Count operator[](std::size_t i) const { return counts[i]; }
  std::size_t size() const { return counts.size(); }
};

/// A finite set of species plus mass-action reactions.  Immutable once built;
/// safe to share across threads.
class Crn {
 public:
  Crn() = default;
  Crn(std::vector<Species> species, std::vector<Reaction> reactions,
      double volume = 1.0);

  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  double volume() const { return volume_; }

  std::size_t species_count() const { return species_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }

  /// Index of a species by name; throws StructuralError if unknown.
  std::size_t species_index(const std::string& name) const;
  /// Like species_index but returns npos instead of throwing.
  std::size_t find_species(const std::string& name) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  double volume_ = 1.0;
};

/// Stochastic mass-action propensity of reaction `reaction_index` in `state`:
/// k * prod_s falling(count_s, stoich_s) / (V^(order-1) * prod_s stoich_s!).
/// Zero whenever some reactant count is below its stoichiometry.
double propensity(const Crn& crn, std::size_t reaction_index,
                  const State& state);

/// Fires the reaction once: reactants decremented, products incremented.
/// Requires every reactant count >= its stoichiometry.
State apply_reaction(const Crn& crn, std::size_t reaction_index,
                     const State& state);

/// Union of several CRNs: species deduplicated by name in first-appearance
/// order, reactions concatenated.  All inputs must share one volume.
Crn merge(const std::vector<Crn>& crns);

/// Builds a State from (name, count) pairs; unmentioned species get 0.
State make_state(const Crn& crn,
                 const std::vector<std::pair<std::string, Count>>& counts);

}  // namespace crnwd

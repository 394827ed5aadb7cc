#include "crnwd/crn.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace crnwd {

Crn::Crn(std::vector<Species> species, std::vector<Reaction> reactions,
         double volume)
    : species_(std::move(species)),
      reactions_(std::move(reactions)),
      volume_(volume) {
  if (!(volume_ > 0)) throw StructuralError("volume must be positive");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < species_.size(); ++i) {
    species_[i].index = i;
    if (species_[i].name.empty())
      throw StructuralError("species name must be nonempty");
    if (!seen.insert(species_[i].name).second)
      throw StructuralError("duplicate species name: " + species_[i].name);
  }
  for (const auto& rxn : reactions_) {
    if (!(rxn.rate_constant > 0))
      throw StructuralError("rate constant must be positive");
    for (const auto& side : {rxn.reactants, rxn.products}) {
      for (const auto& term : side) {
        if (term.species >= species_.size())
          throw StructuralError("reaction references unknown species index");
        if (term.stoich < 1)
          throw StructuralError("stoichiometry must be at least 1");
      }
    }
  }
}

std::size_t Crn::species_index(const std::string& name) const {
  std::size_t i = find_species(name);
  if (i == npos) throw StructuralError("unknown species: " + name);
  return i;
}

std::size_t Crn::find_species(const std::string& name) const {
  for (const auto& sp : species_)
    if (sp.name == name) return sp.index;
  return npos;
}

namespace {

double falling_factorial(Count n, Count k) {
  double f = 1.0;
  for (Count i = 0; i < k; ++i) f *= static_cast<double>(n - i);
  return f;
}

double factorial(Count k) {
  double f = 1.0;
  for (Count i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

double propensity(const Crn& crn, std::size_t reaction_index,
                  const State& state) {
  if (reaction_index >= crn.reaction_count())
    throw StructuralError("reaction index out of range");
  if (state.size() != crn.species_count())
    throw StructuralError("state length does not match species count");
  const Reaction& rxn = crn.reactions()[reaction_index];
  double a = rxn.rate_constant;
  for (const auto& term : rxn.reactants) {
    Count n = state[term.species];
    if (n < term.stoich) return 0.0;
    a *= falling_factorial(n, term.stoich) / factorial(term.stoich);
  }
  Count order = rxn.order();
  if (order > 1) a /= std::pow(crn.volume(), static_cast<double>(order - 1));
  if (!std::isfinite(a)) throw NumericalError("propensity is not finite");
  return a;
}

State apply_reaction(const Crn& crn, std::size_t reaction_index,
                     const State& state) {
  if (reaction_index >= crn.reaction_count())
    throw StructuralError("reaction index out of range");
  if (state.size() != crn.species_count())
    throw StructuralError("state length does not match species count");
  const Reaction& rxn = crn.reactions()[reaction_index];
  State next = state;
  for (const auto& term : rxn.reactants) {
    if (next.counts[term.species] < term.stoich)
      throw PreconditionError("insufficient reactant count for reaction");
    next.counts[term.species] -= term.stoich;
  }
  for (const auto& term : rxn.products) {
    Count& c = next.counts[term.species];
    if (c > std::numeric_limits<Count>::max() - term.stoich)
      throw NumericalError("species count overflow");
    c += term.stoich;
  }
  return next;
}

Crn merge(const std::vector<Crn>& crns) {
  if (crns.empty()) return Crn({}, {}, 1.0);
  double volume = crns.front().volume();
  for (const auto& crn : crns)
    if (crn.volume() != volume)
      throw CompositionError("cannot merge CRNs with different volumes");

  std::vector<Species> species;
  std::unordered_map<std::string, std::size_t> index_of;
  for (const auto& crn : crns) {
    for (const auto& sp : crn.species()) {
      if (index_of.emplace(sp.name, species.size()).second)
        species.push_back({sp.name, species.size()});
    }
  }
  std::vector<Reaction> reactions;
  for (const auto& crn : crns) {
    for (const auto& rxn : crn.reactions()) {
      Reaction remapped = rxn;
      for (auto& term : remapped.reactants)
        term.species = index_of.at(crn.species()[term.species].name);
      for (auto& term : remapped.products)
        term.species = index_of.at(crn.species()[term.species].name);
      reactions.push_back(std::move(remapped));
    }
  }
  return Crn(std::move(species), std::move(reactions), volume);
}

State make_state(const Crn& crn,
                 const std::vector<std::pair<std::string, Count>>& counts) {
  State s;
  s.counts.assign(crn.species_count(), 0);
  for (const auto& [name, count] : counts) {
    if (count < 0) throw StructuralError("negative initial count for " + name);
    s.counts[crn.species_index(name)] = count;
  }
  return s;
}

}  // namespace crnwd

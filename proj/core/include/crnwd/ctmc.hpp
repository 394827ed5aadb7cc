#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "crnwd/crn.hpp"

namespace crnwd {

struct ExploreCaps {
  std::uint64_t max_states = 2'000'000;
  std::vector<Count> per_species_cap;  // empty = uncapped
};

/// Explicit finite CTMC: states indexed in BFS discovery order, outgoing
/// transitions in CSR layout.  No self-loops; parallel transitions between a
/// state pair are rate-summed.  Immutable after construction; all queries are
/// read-only.
struct Ctmc {
  struct Edge {
    std::size_t to;
    double rate;
  };

  std::vector<State> states;
  std::vector<std::size_t> row_offsets;  // size state_count()+1
  std::vector<Edge> edges;
  std::vector<double> exit_rates;
  std::size_t initial_index = 0;
  bool truncated = false;

  std::size_t state_count() const { return states.size(); }
  std::span<const Edge> out_edges(std::size_t s) const {
    return {edges.data() + row_offsets[s], row_offsets[s + 1] - row_offsets[s]};
  }

  /// Assembles a Ctmc from an explicit transition list (used by the random
  /// model generator and by tests).  Self-loops are dropped, parallel edges
  /// summed.
  static Ctmc from_transitions(
      std::vector<State> states,
      const std::vector<std::tuple<std::size_t, std::size_t, double>>& transitions,
      std::size_t initial_index);
};

/// Breadth-first exploration of the reachable state space under caps.
/// A successor exceeding per_species_cap is dropped and the result is marked
/// truncated.  Exceeding max_states throws ExplorationError with the partial
/// count.
Ctmc enumerate(const Crn& crn, const State& init, const ExploreCaps& caps = {});

using StateMask = std::vector<char>;

/// Distribution over states at time t, starting from initial_index, computed
/// by uniformization with Poisson tail truncation at total mass 1e-10.
/// Throws PreconditionError on a truncated Ctmc unless accept_truncated.
std::vector<double> transient(const Ctmc& ctmc, double t,
                              bool accept_truncated = false);

/// Per-state bounded reachability P_s(eventually<=t target): target states
/// made absorbing, then a backward uniformization pass.
std::vector<double> reach_within(const Ctmc& ctmc, const StateMask& target,
                                 double t);

/// P(eventually<=t target) from the initial state.
double prob_eventually_bounded(const Ctmc& ctmc, const StateMask& target,
                               double t);

/// Per-state P_s(globally<=t inv) = 1 - P_s(eventually<=t !inv).
std::vector<double> globally_within(const Ctmc& ctmc, const StateMask& inv,
                                    double t);

double prob_globally_bounded(const Ctmc& ctmc, const StateMask& inv, double t);

/// Per-state weak until P_s(phi W psi) = 1 - P_s((phi&!psi) U (!phi&!psi)),
/// with the unbounded until solved on the embedded jump chain (direct sparse
/// factorization below 50k transient states, BiCGSTAB above).
std::vector<double> prob_weak_until(const Ctmc& ctmc, const StateMask& phi,
                                    const StateMask& psi);

/// Writes the state table and transition list as two CSV files.
void export_csv(const Ctmc& ctmc, const Crn& crn,
                const std::string& states_path,
                const std::string& transitions_path);

namespace detail {
/// Normalized Poisson(lambda_t) weights over [first, first+size), covering
/// all but tail_eps of the distribution (both tails combined).
struct PoissonWindow {
  std::size_t first = 0;
  std::vector<double> weights;
};
PoissonWindow poisson_window(double lambda_t, double tail_eps = 1e-10);
}  // namespace detail

}  // namespace crnwd

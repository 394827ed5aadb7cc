#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "crnwd/crn.hpp"
#include "crnwd/rng.hpp"

namespace crnwd {

enum class Termination { horizon, absorbed, event_cap };

/// One stochastic run: the fired-reaction log plus endpoints.  Replaying
/// `events` from `initial` with apply_reaction reproduces `final_state`.
struct Trajectory {
  struct Event {
    double time;
    std::size_t reaction_index;
  };
  std::vector<Event> events;
  State initial;
  State final_state;
  double end_time = 0.0;
  Termination terminated_by = Termination::horizon;
};

struct SimConfig {
  double t_end = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t max_events = 50'000'000;
  double sample_grid = 0.0;  // 0 = no resampling; used by the CSV writer
};

/// Gillespie direct method.  Bit-identical output for identical inputs:
/// xoshiro256** stream, inverse-CDF exponentials, cumulative-sum reaction
/// selection in list order with a strict less-than comparison.
Trajectory simulate(const Crn& crn, const State& init, const SimConfig& cfg);

/// Like simulate but with the RNG supplied, so callers can stitch segments
/// (e.g. fault injection) while keeping one deterministic stream.
Trajectory simulate_with_rng(const Crn& crn, const State& init, double t_begin,
                             const SimConfig& cfg, Xoshiro256StarStar& rng);

/// Seeded ensemble: run i uses seed mix64(cfg.master_seed, i).  Runs execute
/// in parallel (capped by CRNWD_THREADS) and return in run-index order.
std::vector<Trajectory> simulate_ensemble(const Crn& crn, const State& init,
                                          const SimConfig& cfg,
                                          std::size_t n_runs);

/// Streaming ensemble for large run counts: `consume(i, traj)` is called once
/// per run, from the worker thread that produced it.
void for_each_run(const Crn& crn, const State& init, const SimConfig& cfg,
                  std::size_t n_runs,
                  const std::function<void(std::size_t, const Trajectory&)>& consume);

/// Piecewise-constant left-sampling of a trajectory on a uniform grid:
/// the state at grid time t is the state after the last event with time <= t.
/// Grid points past the trajectory's end (absorbed runs) repeat the final
/// state.  horizon < 0 means sample up to traj.end_time.
std::vector<std::pair<double, State>> sample_on_grid(const Crn& crn,
                                                     const Trajectory& traj,
                                                     double step,
                                                     double horizon = -1.0);

/// Walks the trajectory's states in order (initial state first), calling
/// visit(time_entered, state) for each.  Returns early if visit returns false.
void replay(const Crn& crn, const Trajectory& traj,
            const std::function<bool(double, const State&)>& visit);

/// Worker thread count: min(hardware, CRNWD_THREADS if set).
unsigned worker_threads();

}  // namespace crnwd

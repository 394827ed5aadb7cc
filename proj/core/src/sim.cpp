#include "crnwd/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace crnwd {

unsigned worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CRNWD_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return hw;
}

Trajectory simulate_with_rng(const Crn& crn, const State& init, double t_begin,
                             const SimConfig& cfg, Xoshiro256StarStar& rng) {
  if (init.size() != crn.species_count())
    throw StructuralError("initial state does not match species count");

  Trajectory traj;
  traj.initial = init;
  State state = init;
  double t = t_begin;
  const std::size_t n_rxn = crn.reaction_count();
  std::vector<double> prop(n_rxn);

  traj.terminated_by = Termination::horizon;
  while (true) {
    double total = 0.0;
    for (std::size_t j = 0; j < n_rxn; ++j) {
      prop[j] = propensity(crn, j, state);
      total += prop[j];
    }
    if (!std::isfinite(total)) throw NumericalError("total propensity is not finite");
    if (total <= 0.0) {
      traj.terminated_by = Termination::absorbed;
      traj.end_time = t;
      break;
    }
    double dt = rng.exponential(total);
    if (t + dt > cfg.t_end) {
      traj.end_time = cfg.t_end;
      break;
    }
    t += dt;
    // Reaction selection: first j with draw < cumulative sum, in list order.
    double draw = rng.uniform() * total;
    std::size_t chosen = n_rxn - 1;
    double cum = 0.0;
    for (std::size_t j = 0; j < n_rxn; ++j) {
      cum += prop[j];
      if (draw < cum) {
        chosen = j;
        break;
      }
    }
    state = apply_reaction(crn, chosen, state);
    traj.events.push_back({t, chosen});
    if (traj.events.size() >= cfg.max_events) {
      traj.terminated_by = Termination::event_cap;
      traj.end_time = t;
      break;
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

Trajectory simulate(const Crn& crn, const State& init, const SimConfig& cfg) {
  if (!(cfg.t_end > 0)) throw ConfigError("t_end must be positive");
  if (cfg.max_events == 0) throw ConfigError("max_events must be positive");
  Xoshiro256StarStar rng(cfg.master_seed);
  return simulate_with_rng(crn, init, 0.0, cfg, rng);
}

void for_each_run(const Crn& crn, const State& init, const SimConfig& cfg,
                  std::size_t n_runs,
                  const std::function<void(std::size_t, const Trajectory&)>& consume) {
  if (n_runs == 0) return;
  unsigned n_threads = worker_threads();
  if (n_threads > n_runs) n_threads = static_cast<unsigned>(n_runs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n_runs) return;
        SimConfig run_cfg = cfg;
        run_cfg.master_seed = mix64(cfg.master_seed, i);
        Trajectory traj = simulate(crn, init, run_cfg);
        consume(i, traj);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

std::vector<Trajectory> simulate_ensemble(const Crn& crn, const State& init,
                                          const SimConfig& cfg,
                                          std::size_t n_runs) {
  std::vector<Trajectory> runs(n_runs);
  std::mutex store_mutex;
  for_each_run(crn, init, cfg, n_runs,
               [&](std::size_t i, const Trajectory& traj) {
                 std::lock_guard<std::mutex> lock(store_mutex);
                 runs[i] = traj;
               });
  return runs;
}

std::vector<std::pair<double, State>> sample_on_grid(const Crn& crn,
                                                     const Trajectory& traj,
                                                     double step,
                                                     double horizon) {
  if (!(step > 0)) throw ConfigError("grid step must be positive");
  if (horizon < 0) horizon = traj.end_time;
  std::vector<std::pair<double, State>> samples;
  State state = traj.initial;
  std::size_t next_event = 0;
  for (std::size_t k = 0;; ++k) {
    double t = static_cast<double>(k) * step;
    while (next_event < traj.events.size() && traj.events[next_event].time <= t) {
      state = apply_reaction(crn, traj.events[next_event].reaction_index, state);
      ++next_event;
    }
    samples.emplace_back(t, state);
    if (t >= horizon) break;
  }
  return samples;
}

void replay(const Crn& crn, const Trajectory& traj,
            const std::function<bool(double, const State&)>& visit) {
  State state = traj.initial;
  if (!visit(0.0, state)) return;
  for (const auto& ev : traj.events) {
    state = apply_reaction(crn, ev.reaction_index, state);
    if (!visit(ev.time, state)) return;
  }
}

}  // namespace crnwd

#include "crnwd/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace crnwd {

namespace {

struct StateHash {
  std::size_t operator()(const State& s) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Count c : s.counts) {
      h ^= static_cast<std::uint64_t>(c);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

constexpr double kDirectSolveLimit = 50'000;

}  // namespace

Ctmc Ctmc::from_transitions(
    std::vector<State> states,
    const std::vector<std::tuple<std::size_t, std::size_t, double>>& transitions,
    std::size_t initial_index) {
  const std::size_t n = states.size();
  std::vector<std::map<std::size_t, double>> rows(n);
  for (const auto& [from, to, rate] : transitions) {
    if (from >= n || to >= n) throw StructuralError("transition index out of range");
    if (!(rate > 0)) throw StructuralError("transition rate must be positive");
    if (from == to) continue;
    rows[from][to] += rate;
  }
  Ctmc ctmc;
  ctmc.states = std::move(states);
  ctmc.initial_index = initial_index;
  ctmc.row_offsets.reserve(n + 1);
  ctmc.row_offsets.push_back(0);
  ctmc.exit_rates.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& [to, rate] : rows[s]) {
      ctmc.edges.push_back({to, rate});
      ctmc.exit_rates[s] += rate;
    }
    ctmc.row_offsets.push_back(ctmc.edges.size());
  }
  return ctmc;
}

Ctmc enumerate(const Crn& crn, const State& init, const ExploreCaps& caps) {
  if (init.size() != crn.species_count())
    throw StructuralError("initial state does not match species count");
  if (!caps.per_species_cap.empty() &&
      caps.per_species_cap.size() != crn.species_count())
    throw StructuralError("per_species_cap length does not match species count");

  auto within_caps = [&](const State& s) {
    if (caps.per_species_cap.empty()) return true;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] > caps.per_species_cap[i]) return false;
    return true;
  };
  if (!within_caps(init))
    throw PreconditionError("initial state exceeds per-species caps");

  Ctmc ctmc;
  std::unordered_map<State, std::size_t, StateHash> index_of;
  index_of.reserve(1024);
  ctmc.states.push_back(init);
  index_of.emplace(init, 0);
  ctmc.row_offsets.push_back(0);

  // BFS: the worklist is the state vector itself, processed in index order,
  // which yields CSR rows in order.
  std::map<std::size_t, double> row;
  for (std::size_t s = 0; s < ctmc.states.size(); ++s) {
    row.clear();
    // Copy: ctmc.states may reallocate when a successor is appended.
    const State current = ctmc.states[s];
    for (std::size_t j = 0; j < crn.reaction_count(); ++j) {
      double a = propensity(crn, j, current);
      if (a <= 0.0) continue;
      State next = apply_reaction(crn, j, current);
      if (next == current) continue;  // net-zero reaction: no transition
      if (!within_caps(next)) {
        ctmc.truncated = true;
        continue;
      }
      auto [it, inserted] = index_of.emplace(next, ctmc.states.size());
      if (inserted) {
        if (ctmc.states.size() >= caps.max_states)
          throw ExplorationError("state space exceeds max_states cap",
                                 ctmc.states.size());
        ctmc.states.push_back(std::move(next));
      }
      row[it->second] += a;
    }
    double exit = 0.0;
    for (const auto& [to, rate] : row) {
      ctmc.edges.push_back({to, rate});
      exit += rate;
    }
    ctmc.exit_rates.push_back(exit);
    ctmc.row_offsets.push_back(ctmc.edges.size());
  }
  return ctmc;
}

namespace detail {

PoissonWindow poisson_window(double lambda_t, double tail_eps) {
  PoissonWindow win;
  if (lambda_t <= 0.0) {
    win.first = 0;
    win.weights = {1.0};
    return win;
  }
  const double log_lt = std::log(lambda_t);
  auto log_pmf = [&](double n) {
    return n * log_lt - lambda_t - std::lgamma(n + 1.0);
  };
  const std::size_t mode = static_cast<std::size_t>(lambda_t);
  double total = std::exp(log_pmf(static_cast<double>(mode)));
  std::size_t lo = mode, hi = mode;
  std::vector<double> left, right;  // weights below / above the mode
  while (total < 1.0 - tail_eps) {
    double wl = lo > 0 ? std::exp(log_pmf(static_cast<double>(lo - 1))) : 0.0;
    double wh = std::exp(log_pmf(static_cast<double>(hi + 1)));
    if (wl >= wh && lo > 0) {
      left.push_back(wl);
      total += wl;
      --lo;
    } else {
      right.push_back(wh);
      total += wh;
      ++hi;
    }
    if (hi - lo > 100'000'000)
      throw NumericalError("Poisson window failed to converge");
  }
  win.first = lo;
  win.weights.reserve(hi - lo + 1);
  for (auto it = left.rbegin(); it != left.rend(); ++it) win.weights.push_back(*it);
  win.weights.push_back(std::exp(log_pmf(static_cast<double>(mode))));
  win.weights.insert(win.weights.end(), right.begin(), right.end());
  // Renormalize so constant functions are propagated exactly.
  for (double& w : win.weights) w /= total;
  return win;
}

}  // namespace detail

namespace {

double max_exit_rate(const Ctmc& ctmc) {
  double m = 0.0;
  for (double r : ctmc.exit_rates) m = std::max(m, r);
  return m;
}

void clamp_probabilities(std::vector<double>& v, double tol = 1e-12) {
  for (double& x : v) {
    if (x < 0.0) {
      if (x < -tol) throw NumericalError("probability below tolerance");
      x = 0.0;
    }
    if (x > 1.0) x = 1.0;
  }
}

}  // namespace

std::vector<double> transient(const Ctmc& ctmc, double t, bool accept_truncated) {
  if (t < 0) throw ConfigError("transient time must be nonnegative");
  if (ctmc.truncated && !accept_truncated)
    throw PreconditionError(
        "transient on a truncated CTMC (pass accept_truncated for lower-bound "
        "semantics)");
  const std::size_t n = ctmc.state_count();
  std::vector<double> pi(n, 0.0);
  pi[ctmc.initial_index] = 1.0;

  const double lambda = max_exit_rate(ctmc);
  if (lambda <= 0.0 || t == 0.0) return pi;

  auto win = detail::poisson_window(lambda * t);
  std::vector<double> acc(n, 0.0), next(n);
  for (std::size_t k = 0; k < win.first + win.weights.size(); ++k) {
    if (k >= win.first) {
      double w = win.weights[k - win.first];
      for (std::size_t s = 0; s < n; ++s) acc[s] += w * pi[s];
    }
    if (k + 1 == win.first + win.weights.size()) break;
    // next = pi * P with P = I + Q/lambda (row-scatter product).
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      double mass = pi[s];
      if (mass == 0.0) continue;
      next[s] += mass * (1.0 - ctmc.exit_rates[s] / lambda);
      for (const auto& e : ctmc.out_edges(s)) next[e.to] += mass * (e.rate / lambda);
    }
    pi.swap(next);
  }
  clamp_probabilities(acc);
  return acc;
}

std::vector<double> reach_within(const Ctmc& ctmc, const StateMask& target,
                                 double t) {
  if (t < 0) throw ConfigError("time bound must be nonnegative");
  const std::size_t n = ctmc.state_count();
  if (target.size() != n) throw StructuralError("target mask size mismatch");

  std::vector<double> v(n);
  for (std::size_t s = 0; s < n; ++s) v[s] = target[s] ? 1.0 : 0.0;

  const double lambda = max_exit_rate(ctmc);
  if (lambda <= 0.0 || t == 0.0) return v;

  auto win = detail::poisson_window(lambda * t);
  std::vector<double> acc(n, 0.0), next(n);
  for (std::size_t k = 0; k < win.first + win.weights.size(); ++k) {
    if (k >= win.first) {
      double w = win.weights[k - win.first];
      for (std::size_t s = 0; s < n; ++s) acc[s] += w * v[s];
    }
    if (k + 1 == win.first + win.weights.size()) break;
    // next = P_abs * v, target rows absorbing.
    for (std::size_t s = 0; s < n; ++s) {
      if (target[s]) {
        next[s] = v[s];
        continue;
      }
      double x = v[s] * (1.0 - ctmc.exit_rates[s] / lambda);
      for (const auto& e : ctmc.out_edges(s)) x += (e.rate / lambda) * v[e.to];
      next[s] = x;
    }
    v.swap(next);
  }
  // Absorbing target states are certain regardless of window rounding.
  for (std::size_t s = 0; s < n; ++s)
    if (target[s]) acc[s] = 1.0;
  clamp_probabilities(acc);
  return acc;
}

double prob_eventually_bounded(const Ctmc& ctmc, const StateMask& target,
                               double t) {
  return reach_within(ctmc, target, t)[ctmc.initial_index];
}

std::vector<double> globally_within(const Ctmc& ctmc, const StateMask& inv,
                                    double t) {
  StateMask bad(inv.size());
  for (std::size_t s = 0; s < inv.size(); ++s) bad[s] = inv[s] ? 0 : 1;
  std::vector<double> escape = reach_within(ctmc, bad, t);
  for (double& x : escape) x = 1.0 - x;
  clamp_probabilities(escape, 1e-9);
  return escape;
}

double prob_globally_bounded(const Ctmc& ctmc, const StateMask& inv, double t) {
  return globally_within(ctmc, inv, t)[ctmc.initial_index];
}

std::vector<double> prob_weak_until(const Ctmc& ctmc, const StateMask& phi,
                                    const StateMask& psi) {
  const std::size_t n = ctmc.state_count();
  if (phi.size() != n || psi.size() != n)
    throw StructuralError("predicate mask size mismatch");

  // x = P((phi & !psi) U (!phi & !psi)) on the embedded jump chain; the
  // weak-until probability is 1 - x.
  auto is_bad = [&](std::size_t s) { return !phi[s] && !psi[s]; };
  auto in_region = [&](std::size_t s) {
    return phi[s] && !psi[s] && ctmc.exit_rates[s] > 0.0;
  };

  // Restrict the solve to region states that can actually reach a bad state
  // without leaving the region; everywhere else x = 0.  This also keeps the
  // system nonsingular (closed recurrent classes inside the region drop out).
  std::vector<char> can_reach_bad(n, 0);
  {
    std::vector<std::vector<std::size_t>> rev(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (!in_region(s)) continue;
      for (const auto& e : ctmc.out_edges(s)) rev[e.to].push_back(s);
    }
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s)
      if (is_bad(s)) stack.push_back(s);
    std::vector<char> seen(n, 0);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t prev : rev[v])
        if (!seen[prev]) {
          seen[prev] = 1;
          can_reach_bad[prev] = 1;
          stack.push_back(prev);
        }
    }
  }

  std::vector<std::size_t> solve_index(n, static_cast<std::size_t>(-1));
  std::vector<std::size_t> solve_states;
  for (std::size_t s = 0; s < n; ++s) {
    if (in_region(s) && can_reach_bad[s]) {
      solve_index[s] = solve_states.size();
      solve_states.push_back(s);
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    if (is_bad(s)) x[s] = 1.0;

  const std::size_t m = solve_states.size();
  if (m > 0) {
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(m),
                                  static_cast<Eigen::Index>(m));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t row = 0; row < m; ++row) {
      std::size_t s = solve_states[row];
      double exit = ctmc.exit_rates[s];
      triplets.emplace_back(row, row, 1.0);
      for (const auto& e : ctmc.out_edges(s)) {
        double p = e.rate / exit;
        if (solve_index[e.to] != static_cast<std::size_t>(-1)) {
          triplets.emplace_back(static_cast<Eigen::Index>(row),
                                static_cast<Eigen::Index>(solve_index[e.to]), -p);
        } else if (is_bad(e.to)) {
          b[static_cast<Eigen::Index>(row)] += p;
        }
        // psi successors and absorbing-good successors contribute 0.
      }
    }
    A.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::VectorXd sol;
    if (static_cast<double>(m) < kDirectSolveLimit) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
      solver.analyzePattern(A);
      solver.factorize(A);
      if (solver.info() != Eigen::Success)
        throw NumericalError("weak-until linear system is singular");
      sol = solver.solve(b);
    } else {
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> solver;
      solver.setTolerance(1e-10);
      solver.compute(A);
      sol = solver.solve(b);
      if (solver.info() != Eigen::Success)
        throw NumericalError("weak-until iterative solve did not converge");
    }
    for (std::size_t row = 0; row < m; ++row)
      x[solve_states[row]] = sol[static_cast<Eigen::Index>(row)];
  }

  std::vector<double> w(n);
  for (std::size_t s = 0; s < n; ++s) w[s] = 1.0 - x[s];
  clamp_probabilities(w, 1e-9);
  return w;
}

void export_csv(const Ctmc& ctmc, const Crn& crn,
                const std::string& states_path,
                const std::string& transitions_path) {
  std::ofstream st(states_path, std::ios::binary);
  if (!st) throw ConfigError("cannot write " + states_path);
  st << "state";
  for (const auto& sp : crn.species()) st << ',' << sp.name;
  st << '\n';
  for (std::size_t s = 0; s < ctmc.state_count(); ++s) {
    st << s;
    for (Count c : ctmc.states[s].counts) st << ',' << c;
    st << '\n';
  }

  std::ofstream tr(transitions_path, std::ios::binary);
  if (!tr) throw ConfigError("cannot write " + transitions_path);
  tr << "from,to,rate\n";
  char buf[64];
  for (std::size_t s = 0; s < ctmc.state_count(); ++s) {
    for (const auto& e : ctmc.out_edges(s)) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.rate);
      tr << s << ',' << e.to << ',' << buf << '\n';
    }
  }
}

}  // namespace crnwd

#include "crnwd/verify.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

namespace crnwd {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

std::size_t EvalContext::species_index(const std::string& name) const {
  if (!crn) throw StructuralError("formula evaluation needs a model context");
  if (predicates) return predicates->resolve_species(*crn, name);
  return crn->species_index(name);
}

bool EvalContext::named(const std::string& name, const State& state) const {
  if (!predicates)
    throw StructuralError("named predicate '" + name +
                          "' used without a predicate context");
  return predicates->evaluate(name, state);
}

namespace {

using csl::Cmp;
using csl::Formula;

// Numerical slack when comparing computed probabilities against bounds;
// uniformization truncates tails at 1e-10.
constexpr double kProbSlack = 1e-9;

bool compare(double lhs, Cmp cmp, double rhs) {
  switch (cmp) {
    case Cmp::lt: return lhs < rhs;
    case Cmp::le: return lhs <= rhs;
    case Cmp::eq: return lhs == rhs;
    case Cmp::ne: return lhs != rhs;
    case Cmp::ge: return lhs >= rhs;
    case Cmp::gt: return lhs > rhs;
  }
  return false;
}

bool eval_atom(const Formula& f, const State& state, const EvalContext& ctx) {
  switch (f.kind) {
    case Formula::Kind::constant:
      return f.value;
    case Formula::Kind::named_atom:
      return ctx.named(f.name, state);
    case Formula::Kind::linear_atom: {
      double sum = 0.0;
      for (const auto& [coeff, name] : f.terms)
        sum += static_cast<double>(coeff) *
               static_cast<double>(state[ctx.species_index(name)]);
      return compare(sum, f.cmp, f.rhs);
    }
    default:
      throw StructuralError("not a state atom");
  }
}

}  // namespace

bool evaluate_state_formula(const Formula& f, const State& state,
                            const EvalContext& ctx) {
  switch (f.kind) {
    case Formula::Kind::constant:
    case Formula::Kind::named_atom:
    case Formula::Kind::linear_atom:
      return eval_atom(f, state, ctx);
    case Formula::Kind::negation:
      return !evaluate_state_formula(*f.a, state, ctx);
    case Formula::Kind::conjunction:
      return evaluate_state_formula(*f.a, state, ctx) &&
             evaluate_state_formula(*f.b, state, ctx);
    case Formula::Kind::disjunction:
      return evaluate_state_formula(*f.a, state, ctx) ||
             evaluate_state_formula(*f.b, state, ctx);
    case Formula::Kind::implication:
      return !evaluate_state_formula(*f.a, state, ctx) ||
             evaluate_state_formula(*f.b, state, ctx);
    default:
      throw StructuralError(
          "probabilistic operator in a plain state formula context");
  }
}

namespace {

// Bottom-up exact labeling with per-node memoization.
struct ExactLabeler {
  const Ctmc& ctmc;
  const EvalContext& ctx;
  std::map<const Formula*, StateMask> cache;
  std::vector<std::pair<const Formula*, std::vector<double>>> prob_vectors;
  bool saw_globally_all = false;

  const StateMask& label(const Formula& f) {
    auto it = cache.find(&f);
    if (it != cache.end()) return it->second;
    StateMask mask = compute(f);
    return cache.emplace(&f, std::move(mask)).first->second;
  }

  StateMask compute(const Formula& f) {
    const std::size_t n = ctmc.state_count();
    StateMask mask(n, 0);
    switch (f.kind) {
      case Formula::Kind::constant:
      case Formula::Kind::named_atom:
      case Formula::Kind::linear_atom:
        for (std::size_t s = 0; s < n; ++s)
          mask[s] = eval_atom(f, ctmc.states[s], ctx) ? 1 : 0;
        return mask;
      case Formula::Kind::negation: {
        const StateMask& a = label(*f.a);
        for (std::size_t s = 0; s < n; ++s) mask[s] = a[s] ? 0 : 1;
        return mask;
      }
      case Formula::Kind::conjunction: {
        const StateMask& a = label(*f.a);
        const StateMask& b = label(*f.b);
        for (std::size_t s = 0; s < n; ++s) mask[s] = (a[s] && b[s]) ? 1 : 0;
        return mask;
      }
      case Formula::Kind::disjunction: {
        const StateMask& a = label(*f.a);
        const StateMask& b = label(*f.b);
        for (std::size_t s = 0; s < n; ++s) mask[s] = (a[s] || b[s]) ? 1 : 0;
        return mask;
      }
      case Formula::Kind::implication: {
        const StateMask& a = label(*f.a);
        const StateMask& b = label(*f.b);
        for (std::size_t s = 0; s < n; ++s) mask[s] = (!a[s] || b[s]) ? 1 : 0;
        return mask;
      }
      case Formula::Kind::prob_eventually: {
        std::vector<double> p = reach_within(ctmc, label(*f.a), f.time_bound);
        for (std::size_t s = 0; s < n; ++s)
          mask[s] = p[s] >= f.prob_bound - kProbSlack ? 1 : 0;
        prob_vectors.emplace_back(&f, std::move(p));
        return mask;
      }
      case Formula::Kind::prob_globally: {
        std::vector<double> p = globally_within(ctmc, label(*f.a), f.time_bound);
        for (std::size_t s = 0; s < n; ++s)
          mask[s] = p[s] >= f.prob_bound - kProbSlack ? 1 : 0;
        prob_vectors.emplace_back(&f, std::move(p));
        return mask;
      }
      case Formula::Kind::prob_weak_until: {
        std::vector<double> p = prob_weak_until(ctmc, label(*f.a), label(*f.b));
        for (std::size_t s = 0; s < n; ++s)
          mask[s] = p[s] >= f.prob_bound - kProbSlack ? 1 : 0;
        prob_vectors.emplace_back(&f, std::move(p));
        return mask;
      }
      case Formula::Kind::globally_all: {
        saw_globally_all = true;
        const StateMask& a = label(*f.a);
        bool all = true;
        for (std::size_t s = 0; s < n; ++s)
          if (!a[s]) {
            all = false;
            break;
          }
        std::fill(mask.begin(), mask.end(), all ? 1 : 0);
        std::vector<double> p(n, all ? 1.0 : 0.0);
        prob_vectors.emplace_back(&f, std::move(p));
        return mask;
      }
    }
    throw StructuralError("unhandled formula node");
  }
};

}  // namespace

StateMask label_states(const Ctmc& ctmc, const Formula& formula,
                       const EvalContext& ctx) {
  ExactLabeler labeler{ctmc, ctx};
  return labeler.label(formula);
}

VerificationResult evaluate_exact(const Ctmc& ctmc, const Formula& formula,
                                  std::size_t state, const EvalContext& ctx) {
  if (state >= ctmc.state_count())
    throw StructuralError("query state index out of range");
  ExactLabeler labeler{ctmc, ctx};
  const StateMask& root = labeler.label(formula);

  VerificationResult result;
  result.mode = CheckMode::exact;
  result.truncated = ctmc.truncated;
  for (const auto& [node, vec] : labeler.prob_vectors) {
    ProbRecord rec;
    rec.formula = csl::to_string(*node);
    rec.value = vec[state];
    result.probs.push_back(std::move(rec));
  }
  if (ctmc.truncated && labeler.saw_globally_all) {
    result.verdict = Verdict::undecided;
    result.note =
        "GloballyAll over a truncated state space cannot be decided; "
        "unexplored states may violate the formula";
    return result;
  }
  result.verdict = root[state] ? Verdict::holds : Verdict::fails;
  if (ctmc.truncated)
    result.note = "probabilities are lower bounds (truncated state space)";
  return result;
}

namespace {

// ---------------------------------------------------------------------------
// Statistical checking
// ---------------------------------------------------------------------------

struct StatEngine {
  const Crn& crn;
  const StatConfig& cfg;
  const EvalContext& ctx;
  bool approximate = false;

  // Evaluates a state formula at `state`, re-simulating from the state for
  // nested probabilistic operators (point estimates, no intervals).
  bool state_holds(const Formula& f, const State& state, std::uint64_t seed,
                   std::uint64_t* checkpoint) {
    switch (f.kind) {
      case Formula::Kind::constant:
      case Formula::Kind::named_atom:
      case Formula::Kind::linear_atom:
        return eval_atom(f, state, ctx);
      case Formula::Kind::negation:
        return !state_holds(*f.a, state, seed, checkpoint);
      case Formula::Kind::conjunction:
        return state_holds(*f.a, state, seed, checkpoint) &&
               state_holds(*f.b, state, seed, checkpoint);
      case Formula::Kind::disjunction:
        return state_holds(*f.a, state, seed, checkpoint) ||
               state_holds(*f.b, state, seed, checkpoint);
      case Formula::Kind::implication:
        return !state_holds(*f.a, state, seed, checkpoint) ||
               state_holds(*f.b, state, seed, checkpoint);
      case Formula::Kind::prob_eventually:
      case Formula::Kind::prob_globally:
      case Formula::Kind::prob_weak_until: {
        approximate = true;
        std::uint64_t base = mix64(seed, 0x5EED0000ULL + (*checkpoint)++);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < cfg.nested_subruns; ++i)
          if (path_holds(f, state, mix64(base, i))) ++hits;
        double estimate = static_cast<double>(hits) /
                          static_cast<double>(cfg.nested_subruns);
        return estimate >= f.prob_bound;
      }
      case Formula::Kind::globally_all: {
        // Under-approximation: check the body along one fresh run.
        approximate = true;
        std::uint64_t base = mix64(seed, 0xA110000ULL + (*checkpoint)++);
        return scan_globally(*f.a, state, base);
      }
    }
    throw StructuralError("unhandled formula node");
  }

  // Simulates one path from `state` and decides the path event of f.
  bool path_holds(const Formula& f, const State& init, std::uint64_t seed) {
    double bound = f.kind == Formula::Kind::prob_weak_until ? cfg.horizon
                                                            : f.time_bound;
    if (f.kind == Formula::Kind::prob_weak_until) approximate = true;

    Xoshiro256StarStar rng(seed);
    State state = init;
    double t = 0.0;
    std::uint64_t checkpoint = 0;
    std::uint64_t events = 0;

    auto decide_here = [&](const State& s) -> std::optional<bool> {
      switch (f.kind) {
        case Formula::Kind::prob_eventually:
          if (state_holds(*f.a, s, seed, &checkpoint)) return true;
          return std::nullopt;
        case Formula::Kind::prob_globally:
          if (!state_holds(*f.a, s, seed, &checkpoint)) return false;
          return std::nullopt;
        case Formula::Kind::prob_weak_until:
          if (state_holds(*f.b, s, seed, &checkpoint)) return true;
          if (!state_holds(*f.a, s, seed, &checkpoint)) return false;
          return std::nullopt;
        default:
          throw StructuralError("not a path operator");
      }
    };

    if (auto v = decide_here(state)) return *v;
    const std::size_t n_rxn = crn.reaction_count();
    std::vector<double> prop(n_rxn);
    for (;;) {
      double total = 0.0;
      for (std::size_t j = 0; j < n_rxn; ++j) {
        prop[j] = propensity(crn, j, state);
        total += prop[j];
      }
      if (total <= 0.0) {
        // Absorbed: the current state persists forever.
        switch (f.kind) {
          case Formula::Kind::prob_eventually: return false;
          case Formula::Kind::prob_globally: return true;
          case Formula::Kind::prob_weak_until: return true;  // phi forever
          default: return false;
        }
      }
      double dt = rng.exponential(total);
      if (t + dt > bound) {
        // No further state change inside the window.
        return f.kind != Formula::Kind::prob_eventually;
      }
      t += dt;
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
      if (++events >= cfg.max_events)
        throw NumericalError("statistical run exceeded max_events");
      if (auto v = decide_here(state)) return *v;
    }
  }

  // Walks one run within the horizon checking the body at every visited
  // state; false as soon as a counterexample state is seen.
  bool scan_globally(const Formula& body, const State& init, std::uint64_t seed) {
    Xoshiro256StarStar rng(seed);
    State state = init;
    double t = 0.0;
    std::uint64_t checkpoint = 0;
    std::uint64_t events = 0;
    if (!state_holds(body, state, seed, &checkpoint)) return false;
    const std::size_t n_rxn = crn.reaction_count();
    std::vector<double> prop(n_rxn);
    for (;;) {
      double total = 0.0;
      for (std::size_t j = 0; j < n_rxn; ++j) {
        prop[j] = propensity(crn, j, state);
        total += prop[j];
      }
      if (total <= 0.0) return true;
      double dt = rng.exponential(total);
      if (t + dt > cfg.horizon) return true;
      t += dt;
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
      if (++events >= cfg.max_events)
        throw NumericalError("statistical run exceeded max_events");
      if (!state_holds(body, state, seed, &checkpoint)) return false;
    }
  }
};

Verdict kleene_not(Verdict v) {
  if (v == Verdict::holds) return Verdict::fails;
  if (v == Verdict::fails) return Verdict::holds;
  return Verdict::undecided;
}

Verdict kleene_and(Verdict a, Verdict b) {
  if (a == Verdict::fails || b == Verdict::fails) return Verdict::fails;
  if (a == Verdict::holds && b == Verdict::holds) return Verdict::holds;
  return Verdict::undecided;
}

Verdict kleene_or(Verdict a, Verdict b) {
  if (a == Verdict::holds || b == Verdict::holds) return Verdict::holds;
  if (a == Verdict::fails && b == Verdict::fails) return Verdict::fails;
  return Verdict::undecided;
}

}  // namespace

double estimate_eventually(const Crn& crn, const State& init,
                           const Formula& target, double bound,
                           std::size_t runs, std::uint64_t seed,
                           const EvalContext& ctx, std::uint64_t* successes) {
  StatConfig cfg;
  cfg.horizon = bound;
  Formula wrapper;
  wrapper.kind = Formula::Kind::prob_eventually;
  wrapper.time_bound = bound;
  wrapper.prob_bound = 0.0;
  wrapper.a = std::make_shared<const Formula>(target);

  std::atomic<std::uint64_t> hits{0};
  std::atomic<std::size_t> next{0};
  unsigned n_threads = worker_threads();
  auto work = [&]() {
    StatEngine local{crn, cfg, ctx};
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= runs) return;
      if (local.path_holds(wrapper, init, mix64(seed, i))) hits.fetch_add(1);
    }
  };
  if (n_threads <= 1 || runs < 256) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (successes) *successes = hits.load();
  return static_cast<double>(hits.load()) / static_cast<double>(runs);
}

VerificationResult evaluate_statistical(const Crn& crn, const State& init,
                                        const Formula& formula,
                                        const StatConfig& cfg,
                                        const EvalContext& ctx) {
  if (cfg.runs == 0) throw ConfigError("statistical checking needs runs > 0");
  if (cfg.horizon < csl::max_time_bound(formula))
    throw ConfigError(
        "horizon is smaller than the formula's largest time bound");

  VerificationResult result;
  result.mode = CheckMode::statistical;

  // Recursive top-level evaluation: boolean structure decomposes with
  // three-valued logic, probabilistic operators get run ensembles.
  auto eval_top = [&](auto&& self, const Formula& f) -> Verdict {
    switch (f.kind) {
      case Formula::Kind::constant:
      case Formula::Kind::named_atom:
      case Formula::Kind::linear_atom:
        return eval_atom(f, init, ctx) ? Verdict::holds : Verdict::fails;
      case Formula::Kind::negation:
        return kleene_not(self(self, *f.a));
      case Formula::Kind::conjunction:
        return kleene_and(self(self, *f.a), self(self, *f.b));
      case Formula::Kind::disjunction:
        return kleene_or(self(self, *f.a), self(self, *f.b));
      case Formula::Kind::implication:
        return kleene_or(kleene_not(self(self, *f.a)), self(self, *f.b));
      case Formula::Kind::prob_eventually:
      case Formula::Kind::prob_globally:
      case Formula::Kind::prob_weak_until: {
        std::atomic<std::uint64_t> hits{0};
        std::atomic<std::size_t> next{0};
        std::atomic<bool> any_approx{false};
        unsigned n_threads = worker_threads();
        std::exception_ptr error;
        std::mutex error_mutex;
        auto work = [&]() {
          try {
            StatEngine local{crn, cfg, ctx};
            for (;;) {
              std::size_t i = next.fetch_add(1);
              if (i >= cfg.runs) break;
              if (local.path_holds(f, init, mix64(cfg.seed, i)))
                hits.fetch_add(1);
            }
            if (local.approximate) any_approx.store(true);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        };
        if (n_threads <= 1 || cfg.runs < 64) {
          work();
        } else {
          std::vector<std::thread> pool;
          for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(work);
          for (auto& th : pool) th.join();
        }
        if (error) std::rethrow_exception(error);
        if (any_approx.load()) result.approximate = true;

        std::uint64_t h = hits.load();
        double estimate = static_cast<double>(h) / static_cast<double>(cfg.runs);
        Interval ci = wilson_interval(h, cfg.runs, cfg.alpha);
        ProbRecord rec;
        rec.formula = csl::to_string(f);
        rec.value = estimate;
        rec.has_ci = true;
        rec.ci = ci;
        result.probs.push_back(std::move(rec));

        if (f.prob_bound <= 0.0) return Verdict::holds;  // vacuous bound
        if (ci.low > f.prob_bound) return Verdict::holds;
        if (ci.high < f.prob_bound) return Verdict::fails;
        return Verdict::undecided;
      }
      case Formula::Kind::globally_all: {
        // Under-approximation: scan every visited state of every run.
        result.approximate = true;
        std::atomic<bool> violated{false};
        std::atomic<std::size_t> next{0};
        unsigned n_threads = worker_threads();
        std::exception_ptr error;
        std::mutex error_mutex;
        auto work = [&]() {
          try {
            StatEngine local{crn, cfg, ctx};
            for (;;) {
              std::size_t i = next.fetch_add(1);
              if (i >= cfg.runs || violated.load()) break;
              if (!local.scan_globally(*f.a, init, mix64(cfg.seed, i)))
                violated.store(true);
            }
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        };
        if (n_threads <= 1 || cfg.runs < 64) {
          work();
        } else {
          std::vector<std::thread> pool;
          for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(work);
          for (auto& th : pool) th.join();
        }
        if (error) std::rethrow_exception(error);
        return violated.load() ? Verdict::fails : Verdict::holds;
      }
    }
    throw StructuralError("unhandled formula node");
  };

  result.verdict = eval_top(eval_top, formula);
  if (result.approximate && result.note.empty())
    result.note =
        "statistical approximation (nested operators via checkpoint "
        "re-simulation; unbounded operators on a bounded horizon)";
  return result;
}

}  // namespace crnwd

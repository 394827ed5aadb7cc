#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crnwd/components.hpp"
#include "crnwd/csl.hpp"
#include "crnwd/ctmc.hpp"
#include "crnwd/sim.hpp"
#include "crnwd/stats.hpp"

namespace crnwd {

enum class Verdict { holds, fails, undecided };
enum class CheckMode { exact, statistical };

const char* verdict_name(Verdict v);

/// Species-name + named-predicate resolution for formula atoms.
struct EvalContext {
  const Crn* crn = nullptr;
  const PredicateSet* predicates = nullptr;  // optional

  std::size_t species_index(const std::string& name) const;
  bool named(const std::string& name, const State& state) const;
};

struct ProbRecord {
  std::string formula;  // printed subformula
  double value = 0.0;   // probability at the queried state
  bool has_ci = false;
  Interval ci{0.0, 1.0};
};

struct VerificationResult {
  Verdict verdict = Verdict::undecided;
  CheckMode mode = CheckMode::exact;
  bool truncated = false;    // lower-bound semantics propagated from the Ctmc
  bool approximate = false;  // statistical nesting / horizon surrogates
  std::string note;
  std::vector<ProbRecord> probs;  // one per probabilistic subformula
};

/// Exact bottom-up labeling on an explicit CTMC.  GloballyAll means "at
/// every stored state"; on a truncated CTMC a GloballyAll formula yields
/// verdict undecided.
VerificationResult evaluate_exact(const Ctmc& ctmc, const csl::Formula& formula,
                                  std::size_t state, const EvalContext& ctx);

/// Evaluates a plain state formula (no probabilistic operators) at one state.
bool evaluate_state_formula(const csl::Formula& formula, const State& state,
                            const EvalContext& ctx);

/// Labels every CTMC state with a formula's truth value (exact semantics).
StateMask label_states(const Ctmc& ctmc, const csl::Formula& formula,
                       const EvalContext& ctx);

struct StatConfig {
  std::size_t runs = 10'000;
  double horizon = 0.0;  // must cover the formula's largest time bound
  std::uint64_t seed = 0;
  double alpha = 0.01;             // CI significance (99% default)
  std::size_t nested_subruns = 200;  // checkpoint re-simulation fan-out
  std::uint64_t max_events = 50'000'000;
};

/// Monte Carlo checking.  Outer bounded operators get a Wilson interval and
/// a holds/fails verdict only when the bound falls outside it; nested
/// probabilistic operators are estimated by checkpoint re-simulation and the
/// result is flagged approximate.  Unbounded weak until uses the horizon as
/// a surrogate (flagged).
VerificationResult evaluate_statistical(const Crn& crn, const State& init,
                                        const csl::Formula& formula,
                                        const StatConfig& cfg,
                                        const EvalContext& ctx);

/// Fraction of seeded runs whose path satisfies eventually<=bound(target),
/// stopping each run at first satisfaction.  The workhorse behind both the
/// statistical checker and its tests.
double estimate_eventually(const Crn& crn, const State& init,
                           const csl::Formula& target, double bound,
                           std::size_t runs, std::uint64_t seed,
                           const EvalContext& ctx,
                           std::uint64_t* successes = nullptr);

}  // namespace crnwd

#pragma once

#include <cstdint>
#include <string>

#include "crnwd/ctmc.hpp"
#include "crnwd/params.hpp"
#include "crnwd/verify.hpp"

namespace crnwd {

/// The proof-layer lemma schemas (3.6-3.12), checked empirically: a
/// counterexample is a state where every premise holds and the conclusion
/// fails.
enum class LemmaId { l6, l7, l8, l9, l10, l11, l12 };

const char* lemma_name(LemmaId id);

/// One instantiation: probability parameters a, b, time parameters s, t and
/// predicate masks over the Ctmc's states.  Lemmas ignore the fields they do
/// not mention.
struct LemmaInstance {
  double a = 1.0;
  double b = 1.0;
  double s = 0.0;
  double t = 0.0;
  StateMask phi, psi, theta;
};

struct LemmaOutcome {
  bool counterexample = false;
  std::size_t state = 0;
  double premise_prob = 0.0;
  double conclusion_prob = 0.0;
  double conclusion_bound = 0.0;
  std::string detail;
};

/// Exact check of one lemma instantiation over every state of the Ctmc.
/// `mutated` replaces the product conclusion bound a*b with min(a+b, 1),
/// an intentionally wrong strengthening the suite must be able to refute
/// (applies to lemmas 6 and 7).
LemmaOutcome check_lemma(LemmaId id, const Ctmc& ctmc,
                         const LemmaInstance& inst, bool mutated = false);

/// Seeded random CTMC: 2..6 states, edge density 0.3..0.8, rates log-uniform
/// in [0.1, 10], every state reachable from state 0.
Ctmc random_ctmc(std::uint64_t seed);

/// Seeded random instantiation (parameters and predicate masks) for a model.
LemmaInstance random_lemma_instance(const Ctmc& ctmc, std::uint64_t seed);

/// Goal-refinement theorems: children imply parent, given the constraints.
enum class TheoremId { t3_1, t3_2, t3_3, t3_4 };

const char* theorem_name(TheoremId id);

struct TheoremReport {
  bool consistent = true;  // false only when all children hold, parent fails
  Verdict children = Verdict::undecided;
  Verdict parent = Verdict::undecided;
  std::string detail;
};

/// Evaluates the theorem's child and parent goal formulas exactly at the
/// Ctmc's initial state.  Throws PreconditionError (naming constraint ids)
/// when the parameters violate the refinement constraints.
TheoremReport check_refinement_theorem(TheoremId id, const Ctmc& ctmc,
                                       const InternalParams& params,
                                       const ClientPolytope& client,
                                       const EvalContext& ctx);

}  // namespace crnwd

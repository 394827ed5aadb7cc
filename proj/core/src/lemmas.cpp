#include "crnwd/lemmas.hpp"

#include <cmath>
#include <sstream>

#include "crnwd/goals.hpp"
#include "crnwd/rng.hpp"

namespace crnwd {

const char* lemma_name(LemmaId id) {
  switch (id) {
    case LemmaId::l6: return "3.6";
    case LemmaId::l7: return "3.7";
    case LemmaId::l8: return "3.8";
    case LemmaId::l9: return "3.9";
    case LemmaId::l10: return "3.10";
    case LemmaId::l11: return "3.11";
    case LemmaId::l12: return "3.12";
  }
  return "?";
}

namespace {

// Counterexamples must clear numerical noise: conclusion fails only when the
// computed probability sits below the bound by more than this.
constexpr double kSlack = 1e-9;

StateMask mask_or(const StateMask& a, const StateMask& b) {
  StateMask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
  return out;
}

StateMask mask_and(const StateMask& a, const StateMask& b) {
  StateMask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

StateMask mask_not(const StateMask& a) {
  StateMask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ? 0 : 1;
  return out;
}

StateMask threshold(const std::vector<double>& probs, double bound) {
  StateMask out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    out[i] = probs[i] >= bound ? 1 : 0;
  return out;
}

LemmaOutcome scan(const Ctmc& ctmc, const std::vector<double>& premise,
                  double premise_bound, const std::vector<double>& conclusion,
                  double conclusion_bound, const StateMask* extra_premise,
                  const char* what) {
  LemmaOutcome out;
  out.conclusion_bound = conclusion_bound;
  for (std::size_t q = 0; q < ctmc.state_count(); ++q) {
    if (extra_premise && !(*extra_premise)[q]) continue;
    if (premise[q] >= premise_bound &&
        conclusion[q] < conclusion_bound - kSlack) {
      out.counterexample = true;
      out.state = q;
      out.premise_prob = premise[q];
      out.conclusion_prob = conclusion[q];
      std::ostringstream msg;
      msg << what << " violated at state " << q << ": premise " << premise[q]
          << " >= " << premise_bound << " but conclusion " << conclusion[q]
          << " < " << conclusion_bound;
      out.detail = msg.str();
      return out;
    }
  }
  return out;
}

}  // namespace

LemmaOutcome check_lemma(LemmaId id, const Ctmc& ctmc,
                         const LemmaInstance& inst, bool mutated) {
  const std::size_t n = ctmc.state_count();
  auto need = [&](const StateMask& m, const char* name) -> const StateMask& {
    if (m.size() != n)
      throw StructuralError(std::string("lemma instantiation: mask '") + name +
                            "' does not match the state count");
    return m;
  };
  const double a = inst.a, b = inst.b, s = inst.s, t = inst.t;
  double product = mutated ? std::min(a + b, 1.0) : a * b;

  switch (id) {
    case LemmaId::l6: {
      // P>=a F<=s (phi | P>=b F<=t psi)  =>  P>=a*b F<=s+t (phi | psi)
      const StateMask& phi = need(inst.phi, "phi");
      const StateMask& psi = need(inst.psi, "psi");
      StateMask inner = threshold(reach_within(ctmc, psi, t), b);
      std::vector<double> premise = reach_within(ctmc, mask_or(phi, inner), s);
      std::vector<double> conclusion =
          reach_within(ctmc, mask_or(phi, psi), s + t);
      return scan(ctmc, premise, a, conclusion, product, nullptr, "lemma 3.6");
    }
    case LemmaId::l7: {
      // P>=a [(phi & P>=b F<=s (!phi | theta)) W psi] => P>=a*b F<=s (psi | theta)
      const StateMask& phi = need(inst.phi, "phi");
      const StateMask& psi = need(inst.psi, "psi");
      const StateMask& theta = need(inst.theta, "theta");
      StateMask inner =
          threshold(reach_within(ctmc, mask_or(mask_not(phi), theta), s), b);
      std::vector<double> premise =
          prob_weak_until(ctmc, mask_and(phi, inner), psi);
      std::vector<double> conclusion =
          reach_within(ctmc, mask_or(psi, theta), s);
      return scan(ctmc, premise, a, conclusion, product, nullptr, "lemma 3.7");
    }
    case LemmaId::l8: {
      // P>=a G<=t theta  and  P>=b (phi W !theta)  =>  P>=a+b-1 G<=t phi
      const StateMask& phi = need(inst.phi, "phi");
      const StateMask& theta = need(inst.theta, "theta");
      std::vector<double> premise1 = globally_within(ctmc, theta, t);
      std::vector<double> premise2 =
          prob_weak_until(ctmc, phi, mask_not(theta));
      StateMask both(n);
      for (std::size_t q = 0; q < n; ++q)
        both[q] = premise2[q] >= b ? 1 : 0;
      std::vector<double> conclusion = globally_within(ctmc, phi, t);
      return scan(ctmc, premise1, a, conclusion, a + b - 1.0, &both,
                  "lemma 3.8");
    }
    case LemmaId::l9: {
      // a > 0 and P>=a G<=t phi  =>  phi at q
      const StateMask& phi = need(inst.phi, "phi");
      if (!(a > 0)) return {};
      std::vector<double> premise = globally_within(ctmc, phi, t);
      std::vector<double> conclusion(n);
      for (std::size_t q = 0; q < n; ++q) conclusion[q] = phi[q] ? 1.0 : 0.0;
      return scan(ctmc, premise, a, conclusion, 1.0, nullptr, "lemma 3.9");
    }
    case LemmaId::l10: {
      // P>=a F<=t phi  and  (forall q': phi -> psi)  =>  P>=a F<=t psi
      const StateMask& phi = need(inst.phi, "phi");
      const StateMask& psi = need(inst.psi, "psi");
      for (std::size_t q = 0; q < n; ++q)
        if (phi[q] && !psi[q]) return {};  // global premise fails: vacuous
      std::vector<double> premise = reach_within(ctmc, phi, t);
      std::vector<double> conclusion = reach_within(ctmc, psi, t);
      return scan(ctmc, premise, a, conclusion, a, nullptr, "lemma 3.10");
    }
    case LemmaId::l11: {
      // a >= b, s <= t, P>=a F<=s phi  =>  P>=b F<=t phi
      const StateMask& phi = need(inst.phi, "phi");
      if (!(a >= b) || !(s <= t)) return {};
      std::vector<double> premise = reach_within(ctmc, phi, s);
      std::vector<double> conclusion = reach_within(ctmc, phi, t);
      return scan(ctmc, premise, a, conclusion, b, nullptr, "lemma 3.11");
    }
    case LemmaId::l12: {
      // a >= b, s >= t, P>=a G<=s phi  =>  P>=b G<=t phi
      const StateMask& phi = need(inst.phi, "phi");
      if (!(a >= b) || !(s >= t)) return {};
      std::vector<double> premise = globally_within(ctmc, phi, s);
      std::vector<double> conclusion = globally_within(ctmc, phi, t);
      return scan(ctmc, premise, a, conclusion, b, nullptr, "lemma 3.12");
    }
  }
  throw StructuralError("unknown lemma id");
}

Ctmc random_ctmc(std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const std::size_t n = 2 + rng.below(5);  // 2..6 states
  const double density = 0.3 + 0.5 * rng.uniform();
  auto random_rate = [&]() {
    // log-uniform in [0.1, 10]
    return std::exp(std::log(0.1) + rng.uniform() * std::log(100.0));
  };

  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rng.uniform() < density) edges.emplace_back(i, j, random_rate());
    }

  // The lemma semantics assume every state is reachable from the start
  // state; patch unreachable ones with an extra edge.
  for (;;) {
    std::vector<char> reachable(n, 0);
    std::vector<std::size_t> stack = {0};
    reachable[0] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (const auto& [from, to, rate] : edges)
        if (from == v && !reachable[to]) {
          reachable[to] = 1;
          stack.push_back(to);
        }
    }
    std::size_t missing = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!reachable[v]) {
        missing = v;
        break;
      }
    if (missing == n) break;
    std::size_t from;
    do {
      from = rng.below(n);
    } while (!reachable[from]);
    edges.emplace_back(from, missing, random_rate());
  }

  std::vector<State> states(n);
  for (std::size_t i = 0; i < n; ++i)
    states[i].counts = {static_cast<Count>(i)};
  return Ctmc::from_transitions(std::move(states), edges, 0);
}

LemmaInstance random_lemma_instance(const Ctmc& ctmc, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  LemmaInstance inst;
  inst.a = rng.uniform();
  inst.b = rng.uniform();
  inst.s = 4.0 * rng.uniform();
  inst.t = 4.0 * rng.uniform();
  const std::size_t n = ctmc.state_count();
  inst.phi.resize(n);
  inst.psi.resize(n);
  inst.theta.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    inst.phi[q] = rng.uniform() < 0.5 ? 1 : 0;
    inst.psi[q] = rng.uniform() < 0.5 ? 1 : 0;
    inst.theta[q] = rng.uniform() < 0.5 ? 1 : 0;
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Refinement theorems
// ---------------------------------------------------------------------------

const char* theorem_name(TheoremId id) {
  switch (id) {
    case TheoremId::t3_1: return "3.1";
    case TheoremId::t3_2: return "3.2";
    case TheoremId::t3_3: return "3.3";
    case TheoremId::t3_4: return "3.4";
  }
  return "?";
}

namespace {

using csl::Formula;
using csl::FormulaPtr;

// "Alarm iff no Heartbeat detected" in its refinement form, where the grace
// and alarm windows are discounted by the detection bound w_h.
FormulaPtr alarm_iff_no_hdet_refined(const InternalParams& p,
                                     const ClientPolytope& c) {
  auto alarm = Formula::named("Alarm");
  auto h_det = Formula::named("Hdet");
  FormulaPtr no_alarm =
      Formula::globally(1 - c.eps, c.u, Formula::negate(alarm));
  FormulaPtr calm = Formula::globally_all_states(Formula::implies(
      h_det, Formula::eventually(
                 1 - p.eps1p, std::max(0.0, p.g - p.w_h),
                 Formula::globally(1 - p.eps2p, c.u, Formula::negate(alarm)))));
  FormulaPtr alarming = Formula::globally_all_states(Formula::implies(
      Formula::negate(h_det),
      Formula::eventually(1 - p.delta1p,
                          std::max(0.0, c.v - p.w_a - p.w_h),
                          Formula::disj(alarm, h_det))));
  return Formula::conj(no_alarm, Formula::conj(calm, alarming));
}

Verdict eval_at_start(const Ctmc& ctmc, const FormulaPtr& f,
                      const EvalContext& ctx) {
  return evaluate_exact(ctmc, *f, ctmc.initial_index, ctx).verdict;
}

Verdict combine_and(Verdict x, Verdict y) {
  if (x == Verdict::fails || y == Verdict::fails) return Verdict::fails;
  if (x == Verdict::holds && y == Verdict::holds) return Verdict::holds;
  return Verdict::undecided;
}

TheoremReport conjunction_split(const Ctmc& ctmc, const EvalContext& ctx,
                                const FormulaPtr& parent,
                                std::vector<FormulaPtr> children) {
  TheoremReport report;
  Verdict kids = Verdict::holds;
  for (const auto& child : children) {
    Verdict v = eval_at_start(ctmc, child, ctx);
    if (v == Verdict::fails) kids = Verdict::fails;
    else if (v == Verdict::undecided && kids == Verdict::holds)
      kids = Verdict::undecided;
  }
  report.children = kids;
  report.parent = eval_at_start(ctmc, parent, ctx);
  report.consistent =
      !(kids == Verdict::holds && report.parent == Verdict::fails);
  return report;
}

}  // namespace

TheoremReport check_refinement_theorem(TheoremId id, const Ctmc& ctmc,
                                       const InternalParams& params,
                                       const ClientPolytope& client,
                                       const EvalContext& ctx) {
  auto violations = validate_constraints(params, client);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "parameters violate";
    for (const auto& v : violations) msg << " constr" << v.id;
    throw PreconditionError(msg.str());
  }

  std::vector<GoalInstance> catalog = goal_catalog(params, client);
  auto row = [&](std::size_t i) { return catalog[i].formula; };
  // Catalog layout (breadth first): 0 root, 1 tracks, 2 alarm-iff-no-hdet,
  // 3 avoid-hdet, 4 hdet-when-hpres, 5 correct-timer-reset, 6 correct-delay,
  // 7 alarm-iff-threshold, 8 init-reset, 9 reset-if-hdet, 10 threshold-delay,
  // 11 threshold-if-absent, 12 avoid-alarm-if-reset, 13 alarm-if-threshold,
  // 14 avoid-alarm-until-threshold.

  switch (id) {
    case TheoremId::t3_1: {
      FormulaPtr refined = alarm_iff_no_hdet_refined(params, client);
      return conjunction_split(ctmc, ctx, row(0), {row(1), refined});
    }
    case TheoremId::t3_2:
      return conjunction_split(ctmc, ctx, row(1), {row(3), row(4)});
    case TheoremId::t3_3: {
      FormulaPtr parent = alarm_iff_no_hdet_refined(params, client);
      FormulaPtr s1 = row(5);                           // Reset & reset-if-hdet
      FormulaPtr s2 = Formula::conj(row(10), row(11));  // delay chain
      FormulaPtr s3 = row(7);                           // threshold-filter trio
      return conjunction_split(ctmc, ctx, parent, {s1, s2, s3});
    }
    case TheoremId::t3_4: {
      // Parents of leaves are conjunctions of their children.
      TheoremReport a = conjunction_split(ctmc, ctx, row(5), {row(8), row(9)});
      TheoremReport b =
          conjunction_split(ctmc, ctx, row(6), {row(10), row(11)});
      TheoremReport c =
          conjunction_split(ctmc, ctx, row(7), {row(12), row(13), row(14)});
      TheoremReport report;
      report.consistent = a.consistent && b.consistent && c.consistent;
      report.children = combine_and(combine_and(a.children, b.children), c.children);
      report.parent = combine_and(combine_and(a.parent, b.parent), c.parent);
      if (!report.consistent)
        report.detail = "a leaf-parent conjunction split failed";
      return report;
    }
  }
  throw StructuralError("unknown theorem id");
}

}  // namespace crnwd

#pragma once

#include <string>
#include <vector>

#include "crnwd/crn.hpp"

namespace crnwd {

/// Client-facing watchdog contract: alarm no earlier than u and no later
/// than v after heartbeats stop, with error budgets eps (for u) and delta
/// (for v), plus the heartbeat pulse-size range.
struct ClientPolytope {
  double u = 10.0;
  double v = 20.0;
  double eps = 0.05;
  double delta = 0.05;
  Count pulse_min = 1;
  Count pulse_max = 100;

  void check() const;  // throws ConfigError when 0 < u < v etc. fail
};

/// Internally generated parameters refined from the client polytope.
/// Probabilities live in [0,1), times are nonnegative.
struct InternalParams {
  double eps1 = 0, eps2 = 0;      // refine eps: avoid alarms while H present
  double eps1p = 0, eps2p = 0;    // same, conditioned on H detected
  double alpha = 0, beta = 0;     // heartbeat detection errors
  double delta1 = 0, delta1p = 0; // alarm-initiation errors
  double gamma1 = 0, gamma2 = 0;  // threshold-low / alarm-until-threshold
  double eta1 = 0, eta2 = 0, eta3 = 0, eta4 = 0;  // threshold-high chain
  double lambda1 = 0, lambda2 = 0, lambda3 = 0;   // reset / alarm-off chain
  double w_a = 0;   // alarm turn-on bound
  double w_h = 0;   // heartbeat detection bound
  double g = 0;     // grace period after detection
  double w_on = 0;  // reset-after-detection bound
  double w_off = 0; // alarm-off-after-low-threshold bound
  double w_th = 0;  // threshold-high-to-alarm bound

  void check_ranges() const;  // throws ConfigError on out-of-range fields
};

/// Heartbeat-correlation goal parameters for the monitored oscillator
/// (distinct from InternalParams.delta1).
struct HeartbeatGoalParams {
  double delta_1 = 0.05, delta_2 = 0.05, delta_3 = 0.05, delta_4 = 0.05,
         delta_5 = 0.05;
  double t1 = 5.0, t2 = 5.0, t3 = 5.0, t4 = 10.0;
  Count hb_high = 5;
  Count hb_low = 1;
};

struct ConstraintViolation {
  int id;      // 1..11
  double lhs;  // violated as lhs <= rhs (or lhs < rhs for 8)
  double rhs;
  std::string text;
};

/// Checks the eleven refinement constraints; returns the violated ones
/// (empty list = satisfiable assignment).  Exact double comparisons, no
/// epsilon slack.
std::vector<ConstraintViolation> validate_constraints(
    const InternalParams& p, const ClientPolytope& client);

struct SynthesisResult {
  bool feasible = false;
  InternalParams params;
  std::string infeasibility;  // names the binding constraint when infeasible
};

/// Deterministic heuristic: multiplicative error budgets split evenly in
/// log space along the constraint graph, derived probabilities backed off by
/// 1e-12 so products clear their bounds; times as fixed fractions of u and
/// v-u.  The result always passes validate_constraints.
SynthesisResult synthesize(const ClientPolytope& client);

/// Flat key=value serialization (one field per line).
std::string params_to_text(const InternalParams& p);
InternalParams params_from_text(const std::string& text);

}  // namespace crnwd

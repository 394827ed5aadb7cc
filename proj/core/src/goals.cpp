#include "crnwd/goals.hpp"

#include "crnwd/errors.hpp"

namespace crnwd {

const char* agent_name(Agent a) {
  switch (a) {
    case Agent::absence_detector: return "AD";
    case Agent::threshold_filter: return "TF";
    case Agent::system: return "-";
  }
  return "?";
}

namespace {

using csl::Formula;
using csl::FormulaPtr;

double checked_bound(double t, const char* what) {
  if (t < 0)
    throw ConfigError(std::string("derived time bound '") + what +
                      "' is negative; adjust the client or time parameters");
  return t;
}

struct GoalBuilder {
  const InternalParams& p;
  const ClientPolytope& c;

  FormulaPtr alarm = Formula::named("Alarm");
  FormulaPtr reset = Formula::named("Reset");
  FormulaPtr th_h = Formula::named("ThH");
  FormulaPtr th_l = Formula::named("ThL");
  FormulaPtr h_pres = Formula::named("Hpres");
  FormulaPtr h_det = Formula::named("Hdet");

  FormulaPtr no_alarm_window() const {
    // P>=1-eps [ G<=u !Alarm ]
    return Formula::globally(1 - c.eps, c.u, Formula::negate(alarm));
  }

  FormulaPtr after(FormulaPtr trigger, FormulaPtr response) const {
    return Formula::globally_all_states(Formula::implies(trigger, response));
  }

  // Goal 1: "Alarm iff no Heartbeat provided within t time"
  FormulaPtr root() const {
    FormulaPtr calm = after(
        h_pres,
        Formula::eventually(1 - p.eps1, p.g,
                            Formula::globally(1 - p.eps2, c.u,
                                              Formula::negate(alarm))));
    FormulaPtr alarming = after(
        Formula::negate(h_pres),
        Formula::eventually(1 - p.delta1,
                            checked_bound(c.v - p.w_a, "v - w_a"),
                            Formula::disj(alarm, h_pres)));
    return Formula::conj(no_alarm_window(), Formula::conj(calm, alarming));
  }

  // Leaf: "Hdet when Heartbeat present"
  FormulaPtr hdet_when_hpres() const {
    return after(h_pres, Formula::eventually(1 - p.beta, p.w_h, h_det));
  }

  // Leaf: "Avoid Hdet when Heartbeat not present"
  FormulaPtr no_hdet_when_no_hpres() const {
    return after(Formula::negate(h_pres),
                 Formula::eventually(
                     1 - p.beta, p.w_h,
                     Formula::weak_until(1 - p.alpha, Formula::negate(h_det),
                                         h_pres)));
  }

  // Goal 2: "Hdet correctly tracks the presence of Heartbeats"
  FormulaPtr tracks() const {
    return Formula::conj(hdet_when_hpres(), no_hdet_when_no_hpres());
  }

  // Goal 3: "Alarm iff no Heartbeat detected within t' time"
  FormulaPtr root_detected() const {
    FormulaPtr calm = after(
        h_det,
        Formula::eventually(1 - p.eps1p, p.g,
                            Formula::globally(1 - p.eps2p, c.u,
                                              Formula::negate(alarm))));
    FormulaPtr alarming = after(
        Formula::negate(h_det),
        Formula::eventually(1 - p.delta1p,
                            checked_bound(c.v - p.w_a, "v - w_a"),
                            Formula::disj(alarm, h_pres)));
    return Formula::conj(no_alarm_window(), Formula::conj(calm, alarming));
  }

  // Leaf: "Reset if Hdet"
  FormulaPtr reset_if_hdet() const {
    return after(h_det, Formula::eventually(1 - p.lambda1, p.w_on, reset));
  }

  // Leaf: "Threshold delay if Reset"
  FormulaPtr threshold_delay_if_reset() const {
    return after(reset, Formula::globally(1 - p.gamma1, c.u, th_l));
  }

  // Leaf: "Threshold if Hdet is absent"
  FormulaPtr threshold_if_hdet_absent() const {
    double window =
        checked_bound(c.v - p.w_a - 2 * p.w_h - p.w_th, "v - w_a - 2w_h - w_th");
    return after(
        Formula::negate(h_det),
        Formula::eventually(
            1 - p.eta1, window,
            Formula::weak_until(1 - p.eta2, th_h,
                                Formula::eventually(1 - p.eta3, p.w_h, h_det))));
  }

  // Leaf: "Avoid Alarm if Reset"
  FormulaPtr no_alarm_if_reset() const {
    return after(th_l,
                 Formula::eventually(
                     1 - p.lambda2, p.w_off,
                     Formula::globally(1 - p.lambda3, c.u,
                                       Formula::negate(alarm))));
  }

  // Leaf: "Alarm if Threshold for some time"
  FormulaPtr alarm_if_threshold() const {
    return after(th_h,
                 Formula::eventually(1 - p.eta4, p.w_th,
                                     Formula::disj(alarm, Formula::negate(th_h))));
  }

  // Leaf: "Avoid Alarm until first Threshold"
  FormulaPtr no_alarm_until_threshold() const {
    return Formula::weak_until(1 - p.gamma2, Formula::negate(alarm),
                               Formula::negate(th_l));
  }
};

}  // namespace

std::vector<GoalInstance> goal_catalog(const InternalParams& p,
                                       const ClientPolytope& client) {
  client.check();
  p.check_ranges();
  GoalBuilder gb{p, client};

  std::vector<GoalInstance> goals;
  auto parent = [&](const char* name, FormulaPtr f) {
    goals.push_back({name, std::move(f), Agent::system, false});
  };
  auto leaf = [&](const char* name, FormulaPtr f, Agent agent) {
    goals.push_back({name, std::move(f), agent, true});
  };

  parent("Achieve[Alarm iff no Heartbeat provided within t time]", gb.root());
  parent("Achieve[Heartbeat Detected correctly tracks the presence of Heartbeats]",
         gb.tracks());
  parent("Achieve[Alarm iff no Heartbeat detected within t' time]",
         gb.root_detected());
  leaf("Avoid[Hdet when Heartbeat not present]", gb.no_hdet_when_no_hpres(),
       Agent::absence_detector);
  leaf("Achieve[Hdet when Heartbeat present]", gb.hdet_when_hpres(),
       Agent::absence_detector);
  parent("Achieve[Correct Timer Reset]",
         Formula::conj(gb.reset, gb.reset_if_hdet()));
  parent("Achieve[Correct Delay]",
         Formula::conj(
             gb.threshold_delay_if_reset(),
             Formula::conj(Formula::implies(gb.th_l, Formula::negate(gb.th_h)),
                           gb.threshold_if_hdet_absent())));
  parent("Achieve[Alarm iff Threshold met]",
         Formula::conj(gb.no_alarm_if_reset(),
                       Formula::conj(gb.alarm_if_threshold(),
                                     gb.no_alarm_until_threshold())));
  leaf("Achieve[Initialize to Reset]", gb.reset, Agent::absence_detector);
  leaf("Achieve[Reset if Hdet]", gb.reset_if_hdet(), Agent::absence_detector);
  leaf("Achieve[Threshold delay if Reset]", gb.threshold_delay_if_reset(),
       Agent::absence_detector);
  leaf("Achieve[Threshold if Hdet is absent]", gb.threshold_if_hdet_absent(),
       Agent::absence_detector);
  leaf("Avoid[Alarm if Reset]", gb.no_alarm_if_reset(), Agent::threshold_filter);
  leaf("Achieve[Alarm if Threshold for some time]", gb.alarm_if_threshold(),
       Agent::threshold_filter);
  leaf("Avoid[Alarm until first Threshold]", gb.no_alarm_until_threshold(),
       Agent::threshold_filter);
  return goals;
}

std::vector<GoalInstance> oscillator_goals(const HeartbeatGoalParams& hb) {
  using csl::Formula;
  auto healthy = Formula::named("healthy");
  auto hb_high = Formula::named("hbHigh");
  auto hb_low = Formula::named("hbLow");

  std::vector<GoalInstance> goals;
  goals.push_back(
      {"Achieve[Produce heartbeats while healthy]",
       Formula::globally_all_states(Formula::implies(
           healthy,
           Formula::eventually(1 - hb.delta_1, hb.t1,
                               Formula::disj(hb_high, Formula::negate(healthy))))),
       Agent::system, true});
  goals.push_back(
      {"Avoid[Produce heartbeats while unhealthy]",
       Formula::globally_all_states(Formula::implies(
           Formula::negate(healthy),
           Formula::eventually(
               1 - hb.delta_2, hb.t2,
               Formula::weak_until(1 - hb.delta_3, hb_low,
                                   Formula::globally(1 - hb.delta_4, hb.t3,
                                                     healthy))))),
       Agent::system, true});
  goals.push_back(
      {"Achieve[Heartbeat decays]",
       Formula::globally_all_states(Formula::implies(
           hb_high, Formula::eventually(1 - hb.delta_5, hb.t4,
                                        Formula::negate(hb_high)))),
       Agent::system, true});
  return goals;
}

}  // namespace crnwd

#pragma once

#include <string>
#include <vector>

#include "crnwd/csl.hpp"
#include "crnwd/params.hpp"

namespace crnwd {

enum class Agent { absence_detector, threshold_filter, system };

const char* agent_name(Agent a);

struct GoalInstance {
  std::string name;
  csl::FormulaPtr formula;
  Agent agent = Agent::system;
  bool leaf = false;
};

/// The watchdog goal tree, breadth first: 6 parent goals and 9 leaf goals
/// (6 on the Absence Detector, 3 on the Threshold Filter).  Formulas are
/// fully instantiated from the internal parameters and the client's u, v,
/// eps bounds.  Throws ConfigError when a derived time bound is negative.
std::vector<GoalInstance> goal_catalog(const InternalParams& p,
                                       const ClientPolytope& client);

/// The monitored oscillator's three heartbeat-correlation properties.
std::vector<GoalInstance> oscillator_goals(const HeartbeatGoalParams& hb);

}  // namespace crnwd

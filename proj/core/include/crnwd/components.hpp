#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crnwd/crn.hpp"

namespace crnwd {

/// Delay ladder: rungs X_0..X_k, climb rate u, reset-to-bottom rate r,
/// population p starting on the bottom rung.
struct LadderSpec {
  int height = 1;          // k >= 1
  double up_rate = 1.0;    // u
  double reset_rate = 1.0; // r
  Count population = 1;    // p
  std::string rung_prefix = "X";
};

struct BuiltModel {
  Crn crn;
  State init;
};

/// 2k unary reactions: X_i ->(u) X_{i+1} for 0 <= i < k and X_i ->(r) X_0 for
/// 0 < i <= k.  Init puts the whole population on X_0.
BuiltModel build_unary_ladder(const LadderSpec& spec, double volume = 1.0);

/// Catalyzed form: X_i + U -> X_{i+1} + U and X_i + R -> X_0 + R, all rate
/// constants 1.  Catalyst counts start at 0; callers set them via the state.
BuiltModel build_catalyzed_ladder(const LadderSpec& spec,
                                  const std::string& up_catalyst,
                                  const std::string& reset_catalyst,
                                  double volume = 1.0);

/// Watchdog: an absence-detector ladder (up catalyst U, reset catalyst H,
/// top rung Y) feeding a threshold-filter ladder (up catalyst Y, reset
/// catalyst R, top rung D = alarm).
struct MwtConfig {
  int detector_height = 3;          // k_d
  int filter_height = 3;            // k_t
  Count detector_population = 50;   // p_L
  Count filter_population = 50;     // p_T
  Count u_count = 10;
  Count r_count = 5;
  std::string detector_prefix = "L";
  std::string filter_prefix = "T";
  std::string up_catalyst = "U";
  std::string reset_catalyst = "R";
  std::string heartbeat = "H";

  // Predicate molecularizations.  Negative count thresholds mean "derive the
  // default": y_threshold = ceil(0.5*p_L), y_low = ceil(0.1*p_L),
  // d_threshold = ceil(0.5*p_T).
  double reset_fraction = 0.9;  // rho: Reset needs this fraction on low rungs
  Count y_threshold = -1;       // Th_H: #Y >= y_threshold
  Count y_low = -1;             // Th_L: #Y <= y_low
  Count d_threshold = -1;       // Alarm: #D >= d_threshold
  Count hb_high = 5;            // H_pres / hbHigh: #H >= hb_high
  Count hb_low = 1;             // hbLow: #H <= hb_low

  int reset_rung_cut() const { return detector_height / 2; }
  std::string y_species() const {
    return detector_prefix + std::to_string(detector_height);
  }
  std::string d_species() const {
    return filter_prefix + std::to_string(filter_height);
  }
};

struct MwtModel {
  Crn crn;
  State init;
  MwtConfig cfg;  // thresholds resolved to concrete counts
};

MwtModel build_mwt(const MwtConfig& cfg, double volume = 1.0);

/// Lotka-Volterra 3-phase oscillator with optional heartbeat interface.
struct OscillatorConfig {
  double k = 1.0;    // phase-advance rate
  double k2 = 0.1;   // heartbeat decay / recovery C->A rate
  Count init_a = 800;
  Count init_b = 100;
  Count init_c = 100;
  double tau = -1.0;  // healthy threshold; negative = (0.1 * total)^2
  double resolved_tau() const {
    if (tau >= 0) return tau;
    double total = static_cast<double>(init_a + init_b + init_c);
    return (0.1 * total) * (0.1 * total);
  }
};

/// A+B ->(k) 2B+H, B+C ->(k) 2C, C+A ->(k) 2A, and with the heartbeat
/// interface also H ->(k2) 0.  Without it, the first reaction emits no H.
BuiltModel build_oscillator(const OscillatorConfig& cfg, bool with_heartbeat,
                            double volume = 1.0);

/// Recovery module driven by the alarm species: D+A ->(k) D+B,
/// D+B ->(k) D+C, D+C ->(k2) D+A.  `alarm_species` defaults to "D"; the
/// composed demo passes the filter's top-rung name.
Crn build_recovery(const OscillatorConfig& cfg,
                   const std::string& alarm_species = "D",
                   double volume = 1.0);

/// healthy(state): A, B, C all positive and
/// (A-B)^2 + (B-C)^2 + (C-A)^2 > tau.
bool healthy(const Crn& crn, const State& state, double tau);

/// Named state predicates (Reset, ThH, ThL, Alarm, Hpres, Hdet, hbHigh,
/// hbLow, healthy) resolved against one model's species table.
class PredicateSet {
 public:
  static PredicateSet for_mwt(const Crn& crn, const MwtConfig& cfg);
  static PredicateSet for_oscillator(const Crn& crn,
                                     const OscillatorConfig& cfg,
                                     Count hb_high = 5, Count hb_low = 1);
  /// Union of both (composed demo).
  static PredicateSet for_composed(const Crn& crn, const MwtConfig& mwt,
                                   const OscillatorConfig& osc);

  bool knows(const std::string& name) const;
  /// Throws StructuralError for unknown names or unresolved species.
  bool evaluate(const std::string& name, const State& state) const;

  /// Species alias table (Y and D name the ladder top rungs).
  std::size_t resolve_species(const Crn& crn, const std::string& name) const;

 private:
  const Crn* crn_ = nullptr;
  std::size_t a_ = Crn::npos, b_ = Crn::npos, c_ = Crn::npos, h_ = Crn::npos;
  std::size_t y_ = Crn::npos, d_ = Crn::npos;
  std::vector<std::size_t> low_rungs_, all_rungs_;
  double reset_fraction_ = 0.9;
  Count y_threshold_ = 0, y_low_ = 0, d_threshold_ = 0;
  Count hb_high_ = 5, hb_low_ = 1;
  double tau_ = 0.0;
  bool has_mwt_ = false, has_osc_ = false;
  std::string y_name_, d_name_;
};

/// Resolves MwtConfig's derived thresholds (negative fields) in place.
MwtConfig resolve_thresholds(MwtConfig cfg);

/// Expected time for a single molecule to first reach the top rung, by
/// first-step analysis on the k+1-state chain.
double ladder_expected_first_passage(const LadderSpec& spec);

/// CDF of the single-molecule top-rung hitting time on a uniform grid.
std::vector<std::pair<double, double>> ladder_first_passage_cdf(
    const LadderSpec& spec, double t_max, double step);

/// Least grid time at which P(Binomial(p, pi_k(t)) >= ceil(theta*p)) reaches
/// `confidence`, using per-molecule independence of the unary ladder.
struct ThresholdTime {
  enum class Status { found, unreachable, horizon_exceeded };
  Status status;
  double time = 0.0;
};
ThresholdTime fraction_threshold_time(const LadderSpec& spec, double theta,
                                      double confidence, double t_max,
                                      double step);

/// Single-molecule top-rung occupancy pi_k(t) for a unary ladder.
double ladder_top_occupancy(const LadderSpec& spec, double t);

/// Stationary single-molecule rung distribution of the unary ladder.
std::vector<double> ladder_stationary(const LadderSpec& spec);

}  // namespace crnwd

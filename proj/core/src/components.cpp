#include "crnwd/components.hpp"

#include <algorithm>
#include <cmath>

#include "crnwd/ctmc.hpp"
#include "crnwd/stats.hpp"

namespace crnwd {

namespace {

void check_ladder(const LadderSpec& spec) {
  if (spec.height < 1) throw BuildError("ladder height must be >= 1");
  if (!(spec.up_rate > 0)) throw BuildError("up rate must be positive");
  if (!(spec.reset_rate > 0)) throw BuildError("reset rate must be positive");
  if (spec.population < 1) throw BuildError("ladder population must be >= 1");
  if (spec.rung_prefix.empty()) throw BuildError("rung prefix must be nonempty");
}

std::vector<Species> rung_species(const LadderSpec& spec) {
  std::vector<Species> species;
  for (int i = 0; i <= spec.height; ++i)
    species.push_back({spec.rung_prefix + std::to_string(i),
                       static_cast<std::size_t>(i)});
  return species;
}

}  // namespace

BuiltModel build_unary_ladder(const LadderSpec& spec, double volume) {
  check_ladder(spec);
  const int k = spec.height;
  std::vector<Reaction> reactions;
  for (int i = 0; i < k; ++i) {
    Reaction up;
    up.reactants = {{static_cast<std::size_t>(i), 1}};
    up.products = {{static_cast<std::size_t>(i + 1), 1}};
    up.rate_constant = spec.up_rate;
    reactions.push_back(std::move(up));
  }
  for (int i = 1; i <= k; ++i) {
    Reaction reset;
    reset.reactants = {{static_cast<std::size_t>(i), 1}};
    reset.products = {{0, 1}};
    reset.rate_constant = spec.reset_rate;
    reactions.push_back(std::move(reset));
  }
  Crn crn(rung_species(spec), std::move(reactions), volume);
  State init;
  init.counts.assign(crn.species_count(), 0);
  init.counts[0] = spec.population;
  return {std::move(crn), std::move(init)};
}

BuiltModel build_catalyzed_ladder(const LadderSpec& spec,
                                  const std::string& up_catalyst,
                                  const std::string& reset_catalyst,
                                  double volume) {
  check_ladder(spec);
  if (up_catalyst == reset_catalyst)
    throw BuildError("up and reset catalysts must differ");
  const int k = spec.height;
  std::vector<Species> species = rung_species(spec);
  for (const auto& sp : species)
    if (sp.name == up_catalyst || sp.name == reset_catalyst)
      throw BuildError("catalyst name collides with rung species: " + sp.name);
  const std::size_t up_idx = species.size();
  species.push_back({up_catalyst, up_idx});
  const std::size_t reset_idx = species.size();
  species.push_back({reset_catalyst, reset_idx});

  std::vector<Reaction> reactions;
  for (int i = 0; i < k; ++i) {
    Reaction up;
    up.reactants = {{static_cast<std::size_t>(i), 1}, {up_idx, 1}};
    up.products = {{static_cast<std::size_t>(i + 1), 1}, {up_idx, 1}};
    up.rate_constant = 1.0;
    reactions.push_back(std::move(up));
  }
  for (int i = 1; i <= k; ++i) {
    Reaction reset;
    reset.reactants = {{static_cast<std::size_t>(i), 1}, {reset_idx, 1}};
    reset.products = {{0, 1}, {reset_idx, 1}};
    reset.rate_constant = 1.0;
    reactions.push_back(std::move(reset));
  }
  Crn crn(std::move(species), std::move(reactions), volume);
  State init;
  init.counts.assign(crn.species_count(), 0);
  init.counts[0] = spec.population;
  return {std::move(crn), std::move(init)};
}

MwtConfig resolve_thresholds(MwtConfig cfg) {
  auto ceil_frac = [](double f, Count n) {
    return static_cast<Count>(std::ceil(f * static_cast<double>(n)));
  };
  if (cfg.y_threshold < 0) cfg.y_threshold = ceil_frac(0.5, cfg.detector_population);
  if (cfg.y_low < 0) {
    // Must stay strictly below y_threshold (ThL and ThH are exclusive);
    // small populations would otherwise collide at 1.
    cfg.y_low = std::min(ceil_frac(0.1, cfg.detector_population),
                         cfg.y_threshold - 1);
    if (cfg.y_low < 0) cfg.y_low = 0;
  }
  if (cfg.d_threshold < 0) cfg.d_threshold = ceil_frac(0.5, cfg.filter_population);
  return cfg;
}

MwtModel build_mwt(const MwtConfig& raw_cfg, double volume) {
  MwtConfig cfg = resolve_thresholds(raw_cfg);
  if (cfg.detector_height < 1 || cfg.filter_height < 1)
    throw BuildError("ladder heights must be >= 1");
  if (cfg.detector_population < 1 || cfg.filter_population < 1)
    throw BuildError("ladder populations must be >= 1");
  if (cfg.u_count < 1 || cfg.r_count < 1)
    throw BuildError("catalyst counts must be >= 1");
  if (!(cfg.reset_fraction > 0.0 && cfg.reset_fraction <= 1.0))
    throw BuildError("reset fraction must be in (0, 1]");
  if (cfg.y_low >= cfg.y_threshold)
    throw BuildError("y_low must be below y_threshold");

  LadderSpec detector{cfg.detector_height, 1.0, 1.0, cfg.detector_population,
                      cfg.detector_prefix};
  LadderSpec filter{cfg.filter_height, 1.0, 1.0, cfg.filter_population,
                    cfg.filter_prefix};
  BuiltModel det =
      build_catalyzed_ladder(detector, cfg.up_catalyst, cfg.heartbeat, volume);
  // The detector's top rung Y drives the filter upward.
  BuiltModel fil = build_catalyzed_ladder(filter, cfg.y_species(),
                                          cfg.reset_catalyst, volume);
  Crn crn = merge({det.crn, fil.crn});
  State init = make_state(
      crn, {{cfg.detector_prefix + "0", cfg.detector_population},
            {cfg.filter_prefix + "0", cfg.filter_population},
            {cfg.up_catalyst, cfg.u_count},
            {cfg.reset_catalyst, cfg.r_count}});
  return {std::move(crn), std::move(init), std::move(cfg)};
}

BuiltModel build_oscillator(const OscillatorConfig& cfg, bool with_heartbeat,
                            double volume) {
  if (!(cfg.k > 0) || !(cfg.k2 > 0)) throw BuildError("rates must be positive");
  if (cfg.init_a < 0 || cfg.init_b < 0 || cfg.init_c < 0)
    throw BuildError("initial counts must be nonnegative");
  if (cfg.init_a + cfg.init_b + cfg.init_c < 1)
    throw BuildError("total oscillator population must be >= 1");

  std::vector<Species> species = {{"A", 0}, {"B", 1}, {"C", 2}};
  if (with_heartbeat) species.push_back({"H", 3});

  std::vector<Reaction> reactions;
  Reaction r1;  // A + B -> 2B (+H)
  r1.reactants = {{0, 1}, {1, 1}};
  r1.products = {{1, 2}};
  if (with_heartbeat) r1.products.push_back({3, 1});
  r1.rate_constant = cfg.k;
  reactions.push_back(std::move(r1));

  Reaction r2;  // B + C -> 2C
  r2.reactants = {{1, 1}, {2, 1}};
  r2.products = {{2, 2}};
  r2.rate_constant = cfg.k;
  reactions.push_back(std::move(r2));

  Reaction r3;  // C + A -> 2A
  r3.reactants = {{2, 1}, {0, 1}};
  r3.products = {{0, 2}};
  r3.rate_constant = cfg.k;
  reactions.push_back(std::move(r3));

  if (with_heartbeat) {
    Reaction decay;  // H -> 0
    decay.reactants = {{3, 1}};
    decay.rate_constant = cfg.k2;
    reactions.push_back(std::move(decay));
  }

  Crn crn(std::move(species), std::move(reactions), volume);
  State init = make_state(crn, {{"A", cfg.init_a}, {"B", cfg.init_b}, {"C", cfg.init_c}});
  return {std::move(crn), std::move(init)};
}

Crn build_recovery(const OscillatorConfig& cfg, const std::string& alarm_species,
                   double volume) {
  if (!(cfg.k > 0) || !(cfg.k2 > 0)) throw BuildError("rates must be positive");
  std::vector<Species> species = {{"A", 0}, {"B", 1}, {"C", 2}, {alarm_species, 3}};
  auto catalyzed = [&](std::size_t from, std::size_t to, double rate) {
    Reaction rxn;
    rxn.reactants = {{3, 1}, {from, 1}};
    rxn.products = {{3, 1}, {to, 1}};
    rxn.rate_constant = rate;
    return rxn;
  };
  std::vector<Reaction> reactions;
  reactions.push_back(catalyzed(0, 1, cfg.k));   // D + A -> D + B
  reactions.push_back(catalyzed(1, 2, cfg.k));   // D + B -> D + C
  reactions.push_back(catalyzed(2, 0, cfg.k2));  // D + C -> D + A
  return Crn(std::move(species), std::move(reactions), volume);
}

bool healthy(const Crn& crn, const State& state, double tau) {
  auto count = [&](const char* name) {
    return static_cast<double>(state[crn.species_index(name)]);
  };
  double a = count("A"), b = count("B"), c = count("C");
  if (a <= 0 || b <= 0 || c <= 0) return false;
  double spread = (a - b) * (a - b) + (b - c) * (b - c) + (c - a) * (c - a);
  return spread > tau;
}

PredicateSet PredicateSet::for_mwt(const Crn& crn, const MwtConfig& raw_cfg) {
  MwtConfig cfg = resolve_thresholds(raw_cfg);
  PredicateSet p;
  p.crn_ = &crn;
  p.has_mwt_ = true;
  p.h_ = crn.species_index(cfg.heartbeat);
  p.y_ = crn.species_index(cfg.y_species());
  p.d_ = crn.species_index(cfg.d_species());
  p.y_name_ = cfg.y_species();
  p.d_name_ = cfg.d_species();
  for (int i = 0; i <= cfg.reset_rung_cut(); ++i)
    p.low_rungs_.push_back(
        crn.species_index(cfg.detector_prefix + std::to_string(i)));
  for (int i = 0; i <= cfg.detector_height; ++i)
    p.all_rungs_.push_back(
        crn.species_index(cfg.detector_prefix + std::to_string(i)));
  p.reset_fraction_ = cfg.reset_fraction;
  p.y_threshold_ = cfg.y_threshold;
  p.y_low_ = cfg.y_low;
  p.d_threshold_ = cfg.d_threshold;
  p.hb_high_ = cfg.hb_high;
  p.hb_low_ = cfg.hb_low;
  return p;
}

PredicateSet PredicateSet::for_oscillator(const Crn& crn,
                                          const OscillatorConfig& cfg,
                                          Count hb_high, Count hb_low) {
  PredicateSet p;
  p.crn_ = &crn;
  p.has_osc_ = true;
  p.a_ = crn.species_index("A");
  p.b_ = crn.species_index("B");
  p.c_ = crn.species_index("C");
  p.h_ = crn.find_species("H");
  p.tau_ = cfg.resolved_tau();
  p.hb_high_ = hb_high;
  p.hb_low_ = hb_low;
  return p;
}

PredicateSet PredicateSet::for_composed(const Crn& crn, const MwtConfig& mwt,
                                        const OscillatorConfig& osc) {
  PredicateSet p = for_mwt(crn, mwt);
  p.has_osc_ = true;
  p.a_ = crn.species_index("A");
  p.b_ = crn.species_index("B");
  p.c_ = crn.species_index("C");
  p.tau_ = osc.resolved_tau();
  return p;
}

bool PredicateSet::knows(const std::string& name) const {
  static const char* kNames[] = {"Reset", "ThH",    "ThL",   "Alarm", "Hpres",
                                 "Hdet",  "hbHigh", "hbLow", "healthy"};
  for (const char* n : kNames)
    if (name == n) return true;
  return false;
}

bool PredicateSet::evaluate(const std::string& name, const State& state) const {
  auto need = [&](std::size_t idx, const char* what) {
    if (idx == Crn::npos)
      throw StructuralError(std::string("predicate '") + what +
                            "' is not resolvable on this model");
    return idx;
  };
  if (name == "healthy") {
    if (!has_osc_) throw StructuralError("'healthy' needs an oscillator model");
    double a = static_cast<double>(state[need(a_, "healthy")]);
    double b = static_cast<double>(state[need(b_, "healthy")]);
    double c = static_cast<double>(state[need(c_, "healthy")]);
    if (a <= 0 || b <= 0 || c <= 0) return false;
    double spread = (a - b) * (a - b) + (b - c) * (b - c) + (c - a) * (c - a);
    return spread > tau_;
  }
  if (name == "Hpres" || name == "hbHigh")
    return state[need(h_, "Hpres")] >= hb_high_;
  if (name == "hbLow") return state[need(h_, "hbLow")] <= hb_low_;
  if (name == "Hdet") return state[need(h_, "Hdet")] >= 1;
  if (!has_mwt_)
    throw StructuralError("predicate '" + name + "' needs a watchdog model");
  if (name == "ThH") return state[need(y_, "ThH")] >= y_threshold_;
  if (name == "ThL") return state[need(y_, "ThL")] <= y_low_;
  if (name == "Alarm") return state[need(d_, "Alarm")] >= d_threshold_;
  if (name == "Reset") {
    Count low = 0, total = 0;
    for (std::size_t idx : low_rungs_) low += state[idx];
    for (std::size_t idx : all_rungs_) total += state[idx];
    if (total == 0) return false;
    // fraction on low rungs >= rho, with an FP guard on the boundary
    return static_cast<double>(low) >=
           reset_fraction_ * static_cast<double>(total) - 1e-9;
  }
  throw StructuralError("unknown named predicate: " + name);
}

std::size_t PredicateSet::resolve_species(const Crn& crn,
                                          const std::string& name) const {
  std::size_t idx = crn.find_species(name);
  if (idx != Crn::npos) return idx;
  // Alias table: Y and D are the ladder top rungs.
  if (name == "Y" && y_ != Crn::npos) return y_;
  if (name == "D" && d_ != Crn::npos) return d_;
  throw StructuralError("unknown species in formula: " + name);
}

double ladder_expected_first_passage(const LadderSpec& spec) {
  check_ladder(spec);
  const int k = spec.height;
  const double u = spec.up_rate, r = spec.reset_rate;
  // T_i = alpha_i + beta_i * T_0 backward from T_k = 0.
  double alpha = 0.0, beta = 0.0;
  for (int i = k - 1; i >= 1; --i) {
    double total = u + r;
    alpha = 1.0 / total + (u / total) * alpha;
    beta = (u / total) * beta + r / total;
  }
  // Rung 0 has no reset reaction.
  double t0 = (1.0 / u + alpha) / (1.0 - beta);
  return t0;
}

namespace {

BuiltModel single_molecule_ladder(const LadderSpec& spec) {
  LadderSpec one = spec;
  one.population = 1;
  return build_unary_ladder(one);
}

StateMask top_rung_mask(const Crn& crn, const Ctmc& ctmc,
                        const LadderSpec& spec) {
  std::size_t top = crn.species_index(spec.rung_prefix +
                                      std::to_string(spec.height));
  StateMask mask(ctmc.state_count(), 0);
  for (std::size_t s = 0; s < ctmc.state_count(); ++s)
    mask[s] = ctmc.states[s][top] >= 1 ? 1 : 0;
  return mask;
}

}  // namespace

std::vector<std::pair<double, double>> ladder_first_passage_cdf(
    const LadderSpec& spec, double t_max, double step) {
  if (!(step > 0) || !(t_max >= 0)) throw ConfigError("bad first-passage grid");
  BuiltModel one = single_molecule_ladder(spec);
  Ctmc ctmc = enumerate(one.crn, one.init);
  StateMask top = top_rung_mask(one.crn, ctmc, spec);
  std::vector<std::pair<double, double>> cdf;
  for (double t = 0.0; t <= t_max + step * 0.5; t += step)
    cdf.emplace_back(t, prob_eventually_bounded(ctmc, top, t));
  return cdf;
}

double ladder_top_occupancy(const LadderSpec& spec, double t) {
  BuiltModel one = single_molecule_ladder(spec);
  Ctmc ctmc = enumerate(one.crn, one.init);
  std::size_t top_species =
      one.crn.species_index(spec.rung_prefix + std::to_string(spec.height));
  std::vector<double> pi = transient(ctmc, t);
  double occ = 0.0;
  for (std::size_t s = 0; s < ctmc.state_count(); ++s)
    if (ctmc.states[s][top_species] >= 1) occ += pi[s];
  return occ;
}

std::vector<double> ladder_stationary(const LadderSpec& spec) {
  check_ladder(spec);
  const int k = spec.height;
  const double u = spec.up_rate, r = spec.reset_rate;
  // Balance at rung i > 0: u*pi_{i-1} = (r + u*[i<k]) * pi_i, since the only
  // inflow to rung i comes from below.  Normalize at the end.
  std::vector<double> pi(k + 1);
  pi[0] = 1.0;
  double total = 1.0;
  for (int i = 1; i <= k; ++i) {
    double exit = r + (i < k ? u : 0.0);
    pi[i] = pi[i - 1] * u / exit;
    total += pi[i];
  }
  for (double& x : pi) x /= total;
  return pi;
}

ThresholdTime fraction_threshold_time(const LadderSpec& spec, double theta,
                                      double confidence, double t_max,
                                      double step) {
  check_ladder(spec);
  if (!(theta > 0.0 && theta <= 1.0))
    throw ConfigError("theta must be in (0, 1]");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw ConfigError("confidence must be in (0, 1)");
  if (!(step > 0) || !(t_max > 0)) throw ConfigError("bad threshold-time grid");

  const Count p = spec.population;
  // Required count: ceil(theta * p), with an FP guard so that theta -> 0+
  // requires zero molecules.
  Count required = static_cast<Count>(
      std::ceil(theta * static_cast<double>(p) - 1e-9));
  if (required <= 0) return {ThresholdTime::Status::found, 0.0};

  BuiltModel one = single_molecule_ladder(spec);
  Ctmc ctmc = enumerate(one.crn, one.init);
  std::size_t top_species =
      one.crn.species_index(spec.rung_prefix + std::to_string(spec.height));

  for (double t = 0.0; t <= t_max + step * 0.5; t += step) {
    std::vector<double> pi = transient(ctmc, t);
    double occ = 0.0;
    for (std::size_t s = 0; s < ctmc.state_count(); ++s)
      if (ctmc.states[s][top_species] >= 1) occ += pi[s];
    if (binomial_tail_geq(p, occ, required) >= confidence)
      return {ThresholdTime::Status::found, t};
  }

  std::vector<double> stat = ladder_stationary(spec);
  double limit_occ = stat[spec.height];
  if (binomial_tail_geq(p, limit_occ, required) < confidence)
    return {ThresholdTime::Status::unreachable, 0.0};
  return {ThresholdTime::Status::horizon_exceeded, 0.0};
}

}  // namespace crnwd

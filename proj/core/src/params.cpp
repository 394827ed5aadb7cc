#include "crnwd/params.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "crnwd/errors.hpp"

namespace crnwd {

void ClientPolytope::check() const {
  if (!(u > 0) || !(u < v)) throw ConfigError("client requires 0 < u < v");
  if (!(eps >= 0 && eps < 1) || !(delta >= 0 && delta < 1))
    throw ConfigError("client error probabilities must lie in [0,1)");
  if (pulse_min < 1 || pulse_max < pulse_min)
    throw ConfigError("client requires 1 <= pulse_min <= pulse_max");
}

void InternalParams::check_ranges() const {
  const double* probs[] = {&eps1,   &eps2,   &eps1p,  &eps2p, &alpha,
                           &beta,   &delta1, &delta1p, &gamma1, &gamma2,
                           &eta1,   &eta2,   &eta3,   &eta4,  &lambda1,
                           &lambda2, &lambda3};
  for (const double* p : probs)
    if (!(*p >= 0 && *p < 1))
      throw ConfigError("internal probability out of [0,1)");
  const double* times[] = {&w_a, &w_h, &g, &w_on, &w_off, &w_th};
  for (const double* t : times)
    if (!(*t >= 0)) throw ConfigError("internal time bound must be >= 0");
}

std::vector<ConstraintViolation> validate_constraints(
    const InternalParams& p, const ClientPolytope& client) {
  std::vector<ConstraintViolation> out;
  auto require_le = [&](int id, double lhs, double rhs, const char* text) {
    if (!(lhs <= rhs)) out.push_back({id, lhs, rhs, text});
  };

  require_le(1, 1 - p.eps1, (1 - p.beta) * (1 - p.eps1p),
             "(1-eps1) <= (1-beta)(1-eps1')");
  require_le(2, 1 - p.eps2, 1 - p.eps2p, "(1-eps2) <= (1-eps2')");
  require_le(3, p.w_h, p.g, "w_h <= g");
  require_le(4, 1 - p.delta1,
             (1 - p.alpha) * (1 - p.beta) * (1 - p.delta1p),
             "(1-delta1) <= (1-alpha)(1-beta)(1-delta1')");
  require_le(5, 1 - client.eps, 1 - p.gamma1 - p.gamma2,
             "(1-eps) <= (1-gamma1-gamma2)");
  require_le(6, (1 - p.eps1p) * (1 - p.eps2p),
             (1 - p.lambda1) * (1 - p.lambda2) * (1 - p.lambda3) * (1 - p.gamma1),
             "(1-eps1')(1-eps2') <= (1-l1)(1-l2)(1-l3)(1-gamma1)");
  require_le(7, p.w_on + p.w_off, p.g - p.w_h, "w_on + w_off <= g - w_h");
  if (!(1 - p.gamma1 > 0))
    out.push_back({8, 1 - p.gamma1, 0.0, "(1-gamma1) > 0"});
  require_le(9, 1 - p.eps1p, (1 - p.lambda1) * (1 - p.lambda2),
             "(1-eps1') <= (1-l1)(1-l2)");
  require_le(10, 1 - p.eps2p, 1 - p.lambda3, "(1-eps2') <= (1-l3)");
  require_le(11, 1 - p.delta1p,
             (1 - p.eta1) * (1 - p.eta2) * (1 - p.eta3) * (1 - p.eta4),
             "(1-delta1') <= (1-eta1)(1-eta2)(1-eta3)(1-eta4)");
  return out;
}

namespace {

// Derived error probabilities back off by this much so that products clear
// their bound despite rounding.
constexpr double kBackoff = 1e-12;

double backed_off(double raw) { return raw > kBackoff ? raw - kBackoff : 0.0; }

}  // namespace

SynthesisResult synthesize(const ClientPolytope& client) {
  SynthesisResult result;
  if (client.eps >= 1.0 || client.delta >= 1.0) {
    result.infeasibility =
        "error budget of 1 leaves no probability mass to split";
    return result;
  }
  client.check();

  InternalParams p;
  const double eps = client.eps, delta = client.delta;

  p.eps1 = eps / 2;
  p.eps2 = eps / 2;
  p.gamma1 = backed_off(eps / 2);
  p.gamma2 = backed_off(eps / 2);
  p.delta1 = delta;

  // beta is shared between the eps1 chain (constr1) and the delta chain
  // (constr4); it gets the smaller of the two even-split shares.
  double share_eps = std::sqrt(1 - p.eps1);
  double share_delta = std::cbrt(1 - delta);
  double keep_beta = std::max(share_eps, share_delta);
  p.beta = backed_off(1 - keep_beta);

  p.eps1p = backed_off(1 - (1 - p.eps1) / (1 - p.beta));
  p.eps2p = p.eps2;

  double residual4 = (1 - delta) / (1 - p.beta);
  if (residual4 > 1.0) residual4 = 1.0;
  double half4 = std::sqrt(residual4);
  p.alpha = backed_off(1 - half4);
  p.delta1p = p.alpha;

  double quarter11 = std::pow(1 - p.delta1p, 0.25);
  p.eta1 = p.eta2 = p.eta3 = p.eta4 = backed_off(1 - quarter11);

  // Lambdas must clear constr6, constr9 and constr10 simultaneously.
  double a6 = 1 - p.eps1p;
  double b6 = 1 - p.eps2p;
  double product6 = a6 * b6 / (1 - p.gamma1);
  if (product6 > 1.0) {
    result.infeasibility = "constr6 binding: (1-eps1')(1-eps2') > (1-gamma1)";
    return result;
  }
  double keep_lambda = std::max({std::cbrt(product6), std::sqrt(a6), b6});
  p.lambda1 = p.lambda2 = p.lambda3 = backed_off(1 - keep_lambda);

  p.w_h = 0.1 * client.u;
  p.g = 0.5 * client.u;
  p.w_on = (p.g - p.w_h) / 2;
  p.w_off = p.w_on;
  p.w_a = 0.1 * (client.v - client.u);
  p.w_th = p.w_a;

  auto violations = validate_constraints(p, client);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "synthesized assignment violates";
    for (const auto& viol : violations) msg << " constr" << viol.id;
    result.infeasibility = msg.str();
    return result;
  }
  p.check_ranges();
  result.feasible = true;
  result.params = p;
  return result;
}

namespace {

const std::vector<std::pair<const char*, double InternalParams::*>>& fields() {
  static const std::vector<std::pair<const char*, double InternalParams::*>> f = {
      {"eps1", &InternalParams::eps1},       {"eps2", &InternalParams::eps2},
      {"eps1p", &InternalParams::eps1p},     {"eps2p", &InternalParams::eps2p},
      {"alpha", &InternalParams::alpha},     {"beta", &InternalParams::beta},
      {"delta1", &InternalParams::delta1},   {"delta1p", &InternalParams::delta1p},
      {"gamma1", &InternalParams::gamma1},   {"gamma2", &InternalParams::gamma2},
      {"eta1", &InternalParams::eta1},       {"eta2", &InternalParams::eta2},
      {"eta3", &InternalParams::eta3},       {"eta4", &InternalParams::eta4},
      {"lambda1", &InternalParams::lambda1}, {"lambda2", &InternalParams::lambda2},
      {"lambda3", &InternalParams::lambda3}, {"w_a", &InternalParams::w_a},
      {"w_h", &InternalParams::w_h},         {"g", &InternalParams::g},
      {"w_on", &InternalParams::w_on},       {"w_off", &InternalParams::w_off},
      {"w_th", &InternalParams::w_th},
  };
  return f;
}

}  // namespace

std::string params_to_text(const InternalParams& p) {
  std::ostringstream out;
  char buf[64];
  for (const auto& [name, member] : fields()) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.*member);
    out << name << " = " << buf << '\n';
  }
  return out.str();
}

InternalParams params_from_text(const std::string& text) {
  InternalParams p;
  std::map<std::string, double InternalParams::*> lookup;
  for (const auto& [name, member] : fields()) lookup[name] = member;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ParseError("expected key = value", lineno, 1);
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = lookup.find(key);
    if (it == lookup.end())
      throw ParseError("unknown parameter: " + key, lineno, 1);
    try {
      p.*(it->second) = std::stod(value);
    } catch (const std::exception&) {
      throw ParseError("malformed value for " + key, lineno, 1);
    }
  }
  return p;
}

}  // namespace crnwd

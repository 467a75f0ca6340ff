#include "disp/bounds.hpp"
#include "disp/error.hpp"

#include <cmath>
#include <limits>

namespace disp {

namespace {

void check_inputs(double mu, double c) {
  if (!(mu >= 0 && mu <= 1)) throw Error("BadMu", "margin must lie in [0,1]");
  if (!(c >= 0 && c < 1)) throw Error("BadCost", "cost must lie in [0,1)");
}

} // namespace

UniversalBounds universal_bounds(double mu, double c) {
  check_inputs(mu, c);
  return {c, c + mu * (1.0 - c), 1.0 - mu};
}

double family_bound(DemandFamily family, double mu, double c) {
  check_inputs(mu, c);
  switch (family) {
    case DemandFamily::Unit: return 1.0 - mu;
    case DemandFamily::Linear: return 0.5 * (1.0 + std::sqrt(1.0 - mu));
    case DemandFamily::Exponential: return 1.0;
    case DemandFamily::Ces: {
      double d = 1.0 - c;
      double den = 1.0 - mu * d;
      return (1.0 - mu) / (den * den);
    }
    case DemandFamily::Table: break;
  }
  throw Error("UnknownFamily", "no closed-form bound for this demand family");
}

std::vector<EnvelopePoint> envelope_sweep(const std::vector<DemandSpec>& specs, double c,
                                          const std::vector<double>& mu_grid) {
  std::vector<EnvelopePoint> out;
  out.reserve(specs.size() * mu_grid.size());
  for (const auto& spec : specs) {
    bool globally_ok = invertibility_check(spec, c).ok;
    double param = 0;
    switch (spec.family) {
      case DemandFamily::Linear: param = spec.b; break;
      case DemandFamily::Exponential: param = spec.beta; break;
      case DemandFamily::Ces: param = spec.eta; break;
      default: break;
    }
    for (double mu : mu_grid) {
      check_inputs(mu, c);
      bool fl = false;
      double tau = phi_c_root(spec, c, mu, &fl);
      out.push_back(EnvelopePoint{spec.label(), param, mu, tau,
                                  globally_ok && !fl && std::isfinite(tau)});
    }
  }
  return out;
}

std::vector<DemandSpec> default_envelope_families(double c) {
  double d = 1.0 - c;
  return {unit_demand(),
          linear_demand(0.5 / d),
          linear_demand(1.0 / d),
          exponential_demand(0.5 / d),
          exponential_demand(1.0 / d),
          ces_demand(0.5),
          ces_demand(1.0),
          ces_demand(1.3),
          ces_demand(2.0)};
}

CriticalElasticity critical_elasticity(double c) {
  if (!(c >= 0.05 && c <= 0.95))
    throw Error("NoTransition", "cost must leave a usable ces feasibility window");
  const double d = 1.0 - c;

  // tau(mu) >= 1 everywhere on the feasible range, up to flagged boundary points
  auto holds = [&](double eta) {
    DemandSpec spec = ces_demand(eta);
    const int grid = 201;
    for (int i = 0; i < grid; ++i) {
      double mu = double(i) / double(grid - 1);
      bool fl = false;
      double tau = phi_c_root(spec, c, mu, &fl);
      if (fl || !std::isfinite(tau)) continue;
      if (tau < 1.0 - 1e-9) return false;
    }
    return true;
  };

  double lo = 0.5 / d, hi = 1.5 / d;
  if (holds(lo) || !holds(hi))
    throw Error("NoTransition", "no under- to over-shifting transition in the bracket");
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (holds(mid)) hi = mid; else lo = mid;
  }
  return {hi, c,
          "smallest ces eta with tau(mu) >= 1 - 1e-9 at every feasible mu on a 201-point grid"};
}

} // namespace disp

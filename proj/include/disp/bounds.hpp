#ifndef DISP_BOUNDS_HPP
#define DISP_BOUNDS_HPP

#include "disp/curvature.hpp"

#include <string>
#include <vector>

namespace disp {

struct UniversalBounds {
  double price_lo = 0; // c
  double price_hi = 0; // c + mu(1-c)
  double tau_lo = 0;   // 1 - mu
};

// Demand-free envelope: any admissible demand prices in [price_lo, price_hi]
// and passes through at least tau_lo at margin mu.
UniversalBounds universal_bounds(double mu, double c);

// Family ceilings: Linear (1+sqrt(1-mu))/2, Exponential 1,
// Ces (eta=1 closed form) (1-mu)/(1-mu(1-c))^2, Unit 1-mu exactly.
double family_bound(DemandFamily family, double mu, double c);

struct EnvelopePoint {
  std::string family; // demand label, e.g. "ces:eta=2"
  double param = 0;   // the family parameter (0 for unit/table)
  double mu = 0;
  double tau = 0;
  bool feasible = true; // margin map invertible at this point
};

// (mu, tau) sweep for plotting: one point per (spec, mu). Points where the
// margin map is not invertible keep their root-branch tau but are marked
// infeasible rather than clamped or dropped.
std::vector<EnvelopePoint> envelope_sweep(const std::vector<DemandSpec>& specs, double c,
                                          const std::vector<double>& mu_grid);

// The sweep used by the CLI: unit, linear b in {0.5/d, 1/d}, exponential
// beta in {0.5/d, 1/d}, ces eta in {0.5, 1, 1.3, 2}.
std::vector<DemandSpec> default_envelope_families(double c);

struct CriticalElasticity {
  double eta_star = 0;
  double c = 0;
  std::string criterion;
};

// Smallest ces elasticity at which tau(mu) >= 1 across the entire feasible
// mu-range at cost c, found by bisection. Equals 1/(1-c) analytically; the
// numeric search is kept as the defining computation.
CriticalElasticity critical_elasticity(double c);

} // namespace disp

#endif

#ifndef DISP_CURVATURE_HPP
#define DISP_CURVATURE_HPP

#include <string>
#include <vector>

namespace disp {

enum class DemandFamily { Unit, Linear, Exponential, Ces, Table };

// A demand curve x(p) on [0,1]: continuous, weakly decreasing, x(1) > 0.
// Families: Unit x=1; Linear x=1+b(1-p); Exponential x=exp(beta(1-p));
// Ces x=p^-eta; Table = monotone C1 interpolation of given knots.
struct DemandSpec {
  DemandFamily family = DemandFamily::Unit;
  double b = 0;    // linear slope
  double beta = 0; // exponential rate
  double eta = 0;  // ces elasticity
  // table knots and precomputed interpolant slopes
  std::vector<double> knot_p, knot_x, knot_d;

  std::string label() const; // e.g. "linear:b=2"
};

DemandSpec unit_demand();
DemandSpec linear_demand(double b);
DemandSpec exponential_demand(double beta);
DemandSpec ces_demand(double eta);
// Shape-preserving cubic interpolation of (p, x) knots; p ascending and spanning
// [0,1], x positive and weakly decreasing. With normalize, x is rescaled so x(1)=1.
DemandSpec table_demand(std::vector<double> p, std::vector<double> x, bool normalize = false);

double demand_eval(const DemandSpec& spec, double p);
double demand_deriv(const DemandSpec& spec, double p);

struct InvertibilityReport {
  bool ok = true;
  double violation_p = 0; // where the margin slope turns nonpositive, when !ok
  double min_slope = 0;   // min over [c,1] of x(p) + (p-c) x'(p)
};

// Checks that (p-c)x(p) is strictly increasing on [c,1]. Closed-form for the
// four analytic families (Ces with eta <= 1 is accepted; see docs for the
// eta=1, c=0 knife edge), dense scan with refinement for tables.
InvertibilityReport invertibility_check(const DemandSpec& spec, double c);

// Normalized margin mu = (p-c)x(p) / ((1-c)x(1)), in [0,1] for p in [c,1].
double mu_of_price(const DemandSpec& spec, double c, double p);

// Inverse margin map: the unique p in [c,1] with mu_of_price(p) = mu.
// Validates invertibility first; closed forms for Unit/Linear/Ces(eta=1),
// bracketed bisection to width 1e-13 otherwise.
double phi(const DemandSpec& spec, double c, double mu);

// Same root solve without the invertibility gate. With a non-invertible spec this
// still returns the lowest root (the increasing branch); callers own the caveats.
double phi_root(const DemandSpec& spec, double c, double mu);

// Pass-through kernel: d phi / d c at fixed mu,
//   tau = x(p)(1-p) / ((1-c) [x(p) + (p-c) x'(p)]),  p = phi(mu).
// When the margin slope at p falls below 1e-9 the value is unreliable and
// *flagged (if given) is set instead of throwing.
double phi_c(const DemandSpec& spec, double c, double mu, bool* flagged = nullptr);
double phi_c_root(const DemandSpec& spec, double c, double mu, bool* flagged = nullptr);

} // namespace disp

#endif

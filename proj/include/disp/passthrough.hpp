#ifndef DISP_PASSTHROUGH_HPP
#define DISP_PASSTHROUGH_HPP

#include "disp/curvature.hpp"
#include "disp/margin_game.hpp"

#include <optional>
#include <string>
#include <vector>

namespace disp {

struct PassThroughReport {
  int firm = 1;
  double c = 0;
  std::vector<double> u, mu, price, tau_q;
  double B = 0;         // integral of 1/(p(u)-c) over u
  double mean_paid = 0; // transaction-weighted mean price, c + 1/B
  double tau_trans = 0;
  std::optional<double> K; // integral of 1/mu(u), set when the support stays above 0
  bool unit_demand = false;
  std::vector<std::string> flags;
};

// Prices and quantile pass-through rates along a u-grid: p(u) = phi(mu(u)),
// tau_q(u) = phi_c(mu(u)). Atoms show up as constant runs.
struct QuantileCurve {
  std::vector<double> u, mu, price, tau_q;
  std::vector<std::string> flags;
};
QuantileCurve quantile_passthrough(const EquilibriumProfile& profile, int firm,
                                   const DemandSpec& spec, double c,
                                   const std::vector<double>& grid);

// Mass of transactions at price p: profit / (p - c), with the margin-game profit
// rescaled into price space by (1-c) x(1).
double transaction_mass(const EquilibriumProfile& profile, int firm,
                        const DemandSpec& spec, double c, double p);

// B = integral over u of 1/(p(u)-c); needs the margin support bounded above 0.
double harmonic_B(const EquilibriumProfile& profile, int firm,
                  const DemandSpec& spec, double c);

double mean_paid(const EquilibriumProfile& profile, int firm,
                 const DemandSpec& spec, double c);

// tau_trans = 1 + [integral of (tau_q(u)-1)/(p(u)-c)^2 du] / B^2
double transaction_passthrough(const EquilibriumProfile& profile, int firm,
                               const DemandSpec& spec, double c);

// K = integral over u of 1/mu(u) (atoms contribute mass/location). Under unit
// demand, mean_paid = c + (1-c)/K and tau_trans = 1 - 1/K at every cost.
double unit_K(const EquilibriumProfile& profile, int firm);

// Exchangeable-structure shortcut: tau_trans = 1 - rho / Hbar.
double symmetric_stat(const ConsiderationStructure& cs);

// Transaction-weighted CDF at price p.
double transaction_cdf(const EquilibriumProfile& profile, int firm,
                       const DemandSpec& spec, double c, double p);

PassThroughReport passthrough_report(const EquilibriumProfile& profile, int firm,
                                     const DemandSpec& spec, double c,
                                     int grid_size = 201);

} // namespace disp

#endif

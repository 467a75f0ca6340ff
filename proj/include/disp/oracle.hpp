#ifndef DISP_ORACLE_HPP
#define DISP_ORACLE_HPP

#include "disp/curvature.hpp"
#include "disp/margin_game.hpp"

#include <cstdint>
#include <vector>

namespace disp {

struct DeviationReport {
  std::vector<double> firm_gain; // max over the price grid of Pi_i(p) - pi_i(c)
  double max_gain = 0;
  int worst_firm = 0;
  double worst_price = 0;
  int grid_size = 0;

  bool pass(double tol = 1e-6) const { return max_gain <= tol; }
};

// Best-response check in price space: maps the margin profile through phi and
// scans each firm's unilateral deviations Pi_i(p) = (p-c) x(p) q_i(p) on a grid
// (uniform plus mapped piece boundaries and atoms), with uniform tie splitting.
DeviationReport price_game_deviation_gap(const ConsiderationStructure& cs,
                                         const EquilibriumProfile& profile,
                                         const DemandSpec& spec, double c,
                                         int grid_size = 5001);

struct SimConfig {
  long long consumers = 100000;
  std::uint64_t seed = 1;
  double c = 0;
  DemandSpec demand;
  int price_grid_size = 2001; // resolution of the emitted empirical CDF
};

struct SimFirmStats {
  int firm = 0;
  long long posted = 0;       // price draws observed (consumers who saw the firm)
  long long transactions = 0; // consumers who bought here
  double profit = 0;          // per-consumer average of (p - c) x(p)
  double profit_se = 0;
  double mean_paid = 0; // quantity-weighted average transaction price
  double mean_paid_se = 0;
  double ks_distance = 0; // empirical posted CDF vs the analytic one
};

struct SimResult {
  std::vector<SimFirmStats> firms;
  double market_mean_paid = 0;
  double market_mean_paid_se = 0;
  long long consumers = 0;
  std::uint64_t seed = 0;
  // empirical posted-price CDF per firm, sampled on a price grid
  std::vector<double> cdf_prices;
  std::vector<std::vector<double>> cdf_values;
};

// Draws each consumer's consideration set and the considered firms' prices
// (inverse-CDF through the margin quantiles and phi), splits ties uniformly,
// and aggregates empirical statistics. Deterministic for a fixed seed.
SimResult simulate(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                   const SimConfig& config);

struct McPassthrough {
  double c_lo = 0, c_hi = 0;
  std::vector<double> tau;    // per firm: (mean_paid_hi - mean_paid_lo) / (c_hi - c_lo)
  std::vector<double> tau_se;
  double market_tau = 0, market_tau_se = 0;
};

// Finite-difference transaction pass-through with common random numbers across
// the two cost levels (same seed, same per-consumer draws).
McPassthrough mc_passthrough(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                             const SimConfig& config, double c_lo, double c_hi);

} // namespace disp

#endif

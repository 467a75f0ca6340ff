#include "disp/passthrough.hpp"
#include "disp/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace disp {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kQuadTol = 1e-11;
constexpr int kQuadDepth = 12;

// integral over u in [0,1] of f(mu(u)): adaptive quadrature piece by piece,
// atoms enter as mass * f(location)
template <typename F>
double integrate_over_quantiles(const MarginDistribution& d, F&& f) {
  double acc = 0;
  for (const auto& p : d.pieces) {
    if (p.u_hi - p.u_lo <= 0) continue;
    acc += GK::integrate([&](double u) { return f(p.quantile(u)); }, p.u_lo, p.u_hi,
                         kQuadDepth, kQuadTol);
  }
  for (const auto& a : d.atoms) acc += a.mass * f(a.location);
  return acc;
}

const MarginDistribution& dist_of(const EquilibriumProfile& profile, int firm) {
  if (firm < 1 || firm > int(profile.dists.size()))
    throw Error("BadFirmIndex", "firm " + std::to_string(firm) + " not in profile");
  return profile.dists[std::size_t(firm - 1)];
}

void require_support_above_cost(const MarginDistribution& d) {
  if (!(d.support_lo > 0))
    throw Error("SupportTouchesCost",
                "margin support reaches 0, the harmonic transaction integral diverges");
}

void require_invertible(const DemandSpec& spec, double c) {
  InvertibilityReport inv = invertibility_check(spec, c);
  if (!inv.ok)
    throw Error("InvertibilityViolated", spec.label() + " margin is not increasing on [c,1]");
}

} // namespace

QuantileCurve quantile_passthrough(const EquilibriumProfile& profile, int firm,
                                   const DemandSpec& spec, double c,
                                   const std::vector<double>& grid) {
  require_invertible(spec, c);
  const auto& d = dist_of(profile, firm);
  QuantileCurve out;
  out.u = grid;
  bool any_flag = false;
  for (double u : grid) {
    if (!(u >= 0 && u <= 1)) throw Error("BadGrid", "quantile grid point outside [0,1]");
    double mu = d.quantile(u);
    bool fl = false;
    out.mu.push_back(mu);
    out.price.push_back(phi_root(spec, c, mu));
    out.tau_q.push_back(phi_c_root(spec, c, mu, &fl));
    any_flag = any_flag || fl;
  }
  if (any_flag)
    out.flags.push_back("margin slope within 1e-9 of zero at some grid points; tau_q unreliable there");
  return out;
}

double transaction_mass(const EquilibriumProfile& profile, int firm,
                        const DemandSpec& spec, double c, double p) {
  if (p - c < 1e-12) throw Error("PriceAtCost", "transaction mass diverges as p -> c");
  double scale = (1.0 - c) * demand_eval(spec, 1.0);
  return scale * profile.profits[std::size_t(firm - 1)] / (p - c);
}

double harmonic_B(const EquilibriumProfile& profile, int firm,
                  const DemandSpec& spec, double c) {
  require_invertible(spec, c);
  const auto& d = dist_of(profile, firm);
  require_support_above_cost(d);
  return integrate_over_quantiles(
      d, [&](double mu) { return 1.0 / (phi_root(spec, c, mu) - c); });
}

double mean_paid(const EquilibriumProfile& profile, int firm,
                 const DemandSpec& spec, double c) {
  return c + 1.0 / harmonic_B(profile, firm, spec, c);
}

double transaction_passthrough(const EquilibriumProfile& profile, int firm,
                               const DemandSpec& spec, double c) {
  require_invertible(spec, c);
  const auto& d = dist_of(profile, firm);
  require_support_above_cost(d);
  double B = integrate_over_quantiles(
      d, [&](double mu) { return 1.0 / (phi_root(spec, c, mu) - c); });
  double I = integrate_over_quantiles(d, [&](double mu) {
    double p = phi_root(spec, c, mu);
    double tau = phi_c_root(spec, c, mu);
    return (tau - 1.0) / ((p - c) * (p - c));
  });
  return 1.0 + I / (B * B);
}

double unit_K(const EquilibriumProfile& profile, int firm) {
  const auto& d = dist_of(profile, firm);
  require_support_above_cost(d);
  return integrate_over_quantiles(d, [](double mu) { return 1.0 / mu; });
}

double symmetric_stat(const ConsiderationStructure& cs) {
  if (!cs.is_exchangeable())
    throw Error("NotSymmetric", "sufficient statistic requires an exchangeable structure");
  FirmStats st = cs.firm_stats(1);
  if (st.rho <= 0) throw Error("SupportTouchesCost", "rho = 0: statistic undefined");
  return 1.0 - st.rho / cs.pgf(1).mean_integral();
}

double transaction_cdf(const EquilibriumProfile& profile, int firm,
                       const DemandSpec& spec, double c, double p) {
  require_invertible(spec, c);
  const auto& d = dist_of(profile, firm);
  require_support_above_cost(d);
  if (p >= 1.0) return 1.0;
  if (p <= c) return 0.0;
  double mu_star = mu_of_price(spec, c, p);
  double B = 0, part = 0;
  for (const auto& pc : d.pieces) {
    auto f = [&](double u) { return 1.0 / (phi_root(spec, c, pc.quantile(u)) - c); };
    double full = GK::integrate(f, pc.u_lo, pc.u_hi, kQuadDepth, kQuadTol);
    B += full;
    if (mu_star >= pc.mu_hi) {
      part += full;
    } else if (mu_star > pc.mu_lo) {
      double u_star = pc.cdf(mu_star);
      part += GK::integrate(f, pc.u_lo, u_star, kQuadDepth, kQuadTol);
    }
  }
  for (const auto& a : d.atoms) {
    double w = a.mass / (phi_root(spec, c, a.location) - c);
    B += w;
    if (a.location <= mu_star + 1e-15) part += w;
  }
  return part / B;
}

PassThroughReport passthrough_report(const EquilibriumProfile& profile, int firm,
                                     const DemandSpec& spec, double c, int grid_size) {
  if (grid_size < 2) throw Error("BadGrid", "quantile grid needs >= 2 points");
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) grid[std::size_t(i)] = double(i) / double(grid_size - 1);

  PassThroughReport rep;
  rep.firm = firm;
  rep.c = c;
  rep.unit_demand = spec.family == DemandFamily::Unit;

  QuantileCurve qc = quantile_passthrough(profile, firm, spec, c, grid);
  rep.u = std::move(qc.u);
  rep.mu = std::move(qc.mu);
  rep.price = std::move(qc.price);
  rep.tau_q = std::move(qc.tau_q);
  rep.flags = std::move(qc.flags);

  const auto& d = dist_of(profile, firm);
  if (d.support_lo > 0) {
    rep.B = harmonic_B(profile, firm, spec, c);
    rep.mean_paid = c + 1.0 / rep.B;
    rep.tau_trans = transaction_passthrough(profile, firm, spec, c);
    rep.K = unit_K(profile, firm);
  } else {
    rep.B = std::numeric_limits<double>::infinity();
    rep.mean_paid = c;
    rep.tau_trans = std::numeric_limits<double>::quiet_NaN();
    rep.flags.push_back("support touches cost: transaction statistics undefined");
  }
  return rep;
}

} // namespace disp

#include "disp/curvature.hpp"
#include "disp/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace disp {

namespace {

constexpr double kBisectWidth = 1e-13;
constexpr double kSlopeFloor = 1e-9; // below this margin slope, phi_c is flagged

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_cost(double c) {
  if (!(c >= 0.0 && c < 1.0))
    throw Error("BadCost", "marginal cost must lie in [0,1), got " + fmt_num(c));
}

std::size_t table_interval(const std::vector<double>& knots, double p) {
  // index i with knots[i] <= p <= knots[i+1]
  auto it = std::upper_bound(knots.begin(), knots.end(), p);
  std::size_t i = std::size_t(std::max<std::ptrdiff_t>(1, it - knots.begin())) - 1;
  return std::min(i, knots.size() - 2);
}

double table_eval(const DemandSpec& s, double p, bool deriv) {
  std::size_t i = table_interval(s.knot_p, p);
  double h = s.knot_p[i + 1] - s.knot_p[i];
  double t = (p - s.knot_p[i]) / h;
  double x0 = s.knot_x[i], x1 = s.knot_x[i + 1];
  double d0 = s.knot_d[i], d1 = s.knot_d[i + 1];
  if (!deriv) {
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1;
  }
  double g00 = 6 * t * (t - 1);
  double g10 = (1 - t) * (1 - 3 * t);
  double g01 = -g00;
  double g11 = t * (3 * t - 2);
  return (g00 * x0 + g01 * x1) / h + g10 * d0 + g11 * d1;
}

// margin slope d/dp [(p-c)x(p)] = x(p) + (p-c)x'(p)
double margin_slope(const DemandSpec& s, double c, double p) {
  switch (s.family) {
    case DemandFamily::Unit: return 1.0;
    case DemandFamily::Linear: return 1.0 + s.b * (1.0 + c - 2.0 * p);
    case DemandFamily::Exponential:
      return std::exp(s.beta * (1.0 - p)) * (1.0 - s.beta * (p - c));
    case DemandFamily::Ces:
      return std::pow(p, -s.eta - 1.0) * ((1.0 - s.eta) * p + s.eta * c);
    case DemandFamily::Table:
      return table_eval(s, p, false) + (p - c) * table_eval(s, p, true);
  }
  return 0;
}

} // namespace

std::string DemandSpec::label() const {
  switch (family) {
    case DemandFamily::Unit: return "unit";
    case DemandFamily::Linear: return "linear:b=" + fmt_num(b);
    case DemandFamily::Exponential: return "exp:beta=" + fmt_num(beta);
    case DemandFamily::Ces: return "ces:eta=" + fmt_num(eta);
    case DemandFamily::Table: return "table[" + std::to_string(knot_p.size()) + " knots]";
  }
  return "?";
}

DemandSpec unit_demand() { return {}; }

DemandSpec linear_demand(double b) {
  if (!(b >= 0)) throw Error("BadDemandParam", "linear slope b must be >= 0");
  DemandSpec s;
  s.family = DemandFamily::Linear;
  s.b = b;
  return s;
}

DemandSpec exponential_demand(double beta) {
  if (!(beta >= 0)) throw Error("BadDemandParam", "exponential rate beta must be >= 0");
  DemandSpec s;
  s.family = DemandFamily::Exponential;
  s.beta = beta;
  return s;
}

DemandSpec ces_demand(double eta) {
  if (!(eta >= 0)) throw Error("BadDemandParam", "ces elasticity eta must be >= 0");
  DemandSpec s;
  s.family = DemandFamily::Ces;
  s.eta = eta;
  return s;
}

DemandSpec table_demand(std::vector<double> p, std::vector<double> x, bool normalize) {
  if (p.size() != x.size() || p.size() < 2)
    throw Error("BadTable", "need >= 2 (p, x) knots of equal length");
  if (std::abs(p.front()) > 1e-12 || std::abs(p.back() - 1.0) > 1e-12)
    throw Error("BadTable", "knots must span [0,1]");
  p.front() = 0.0;
  p.back() = 1.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (!(p[i + 1] > p[i])) throw Error("BadTable", "p knots must be strictly ascending");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0)) throw Error("BadTable", "x values must be strictly positive");
    if (i && x[i] > x[i - 1] + 1e-12) throw Error("BadTable", "x values must be weakly decreasing");
  }
  if (normalize) {
    double xn = x.back();
    for (double& v : x) v /= xn;
  }

  // Fritsch-Carlson monotone slopes
  std::size_t n = p.size();
  std::vector<double> h(n - 1), sec(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = p[i + 1] - p[i];
    sec[i] = std::min(0.0, (x[i + 1] - x[i]) / h[i]); // weakly decreasing data
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (sec[i - 1] == 0.0 || sec[i] == 0.0) {
      d[i] = 0.0;
    } else {
      double w1 = 2 * h[i] + h[i - 1];
      double w2 = h[i] + 2 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double s0, double s1) {
    double d0 = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d0 > 0) d0 = 0; // keep weakly decreasing
    if (std::abs(d0) > 3 * std::abs(s0)) d0 = 3 * s0;
    return d0;
  };
  d.front() = n == 2 ? sec[0] : end_slope(h[0], h[1], sec[0], sec[1]);
  d.back() = n == 2 ? sec[0] : end_slope(h[n - 2], h[n - 3], sec[n - 2], sec[n - 3]);

  DemandSpec s;
  s.family = DemandFamily::Table;
  s.knot_p = std::move(p);
  s.knot_x = std::move(x);
  s.knot_d = std::move(d);
  return s;
}

double demand_eval(const DemandSpec& spec, double p) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
    throw Error("OutOfDomain", "price " + fmt_num(p) + " outside [0,1]");
  p = std::clamp(p, 0.0, 1.0);
  switch (spec.family) {
    case DemandFamily::Unit: return 1.0;
    case DemandFamily::Linear: return 1.0 + spec.b * (1.0 - p);
    case DemandFamily::Exponential: return std::exp(spec.beta * (1.0 - p));
    case DemandFamily::Ces: return std::pow(p, -spec.eta); // +inf at p=0 for eta>0
    case DemandFamily::Table: return table_eval(spec, p, false);
  }
  return 1.0;
}

double demand_deriv(const DemandSpec& spec, double p) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
    throw Error("OutOfDomain", "price " + fmt_num(p) + " outside [0,1]");
  p = std::clamp(p, 0.0, 1.0);
  switch (spec.family) {
    case DemandFamily::Unit: return 0.0;
    case DemandFamily::Linear: return -spec.b;
    case DemandFamily::Exponential: return -spec.beta * std::exp(spec.beta * (1.0 - p));
    case DemandFamily::Ces: return spec.eta == 0 ? 0.0 : -spec.eta * std::pow(p, -spec.eta - 1.0);
    case DemandFamily::Table: return table_eval(spec, p, true);
  }
  return 0.0;
}

InvertibilityReport invertibility_check(const DemandSpec& spec, double c) {
  check_cost(c);
  InvertibilityReport r;
  const double d = 1.0 - c;
  switch (spec.family) {
    case DemandFamily::Unit:
      r.min_slope = 1.0;
      return r;
    case DemandFamily::Linear:
      // slope is affine, minimized at p=1
      r.min_slope = 1.0 - spec.b * d;
      r.ok = r.min_slope >= -1e-12;
      if (!r.ok) r.violation_p = std::min(1.0, (1.0 + spec.b * (1.0 + c)) / (2.0 * spec.b));
      return r;
    case DemandFamily::Exponential:
      r.min_slope = 1.0 - spec.beta * d; // slope sign follows 1 - beta(p-c), worst at p=1
      r.ok = r.min_slope >= -1e-12;
      if (!r.ok) r.violation_p = c + 1.0 / spec.beta;
      return r;
    case DemandFamily::Ces: {
      r.min_slope = 1.0 - spec.eta * d; // value of (1-eta)p + eta c at p=1
      if (spec.eta <= 1.0) return r;    // increasing for all c (eta=1 needs c>0, see docs)
      r.ok = c >= 1.0 - 1.0 / spec.eta - 1e-12;
      if (!r.ok) r.violation_p = std::min(1.0, spec.eta * c / (spec.eta - 1.0));
      return r;
    }
    case DemandFamily::Table: {
      const int grid = 4001;
      double best = std::numeric_limits<double>::infinity(), best_p = c;
      for (int i = 0; i < grid; ++i) {
        double p = c + d * double(i) / double(grid - 1);
        double g = margin_slope(spec, c, p);
        if (g < best) { best = g; best_p = p; }
      }
      // refine around the scan minimum (slope is piecewise smooth)
      double lo = std::max(c, best_p - d / double(grid - 1));
      double hi = std::min(1.0, best_p + d / double(grid - 1));
      for (int it = 0; it < 80; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (margin_slope(spec, c, m1) < margin_slope(spec, c, m2)) hi = m2; else lo = m1;
      }
      double p = 0.5 * (lo + hi);
      double g = margin_slope(spec, c, p);
      if (g < best) { best = g; best_p = p; }
      r.min_slope = best;
      r.ok = best >= -1e-12;
      if (!r.ok) r.violation_p = best_p;
      return r;
    }
  }
  return r;
}

double mu_of_price(const DemandSpec& spec, double c, double p) {
  check_cost(c);
  if (p < c - 1e-12) throw Error("PriceBelowCost", "price " + fmt_num(p) + " below cost " + fmt_num(c));
  if (p > 1.0 + 1e-12) throw Error("PriceAboveOne", "price " + fmt_num(p) + " above 1");
  p = std::clamp(p, c, 1.0);
  if (p == c) return 0.0;
  return (p - c) * demand_eval(spec, p) / ((1.0 - c) * demand_eval(spec, 1.0));
}

double phi_root(const DemandSpec& spec, double c, double mu) {
  check_cost(c);
  if (!(mu >= -1e-15 && mu <= 1.0 + 1e-15))
    throw Error("BadMu", "margin " + fmt_num(mu) + " outside [0,1]");
  mu = std::clamp(mu, 0.0, 1.0);
  if (mu == 0.0) return c;
  if (mu == 1.0) return 1.0;
  const double d = 1.0 - c;

  switch (spec.family) {
    case DemandFamily::Unit:
      return c + mu * d;
    case DemandFamily::Linear: {
      if (spec.b == 0) return c + mu * d;
      // b m^2 - m(1+bd) + mu d = 0, smaller root
      double q = 1.0 + spec.b * d;
      double m = (q - std::sqrt(q * q - 4.0 * spec.b * mu * d)) / (2.0 * spec.b);
      return c + m;
    }
    case DemandFamily::Ces:
      if (spec.eta == 0) return c + mu * d;
      if (spec.eta == 1.0) return c / (1.0 - mu * d);
      break;
    default:
      break;
  }

  // bracketed bisection for (p-c)x(p) = mu (1-c) x(1); signs at the ends are known
  const double target = mu * d * demand_eval(spec, 1.0);
  double lo = c, hi = 1.0;
  while (hi - lo > kBisectWidth) {
    double mid = 0.5 * (lo + hi);
    double f = (mid - c) * demand_eval(spec, mid) - target;
    if (f < 0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double phi(const DemandSpec& spec, double c, double mu) {
  InvertibilityReport inv = invertibility_check(spec, c);
  if (!inv.ok)
    throw Error("InvertibilityViolated",
                spec.label() + " margin is not increasing on [" + fmt_num(c) + ",1] (slope " +
                    fmt_num(inv.min_slope) + " at p=" + fmt_num(inv.violation_p) + ")");
  return phi_root(spec, c, mu);
}

double phi_c_root(const DemandSpec& spec, double c, double mu, bool* flagged) {
  double p = phi_root(spec, c, mu);
  const double d = 1.0 - c;
  if (spec.family == DemandFamily::Ces) {
    // x cancels: tau = p(1-p) / ((1-c)((1-eta)p + eta c)); safe at small p
    double den = (1.0 - spec.eta) * p + spec.eta * c;
    double g = p > 0 ? std::pow(p, -spec.eta - 1.0) * den : (spec.eta < 1 ? 1.0 : 0.0);
    if (g < kSlopeFloor && flagged) *flagged = true;
    if (p == 0.0) // c = 0, mu = 0
      return spec.eta < 1.0 ? 1.0 / (1.0 - spec.eta) : std::numeric_limits<double>::quiet_NaN();
    return p * (1.0 - p) / (d * den);
  }
  double x = demand_eval(spec, p);
  double g = x + (p - c) * demand_deriv(spec, p);
  if (g < kSlopeFloor && flagged) *flagged = true;
  return x * (1.0 - p) / (d * g);
}

double phi_c(const DemandSpec& spec, double c, double mu, bool* flagged) {
  InvertibilityReport inv = invertibility_check(spec, c);
  if (!inv.ok)
    throw Error("InvertibilityViolated",
                spec.label() + " margin is not increasing on [" + fmt_num(c) + ",1]");
  return phi_c_root(spec, c, mu, flagged);
}

} // namespace disp

#include "disp/margin_game.hpp"
#include "disp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace disp {

namespace {

double horner(const std::vector<double>& coeffs, double s) {
  double acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

// invert an increasing polynomial H on [0,1]: H(s) = t
double invert_pgf(const std::vector<double>& coeffs, double t) {
  double lo = 0, hi = 1;
  while (hi - lo > 1e-14) {
    double mid = 0.5 * (lo + hi);
    if (horner(coeffs, mid) < t) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

constexpr double kTieTol = 1e-12;

// probability mass strictly below, tied with, and strictly above mu;
// atoms within kTieTol of mu count as tied so cdf and atom lookups agree
struct MassSplit { double below, tied, above; };

MassSplit split_at(const MarginDistribution& d, double mu) {
  double tied = 0, in_cdf = 0, out_cdf = 0;
  for (const auto& a : d.atoms)
    if (std::abs(a.location - mu) <= kTieTol) {
      tied += a.mass;
      (a.location <= mu ? in_cdf : out_cdf) += a.mass;
    }
  double f = d.cdf(mu);
  return {std::max(0.0, f - in_cdf), tied, std::max(0.0, 1.0 - f - out_cdf)};
}

} // namespace

double Piece::quantile(double u) const {
  u = std::clamp(u, u_lo, u_hi);
  double mu = 0;
  switch (kind) {
    case PieceKind::SymmetricPgf:
      mu = par[0] / horner(coeffs, 1.0 - u);
      break;
    case PieceKind::DuopolyF1:
      mu = par[0] / (1.0 - u * (1.0 - par[1]));
      break;
    case PieceKind::DuopolyF2:
      mu = par[0] / (1.0 - u * (1.0 - par[0]));
      break;
    case PieceKind::IndependentGamma:
      mu = par[2] / (par[1] * std::pow(1.0 - par[3] * u, par[0] - 1.0));
      break;
  }
  return std::clamp(mu, mu_lo, mu_hi);
}

double Piece::cdf(double mu) const {
  mu = std::clamp(mu, mu_lo, mu_hi);
  double u = 0;
  switch (kind) {
    case PieceKind::SymmetricPgf:
      u = 1.0 - invert_pgf(coeffs, par[0] / mu);
      break;
    case PieceKind::DuopolyF1:
      u = 1.0 - (par[0] / mu - par[1]) / (1.0 - par[1]);
      break;
    case PieceKind::DuopolyF2:
      u = 1.0 - (par[0] / (1.0 - par[0])) * (1.0 - mu) / mu;
      break;
    case PieceKind::IndependentGamma:
      u = (1.0 - std::pow(par[2] / (mu * par[1]), 1.0 / (par[0] - 1.0))) / par[3];
      break;
  }
  return std::clamp(u, u_lo, u_hi);
}

double MarginDistribution::cdf(double mu) const {
  double acc = 0;
  for (const auto& p : pieces) {
    if (mu >= p.mu_hi) acc = std::max(acc, p.u_hi);
    else if (mu >= p.mu_lo) acc = std::max(acc, p.cdf(mu));
  }
  for (const auto& a : atoms)
    if (mu >= a.location) acc = std::max(acc, a.u_hi);
  return acc;
}

double MarginDistribution::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  for (const auto& p : pieces)
    if (u >= p.u_lo - 1e-15 && u <= p.u_hi + 1e-15) return p.quantile(u);
  for (const auto& a : atoms)
    if (u >= a.u_lo - 1e-15 && u <= a.u_hi + 1e-15) return a.location;
  return u < 0.5 ? support_lo : support_hi; // unreachable for well-formed profiles
}

double MarginDistribution::atom_mass_at(double mu, double tol) const {
  double acc = 0;
  for (const auto& a : atoms)
    if (std::abs(a.location - mu) <= tol) acc += a.mass;
  return acc;
}

double cdf_eval(const MarginDistribution& d, double mu) { return d.cdf(mu); }
double quantile_eval(const MarginDistribution& d, double u) { return d.quantile(u); }

const char* solver_tag_name(SolverTag t) {
  switch (t) {
    case SolverTag::Symmetric: return "Symmetric";
    case SolverTag::Duopoly: return "Duopoly";
    case SolverTag::IndependentN: return "IndependentN";
    case SolverTag::PureBertrand: return "PureBertrand";
    case SolverTag::PureMonopoly: return "PureMonopoly";
  }
  return "?";
}

namespace {

MarginDistribution point_mass_dist(int firm, double location) {
  MarginDistribution d;
  d.firm = firm;
  d.support_lo = d.support_hi = location;
  d.atoms.push_back(Atom{location, 1.0, 0.0, 1.0});
  return d;
}

EquilibriumProfile degenerate_profile(const ConsiderationStructure& cs, SolverTag tag,
                                      double location, std::string note) {
  EquilibriumProfile pr;
  pr.tag = tag;
  pr.n = cs.n;
  pr.note = std::move(note);
  for (int i = 1; i <= cs.n; ++i) {
    pr.dists.push_back(point_mass_dist(i, location));
    pr.profits.push_back(location == 0.0 ? 0.0 : cs.firm_stats(i).reach);
  }
  return pr;
}

} // namespace

EquilibriumProfile solve_symmetric(const ConsiderationStructure& cs) {
  if (!cs.is_exchangeable())
    throw Error("NotSymmetric", "structure is not firm-exchangeable");
  FirmStats st = cs.firm_stats(1);
  if (st.reach <= 0)
    return degenerate_profile(cs, SolverTag::PureBertrand, 0.0, "no firm is ever considered");
  if (st.rho <= 1e-14)
    return degenerate_profile(cs, SolverTag::PureBertrand, 0.0,
                              "rho = 0: Bertrand point mass at mu = 0");
  if (st.rho >= 1.0 - 1e-14)
    return degenerate_profile(cs, SolverTag::PureMonopoly, 1.0,
                              "rho = 1: monopoly point mass at mu = 1");

  RivalCountPgf h = cs.pgf(1);
  EquilibriumProfile pr;
  pr.tag = SolverTag::Symmetric;
  pr.n = cs.n;
  for (int i = 1; i <= cs.n; ++i) {
    MarginDistribution d;
    d.firm = i;
    d.support_lo = st.rho;
    d.support_hi = 1.0;
    Piece p;
    p.kind = PieceKind::SymmetricPgf;
    p.mu_lo = st.rho;
    p.mu_hi = 1.0;
    p.u_lo = 0.0;
    p.u_hi = 1.0;
    p.par[0] = st.rho;
    p.coeffs = h.beta;
    d.pieces.push_back(std::move(p));
    pr.dists.push_back(std::move(d));
    pr.profits.push_back(st.rho * st.reach);
  }
  return pr;
}

EquilibriumProfile solve_duopoly(const ConsiderationStructure& cs) {
  if (cs.n != 2) throw Error("NotDuopoly", "duopoly solver requires n = 2");
  FirmStats s1 = cs.firm_stats(1), s2 = cs.firm_stats(2);
  int hi = s1.rho >= s2.rho ? 1 : 2;
  int lo = 3 - hi;
  double rho1 = std::max(s1.rho, s2.rho);
  double rho2 = std::min(s1.rho, s2.rho);
  if (rho2 <= 1e-14 || rho1 >= 1.0 - 1e-14)
    throw Error("DegenerateRho", "duopoly formulas need 0 < rho_i < 1 for both firms");

  double delta = (rho1 - rho2) / (1.0 - rho2);
  EquilibriumProfile pr;
  pr.tag = SolverTag::Duopoly;
  pr.n = 2;
  pr.dists.resize(2);
  pr.profits.resize(2);
  if (delta <= 1e-15) pr.note = "equal rho: atomless symmetric mixing";

  MarginDistribution dh;
  dh.firm = hi;
  dh.support_lo = rho1;
  dh.support_hi = 1.0;
  {
    Piece p;
    p.kind = PieceKind::DuopolyF1;
    p.mu_lo = rho1;
    p.mu_hi = 1.0;
    p.u_lo = 0.0;
    p.u_hi = 1.0 - delta;
    p.par[0] = rho1;
    p.par[1] = rho2;
    dh.pieces.push_back(p);
  }
  if (delta > 1e-15) dh.atoms.push_back(Atom{1.0, delta, 1.0 - delta, 1.0});

  MarginDistribution dl;
  dl.firm = lo;
  dl.support_lo = rho1;
  dl.support_hi = 1.0;
  {
    Piece p;
    p.kind = PieceKind::DuopolyF2;
    p.mu_lo = rho1;
    p.mu_hi = 1.0;
    p.u_lo = 0.0;
    p.u_hi = 1.0;
    p.par[0] = rho1;
    dl.pieces.push_back(p);
  }

  pr.dists[std::size_t(hi - 1)] = std::move(dh);
  pr.dists[std::size_t(lo - 1)] = std::move(dl);
  pr.profits[std::size_t(hi - 1)] = (hi == 1 ? s1 : s2).captive;
  pr.profits[std::size_t(lo - 1)] = rho1 * (lo == 1 ? s1 : s2).reach;
  return pr;
}

EquilibriumProfile solve_independent(const ConsiderationStructure& cs) {
  if (!cs.independent_lambda)
    throw Error("NotIndependent", "structure does not carry an independent lambda vector");
  const auto& lam = *cs.independent_lambda;
  for (double l : lam)
    if (!(l > 0 && l < 1)) throw Error("DegenerateLambda", "every lambda must lie in (0,1)");
  const int n = cs.n;
  if (n == 1)
    return degenerate_profile(cs, SolverTag::PureMonopoly, 1.0, "single firm");

  // firms sorted by reach, descending; l[r-1] is the r-th largest lambda
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return lam[std::size_t(a - 1)] > lam[std::size_t(b - 1)]; });
  std::vector<double> l(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) l[std::size_t(r - 1)] = lam[std::size_t(order[std::size_t(r - 1)] - 1)];

  double mu_low = 1.0;
  for (int r = 2; r <= n; ++r) mu_low *= 1.0 - l[std::size_t(r - 1)];

  // mubar[r] = top of rank-r support; mubar[2] = 1, decreasing in r
  std::vector<double> mubar(std::size_t(n + 2), 1.0);
  for (int k = 3; k <= n; ++k) {
    double num = 1.0;
    for (int h = 2; h <= k - 1; ++h) num *= 1.0 - l[std::size_t(h - 1)];
    mubar[std::size_t(k)] = num / std::pow(1.0 - l[std::size_t(k - 1)], double(k - 2));
  }
  mubar[std::size_t(n + 1)] = mu_low;

  // C[m] = prod_{h > m} (1 - lambda_h)
  std::vector<double> cm(std::size_t(n + 1), 1.0);
  for (int m = n - 1; m >= 2; --m)
    cm[std::size_t(m)] = cm[std::size_t(m + 1)] * (1.0 - l[std::size_t(m)]);

  double delta1 = 1.0 - l[1] / l[0];

  EquilibriumProfile pr;
  pr.tag = SolverTag::IndependentN;
  pr.n = n;
  pr.dists.resize(std::size_t(n));
  pr.profits.resize(std::size_t(n));
  if (delta1 <= 1e-15) pr.note = "top reaches tie: no atom at mu = 1";

  for (int r = 1; r <= n; ++r) {
    int firm = order[std::size_t(r - 1)];
    double lr = l[std::size_t(r - 1)];
    MarginDistribution d;
    d.firm = firm;
    d.support_lo = mu_low;
    d.support_hi = r == 1 ? 1.0 : mubar[std::size_t(r)];
    for (int m = n; m >= std::max(r, 2); --m) {
      double a = mubar[std::size_t(m + 1)], b = mubar[std::size_t(m)];
      if (b - a <= 1e-15) continue; // collapsed by lambda ties
      Piece p;
      p.kind = PieceKind::IndependentGamma;
      p.mu_lo = a;
      p.mu_hi = b;
      p.u_lo = (m >= n ? 0.0 : l[std::size_t(m)]) / lr;
      p.u_hi = l[std::size_t(m - 1)] / lr;
      p.par[0] = double(m);
      p.par[1] = cm[std::size_t(m)];
      p.par[2] = mu_low;
      p.par[3] = lr;
      d.pieces.push_back(p);
    }
    if (r == 1 && delta1 > 1e-15)
      d.atoms.push_back(Atom{1.0, delta1, 1.0 - delta1, 1.0});
    pr.dists[std::size_t(firm - 1)] = std::move(d);
    pr.profits[std::size_t(firm - 1)] = lr * mu_low;
  }
  return pr;
}

EquilibriumProfile solve(const ConsiderationStructure& cs) {
  if (cs.is_exchangeable()) return solve_symmetric(cs);
  if (cs.n == 2) return solve_duopoly(cs);
  if (cs.independent_lambda) return solve_independent(cs);
  throw Error("UnsupportedStructure",
              "no closed form for correlated structures with n >= 3; "
              "use the deviation-gap oracle on a candidate profile");
}

double tie_aware_share(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                       int firm, double mu) {
  const FirmSet bit = FirmSet{1} << (firm - 1);
  // per-rival survival and tie probabilities at mu
  std::vector<double> surv(std::size_t(cs.n)), atom(std::size_t(cs.n));
  bool any_atom = false;
  for (int j = 1; j <= cs.n; ++j) {
    if (j == firm) continue;
    auto ms = split_at(profile.dists[std::size_t(j - 1)], mu);
    surv[std::size_t(j - 1)] = ms.above;
    atom[std::size_t(j - 1)] = ms.tied;
    any_atom = any_atom || ms.tied > 0;
  }

  double share = 0;
  std::vector<int> tied;
  for (const auto& [s, m] : cs.entries) {
    if (!(s & bit)) continue;
    FirmSet rivals = s & ~bit;
    double base = 1.0;
    tied.clear();
    for (FirmSet r = rivals; r; r &= r - 1) {
      int j = std::countr_zero(r);
      if (any_atom && atom[std::size_t(j)] > 0) tied.push_back(j);
      else base *= surv[std::size_t(j)];
    }
    if (tied.empty()) {
      share += m * base;
      continue;
    }
    // split sales uniformly among the tied winners
    double sum = 0;
    for (FirmSet t = 0; t < (FirmSet{1} << tied.size()); ++t) {
      double w = 1.0;
      int k = 0;
      for (std::size_t idx = 0; idx < tied.size(); ++idx) {
        if (t >> idx & 1) { w *= atom[std::size_t(tied[idx])]; ++k; }
        else w *= surv[std::size_t(tied[idx])];
      }
      sum += w / double(k + 1);
    }
    share += m * base * sum;
  }
  return share;
}

double demand_share(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                    int firm, double mu) {
  for (int j = 1; j <= cs.n; ++j)
    if (j != firm && profile.dists[std::size_t(j - 1)].atom_mass_at(mu) > 0)
      throw Error("AtomAtPoint", "rival " + std::to_string(j) + " has an atom at mu = " +
                                     std::to_string(mu) + "; use the tie-aware evaluation");
  if (cs.independent_lambda) {
    const auto& lam = *cs.independent_lambda;
    double q = lam[std::size_t(firm - 1)];
    for (int j = 1; j <= cs.n; ++j)
      if (j != firm)
        q *= 1.0 - lam[std::size_t(j - 1)] * profile.dists[std::size_t(j - 1)].cdf(mu);
    return q;
  }
  return tie_aware_share(cs, profile, firm, mu);
}

namespace {

// share when pricing just below mu: rival atoms at mu are strictly beaten
double undercut_share(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                      int firm, double mu) {
  const FirmSet bit = FirmSet{1} << (firm - 1);
  std::vector<double> surv(static_cast<std::size_t>(cs.n));
  for (int j = 1; j <= cs.n; ++j) {
    if (j == firm) continue;
    auto ms = split_at(profile.dists[std::size_t(j - 1)], mu);
    surv[std::size_t(j - 1)] = ms.tied + ms.above;
  }
  double share = 0;
  for (const auto& [s, m] : cs.entries) {
    if (!(s & bit)) continue;
    double w = m;
    for (FirmSet r = s & ~bit; r; r &= r - 1) w *= surv[std::size_t(std::countr_zero(r))];
    share += w;
  }
  return share;
}

} // namespace

VerificationReport verify_equilibrium(const ConsiderationStructure& cs,
                                      const EquilibriumProfile& profile,
                                      int grid_size, double tol) {
  if (grid_size < 100) throw Error("BadGrid", "verification grid must have >= 100 points");
  if (profile.n != cs.n || int(profile.dists.size()) != cs.n ||
      int(profile.profits.size()) != cs.n)
    throw Error("ProfileMismatch", "profile and structure disagree on the firm count");
  VerificationReport rep;
  rep.grid_size = grid_size;
  rep.tol = tol;
  rep.pass = true;

  for (int i = 1; i <= cs.n; ++i) {
    const auto& di = profile.dists[std::size_t(i - 1)];
    double pi = profile.profits[std::size_t(i - 1)];
    FirmCheck fc;
    fc.firm = i;

    if (cs.firm_stats(i).reach <= 0) { rep.firms.push_back(fc); continue; }

    auto value = [&](double mu) { return mu * tie_aware_share(cs, profile, i, mu); };

    // candidate deviation margins: uniform grid plus structural points
    std::set<double> devs;
    double step = 1.0 / double(grid_size - 1);
    for (int k = 0; k < grid_size; ++k) devs.insert(double(k) * step);
    for (int j = 1; j <= cs.n; ++j) {
      const auto& dj = profile.dists[std::size_t(j - 1)];
      for (const auto& p : dj.pieces) { devs.insert(p.mu_lo); devs.insert(p.mu_hi); }
      for (const auto& a : dj.atoms) {
        devs.insert(a.location);
        if (a.location - step > 0) devs.insert(a.location - step);
        if (a.location + step < 1) devs.insert(a.location + step);
        devs.insert(std::nextafter(a.location, 0.0));
      }
    }
    for (double mu : devs) {
      double g = value(mu) - pi;
      if (g > fc.max_deviation_gain) { fc.max_deviation_gain = g; fc.worst_mu = mu; }
    }

    // indifference residual over the firm's own support; evaluate as the
    // undercut limit so a rival atom at a support endpoint is beaten, not tied
    auto residual = [&](double mu) { return std::abs(mu * undercut_share(cs, profile, i, mu) - pi); };
    for (const auto& p : di.pieces) {
      int pts = std::max(2, int(std::lround(double(grid_size) * (p.u_hi - p.u_lo))));
      for (int k = 0; k <= pts; ++k) {
        double mu = p.mu_lo + (p.mu_hi - p.mu_lo) * double(k) / double(pts);
        fc.max_indifference_residual = std::max(fc.max_indifference_residual, residual(mu));
      }
    }
    for (const auto& a : di.atoms)
      fc.max_indifference_residual = std::max(fc.max_indifference_residual, residual(a.location));

    if (fc.max_indifference_residual > tol || fc.max_deviation_gain > tol) rep.pass = false;
    rep.firms.push_back(fc);
  }
  return rep;
}

} // namespace disp

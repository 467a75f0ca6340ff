#ifndef DISP_MARGIN_GAME_HPP
#define DISP_MARGIN_GAME_HPP

#include "disp/consideration.hpp"

#include <string>
#include <vector>

namespace disp {

enum class PieceKind { SymmetricPgf, DuopolyF1, DuopolyF2, IndependentGamma };

// One analytic segment of a margin distribution. The quantile map sends
// [u_lo, u_hi] onto [mu_lo, mu_hi]; cdf is its inverse on that segment.
struct Piece {
  PieceKind kind;
  double mu_lo = 0, mu_hi = 1;
  double u_lo = 0, u_hi = 1;
  // SymmetricPgf:      par[0] = rho, coeffs = PGF betas
  // DuopolyF1:         par[0] = rho1, par[1] = rho2
  // DuopolyF2:         par[0] = rho1
  // IndependentGamma:  par[0] = m (active firms), par[1] = C_m, par[2] = mu_lower,
  //                    par[3] = lambda_j (own reach)
  double par[4] = {0, 0, 0, 0};
  std::vector<double> coeffs;

  double quantile(double u) const;
  double cdf(double mu) const;
};

struct Atom {
  double location = 1, mass = 0;
  double u_lo = 1, u_hi = 1; // quantile interval mapped onto the atom
};

// One firm's equilibrium margin distribution: continuous pieces plus atoms,
// everything evaluable in closed form.
struct MarginDistribution {
  int firm = 1;
  double support_lo = 0, support_hi = 1;
  std::vector<Piece> pieces; // ascending in mu (and u)
  std::vector<Atom> atoms;   // ascending in location

  double cdf(double mu) const;      // right-continuous, includes atom mass at mu
  double quantile(double u) const;  // atoms map their whole u-interval to the location
  double atom_mass_at(double mu, double tol = 1e-12) const;
};

double cdf_eval(const MarginDistribution& d, double mu);
double quantile_eval(const MarginDistribution& d, double u);

enum class SolverTag { Symmetric, Duopoly, IndependentN, PureBertrand, PureMonopoly };

const char* solver_tag_name(SolverTag t);

struct EquilibriumProfile {
  SolverTag tag = SolverTag::Symmetric;
  int n = 0;
  std::vector<MarginDistribution> dists; // indexed by firm-1
  std::vector<double> profits;           // margin-game profits per firm
  std::string note;                      // degenerate/tie remarks
};

// Common-quantile equilibrium mu(u) = rho / H(1-u) for firm-exchangeable
// structures; degenerate rho=0 / rho=1 cases collapse to point masses.
EquilibriumProfile solve_symmetric(const ConsiderationStructure& cs);

// Two-firm equilibrium on [max(rho1,rho2), 1]; the higher-rho firm carries an
// atom at mu=1 of mass (rho1-rho2)/(1-rho2).
EquilibriumProfile solve_duopoly(const ConsiderationStructure& cs);

// n-firm equilibrium for independent consideration, nested supports ordered by
// reach; requires the structure to carry its lambda vector.
EquilibriumProfile solve_independent(const ConsiderationStructure& cs);

// Dispatch: exchangeable -> symmetric; n=2 -> duopoly; independent tag -> n-firm;
// otherwise UnsupportedStructure.
EquilibriumProfile solve(const ConsiderationStructure& cs);

// Expected demand share for firm i posting margin mu against the rival
// distributions in profile, uniform tie splitting at atoms.
double tie_aware_share(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                       int firm, double mu);

// Atomless share q_i(mu) = sum_{S ni i} alpha_S prod_{j in S\i} (1 - F_j(mu)).
// Throws AtomAtPoint if a rival carries an atom exactly at mu.
double demand_share(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                    int firm, double mu);

struct FirmCheck {
  int firm = 0;
  double max_indifference_residual = 0; // max |mu q(mu) - profit| on the support grid
  double max_deviation_gain = 0;        // max mu q(mu) - profit over the full grid
  double worst_mu = 0;                  // argmax of the deviation gain
};

struct VerificationReport {
  std::vector<FirmCheck> firms;
  int grid_size = 0;
  double tol = 0;
  bool pass = false;
};

VerificationReport verify_equilibrium(const ConsiderationStructure& cs,
                                      const EquilibriumProfile& profile,
                                      int grid_size = 2001, double tol = 1e-8);

} // namespace disp

#endif

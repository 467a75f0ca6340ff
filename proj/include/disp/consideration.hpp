#ifndef DISP_CONSIDERATION_HPP
#define DISP_CONSIDERATION_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace disp {

// Firm subsets are bitmasks over 1-based firm indices: bit (i-1) set <=> firm i in S.
using FirmSet = std::uint64_t;

struct FirmStats {
  int firm = 0;       // 1-based index
  double reach = 0;   // sigma_i: mass of consumers who see firm i
  double captive = 0; // alpha_{i}: mass who see only firm i
  double rho = 0;     // captive / reach, 0 by convention when reach == 0
};

// Distribution of the number of rivals seen alongside firm i, conditional on
// seeing i. H(s) = sum_k beta[k] s^k with H(0) = rho, H(1) = 1.
struct RivalCountPgf {
  std::vector<double> beta; // beta[k] = P(exactly k rivals), k = 0..n-1

  double eval(double s) const;
  double mean_integral() const; // integral of H over [0,1], exactly sum beta[k]/(k+1)
  double rho() const { return beta.empty() ? 0.0 : beta.front(); }
};

// A probability distribution over consumer consideration sets.
// Immutable after construction; all member queries are pure.
struct ConsiderationStructure {
  int n = 0;
  std::vector<std::pair<FirmSet, double>> entries; // nonempty sets, ascending mask order
  double alpha_empty = 0;
  // Set by the independent/binomial generators; enables product-form fast paths
  // and the n-firm solver.
  std::optional<std::vector<double>> independent_lambda;

  double mass_of(FirmSet s) const;
  FirmStats firm_stats(int firm) const;
  RivalCountPgf pgf(int firm) const;

  // Strict symmetry: alpha_S depends only on |S| (within tol).
  bool is_symmetric(double tol = 1e-12) const;
  // Firm exchangeability: every firm has the same reach, captive share and rival
  // PGF (within tol). Weaker than is_symmetric, and sufficient for the symmetric
  // equilibrium construction.
  bool is_exchangeable(double tol = 1e-12) const;
};

// Validated construction from explicit masses. Sets are 1-based index lists.
// alpha_empty, when supplied, must agree with 1 - sum(masses) within 1e-9.
ConsiderationStructure from_explicit(
    int n,
    const std::vector<std::pair<std::vector<int>, double>>& entries,
    std::optional<double> alpha_empty = std::nullopt);

// Every subset S gets mass lambda^|S| (1-lambda)^(n-|S|): each consumer sees each
// firm independently with common probability lambda.
ConsiderationStructure binomial(int n, double lambda);

// Independent consideration with per-firm probabilities lambda[j].
ConsiderationStructure independent(const std::vector<double>& lambda);

// n windows of k consecutive firms on a circle, mass 1/n each.
ConsiderationStructure spatial(int n, int k);

} // namespace disp

#endif

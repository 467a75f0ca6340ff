#ifndef DISP_COMPARATIVE_HPP
#define DISP_COMPARATIVE_HPP

#include "disp/margin_game.hpp"
#include "disp/passthrough.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace disp {

enum class Relation { ADominatesB, BDominatesA, Crossing, Equal };

const char* relation_name(Relation r);

struct Witness {
  double point = 0; // grid location (u, s or p depending on the check)
  double a_value = 0, b_value = 0;
};

struct DominanceVerdict {
  Relation relation = Relation::Equal;
  std::vector<Witness> witnesses; // for Crossing: one per direction of reversal
  std::string detail;
};

// Pointwise comparison of margin quantiles on a u-grid (plus both
// distributions' piece and atom boundaries). ADominatesB means
// mu_A(u) >= mu_B(u) everywhere on the grid.
DominanceVerdict quantile_dominates(const MarginDistribution& a, const MarginDistribution& b,
                                    int grid_size = 2001);

struct PgfDominance {
  DominanceVerdict h_order; // ADominatesB means H_A(s) <= H_B(s) everywhere
  bool equal_rho = false;
  // filled when the rho's match: the equivalent margin-quantile comparison
  std::optional<DominanceVerdict> margin_order;
  std::string note;
};

// Rival-count PGF comparison between two exchangeable structures. With equal
// rho, a pointwise H order is equivalent to margin-quantile dominance, and the
// verdict carries both; with different rho only the H order is reported.
PgfDominance pgf_dominates(const ConsiderationStructure& a, const ConsiderationStructure& b,
                           int firm = 1, int grid_size = 2001);

struct TwMeanComparison {
  DominanceVerdict price_order;
  double B_a = 0, B_b = 0;
  double mean_a = 0, mean_b = 0;
  bool consistent = false; // the harmonic/mean ordering implied by price dominance holds
  std::string note;
};

// When one report's price quantiles dominate the other's, the dominated side
// must carry the (weakly) larger harmonic integral B and the smaller mean paid
// price. Both reports must be at the same cost and on the same u-grid.
TwMeanComparison tw_mean_compare(const PassThroughReport& a, const PassThroughReport& b);

struct MergerFirmDelta {
  int firm_pre = 0, firm_post = 0;
  std::vector<double> dp; // price change at each u
  double min_dp = 0, max_dp = 0;
  double dtau_trans = 0;
};

struct MergerDelta {
  std::vector<double> u;
  std::vector<MergerFirmDelta> firms;
};

// Price impact of moving from profile_pre to profile_post for each mapped firm:
// dp(u) = phi(mu_post(u)) - phi(mu_pre(u)), plus the change in tau_trans.
MergerDelta merger_delta(const EquilibriumProfile& pre, const EquilibriumProfile& post,
                         const std::vector<std::pair<int, int>>& firm_map,
                         const DemandSpec& spec, double c, int grid_size = 201);

} // namespace disp

#endif

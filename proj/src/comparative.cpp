#include "disp/comparative.hpp"
#include "disp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace disp {

namespace {

constexpr double kOrderTol = 1e-12;

DominanceVerdict compare_on_grid(const std::vector<double>& xs,
                                 const std::vector<double>& va,
                                 const std::vector<double>& vb) {
  bool a_ge = true, b_ge = true;
  std::optional<Witness> a_above, b_above;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double da = va[i] - vb[i];
    if (da > kOrderTol && !a_above) a_above = Witness{xs[i], va[i], vb[i]};
    if (da < -kOrderTol && !b_above) b_above = Witness{xs[i], va[i], vb[i]};
    if (da < -kOrderTol) a_ge = false;
    if (da > kOrderTol) b_ge = false;
  }
  DominanceVerdict v;
  if (a_ge && b_ge) v.relation = Relation::Equal;
  else if (a_ge) { v.relation = Relation::ADominatesB; if (a_above) v.witnesses.push_back(*a_above); }
  else if (b_ge) { v.relation = Relation::BDominatesA; if (b_above) v.witnesses.push_back(*b_above); }
  else {
    v.relation = Relation::Crossing;
    v.witnesses.push_back(*a_above);
    v.witnesses.push_back(*b_above);
  }
  return v;
}

std::vector<double> u_grid_with_boundaries(const MarginDistribution& a,
                                           const MarginDistribution& b, int grid_size) {
  std::set<double> s;
  for (int i = 0; i < grid_size; ++i) s.insert(double(i) / double(grid_size - 1));
  for (const auto* d : {&a, &b}) {
    for (const auto& p : d->pieces) { s.insert(p.u_lo); s.insert(p.u_hi); }
    for (const auto& at : d->atoms) { s.insert(at.u_lo); s.insert(at.u_hi); }
  }
  return {s.begin(), s.end()};
}

} // namespace

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::ADominatesB: return "A_dominates_B";
    case Relation::BDominatesA: return "B_dominates_A";
    case Relation::Crossing: return "crossing";
    case Relation::Equal: return "equal";
  }
  return "?";
}

DominanceVerdict quantile_dominates(const MarginDistribution& a, const MarginDistribution& b,
                                    int grid_size) {
  auto grid = u_grid_with_boundaries(a, b, grid_size);
  std::vector<double> va, vb;
  va.reserve(grid.size());
  vb.reserve(grid.size());
  for (double u : grid) { va.push_back(a.quantile(u)); vb.push_back(b.quantile(u)); }
  DominanceVerdict v = compare_on_grid(grid, va, vb);
  v.detail = "margin quantiles on " + std::to_string(grid.size()) + " u-points";
  return v;
}

PgfDominance pgf_dominates(const ConsiderationStructure& a, const ConsiderationStructure& b,
                           int firm, int grid_size) {
  if (!a.is_exchangeable() || !b.is_exchangeable())
    throw Error("NotSymmetric", "pgf comparison needs firm-exchangeable structures");
  RivalCountPgf ha = a.pgf(firm), hb = b.pgf(firm);

  std::vector<double> grid(static_cast<std::size_t>(grid_size)), va, vb;
  for (int i = 0; i < grid_size; ++i) grid[std::size_t(i)] = double(i) / double(grid_size - 1);
  for (double s : grid) { va.push_back(ha.eval(s)); vb.push_back(hb.eval(s)); }

  PgfDominance out;
  // a pointwise-smaller H means higher margin quantiles, so flip the relation to
  // keep the "A prices higher" reading; witnesses stay in (H_A, H_B) order
  out.h_order = compare_on_grid(grid, va, vb);
  if (out.h_order.relation == Relation::ADominatesB) out.h_order.relation = Relation::BDominatesA;
  else if (out.h_order.relation == Relation::BDominatesA) out.h_order.relation = Relation::ADominatesB;
  out.h_order.detail = "rival-count pgfs on " + std::to_string(grid.size()) + " s-points";

  out.equal_rho = std::abs(ha.rho() - hb.rho()) <= kOrderTol;
  if (out.equal_rho) {
    EquilibriumProfile pa = solve_symmetric(a), pb = solve_symmetric(b);
    out.margin_order = quantile_dominates(pa.dists.front(), pb.dists.front(), grid_size);
    out.note = "equal rho: pgf order and margin-quantile order are equivalent";
  } else {
    out.note = "rho differs: pgf order reported alone; margin dominance may fail";
  }
  return out;
}

TwMeanComparison tw_mean_compare(const PassThroughReport& a, const PassThroughReport& b) {
  if (std::abs(a.c - b.c) > kOrderTol)
    throw Error("MismatchedCost", "reports computed at different costs");
  if (a.u.size() != b.u.size())
    throw Error("MismatchedGrid", "reports use different quantile grids");
  for (std::size_t i = 0; i < a.u.size(); ++i)
    if (std::abs(a.u[i] - b.u[i]) > kOrderTol)
      throw Error("MismatchedGrid", "reports use different quantile grids");

  TwMeanComparison out;
  out.price_order = compare_on_grid(a.u, a.price, b.price);
  out.price_order.detail = "price quantiles on " + std::to_string(a.u.size()) + " u-points";
  out.B_a = a.B;
  out.B_b = b.B;
  out.mean_a = a.mean_paid;
  out.mean_b = b.mean_paid;
  switch (out.price_order.relation) {
    case Relation::ADominatesB:
      out.consistent = a.B <= b.B + 1e-9 && a.mean_paid >= b.mean_paid - 1e-9;
      break;
    case Relation::BDominatesA:
      out.consistent = b.B <= a.B + 1e-9 && b.mean_paid >= a.mean_paid - 1e-9;
      break;
    case Relation::Equal:
      out.consistent = std::abs(a.B - b.B) <= 1e-9 && std::abs(a.mean_paid - b.mean_paid) <= 1e-9;
      break;
    case Relation::Crossing:
      out.consistent = true;
      out.note = "price quantiles cross: no ordering implied";
      break;
  }
  return out;
}

MergerDelta merger_delta(const EquilibriumProfile& pre, const EquilibriumProfile& post,
                         const std::vector<std::pair<int, int>>& firm_map,
                         const DemandSpec& spec, double c, int grid_size) {
  if (pre.dists.empty() || post.dists.empty())
    throw Error("UnsolvedProfile", "both profiles must carry solved distributions");
  MergerDelta out;
  out.u.resize(std::size_t(grid_size));
  for (int i = 0; i < grid_size; ++i) out.u[std::size_t(i)] = double(i) / double(grid_size - 1);

  for (auto [fpre, fpost] : firm_map) {
    if (fpre < 1 || fpre > int(pre.dists.size()) || fpost < 1 || fpost > int(post.dists.size()))
      throw Error("BadFirmIndex", "firm map references a missing firm");
    MergerFirmDelta fd;
    fd.firm_pre = fpre;
    fd.firm_post = fpost;
    const auto& da = pre.dists[std::size_t(fpre - 1)];
    const auto& db = post.dists[std::size_t(fpost - 1)];
    fd.min_dp = std::numeric_limits<double>::infinity();
    fd.max_dp = -fd.min_dp;
    for (double u : out.u) {
      double dp = phi(spec, c, db.quantile(u)) - phi(spec, c, da.quantile(u));
      fd.dp.push_back(dp);
      fd.min_dp = std::min(fd.min_dp, dp);
      fd.max_dp = std::max(fd.max_dp, dp);
    }
    fd.dtau_trans = transaction_passthrough(post, fpost, spec, c) -
                    transaction_passthrough(pre, fpre, spec, c);
    out.firms.push_back(std::move(fd));
  }
  return out;
}

} // namespace disp

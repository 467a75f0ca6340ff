#include "disp/oracle.hpp"
#include "disp/error.hpp"
#include "disp/rng.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace disp {

namespace {

void require_profile_match(const ConsiderationStructure& cs, const EquilibriumProfile& profile) {
  if (profile.n != cs.n || int(profile.dists.size()) != cs.n ||
      int(profile.profits.size()) != cs.n)
    throw Error("ProfileMismatch", "profile and structure disagree on the firm count");
}

void require_invertible(const DemandSpec& spec, double c) {
  InvertibilityReport inv = invertibility_check(spec, c);
  if (!inv.ok)
    throw Error("InvertibilityViolated", spec.label() + " margin is not increasing on [c,1]");
}

} // namespace

DeviationReport price_game_deviation_gap(const ConsiderationStructure& cs,
                                         const EquilibriumProfile& profile,
                                         const DemandSpec& spec, double c, int grid_size) {
  require_profile_match(cs, profile);
  require_invertible(spec, c);
  if (grid_size < 2) throw Error("BadGrid", "price grid needs >= 2 points");

  const double scale = (1.0 - c) * demand_eval(spec, 1.0);
  const double step = (1.0 - c) / double(grid_size - 1);

  std::set<double> prices;
  for (int k = 0; k < grid_size; ++k) prices.insert(c + double(k) * step);
  for (const auto& d : profile.dists) {
    for (const auto& pc : d.pieces) {
      prices.insert(phi_root(spec, c, pc.mu_lo));
      prices.insert(phi_root(spec, c, pc.mu_hi));
    }
    for (const auto& a : d.atoms) {
      double pa = phi_root(spec, c, a.location);
      prices.insert(pa);
      if (pa - step > c) prices.insert(pa - step);
      if (pa + step < 1.0) prices.insert(pa + step);
    }
  }

  DeviationReport rep;
  rep.grid_size = int(prices.size());
  rep.max_gain = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= cs.n; ++i) {
    double pi_price = scale * profile.profits[std::size_t(i - 1)];
    double gain = -std::numeric_limits<double>::infinity();
    double worst = c;
    for (double p : prices) {
      double mu = mu_of_price(spec, c, p);
      double v = (p - c) * demand_eval(spec, p) * tie_aware_share(cs, profile, i, mu) - pi_price;
      if (v > gain) { gain = v; worst = p; }
    }
    rep.firm_gain.push_back(gain);
    if (gain > rep.max_gain) { rep.max_gain = gain; rep.worst_firm = i; rep.worst_price = worst; }
  }
  return rep;
}

namespace {

struct SetSampler {
  std::vector<double> cum; // cumulative mass over entries, after alpha_empty
  const ConsiderationStructure* cs;

  explicit SetSampler(const ConsiderationStructure& s) : cs(&s) {
    cum.reserve(s.entries.size());
    double acc = s.alpha_empty;
    for (const auto& [set, m] : s.entries) {
      acc += m;
      cum.push_back(acc);
    }
    if (!cum.empty()) cum.back() = std::max(cum.back(), 1.0); // absorb rounding
  }

  // returns 0 for the empty set
  FirmSet draw(double u) const {
    if (u < cs->alpha_empty || cum.empty()) return 0;
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return cs->entries[std::size_t(it - cum.begin())].first;
  }
};

void check_config(const SimConfig& config) {
  if (config.consumers < 1) throw Error("BadConfig", "need at least one consumer");
  if (config.price_grid_size < 2) throw Error("BadConfig", "price grid needs >= 2 points");
}

double ks_distance(std::vector<double>& samples, const MarginDistribution& dist,
                   const DemandSpec& spec, double c) {
  if (samples.empty()) return 0;
  std::sort(samples.begin(), samples.end());
  // price-space atoms of the mapped distribution
  std::vector<std::pair<double, double>> atoms;
  for (const auto& a : dist.atoms) atoms.emplace_back(phi_root(spec, c, a.location), a.mass);

  const double n = double(samples.size());
  double d = 0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    double v = samples[i];
    double f = dist.cdf(mu_of_price(spec, c, v));
    double mass = 0;
    for (auto [loc, m] : atoms)
      if (std::abs(loc - v) <= 1e-12) mass += m;
    d = std::max(d, std::abs(double(i) / n - (f - mass))); // just below v
    d = std::max(d, std::abs(double(j) / n - f));          // at v
    i = j;
  }
  return d;
}

} // namespace

SimResult simulate(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                   const SimConfig& config) {
  require_profile_match(cs, profile);
  check_config(config);
  require_invertible(config.demand, config.c);
  const int n = cs.n;
  const double c = config.c;
  const DemandSpec& spec = config.demand;
  const SetSampler sampler(cs);

  std::vector<std::vector<double>> samples(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    samples[std::size_t(j)].reserve(
        std::size_t(double(config.consumers) * (cs.firm_stats(j + 1).reach + 0.02)));

  std::vector<double> vsum(std::size_t(n), 0), vsq(std::size_t(n), 0);
  std::vector<double> A(std::size_t(n), 0), Bw(std::size_t(n), 0), A2(std::size_t(n), 0),
      AB(std::size_t(n), 0), B2(std::size_t(n), 0);
  std::vector<long long> trans(std::size_t(n), 0);
  double mA = 0, mB = 0, mA2 = 0, mAB = 0, mB2 = 0;

  std::vector<int> tied;
  for (long long k = 0; k < config.consumers; ++k) {
    CounterRng rng(config.seed, std::uint64_t(k));
    FirmSet s = sampler.draw(rng.uniform());
    if (!s) continue;
    tied.clear();
    double best = std::numeric_limits<double>::infinity();
    for (FirmSet r = s; r; r &= r - 1) {
      int j = std::countr_zero(r);
      double mu = profile.dists[std::size_t(j)].quantile(rng.uniform());
      double p = phi_root(spec, c, mu);
      samples[std::size_t(j)].push_back(p);
      if (p < best) { best = p; tied.clear(); tied.push_back(j); }
      else if (p == best) tied.push_back(j);
    }
    int w = tied.size() == 1 ? tied.front() : int(tied[rng.below(tied.size())]);
    if (best <= 1.0) {
      double q = demand_eval(spec, best);
      double v = (best - c) * q;
      vsum[std::size_t(w)] += v;
      vsq[std::size_t(w)] += v * v;
      double a = q * best, b = q;
      A[std::size_t(w)] += a;
      Bw[std::size_t(w)] += b;
      A2[std::size_t(w)] += a * a;
      AB[std::size_t(w)] += a * b;
      B2[std::size_t(w)] += b * b;
      ++trans[std::size_t(w)];
      mA += a; mB += b; mA2 += a * a; mAB += a * b; mB2 += b * b;
    }
  }

  const double N = double(config.consumers);
  SimResult res;
  res.consumers = config.consumers;
  res.seed = config.seed;
  auto ratio_se = [](double a, double b, double a2, double ab, double b2) {
    if (b <= 0) return 0.0;
    double m = a / b;
    double gsq = a2 - 2 * m * ab + m * m * b2;
    return std::sqrt(std::max(0.0, gsq)) / b;
  };
  for (int j = 0; j < n; ++j) {
    SimFirmStats st;
    st.firm = j + 1;
    st.posted = (long long)samples[std::size_t(j)].size();
    st.transactions = trans[std::size_t(j)];
    st.profit = vsum[std::size_t(j)] / N;
    st.profit_se = std::sqrt(std::max(0.0, vsq[std::size_t(j)] / N - st.profit * st.profit) / N);
    st.mean_paid = Bw[std::size_t(j)] > 0 ? A[std::size_t(j)] / Bw[std::size_t(j)] : 0;
    st.mean_paid_se = ratio_se(A[std::size_t(j)], Bw[std::size_t(j)], A2[std::size_t(j)],
                               AB[std::size_t(j)], B2[std::size_t(j)]);
    st.ks_distance = ks_distance(samples[std::size_t(j)], profile.dists[std::size_t(j)], spec, c);
    res.firms.push_back(st);
  }
  res.market_mean_paid = mB > 0 ? mA / mB : 0;
  res.market_mean_paid_se = ratio_se(mA, mB, mA2, mAB, mB2);

  // empirical posted CDFs on a common price grid (samples are already sorted)
  res.cdf_prices.resize(std::size_t(config.price_grid_size));
  for (int i = 0; i < config.price_grid_size; ++i)
    res.cdf_prices[std::size_t(i)] = c + (1.0 - c) * double(i) / double(config.price_grid_size - 1);
  for (int j = 0; j < n; ++j) {
    const auto& sj = samples[std::size_t(j)];
    std::vector<double> vals;
    vals.reserve(res.cdf_prices.size());
    for (double p : res.cdf_prices) {
      auto it = std::upper_bound(sj.begin(), sj.end(), p);
      vals.push_back(sj.empty() ? 0.0 : double(it - sj.begin()) / double(sj.size()));
    }
    res.cdf_values.push_back(std::move(vals));
  }
  return res;
}

McPassthrough mc_passthrough(const ConsiderationStructure& cs, const EquilibriumProfile& profile,
                             const SimConfig& config, double c_lo, double c_hi) {
  require_profile_match(cs, profile);
  check_config(config);
  if (!(c_lo < c_hi)) throw Error("BadConfig", "need c_lo < c_hi");
  require_invertible(config.demand, c_lo);
  require_invertible(config.demand, c_hi);
  const int n = cs.n;
  const DemandSpec& spec = config.demand;
  const SetSampler sampler(cs);
  const double dc = c_hi - c_lo;

  // per firm: means of (a_hi, b_hi, a_lo, b_lo) plus second moments for the
  // delta-method variance of the paired ratio difference
  std::vector<std::array<double, 4>> S1(std::size_t(n + 1), {0, 0, 0, 0});
  std::vector<std::array<std::array<double, 4>, 4>> S2(
      std::size_t(n + 1), {{{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}});

  std::vector<int> tied;
  for (long long k = 0; k < config.consumers; ++k) {
    CounterRng rng(config.seed, std::uint64_t(k));
    FirmSet s = sampler.draw(rng.uniform());
    if (!s) continue;
    tied.clear();
    double best_mu = std::numeric_limits<double>::infinity();
    for (FirmSet r = s; r; r &= r - 1) {
      int j = std::countr_zero(r);
      double mu = profile.dists[std::size_t(j)].quantile(rng.uniform());
      // phi is common across firms and strictly increasing, so the cheapest
      // firm is the one with the lowest margin under either cost
      if (mu < best_mu) { best_mu = mu; tied.clear(); tied.push_back(j); }
      else if (mu == best_mu) tied.push_back(j);
    }
    int w = tied.size() == 1 ? tied.front() : int(tied[rng.below(tied.size())]);
    double p_hi = phi_root(spec, c_hi, best_mu);
    double p_lo = phi_root(spec, c_lo, best_mu);
    std::array<double, 4> v{demand_eval(spec, p_hi) * p_hi, demand_eval(spec, p_hi),
                            demand_eval(spec, p_lo) * p_lo, demand_eval(spec, p_lo)};
    for (auto idx : {std::size_t(w), std::size_t(n)}) {
      for (int i = 0; i < 4; ++i) {
        S1[idx][std::size_t(i)] += v[std::size_t(i)];
        for (int jj = 0; jj < 4; ++jj)
          S2[idx][std::size_t(i)][std::size_t(jj)] += v[std::size_t(i)] * v[std::size_t(jj)];
      }
    }
  }

  const double N = double(config.consumers);
  McPassthrough out;
  out.c_lo = c_lo;
  out.c_hi = c_hi;
  auto finish = [&](std::size_t idx, double& tau, double& se) {
    auto& m1 = S1[idx];
    if (m1[1] <= 0 || m1[3] <= 0) { tau = 0; se = 0; return; }
    double mh = m1[0] / m1[1], ml = m1[2] / m1[3];
    tau = (mh - ml) / dc;
    std::array<double, 4> mean{m1[0] / N, m1[1] / N, m1[2] / N, m1[3] / N};
    std::array<double, 4> grad{1.0 / mean[1], -mh / mean[1], -1.0 / mean[3], ml / mean[3]};
    double var = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double cov = S2[idx][std::size_t(i)][std::size_t(j)] / N - mean[std::size_t(i)] * mean[std::size_t(j)];
        var += grad[std::size_t(i)] * grad[std::size_t(j)] * cov;
      }
    se = std::sqrt(std::max(0.0, var / N)) / dc;
  };
  out.tau.resize(std::size_t(n));
  out.tau_se.resize(std::size_t(n));
  for (int j = 0; j < n; ++j) finish(std::size_t(j), out.tau[std::size_t(j)], out.tau_se[std::size_t(j)]);
  finish(std::size_t(n), out.market_tau, out.market_tau_se);
  return out;
}

} // namespace disp

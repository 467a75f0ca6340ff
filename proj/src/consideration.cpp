#include "disp/consideration.hpp"
#include "disp/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

namespace disp {

namespace {

constexpr int kMaxEnumeratedFirms = 20; // 2^20 subsets is the explicit-materialization cap

void check_firm_count(int n) {
  if (n < 1) throw Error("BadFirmCount", "firm count must be >= 1, got " + std::to_string(n));
  if (n > 64) throw Error("BadFirmCount", "at most 64 firms supported");
}

double binom_coeff(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * double(n - k + j) / double(j);
  return r;
}

} // namespace

double RivalCountPgf::eval(double s) const {
  // Horner; beta is short (n <= 64)
  double acc = 0.0;
  for (auto it = beta.rbegin(); it != beta.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double RivalCountPgf::mean_integral() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) acc += beta[k] / double(k + 1);
  return acc;
}

double ConsiderationStructure::mass_of(FirmSet s) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), s,
                             [](const auto& e, FirmSet key) { return e.first < key; });
  if (it != entries.end() && it->first == s) return it->second;
  return 0.0;
}

FirmStats ConsiderationStructure::firm_stats(int firm) const {
  if (firm < 1 || firm > n)
    throw Error("BadFirmIndex", "firm index " + std::to_string(firm) + " outside 1.." + std::to_string(n));
  const FirmSet bit = FirmSet{1} << (firm - 1);
  FirmStats st;
  st.firm = firm;
  for (const auto& [s, m] : entries)
    if (s & bit) st.reach += m;
  st.captive = mass_of(bit);
  st.rho = st.reach > 0 ? st.captive / st.reach : 0.0;
  return st;
}

RivalCountPgf ConsiderationStructure::pgf(int firm) const {
  FirmStats st = firm_stats(firm);
  if (st.reach <= 0)
    throw Error("ZeroReach", "firm " + std::to_string(firm) + " is considered by nobody");
  const FirmSet bit = FirmSet{1} << (firm - 1);
  RivalCountPgf h;
  h.beta.assign(std::size_t(n), 0.0);
  for (const auto& [s, m] : entries)
    if (s & bit) h.beta[std::size_t(std::popcount(s) - 1)] += m / st.reach;
  return h;
}

bool ConsiderationStructure::is_symmetric(double tol) const {
  // alpha_S must depend only on |S|; subsets absent from the table carry mass 0,
  // so a size class is symmetric iff all C(n,k) sets are present with equal mass,
  // or the whole class is (numerically) zero.
  std::map<int, std::pair<double, double>> mass_range; // size -> (min, max)
  std::map<int, std::uint64_t> count;
  for (const auto& [s, m] : entries) {
    int k = std::popcount(s);
    auto [it, fresh] = mass_range.try_emplace(k, std::pair<double, double>{m, m});
    if (!fresh) {
      it->second.first = std::min(it->second.first, m);
      it->second.second = std::max(it->second.second, m);
    }
    ++count[k];
  }
  for (const auto& [k, rng] : mass_range) {
    double cnk = binom_coeff(n, k);
    double lo = rng.first, hi = rng.second;
    if (double(count[k]) + 0.5 < cnk) lo = std::min(lo, 0.0); // missing sets count as mass 0
    if (hi - lo > tol) return false;
  }
  return true;
}

bool ConsiderationStructure::is_exchangeable(double tol) const {
  FirmStats ref = firm_stats(1);
  std::vector<double> ref_beta;
  if (ref.reach > 0) ref_beta = pgf(1).beta;
  for (int i = 2; i <= n; ++i) {
    FirmStats st = firm_stats(i);
    if (std::abs(st.reach - ref.reach) > tol || std::abs(st.captive - ref.captive) > tol)
      return false;
    if (ref.reach > 0) {
      auto b = pgf(i).beta;
      for (std::size_t k = 0; k < b.size(); ++k)
        if (std::abs(b[k] - ref_beta[k]) > tol) return false;
    }
  }
  return true;
}

ConsiderationStructure from_explicit(
    int n,
    const std::vector<std::pair<std::vector<int>, double>>& entries,
    std::optional<double> alpha_empty) {
  check_firm_count(n);
  std::map<FirmSet, double> table;
  double sum = 0.0;
  for (const auto& [idx, m] : entries) {
    if (m < 0) throw Error("NegativeMass", "subset mass must be nonnegative");
    if (idx.empty()) throw Error("BadSubset", "empty subset not allowed in the mass table");
    FirmSet s = 0;
    for (int i : idx) {
      if (i < 1 || i > n)
        throw Error("BadSubset", "firm index " + std::to_string(i) + " outside 1.." + std::to_string(n));
      FirmSet bit = FirmSet{1} << (i - 1);
      if (s & bit) throw Error("BadSubset", "duplicate firm index in subset");
      s |= bit;
    }
    if (table.count(s)) throw Error("BadSubset", "duplicate subset in the mass table");
    table[s] = m;
    sum += m;
  }
  double empty;
  if (alpha_empty) {
    if (*alpha_empty < 0) throw Error("NegativeMass", "alpha_empty must be nonnegative");
    if (std::abs(sum + *alpha_empty - 1.0) > 1e-9)
      throw Error("MassSumMismatch",
                  "masses sum to " + std::to_string(sum + *alpha_empty) + ", expected 1");
    empty = 1.0 - sum; // exact complement so the total is 1 to machine precision
    if (empty < 0) empty = 0;
  } else {
    if (sum > 1.0 + 1e-9)
      throw Error("MassSumMismatch", "masses sum to " + std::to_string(sum) + " > 1");
    empty = std::max(0.0, 1.0 - sum);
  }
  ConsiderationStructure cs;
  cs.n = n;
  cs.alpha_empty = empty;
  cs.entries.assign(table.begin(), table.end());
  return cs;
}

ConsiderationStructure binomial(int n, double lambda) {
  check_firm_count(n);
  if (n > kMaxEnumeratedFirms)
    throw Error("BadFirmCount", "binomial generator enumerates all subsets; n <= 20 required");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw Error("BadLambda", "lambda must lie in (0,1)");
  return independent(std::vector<double>(std::size_t(n), lambda));
}

ConsiderationStructure independent(const std::vector<double>& lambda) {
  int n = int(lambda.size());
  check_firm_count(n);
  if (n > kMaxEnumeratedFirms)
    throw Error("BadFirmCount", "independent generator enumerates all subsets; n <= 20 required");
  for (double l : lambda)
    if (!(l > 0.0 && l < 1.0)) throw Error("BadLambda", "every lambda must lie in (0,1)");

  ConsiderationStructure cs;
  cs.n = n;
  cs.entries.reserve((std::size_t(1) << n) - 1);
  for (FirmSet s = 1; s < (FirmSet{1} << n); ++s) {
    double m = 1.0;
    for (int j = 0; j < n; ++j)
      m *= (s >> j & 1) ? lambda[std::size_t(j)] : 1.0 - lambda[std::size_t(j)];
    cs.entries.emplace_back(s, m);
  }
  double empty = 1.0;
  for (double l : lambda) empty *= 1.0 - l;
  cs.alpha_empty = empty;
  cs.independent_lambda = lambda;
  return cs;
}

ConsiderationStructure spatial(int n, int k) {
  check_firm_count(n);
  if (k < 1 || k > n) throw Error("BadWindow", "window size must satisfy 1 <= k <= n");
  std::map<FirmSet, double> table; // windows coincide when k == n
  for (int start = 0; start < n; ++start) {
    FirmSet s = 0;
    for (int j = 0; j < k; ++j) s |= FirmSet{1} << ((start + j) % n);
    table[s] += 1.0 / double(n);
  }
  ConsiderationStructure cs;
  cs.n = n;
  cs.alpha_empty = 0.0;
  cs.entries.assign(table.begin(), table.end());
  return cs;
}

} // namespace disp

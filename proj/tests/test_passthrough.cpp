#include "doctest.h"

#include "disp/error.hpp"
#include "disp/passthrough.hpp"

#include <cmath>
#include <functional>

using namespace disp;

namespace {

std::string thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

} // namespace

TEST_CASE("unit-demand transaction statistics for binomial(2,0.5)") {
  auto pr = solve(binomial(2, 0.5));
  auto spec = unit_demand();

  // K = integral of (2-u) du = 3/2, independent of cost
  CHECK(std::abs(unit_K(pr, 1) - 1.5) < 1e-9);

  CHECK(std::abs(harmonic_B(pr, 1, spec, 0.0) - 1.5) < 1e-9);
  CHECK(std::abs(harmonic_B(pr, 1, spec, 0.5) - 3.0) < 1e-9);
  CHECK(std::abs(mean_paid(pr, 1, spec, 0.0) - 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(mean_paid(pr, 1, spec, 0.5) - 5.0 / 6.0) < 1e-9);

  CHECK(std::abs(transaction_passthrough(pr, 1, spec, 0.0) - 1.0 / 3.0) < 1e-9);
  // cost invariance under unit demand
  double t0 = transaction_passthrough(pr, 1, spec, 0.0);
  for (double c : {0.3, 0.7}) {
    CHECK(std::abs(transaction_passthrough(pr, 1, spec, c) - t0) < 1e-10);
    CHECK(std::abs((1.0 - 1.0 / unit_K(pr, 1)) - t0) < 1e-10);
  }
}

TEST_CASE("sufficient statistic matches the unit-demand integral") {
  CHECK(std::abs(symmetric_stat(binomial(2, 0.5)) - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(symmetric_stat(binomial(3, 0.5)) - 4.0 / 7.0) < 1e-12);

  auto pr = solve(binomial(3, 0.5));
  CHECK(std::abs(unit_K(pr, 1) - 7.0 / 3.0) < 1e-9);
  CHECK(std::abs(transaction_passthrough(pr, 1, unit_demand(), 0.2) - 4.0 / 7.0) < 1e-9);

  CHECK(thrown_code([] { symmetric_stat(independent({0.6, 0.5, 0.4})); }) == "NotSymmetric");
  CHECK(thrown_code([] { symmetric_stat(spatial(4, 2)); }) == "SupportTouchesCost");
}

TEST_CASE("quantile curve under unit demand") {
  auto pr = solve(binomial(2, 0.5));
  auto qc = quantile_passthrough(pr, 1, unit_demand(), 0.0, {0.0, 0.5, 1.0});
  REQUIRE(qc.price.size() == 3);
  CHECK(std::abs(qc.price[0] - 0.5) < 1e-12);
  CHECK(std::abs(qc.price[1] - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(qc.price[2] - 1.0) < 1e-12);
  // tau_q = 1 - mu under unit demand
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(qc.tau_q[i] - (1.0 - qc.mu[i])) < 1e-12);
  CHECK(qc.flags.empty());

  CHECK(thrown_code([&] { quantile_passthrough(pr, 1, unit_demand(), 0.0, {1.5}); }) == "BadGrid");
}

TEST_CASE("monopoly point mass") {
  auto pr = solve(spatial(4, 1));
  auto spec = unit_demand();
  CHECK(std::abs(unit_K(pr, 1) - 1.0) < 1e-12);
  for (double c : {0.0, 0.4}) {
    CHECK(std::abs(harmonic_B(pr, 1, spec, c) - 1.0 / (1.0 - c)) < 1e-12);
    CHECK(std::abs(mean_paid(pr, 1, spec, c) - 1.0) < 1e-12);
    CHECK(std::abs(transaction_passthrough(pr, 1, spec, c) - 0.0) < 1e-12);
  }
}

TEST_CASE("transaction mass") {
  auto pr = solve(binomial(2, 0.5));
  auto spec = unit_demand();
  CHECK(std::abs(transaction_mass(pr, 1, spec, 0.0, 0.5) - 0.5) < 1e-12);
  CHECK(std::abs(transaction_mass(pr, 1, spec, 0.0, 1.0) - 0.25) < 1e-12);
  // scale carries (1-c) and x(1)
  CHECK(std::abs(transaction_mass(pr, 1, spec, 0.5, 0.75) - 0.5) < 1e-12);
  auto doubled = table_demand({0.0, 0.25, 0.5, 0.75, 1.0}, {4.0, 3.5, 3.0, 2.5, 2.0});
  CHECK(std::abs(transaction_mass(pr, 1, doubled, 0.0, 1.0) - 0.5) < 1e-12);
  CHECK(thrown_code([&] { transaction_mass(pr, 1, spec, 0.3, 0.3); }) == "PriceAtCost");
}

TEST_CASE("transaction-weighted CDF") {
  auto pr = solve(binomial(2, 0.5));
  auto spec = unit_demand();
  // mass below 2/3: integral_0^{1/2} (2-u) du = 0.875, over B = 1.5
  CHECK(std::abs(transaction_cdf(pr, 1, spec, 0.0, 2.0 / 3.0) - 0.875 / 1.5) < 1e-9);
  CHECK(transaction_cdf(pr, 1, spec, 0.0, 0.4) == 0.0);
  CHECK(transaction_cdf(pr, 1, spec, 0.0, 1.0) == 1.0);

  // cheap transactions are over-weighted relative to the posted-price law
  for (int i = 1; i < 20; ++i) {
    double p = 0.5 + 0.5 * double(i) / 20.0;
    double ft = transaction_cdf(pr, 1, spec, 0.0, p);
    CHECK(ft >= pr.dists[0].cdf(p) - 1e-12); // mu = p under unit demand at c = 0
    CHECK(ft <= transaction_cdf(pr, 1, spec, 0.0, p + 0.025) + 1e-12);
  }

  // an atom at the top: the jump shows up only at p = 1
  auto duo = solve(from_explicit(2, {{{1}, 0.3}, {{2}, 0.1}, {{1, 2}, 0.3}}, 0.3));
  double below = transaction_cdf(duo, 1, spec, 0.0, 1.0 - 1e-9);
  CHECK(below < 1.0 - 0.05);
  CHECK(transaction_cdf(duo, 1, spec, 0.0, 1.0) == 1.0);
}

TEST_CASE("transaction pass-through agrees with the cost derivative of the mean") {
  auto pr = solve(binomial(2, 0.5));
  auto spec = ces_demand(1.0);
  double c = 0.6, h = 1e-5;
  double fd = (mean_paid(pr, 1, spec, c + h) - mean_paid(pr, 1, spec, c - h)) / (2 * h);
  CHECK(std::abs(transaction_passthrough(pr, 1, spec, c) - fd) < 1e-6);
}

TEST_CASE("passthrough_report") {
  auto pr = solve(binomial(2, 0.5));
  auto rep = passthrough_report(pr, 1, unit_demand(), 0.0, 101);
  CHECK(rep.u.size() == 101);
  CHECK(rep.unit_demand);
  REQUIRE(rep.K.has_value());
  CHECK(std::abs(*rep.K - 1.5) < 1e-9);
  CHECK(std::abs(rep.mean_paid - 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(rep.tau_trans - 1.0 / 3.0) < 1e-9);
  CHECK(rep.mean_paid >= rep.price.front() - 1e-12);
  CHECK(rep.mean_paid <= rep.price.back() + 1e-12);
  CHECK(rep.flags.empty());

  auto bert = passthrough_report(solve(spatial(4, 2)), 1, unit_demand(), 0.2, 11);
  CHECK(std::isinf(bert.B));
  CHECK(bert.mean_paid == 0.2);
  CHECK(std::isnan(bert.tau_trans));
  CHECK_FALSE(bert.K.has_value());
  REQUIRE(rep.flags.empty());
  REQUIRE_FALSE(bert.flags.empty());

  CHECK(thrown_code([&] { passthrough_report(pr, 1, unit_demand(), 0.0, 1); }) == "BadGrid");
  CHECK(thrown_code([&] { harmonic_B(pr, 5, unit_demand(), 0.0); }) == "BadFirmIndex");
  CHECK(thrown_code([&] { harmonic_B(solve(spatial(4, 2)), 1, unit_demand(), 0.0); }) ==
        "SupportTouchesCost");
}

#include "doctest.h"

#include "disp/bounds.hpp"
#include "disp/error.hpp"

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

TEST_CASE("universal bounds") {
  auto b = universal_bounds(0.5, 0.2);
  CHECK(b.price_lo == doctest::Approx(0.2));
  CHECK(b.price_hi == doctest::Approx(0.6));
  CHECK(b.tau_lo == doctest::Approx(0.5));

  auto zero = universal_bounds(0.0, 0.3);
  CHECK(zero.price_lo == 0.3);
  CHECK(zero.price_hi == 0.3);
  CHECK(zero.tau_lo == 1.0);

  auto one = universal_bounds(1.0, 0.3);
  CHECK(one.price_hi == doctest::Approx(1.0));
  CHECK(one.tau_lo == 0.0);

  CHECK(thrown_code([] { universal_bounds(1.2, 0.0); }) == "BadMu");
  CHECK(thrown_code([] { universal_bounds(0.5, 1.0); }) == "BadCost");
}

TEST_CASE("family ceilings") {
  CHECK(std::abs(family_bound(DemandFamily::Linear, 0.75, 0.0) - 0.75) < 1e-12);
  CHECK(family_bound(DemandFamily::Exponential, 0.4, 0.3) == 1.0);
  CHECK(std::abs(family_bound(DemandFamily::Unit, 0.4, 0.3) - 0.6) < 1e-12);

  // the ces eta=1 ceiling is attained by the eta=1 kernel itself
  auto spec = ces_demand(1.0);
  for (double c : {0.3, 0.6}) {
    for (int i = 1; i < 20; ++i) {
      double mu = double(i) / 20.0;
      double bound = family_bound(DemandFamily::Ces, mu, c);
      CHECK(std::abs(phi_c(spec, c, mu) - bound) < 1e-10);
    }
  }

  CHECK(thrown_code([] { family_bound(DemandFamily::Table, 0.5, 0.0); }) == "UnknownFamily");
}

TEST_CASE("envelope sweep honors the bounds") {
  double c = 0.3;
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(double(i) / 100.0);
  auto pts = envelope_sweep(default_envelope_families(c), c, grid);
  REQUIRE(pts.size() == 9 * grid.size());
  for (const auto& pt : pts) {
    if (!pt.feasible) continue;
    CHECK(pt.tau >= 1.0 - pt.mu - 1e-10);
    if (pt.family.rfind("linear", 0) == 0)
      CHECK(pt.tau <= 0.5 * (1.0 + std::sqrt(1.0 - pt.mu)) + 1e-10);
    if (pt.family.rfind("exp", 0) == 0) CHECK(pt.tau <= 1.0 + 1e-10);
    if (pt.family == "unit") CHECK(std::abs(pt.tau - (1.0 - pt.mu)) < 1e-10);
  }
}

TEST_CASE("ces over-shifting beyond the critical elasticity") {
  // eta = 2 at c = 0.6 is feasible (c >= 1 - 1/eta) and over-shifts
  std::vector<double> grid;
  for (int i = 1; i < 50; ++i) grid.push_back(double(i) / 50.0);
  auto pts = envelope_sweep({ces_demand(2.0)}, 0.6, grid);
  bool any_over = false;
  for (const auto& pt : pts) {
    if (pt.feasible && pt.tau > 1.0 + 1e-9) any_over = true;
  }
  CHECK(any_over);

  // eta = 2 at c = 0.3 violates global invertibility: every point marked infeasible
  auto infeas = envelope_sweep({ces_demand(2.0)}, 0.3, {0.2, 0.5});
  for (const auto& pt : infeas) CHECK_FALSE(pt.feasible);
}

TEST_CASE("critical elasticity") {
  auto crit = critical_elasticity(0.25);
  CHECK(crit.eta_star > 1.15);
  CHECK(crit.eta_star < 1.45);
  CHECK(std::abs(crit.eta_star - 1.0 / 0.75) < 1e-6);
  CHECK(crit.c == 0.25);
  CHECK_FALSE(crit.criterion.empty());

  // eta_star = 1/(1-c) across the usable cost range
  for (double c : {0.1, 0.5, 0.8}) {
    CHECK(std::abs(critical_elasticity(c).eta_star - 1.0 / (1.0 - c)) < 1e-6);
  }

  CHECK(thrown_code([] { critical_elasticity(0.01); }) == "NoTransition");
  CHECK(thrown_code([] { critical_elasticity(0.99); }) == "NoTransition");
}

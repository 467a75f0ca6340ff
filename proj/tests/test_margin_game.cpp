#include "doctest.h"

#include "disp/error.hpp"
#include "disp/margin_game.hpp"

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

ConsiderationStructure duo_structure() {
  // rho1 = 0.5, rho2 = 0.25
  return from_explicit(2, {{{1}, 0.3}, {{2}, 0.1}, {{1, 2}, 0.3}}, 0.3);
}

} // namespace

TEST_CASE("symmetric solver on binomial(2,0.5)") {
  auto cs = binomial(2, 0.5);
  auto pr = solve_symmetric(cs);
  CHECK(pr.tag == SolverTag::Symmetric);
  REQUIRE(pr.dists.size() == 2);
  CHECK(std::abs(pr.profits[0] - 0.25) < 1e-14);
  CHECK(std::abs(pr.profits[1] - 0.25) < 1e-14);

  const auto& d = pr.dists[0];
  CHECK(d.support_lo == doctest::Approx(0.5));
  CHECK(d.support_hi == 1.0);
  CHECK(d.atoms.empty());
  // mu(u) = 1/(2-u)
  for (double u : {0.0, 0.25, 0.5, 0.75, 1.0})
    CHECK(std::abs(d.quantile(u) - 1.0 / (2.0 - u)) < 1e-12);
  CHECK(std::abs(d.cdf(2.0 / 3.0) - 0.5) < 1e-12);
  CHECK(d.cdf(1.0) == doctest::Approx(1.0));
  CHECK(d.cdf(0.3) == 0.0);
}

TEST_CASE("symmetric solver quantile closed form across n, lambda") {
  for (int n = 2; n <= 6; ++n) {
    for (double lam : {0.1, 0.5, 0.9}) {
      auto pr = solve_symmetric(binomial(n, lam));
      double rho = std::pow(1.0 - lam, n - 1);
      for (int i = 0; i <= 100; ++i) {
        double u = double(i) / 100.0;
        double expect = std::pow((1.0 - lam) / (1.0 - lam * u), n - 1);
        CHECK(std::abs(pr.dists[0].quantile(u) - expect) < 1e-12);
      }
      CHECK(std::abs(pr.dists[0].support_lo - rho) < 1e-12);
    }
  }
}

TEST_CASE("degenerate symmetric cases") {
  auto mono = solve_symmetric(spatial(4, 1));
  CHECK(mono.tag == SolverTag::PureMonopoly);
  CHECK(mono.dists[0].quantile(0.3) == 1.0);
  CHECK(std::abs(mono.profits[2] - 0.25) < 1e-14); // reach of a spatial(4,1) firm

  auto bert = solve_symmetric(spatial(4, 2));
  CHECK(bert.tag == SolverTag::PureBertrand);
  CHECK(bert.dists[1].quantile(0.9) == 0.0);
  CHECK(bert.profits[1] == 0.0);
}

TEST_CASE("duopoly solver") {
  auto cs = duo_structure();
  auto pr = solve_duopoly(cs);
  CHECK(pr.tag == SolverTag::Duopoly);
  CHECK(std::abs(pr.profits[0] - 0.3) < 1e-14);
  CHECK(std::abs(pr.profits[1] - 0.2) < 1e-14);

  const auto& d1 = pr.dists[0];
  const auto& d2 = pr.dists[1];
  REQUIRE(d1.atoms.size() == 1);
  CHECK(std::abs(d1.atoms[0].mass - 1.0 / 3.0) < 1e-12);
  CHECK(d1.atoms[0].location == 1.0);
  CHECK(d2.atoms.empty());

  // CDFs vanish at the common lower support mu = rho1 = 0.5
  CHECK(d1.cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d2.cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  // F2 reaches 1 continuously; F1 jumps by the atom
  CHECK(std::abs(d2.cdf(1.0 - 1e-9) - 1.0) < 1e-8);
  CHECK(std::abs(d1.cdf(1.0 - 1e-9) - 2.0 / 3.0) < 1e-8);
  CHECK(d1.cdf(1.0) == doctest::Approx(1.0));

  // closed forms on the interior
  for (double mu : {0.55, 0.7, 0.9}) {
    CHECK(std::abs(d1.cdf(mu) - (1.0 - (0.5 / mu - 0.25) / 0.75)) < 1e-12);
    CHECK(std::abs(d2.cdf(mu) - (1.0 - (0.5 / 0.5) * (1.0 - mu) / mu)) < 1e-12);
  }

  // atom occupies u in (2/3, 1]
  CHECK(d1.quantile(0.9) == 1.0);
  CHECK(std::abs(d1.quantile(0.5) - 0.5 / (1.0 - 0.5 * 0.75)) < 1e-12);

  // quantile dominance of the strong firm
  for (int i = 0; i <= 200; ++i) {
    double u = double(i) / 200.0;
    CHECK(d1.quantile(u) >= d2.quantile(u) - 1e-12);
  }
}

TEST_CASE("duopoly guards") {
  CHECK(thrown_code([] { solve_duopoly(binomial(3, 0.5)); }) == "NotDuopoly");
  CHECK(thrown_code([] {
          solve_duopoly(from_explicit(2, {{{1}, 0.5}, {{2}, 0.5}}, 0.0));
        }) == "DegenerateRho"); // both captive-only: rho = 1
  CHECK(thrown_code([] {
          solve_duopoly(from_explicit(2, {{{1, 2}, 0.6}, {{1}, 0.4}}));
        }) == "DegenerateRho"); // firm 2 has rho = 0
}

TEST_CASE("equal-rho duopoly collapses to symmetric mixing") {
  auto cs = from_explicit(2, {{{1}, 0.2}, {{2}, 0.2}, {{1, 2}, 0.4}});
  auto pr = solve_duopoly(cs);
  CHECK(pr.dists[0].atoms.empty());
  CHECK(pr.dists[1].atoms.empty());
  auto sym = solve_symmetric(cs);
  for (int i = 0; i <= 50; ++i) {
    double u = double(i) / 50.0;
    CHECK(std::abs(pr.dists[0].quantile(u) - sym.dists[0].quantile(u)) < 1e-12);
    CHECK(std::abs(pr.dists[1].quantile(u) - sym.dists[1].quantile(u)) < 1e-12);
  }
}

TEST_CASE("independent three-firm solver") {
  auto cs = independent({0.6, 0.5, 0.4});
  auto pr = solve_independent(cs);
  CHECK(pr.tag == SolverTag::IndependentN);
  CHECK(std::abs(pr.profits[0] - 0.18) < 1e-14);
  CHECK(std::abs(pr.profits[1] - 0.15) < 1e-14);
  CHECK(std::abs(pr.profits[2] - 0.12) < 1e-14);

  const auto& d1 = pr.dists[0];
  const auto& d2 = pr.dists[1];
  const auto& d3 = pr.dists[2];
  CHECK(std::abs(d1.support_lo - 0.3) < 1e-14);
  CHECK(std::abs(d3.support_hi - 5.0 / 6.0) < 1e-14);
  CHECK(d2.support_hi == 1.0);
  REQUIRE(d1.atoms.size() == 1);
  CHECK(std::abs(d1.atoms[0].mass - 1.0 / 6.0) < 1e-12);

  // Gamma at mu = 0.48 on the all-active piece
  double gamma = 1.0 - std::sqrt(0.3 / 0.48);
  CHECK(std::abs(d3.cdf(0.48) - gamma / 0.4) < 1e-12);
  CHECK(std::abs(d1.cdf(0.48) - gamma / 0.6) < 1e-12);

  // Gamma continuous at the cutoff 5/6, where it equals lambda_3 (firm 3 exits)
  double eps = 1e-10;
  CHECK(std::abs(d2.cdf(5.0 / 6.0 - eps) - d2.cdf(5.0 / 6.0 + eps)) < 1e-9);
  CHECK(std::abs(d2.cdf(5.0 / 6.0) - 0.4 / 0.5) < 1e-9);

  // pointwise CDF ordering F1 <= F2 <= F3
  for (int i = 0; i <= 2000; ++i) {
    double mu = 0.3 + (1.0 - 0.3) * double(i) / 2000.0;
    double f1 = d1.cdf(mu), f2 = d2.cdf(mu), f3 = d3.cdf(mu);
    CHECK(f1 <= f2 + 1e-12);
    CHECK(f2 <= f3 + 1e-12);
  }

  // quantile dominance chain
  for (int i = 0; i <= 500; ++i) {
    double u = double(i) / 500.0;
    CHECK(d1.quantile(u) >= d2.quantile(u) - 1e-12);
    CHECK(d2.quantile(u) >= d3.quantile(u) - 1e-12);
  }
}

TEST_CASE("independent equal-lambda pair matches the symmetric solution") {
  auto cs = independent({0.5, 0.5});
  auto pr = solve_independent(cs);
  CHECK(pr.dists[0].atoms.empty());
  auto sym = solve_symmetric(binomial(2, 0.5));
  for (int i = 0; i <= 100; ++i) {
    double u = double(i) / 100.0;
    CHECK(std::abs(pr.dists[0].quantile(u) - sym.dists[0].quantile(u)) < 1e-12);
  }
}

TEST_CASE("independent guards") {
  auto plain = from_explicit(2, {{{1}, 0.3}, {{2}, 0.3}, {{1, 2}, 0.2}});
  CHECK(thrown_code([&] { solve_independent(plain); }) == "NotIndependent");
}

TEST_CASE("cdf and quantile are mutually inverse off atoms") {
  auto check_roundtrip = [](const MarginDistribution& d, double u_max) {
    for (int i = 0; i <= 400; ++i) {
      double u = u_max * double(i) / 400.0;
      CHECK(std::abs(d.cdf(d.quantile(u)) - u) < 1e-10);
    }
  };
  auto sym = solve_symmetric(binomial(3, 0.4));
  check_roundtrip(sym.dists[0], 1.0);
  auto duo = solve_duopoly(duo_structure());
  // stay strictly below the atom; cdf(quantile(u)) jumps to 1 at its boundary
  check_roundtrip(duo.dists[0], 2.0 / 3.0 - 1e-9);
  check_roundtrip(duo.dists[1], 1.0);
  auto ind = solve_independent(independent({0.6, 0.5, 0.4}));
  check_roundtrip(ind.dists[0], 1.0 - 1.0 / 6.0 - 1e-9);
  check_roundtrip(ind.dists[1], 1.0);
  check_roundtrip(ind.dists[2], 1.0);
}

TEST_CASE("solver dispatch") {
  CHECK(solve(binomial(4, 0.3)).tag == SolverTag::Symmetric);
  CHECK(solve(duo_structure()).tag == SolverTag::Duopoly);
  CHECK(solve(independent({0.6, 0.5, 0.4})).tag == SolverTag::IndependentN);
  CHECK(solve(spatial(4, 2)).tag == SolverTag::PureBertrand);
  CHECK(solve(spatial(6, 1)).tag == SolverTag::PureMonopoly);
  // exchangeable beats the independent tag: same result either way
  CHECK(solve(independent({0.5, 0.5, 0.5})).tag == SolverTag::Symmetric);

  auto corr = from_explicit(3, {{{1}, 0.3}, {{2}, 0.2}, {{3}, 0.1}, {{1, 2}, 0.2}, {{2, 3}, 0.2}});
  CHECK(thrown_code([&] { solve(corr); }) == "UnsupportedStructure");
}

TEST_CASE("demand share identities") {
  auto cs = binomial(2, 0.5);
  auto pr = solve_symmetric(cs);
  for (double u : {0.1, 0.5, 0.8}) {
    double mu = pr.dists[0].quantile(u);
    double q = demand_share(cs, pr, 1, mu);
    CHECK(std::abs(mu * q - 0.25) < 1e-12); // constant-profit identity
  }
  // below everyone's support the firm wins its whole reach
  CHECK(std::abs(demand_share(cs, pr, 1, 0.2) - 0.5) < 1e-12);

  auto ind = independent({0.6, 0.5, 0.4});
  auto pri = solve_independent(ind);
  double q2 = demand_share(ind, pri, 2, 0.48);
  CHECK(std::abs(0.48 * q2 - 0.15) < 1e-12);
  // product form agrees with the generic subset sum
  for (double mu : {0.35, 0.48, 0.7, 0.9}) {
    for (int firm = 1; firm <= 3; ++firm) {
      CHECK(std::abs(demand_share(ind, pri, firm, mu) - tie_aware_share(ind, pri, firm, mu)) <
            1e-12);
    }
  }

  auto duo = solve_duopoly(duo_structure());
  CHECK(thrown_code([&] { demand_share(duo_structure(), duo, 2, 1.0); }) == "AtomAtPoint");
  // tie split at the rival atom: alpha2 + alpha12 * (surv + atom/2)
  double share = tie_aware_share(duo_structure(), duo, 2, 1.0);
  CHECK(std::abs(share - (0.1 + 0.3 * (1.0 / 3.0) / 2.0)) < 1e-12);
}

TEST_CASE("verify_equilibrium passes for solved profiles") {
  for (const auto& cs : {binomial(3, 0.4), binomial(2, 0.5), spatial(4, 1)}) {
    auto pr = solve(cs);
    auto rep = verify_equilibrium(cs, pr, 2001, 1e-8);
    CHECK(rep.pass);
  }
  {
    auto cs = duo_structure();
    auto rep = verify_equilibrium(cs, solve(cs), 2001, 1e-8);
    CHECK(rep.pass);
  }
  {
    auto cs = independent({0.6, 0.5, 0.4});
    auto rep = verify_equilibrium(cs, solve(cs), 2001, 1e-8);
    CHECK(rep.pass);
  }
  {
    auto cs = spatial(4, 2); // PureBertrand: trivial pass
    auto rep = verify_equilibrium(cs, solve(cs), 2001, 1e-8);
    CHECK(rep.pass);
  }
}

TEST_CASE("verify_equilibrium flags a perturbed profile") {
  auto cs = binomial(3, 0.4);
  auto pr = solve_symmetric(cs);
  pr.dists[0].pieces[0].par[0] *= 1.05; // firm 1's CDF no longer the equilibrium one
  auto rep = verify_equilibrium(cs, pr, 501, 1e-8);
  CHECK_FALSE(rep.pass);
  double worst = 0;
  for (const auto& fc : rep.firms)
    worst = std::max({worst, fc.max_indifference_residual, fc.max_deviation_gain});
  CHECK(worst > 1e-4);
}

TEST_CASE("verify_equilibrium guards") {
  auto cs = binomial(2, 0.5);
  auto pr = solve(cs);
  CHECK(thrown_code([&] { verify_equilibrium(cs, pr, 50, 1e-8); }) == "BadGrid");
  auto other = solve(binomial(3, 0.5));
  CHECK(thrown_code([&] { verify_equilibrium(cs, other); }) == "ProfileMismatch");
}

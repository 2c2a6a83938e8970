// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "hvf/integral.hpp"
#include "hvf/presets.hpp"
#include "hvf/rh.hpp"
#include "hvf/solve.hpp"

using hvf::cplx;
using hvf::DiscFn;
using hvf::FirstIntegral;
using hvf::HomogeneousField;
using hvf::PeriodicFn;
using hvf::RHFree;
using hvf::RHInput;
using hvf::RHSolution;
using hvf::two_pi;
using Catch::Matchers::ContainsSubstring;

namespace {

// Unit-modulus loop with winding kappa and a smooth periodic phase wobble.
PeriodicFn unit_loop(int kappa, double a1, double b2, std::size_t n) {
  return hvf::pf_build(
      [=](double t) {
        return std::polar(1.0, double(kappa) * t + a1 * std::sin(t) +
                                   b2 * std::cos(2.0 * t));
      },
      n);
}

// Sup of |Re F(e^{i tau}) - g(tau)| over boundary points between grid nodes.
double schwarz_defect(const DiscFn& F, const PeriodicFn& g,
                      std::size_t m = 113) {
  double worst = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double tau = two_pi * (double(s) + 0.5) / double(m);
    worst = std::max(
        worst, std::abs(F(std::polar(1.0, tau)).real() - g(tau).real()));
  }
  return worst;
}

}  // namespace

TEST_CASE("schwarz operator reproduces real boundary data", "[rh]") {
  SECTION("single harmonics have closed forms") {
    const DiscFn one = hvf::schwarz(hvf::pf_const(cplx(1.0, 0.0), 64));
    const DiscFn fc =
        hvf::schwarz(hvf::pf_build([](double t) { return std::cos(t); }, 64));
    const DiscFn fs =
        hvf::schwarz(hvf::pf_build([](double t) { return std::sin(t); }, 64));
    for (const cplx z : {cplx(0.3, 0.4), cplx(-0.7, 0.1), cplx(0.0, 0.9)}) {
      CHECK(std::abs(one(z) - cplx(1.0, 0.0)) < 1e-14);
      CHECK(std::abs(fc(z) - z) < 1e-14);
      CHECK(std::abs(fs(z) - cplx(0.0, -1.0) * z) < 1e-14);
    }
  }

  SECTION("random trigonometric polynomials round trip") {
    std::mt19937 rng(20260819u);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int degree = 1 + trial % 10;
      std::vector<double> a(std::size_t(degree) + 1), b(std::size_t(degree) + 1);
      for (int m = 0; m <= degree; ++m) {
        a[std::size_t(m)] = amp(rng);
        b[std::size_t(m)] = amp(rng);
      }
      const PeriodicFn g = hvf::pf_build(
          [&](double t) {
            double s = a[0];
            for (int m = 1; m <= degree; ++m)
              s += a[std::size_t(m)] * std::cos(double(m) * t) +
                   b[std::size_t(m)] * std::sin(double(m) * t);
            return cplx(s, 0.0);
          },
          64);
      const DiscFn F = hvf::schwarz(g);
      CHECK(schwarz_defect(F, g) < 1e-10);
      CHECK(F.coeff[0].imag() == 0.0);  // normalization Im F(0) = 0
    }
  }

  SECTION("complex densities are rejected") {
    const PeriodicFn g =
        hvf::pf_build([](double t) { return std::polar(1.0, t); }, 64);
    REQUIRE_THROWS_WITH(hvf::schwarz(g), ContainsSubstring("real"));
  }
}

TEST_CASE("winding numbers are integers, stable and additive", "[rh]") {
  SECTION("wobbled loops report their turn count") {
    for (const int kappa : {-3, -1, 0, 2, 5}) {
      CHECK(hvf::rh_winding(unit_loop(kappa, 0.7, -0.3, 256)) == kappa);
      // stability under grid doubling
      CHECK(hvf::rh_winding(unit_loop(kappa, 0.7, -0.3, 512)) == kappa);
    }
  }

  SECTION("winding adds under multiplication of loops") {
    const PeriodicFn a = unit_loop(2, 0.5, 0.2, 256);
    const PeriodicFn b = unit_loop(-3, -0.4, 0.1, 256);
    CHECK(hvf::rh_winding(a * b) == -1);
  }

  SECTION("antipodal neighbor samples are ambiguous") {
    // eight turns on sixteen samples puts consecutive samples at opposite
    // points of the circle: the phase step is exactly pi
    const PeriodicFn fast = hvf::pf_build(
        [](double t) { return std::polar(1.0, 8.0 * t); }, 16);
    REQUIRE_THROWS_WITH(hvf::rh_winding(fast), ContainsSubstring("coarse"));
  }

  SECTION("loops through the origin are rejected") {
    const PeriodicFn through =
        hvf::pf_build([](double t) { return cplx(std::cos(t), 0.0); }, 64);
    REQUIRE_THROWS_WITH(hvf::rh_winding(through), ContainsSubstring("1e-12"));
  }
}

TEST_CASE("canonical solves hit their closed forms", "[rh]") {
  SECTION("trivial coefficient, cosine data: w(z) = z") {
    const RHInput inp = hvf::rh_input(
        hvf::pf_const(cplx(1.0, 0.0), 64),
        hvf::pf_build([](double t) { return std::cos(t); }, 64),
        cplx(2.0, 0.0), cplx(1.0, 0.0));
    const RHSolution sol = hvf::rh_solve(inp);
    CHECK(sol.kappa == 0);
    CHECK(sol.n == 2);  // 0 + 1 + floor(1/1)
    for (const double r : {0.2, 0.5, 0.8, 1.0})
      for (int k = 0; k < 5; ++k) {
        const cplx z = std::polar(r, two_pi * double(k) / 5.0 + 0.1);
        CHECK(std::abs(sol(z) - z) < 1e-10);
      }
    CHECK(hvf::rh_residual(inp, sol, 512) < 1e-10);
  }

  SECTION("zero data gives the zero member") {
    const RHInput inp =
        hvf::rh_input(hvf::pf_const(cplx(1.0, 0.0), 64),
                      hvf::pf_const(cplx(0.0, 0.0), 64), cplx(2.0, 0.0),
                      cplx(1.0, 0.0));
    const RHSolution sol = hvf::rh_solve(inp);
    for (const double r : {0.3, 0.9})
      CHECK(std::abs(sol(std::polar(r, 1.1))) < 1e-12);
  }

  SECTION("one winding, unit data: the family contains 1/z") {
    const RHInput inp = hvf::rh_input(
        hvf::pf_build([](double t) { return std::polar(1.0, t); }, 64),
        hvf::pf_const(cplx(1.0, 0.0), 64), cplx(3.0, 0.0), cplx(1.0, 0.0));
    const RHSolution sol = hvf::rh_solve(inp);
    CHECK(sol.kappa == 1);
    CHECK(sol.n == 4);  // 1 + 1 + floor(2/1)
    for (const double r : {0.3, 0.6, 1.0})
      for (int k = 0; k < 4; ++k) {
        const cplx z = std::polar(r, 0.4 + two_pi * double(k) / 4.0);
        CHECK(std::abs(sol(z) - 1.0 / z) < 1e-8);
      }
    CHECK(hvf::rh_residual(inp, sol, 512) < 1e-8);
  }

  SECTION("the evaluator guards its punctured domain") {
    const RHInput inp = hvf::rh_input(
        hvf::pf_const(cplx(1.0, 0.0), 64),
        hvf::pf_build([](double t) { return std::cos(t); }, 64),
        cplx(2.0, 0.0), cplx(1.0, 0.0));
    const RHSolution sol = hvf::rh_solve(inp);
    REQUIRE_THROWS_WITH(sol(cplx(0.0, 0.0)), ContainsSubstring("z = 0"));
    REQUIRE_THROWS_WITH(sol(cplx(1.2, 0.0)),
                        ContainsSubstring("closed unit disc"));
  }
}

TEST_CASE("index bound accepts exactly at the slack", "[rh]") {
  const PeriodicFn cosine =
      hvf::pf_build([](double t) { return std::cos(t); }, 64);
  const auto loop = [](int kappa) {
    return hvf::pf_build(
        [=](double t) { return std::polar(1.0, double(kappa) * t); }, 64);
  };

  SECTION("fractional budget: bound at -2.5") {
    const RHInput ok =
        hvf::rh_input(loop(-2), cosine, cplx(2.5, 0.0), cplx(1.0, 0.0));
    const RHSolution sol = hvf::rh_solve(ok);
    CHECK(sol.kappa == -2);
    CHECK(sol.n == 0);
    CHECK(hvf::rh_residual(ok, sol, 256) < 1e-10);

    const RHInput bad =
        hvf::rh_input(loop(-3), cosine, cplx(2.5, 0.0), cplx(1.0, 0.0));
    REQUIRE_THROWS_WITH(hvf::rh_solve(bad),
                        ContainsSubstring("kappa = -3") &&
                            ContainsSubstring("-2.500000"));
  }

  SECTION("integer budget: equality is admitted by the slack") {
    const RHInput edge =
        hvf::rh_input(loop(-3), cosine, cplx(3.0, 0.0), cplx(1.0, 0.0));
    const RHSolution sol = hvf::rh_solve(edge);
    CHECK(sol.kappa == -3);
    CHECK(sol.n == 0);

    const RHInput bad =
        hvf::rh_input(loop(-4), cosine, cplx(3.0, 0.0), cplx(1.0, 0.0));
    REQUIRE_THROWS_WITH(hvf::rh_solve(bad),
                        ContainsSubstring("kappa = -4") &&
                            ContainsSubstring("-3.000000"));
  }
}

TEST_CASE("free parameters sweep the family without touching the fit",
          "[rh]") {
  const RHInput inp = hvf::rh_input(
      hvf::pf_build(
          [](double t) {
            return std::polar(1.0, t + 0.4 * std::sin(t) +
                                       0.2 * std::cos(2.0 * t));
          },
          128),
      hvf::pf_build(
          [](double t) {
            return 0.7 + 0.4 * std::cos(t) - 0.2 * std::sin(3.0 * t);
          },
          128),
      cplx(2.6, 0.0), cplx(0.8, 0.3));

  const RHSolution sol0 = hvf::rh_solve(inp);
  REQUIRE(sol0.kappa == 1);
  REQUIRE(sol0.n == 3);  // 1 + 1 + floor(1.6/1.0959)

  SECTION("every member fits the boundary data") {
    // trailing coefficient zero: the member stays within the pole budget
    RHFree pick;
    pick.beta0 = 0.37;
    pick.c = {cplx(0.2, -0.1), cplx(-0.05, 0.3)};
    const RHSolution sol1 = hvf::rh_solve(inp, pick);
    CHECK(sol1.c.size() == 3);  // zero padded to the family size
    CHECK(hvf::rh_residual(inp, sol0, 512) < 1e-8);
    CHECK(hvf::rh_residual(inp, sol1, 512) < 1e-8);

    // the difference of two members is exactly the homogeneous term
    for (const double t : {0.3, 1.7, 4.0}) {
      const cplx z = std::polar(0.7, t);
      cplx Q(0.0, pick.beta0);
      cplx zp(1.0, 0.0), zn(1.0, 0.0);
      for (std::size_t k = 0; k < sol1.c.size(); ++k) {
        zp *= z;
        zn /= z;
        Q += sol1.c[k] * zp - std::conj(sol1.c[k]) * zn;
      }
      const cplx pred =
          std::exp(cplx(0.0, 1.0) * sol0.gamma(z)) / z * Q;
      CHECK(std::abs(sol1(z) - sol0(z) - pred) <
            1e-10 * (1.0 + std::abs(pred)));
    }
  }

  SECTION("a trailing coefficient overruns the pole budget and is flagged") {
    RHFree over;
    over.c = {cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.3, 0.0)};
    const RHSolution sol2 = hvf::rh_solve(inp, over);
    // boundary fit still holds, but w z^n now has a genuine pole (order
    // kappa + n > n), so the holomorphy figure reports it
    CHECK(hvf::rh_residual(inp, sol2, 512) > 1e-3);
  }

  SECTION("too many coefficients are rejected by name") {
    RHFree over;
    over.c.assign(4, cplx(0.1, 0.0));
    REQUIRE_THROWS_WITH(hvf::rh_solve(inp, over),
                        ContainsSubstring("n = 3"));
  }

  SECTION("perturbations in the trivial configuration stay exact") {
    const RHInput triv = hvf::rh_input(
        hvf::pf_const(cplx(1.0, 0.0), 64),
        hvf::pf_build([](double t) { return std::cos(t); }, 64),
        cplx(2.0, 0.0), cplx(1.0, 0.0));
    RHFree beta;
    beta.beta0 = 0.1;
    CHECK(hvf::rh_residual(triv, hvf::rh_solve(triv, beta), 256) < 1e-10);
    RHFree c1;
    c1.c = {cplx(0.1, 0.0)};
    CHECK(hvf::rh_residual(triv, hvf::rh_solve(triv, c1), 256) < 1e-10);
  }
}

TEST_CASE("under-resolved boundary data is rejected, not smoothed", "[rh]") {
  const auto spiky = [](std::size_t n) {
    return hvf::rh_input(
        hvf::pf_build(
            [](double t) { return std::polar(1.0, 0.8 * std::sin(40.0 * t)); },
            n),
        hvf::pf_const(cplx(1.0, 0.0), n), cplx(2.0, 0.0), cplx(1.0, 0.0));
  };
  // 128 samples cannot resolve e^{Im gamma} for a phase at harmonic 40: the
  // density's spectrum reaches past the working band and the defect shows
  // up between nodes
  REQUIRE_THROWS_WITH(hvf::rh_solve(spiky(128)),
                      ContainsSubstring("not resolved"));
  // the same data on a fine grid solves cleanly
  const RHInput fine = spiky(1024);
  CHECK(hvf::rh_residual(fine, hvf::rh_solve(fine), 512) < 1e-8);
}

TEST_CASE("composition pushes disc solutions onto the field", "[rh]") {
  const HomogeneousField L =
      hvf::preset_example2(1, cplx(1.0, 0.0), cplx(3.0, 0.0), 128);
  const FirstIntegral Z = hvf::first_integral(L, hvf::compute_mu(L));
  REQUIRE(Z.kind == hvf::FIKind::PositiveReMu);
  const std::function<cplx(double, double)> zero = [](double, double) {
    return cplx(0.0, 0.0);
  };

  SECTION("w(z) = z pulls back to the first integral itself") {
    const RHInput inp = hvf::rh_input(
        hvf::pf_const(cplx(1.0, 0.0), 64),
        hvf::pf_build([](double t) { return std::cos(t); }, 64),
        L.lambda, Z.mu);
    const RHSolution sol = hvf::rh_solve(inp);
    const std::function<cplx(double, double)> u = [&](double r, double t) {
      return hvf::rh_compose(L, Z, sol, r, t);
    };
    CHECK(hvf::residual_check(L, u, zero, {0.1, 0.5}, 12) < 1e-6);
  }

  SECTION("constant members are exact kernel elements") {
    const RHInput inp = hvf::rh_input(hvf::pf_const(cplx(1.0, 0.0), 64),
                                      hvf::pf_const(cplx(0.7, 0.0), 64),
                                      L.lambda, Z.mu);
    const RHSolution sol = hvf::rh_solve(inp);
    const std::function<cplx(double, double)> u = [&](double r, double t) {
      return hvf::rh_compose(L, Z, sol, r, t);
    };
    CHECK(hvf::residual_check(L, u, zero, {0.1, 0.5}, 8) < 1e-10);
  }

  SECTION("the 1/z member agrees with the first-integral power") {
    const RHInput inp = hvf::rh_input(
        hvf::pf_build([](double t) { return std::polar(1.0, t); }, 64),
        hvf::pf_const(cplx(1.0, 0.0), 64), L.lambda, Z.mu);
    const RHSolution sol = hvf::rh_solve(inp);
    // admissible precisely because Re(1/mu) = 1 < Re lambda - 1 = 2, the
    // same inequality solution_from_powers enforces
    const hvf::RadialPowerSolution P = hvf::solution_from_powers(L, Z, 1);
    for (const double r : {0.15, 0.3, 0.4})
      for (const double t : {0.0, 1.3, 2.9, 5.1}) {
        const cplx diff = hvf::rh_compose(L, Z, sol, r, t) - P(r, t);
        CHECK(std::abs(diff) < 1e-8 * (1.0 + std::abs(P(r, t))));
      }
    const std::function<cplx(double, double)> u = [&](double r, double t) {
      return hvf::rh_compose(L, Z, sol, r, t);
    };
    CHECK(hvf::residual_check(L, u, zero, {0.1, 0.4}, 8) < 1e-6);
  }

  SECTION("the blow-up bound matches across modules") {
    // for the degree-2 polynomial field, Re(1/mu) = 3 >= Re lambda - 1 = 1:
    // the reciprocal power is rejected there
    const HomogeneousField L2 = hvf::preset_divfree_polynomial(2, 128);
    const FirstIntegral Z2 = hvf::first_integral(L2, hvf::compute_mu(L2));
    REQUIRE_THROWS_WITH(hvf::solution_from_powers(L2, Z2, 1),
                        ContainsSubstring("Re lambda - 1"));
  }

  SECTION("points outside the modeled domain are rejected") {
    const RHInput inp = hvf::rh_input(
        hvf::pf_const(cplx(1.0, 0.0), 64),
        hvf::pf_build([](double t) { return std::cos(t); }, 64),
        L.lambda, Z.mu);
    const RHSolution sol = hvf::rh_solve(inp);
    REQUIRE_THROWS_WITH(hvf::rh_compose(L, Z, sol, 1.2, 0.3),
                        ContainsSubstring("outside"));
  }

  SECTION("zero-rotation integrals cannot feed the disc model") {
    const HomogeneousField L1 = hvf::preset_example1();
    const FirstIntegral Z1 = hvf::first_integral(L1, hvf::compute_mu(L1));
    const RHInput inp = hvf::rh_input(
        hvf::pf_const(cplx(1.0, 0.0), 64),
        hvf::pf_build([](double t) { return std::cos(t); }, 64),
        L.lambda, Z.mu);
    const RHSolution sol = hvf::rh_solve(inp);
    REQUIRE_THROWS_WITH(hvf::rh_compose(L1, Z1, sol, 0.3, 0.0),
                        ContainsSubstring("Re mu > 0"));
  }
}

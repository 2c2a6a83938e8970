// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "hvf/field.hpp"
#include "hvf/integral.hpp"
#include "hvf/presets.hpp"

using hvf::cplx;
using hvf::FIKind;
using hvf::FirstIntegral;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<std::pair<double, double>> polar_grid(std::vector<double> radii,
                                                  std::size_t n_theta) {
  std::vector<std::pair<double, double>> g;
  for (double r : radii)
    for (std::size_t k = 0; k < n_theta; ++k)
      g.emplace_back(r, hvf::two_pi * double(k) / double(n_theta));
  return g;
}

}  // namespace

TEST_CASE("angular antiderivative splits into linear and periodic parts", "[integral]") {
  SECTION("constant ratio has no periodic part") {
    const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0),
                                       hvf::pf_const(cplx(2.0, -1.0)));
    const auto d = hvf::psi(L);
    CHECK_THAT(std::abs(d.mean - cplx(2.0, -1.0)), WithinAbs(0.0, 1e-14));
    CHECK_THAT(hvf::pf_sup(d.periodic_part), WithinAbs(0.0, 1e-13));
  }

  SECTION("closed form for q = (pi/2) sin - i cos") {
    // psi(t) = (pi/2)(1 - cos t) - i sin t
    const auto d = hvf::psi(hvf::preset_example1());
    CHECK_THAT(std::abs(d.mean), WithinAbs(0.0, 1e-13));
    const cplx at_half_pi = d.mean * (hvf::pi / 2.0) + d.periodic_part(hvf::pi / 2.0);
    CHECK_THAT(std::abs(at_half_pi - cplx(hvf::pi / 2.0, -1.0)), WithinAbs(0.0, 1e-12));
    for (double t : {0.4, 1.9, 3.3, 5.6}) {
      const cplx ref(hvf::pi / 2.0 * (1.0 - std::cos(t)), -std::sin(t));
      CHECK_THAT(std::abs(d.mean * t + d.periodic_part(t) - ref), WithinAbs(0.0, 1e-12));
    }
    CHECK_THAT(std::abs(d.periodic_part(0.0)), WithinAbs(0.0, 1e-13));
  }

  SECTION("derivative identity on a nonconstant p") {
    const auto L = hvf::preset_divfree(3);
    const auto d = hvf::psi(L);
    const auto ratio = L.q / L.p;
    const auto res = hvf::pf_derivative(d.periodic_part) + d.mean - ratio;
    CHECK(hvf::pf_sup(res) <= 1e-10 * std::max(1.0, hvf::pf_sup(ratio)));
    CHECK_THAT(std::abs(d.periodic_part(0.0)), WithinAbs(0.0, 1e-13));
  }
}

TEST_CASE("first integral construction per rotation-number kind", "[integral]") {
  SECTION("zero rotation number rescales onto the strip [0, pi]") {
    const auto L = hvf::preset_example1();
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    REQUIRE(Z.kind == FIKind::ZeroMu);
    CHECK_THAT(Z.sigma, WithinAbs(1.0, 1e-10));
    CHECK_THAT(std::abs(hvf::fi_eval(Z, 1.0, hvf::pi / 2.0) -
                        cplx(0.0, std::exp(1.0))),
               WithinAbs(0.0, 1e-10));
    const auto [lo, hi] = hvf::pf_min_max(hvf::pf_re(Z.phi));
    CHECK_THAT(lo.value, WithinAbs(0.0, 1e-8));
    CHECK_THAT(hi.value, WithinAbs(hvf::pi, 1e-8));
  }

  SECTION("positive real part produces the sine profile") {
    for (int k : {1, 3}) {
      const auto L = hvf::preset_example2(k, cplx(1.0, 0.0));
      const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
      REQUIRE(Z.kind == FIKind::PositiveReMu);
      const auto diff =
          Z.phi - hvf::pf_build([&](double t) { return std::sin(double(k) * t); },
                                Z.phi.n_grid());
      CHECK(hvf::pf_sup(diff) <= 1e-12);
    }
  }

  SECTION("imaginary rotation number yields the image annulus") {
    const auto L = hvf::preset_example3();
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    REQUIRE(Z.kind == FIKind::ImaginaryMu);
    CHECK_THAT(Z.beta, WithinAbs(1.0, 1e-12));
    CHECK_THAT(Z.ann_lo, WithinAbs(std::exp(-1.5), 1e-8));
    CHECK_THAT(Z.ann_hi, WithinAbs(std::exp(0.75), 1e-8));
    CHECK(hvf::pf_sup(hvf::pf_re(Z.phi)) <= 1e-12);  // phi is purely imaginary here
  }

  SECTION("ambiguous magnitudes are reported, not guessed") {
    const auto L = hvf::preset_elliptic();
    CHECK_THROWS_AS(hvf::first_integral(L, cplx(5e-10, 0.0)), hvf::precondition_error);
    CHECK_THROWS_AS(hvf::first_integral(L, cplx(5e-10, 0.5)), hvf::precondition_error);
    CHECK_THROWS_AS(hvf::first_integral(L, cplx(-0.3, 0.0)), hvf::precondition_error);
    CHECK_NOTHROW(hvf::first_integral(L, cplx(0.0, 0.5)));
    CHECK_NOTHROW(hvf::first_integral(L, cplx(0.2, 0.5)));
  }

  SECTION("constant Re psi leaves sigma undefined") {
    const auto q = hvf::pf_build([](double t) { return cplx(0.0, std::cos(t)); });
    const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0), q);
    CHECK_THROWS_AS(hvf::first_integral(L, hvf::compute_mu(L)), hvf::precondition_error);
  }
}

TEST_CASE("first integral evaluation", "[integral]") {
  const auto L1 = hvf::preset_example1();
  const auto Z1 = hvf::first_integral(L1, hvf::compute_mu(L1));
  const auto L2 = hvf::preset_example2();
  const auto Z2 = hvf::first_integral(L2, hvf::compute_mu(L2));
  const auto L3 = hvf::preset_example3();
  const auto Z3 = hvf::first_integral(L3, hvf::compute_mu(L3));

  CHECK_THAT(std::abs(hvf::fi_eval(Z1, 2.0, 0.0) - cplx(2.0, 0.0)),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(hvf::fi_eval(Z2, 1.0, 0.0) - cplx(1.0, 0.0)),
             WithinAbs(0.0, 1e-13));

  // modulus is independent of r and maxes at e^{3/4} on this ray
  for (double r : {0.5, 1.0, 2.0})
    CHECK_THAT(std::abs(hvf::fi_eval(Z3, r, hvf::pi / 12.0)),
               WithinAbs(std::exp(0.75), 1e-10));

  CHECK_THROWS_AS(hvf::fi_eval(Z1, 0.0, 1.0), hvf::precondition_error);
  CHECK_THROWS_AS(hvf::fi_eval(Z1, -1.0, 1.0), hvf::precondition_error);

  CHECK(hvf::fi_image(Z1) == hvf::FIImage::UpperHalfPlane);
  CHECK(hvf::fi_image(Z2) == hvf::FIImage::WholePlane);
  CHECK(hvf::fi_image(Z3) == hvf::FIImage::Annulus);
}

TEST_CASE("first integral residual", "[integral]") {
  const auto grid = polar_grid({0.5, 1.0, 2.0}, 64);

  const auto L1 = hvf::preset_example1();
  const auto Z1 = hvf::first_integral(L1, hvf::compute_mu(L1));
  CHECK(hvf::fi_residual(L1, Z1, grid) <= 1e-10);

  const auto L2 = hvf::preset_example2();
  const auto Z2 = hvf::first_integral(L2, hvf::compute_mu(L2));
  CHECK(hvf::fi_residual(L2, Z2, grid) <= 1e-10);

  const auto L3 = hvf::preset_example3();
  const auto Z3 = hvf::first_integral(L3, hvf::compute_mu(L3));
  CHECK(hvf::fi_residual(L3, Z3, grid) <= 1e-8);

  const auto Ld = hvf::preset_divfree(2);
  const auto Zd = hvf::first_integral(Ld, hvf::compute_mu(Ld));
  CHECK(hvf::fi_residual(Ld, Zd, grid) <= 1e-8);

  // corrupting the profile must be loudly visible
  FirstIntegral bad = Z1;
  bad.phi = bad.phi + 0.01 * hvf::pf_build([](double t) { return std::sin(t); },
                                           bad.phi.n_grid());
  CHECK(hvf::fi_residual(L1, bad, grid) > 1e-4);
}

TEST_CASE("radial power solutions", "[integral]") {
  SECTION("power zero is the constant 1") {
    const auto L = hvf::preset_example2();
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    const auto u = hvf::solution_from_powers(L, Z, 0);
    CHECK_THAT(std::abs(u(0.7, 2.1) - cplx(1.0, 0.0)), WithinAbs(0.0, 1e-13));
    CHECK_THAT(std::abs(u.rho), WithinAbs(0.0, 1e-14));
  }

  SECTION("admissible and inadmissible exponents") {
    const auto L = hvf::preset_example2();  // mu = 1, lambda = 3
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    const auto u = hvf::solution_from_powers(L, Z, 1);  // 1 * Re(1/1) < 2
    CHECK(hvf::radial_power_residual(L, u) <= 1e-8);
    CHECK_THROWS_AS(hvf::solution_from_powers(L, Z, 2), hvf::precondition_error);

    const auto L1 = hvf::preset_example1();  // sigma = 1, lambda = 2
    const auto Z1 = hvf::first_integral(L1, hvf::compute_mu(L1));
    CHECK_THROWS_AS(hvf::solution_from_powers(L1, Z1, 1), hvf::precondition_error);
    const auto v = hvf::solution_from_powers(L1, Z1, -2);
    CHECK(hvf::radial_power_residual(L1, v) <= 1e-8);
  }

  SECTION("imaginary kind admits any power") {
    const auto L = hvf::preset_example3();
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    const auto u = hvf::solution_from_powers(L, Z, 5);
    CHECK(hvf::radial_power_residual(L, u) <= 1e-8);
    const auto w = hvf::solution_from_powers(L, Z, -3);
    CHECK(hvf::radial_power_residual(L, w) <= 1e-8);
  }

  SECTION("power evaluation matches the first integral") {
    const auto L = hvf::preset_example3();
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    const auto u = hvf::solution_from_powers(L, Z, 2);
    for (double t : {0.3, 2.7}) {
      const cplx z = hvf::fi_eval(Z, 1.3, t);
      CHECK_THAT(std::abs(u(1.3, t) - z * z), WithinAbs(0.0, 1e-10));
    }
  }
}

TEST_CASE("fiber constancy of factored solutions", "[integral]") {
  const auto L = hvf::preset_example3();
  const auto Z = hvf::first_integral(L, hvf::compute_mu(L));

  // radii paired across one full period of ln r, so every first-integral
  // value is hit from two far-apart radii
  const double jump = std::exp(hvf::two_pi);
  std::vector<double> radii;
  for (double r : {1.0, 1.003, 1.006, 1.01}) {
    radii.push_back(r);
    radii.push_back(r * jump);
  }

  SECTION("exact factorization through Z") {
    const auto u = [&](double r, double t) {
      const cplx z = hvf::fi_eval(Z, r, t);
      return z * z;
    };
    const auto res = hvf::fiber_check(u, Z, radii, 64);
    REQUIRE(res.conclusive);
    CHECK(res.defect <= 1e-8);
  }

  SECTION("values near the unit circle determine the whole annulus") {
    const auto u = [&](double r, double t) {
      const cplx z = hvf::fi_eval(Z, r, t);
      return z + z * z;
    };
    const auto res = hvf::fiber_check(u, Z, radii, 64);
    REQUIRE(res.conclusive);
    CHECK(res.defect <= 1e-8);
    CHECK(res.populated_bins >= 64);
  }

  SECTION("injected noise is measured at its own scale") {
    const auto u = [&](double r, double t) {
      const cplx z = hvf::fi_eval(Z, r, t);
      return cplx(z.real() + 1e-3 * std::sin(37.0 * r + 53.0 * t + 1.0), 0.0);
    };
    const auto res = hvf::fiber_check(u, Z, radii, 64);
    REQUIRE(res.conclusive);
    CHECK(res.defect >= 5e-4);
    CHECK(res.defect <= 2.5e-3);
  }

  SECTION("a homeomorphic integral leaves singleton fibers") {
    const auto L2 = hvf::preset_example2();
    const auto Z2 = hvf::first_integral(L2, hvf::compute_mu(L2));
    const auto u = [&](double r, double t) { return hvf::fi_eval(Z2, r, t); };
    const auto res = hvf::fiber_check(u, Z2, {1.0}, 64);
    CHECK_FALSE(res.conclusive);
    CHECK(res.populated_bins == 0);
  }

  SECTION("empty grids are rejected") {
    const auto u = [](double, double) { return cplx(0.0, 0.0); };
    CHECK_THROWS_AS(hvf::fiber_check(u, Z, {}, 64), hvf::precondition_error);
    CHECK_THROWS_AS(hvf::fiber_check(u, Z, {1.0}, 0), hvf::precondition_error);
  }
}

TEST_CASE("first integral invariants", "[integral]") {
  SECTION("modulus of the imaginary-kind integral ignores r") {
    const auto L = hvf::preset_example3();
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    for (double t : {0.0, 0.9, 2.4, 4.1}) {
      const double ref = std::abs(hvf::fi_eval(Z, 1.0, t));
      for (double r : {0.3, 1.0, 7.0})
        CHECK_THAT(std::abs(hvf::fi_eval(Z, r, t)), WithinAbs(ref, 1e-12));
    }
  }

  SECTION("one-signed profile makes theta + phi1 nondecreasing") {
    // q = 1 + cos 2t + i has a nonnegative characteristic profile and a
    // genuinely oscillating phi1
    const auto q = hvf::pf_build(
        [](double t) { return cplx(1.0 + std::cos(2.0 * t), 1.0); });
    const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0), q);
    REQUIRE(hvf::check_structure(L).one_signed);
    const auto Z = hvf::first_integral(L, hvf::compute_mu(L));
    REQUIRE(Z.kind == FIKind::PositiveReMu);

    const auto phi1 = hvf::pf_re(Z.phi);
    const std::size_t n = phi1.n_grid();
    double prev = 0.0 + phi1.samples()[0].real();
    for (std::size_t k = 1; k < n; ++k) {
      const double t = hvf::two_pi * double(k) / double(n);
      const double cur = t + phi1.samples()[k].real();
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }

    // same property on the divergence-free preset
    const auto Ld = hvf::preset_divfree(2);
    REQUIRE(hvf::check_structure(Ld).one_signed);
    const auto Zd = hvf::first_integral(Ld, hvf::compute_mu(Ld));
    const auto phi1d = hvf::pf_re(Zd.phi);
    prev = phi1d.samples()[0].real();
    for (std::size_t k = 1; k < phi1d.n_grid(); ++k) {
      const double t = hvf::two_pi * double(k) / double(phi1d.n_grid());
      const double cur = t + phi1d.samples()[k].real();
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "hvf/field.hpp"
#include "hvf/presets.hpp"

using hvf::cplx;
using hvf::HomogeneousField;
using hvf::PeriodicFn;
using Catch::Matchers::WithinAbs;

namespace {

// 2^20-point trapezoid mean of q/p, sharing nothing with the spectral path
cplx trapezoid_mu(const HomogeneousField& L) {
  const std::size_t n = 1u << 20;
  cplx acc(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = hvf::two_pi * double(k) / double(n);
    acc += L.q(t) / L.p(t);
  }
  return acc / double(n);
}

}  // namespace

TEST_CASE("pq constructor validates its preconditions", "[field]") {
  const auto p = hvf::pf_const(1.0);
  const auto q = hvf::pf_const(cplx(0.0, 1.0));

  CHECK_THROWS_AS(hvf::field_build_pq(cplx(1.0, 0.0), p, q), hvf::precondition_error);
  CHECK_THROWS_AS(hvf::field_build_pq(cplx(0.5, 3.0), p, q), hvf::precondition_error);

  const auto vanishing = hvf::pf_build([](double t) { return std::sin(t); });
  CHECK_THROWS_AS(hvf::field_build_pq(cplx(2.0, 0.0), vanishing, q),
                  hvf::precondition_error);

  // a field that is nowhere degenerate in the radial direction still builds;
  // its defects surface in check_structure, not here
  CHECK_NOTHROW(hvf::field_build_pq(cplx(2.0, 0.0), p, q));
}

TEST_CASE("polynomial constructor reproduces closed-form polar data", "[field]") {
  // A = x^2, B = i x y: on the circle a = cos^2, b = i cos sin, so
  //   p = (i - 1) cos^2 t sin t,   q = i cos^3 t - cos t sin^2 t
  const HomogeneousField L = hvf::field_build_polynomial(
      {cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)},
      {cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, 0.0)});
  CHECK(L.lambda == cplx(2.0, 0.0));

  for (double t : {0.3, 1.7, 2.9, 4.2, 5.8}) {
    const double c = std::cos(t), s = std::sin(t);
    const cplx p_ref = cplx(-1.0, 1.0) * c * c * s;
    const cplx q_ref = cplx(0.0, 1.0) * c * c * c - cplx(c * s * s, 0.0);
    CHECK_THAT(std::abs(L.p(t) - p_ref), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(L.q(t) - q_ref), WithinAbs(0.0, 1e-12));
  }

  // this p vanishes on four rays, so the strict constructor must refuse it
  CHECK_THROWS_AS(hvf::field_build_pq(L.lambda, L.p, L.q), hvf::precondition_error);

  CHECK_THROWS_AS(
      hvf::field_build_polynomial({cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)},
                                  {cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)}),
      hvf::precondition_error);
  CHECK_THROWS_AS(hvf::field_build_polynomial({cplx(1.0, 0.0)}, {cplx(1.0, 0.0)}),
                  hvf::precondition_error);
  CHECK_THROWS_AS(
      hvf::field_build_polynomial({cplx(1.0, 0.0), cplx(0.0, 0.0)},
                                  {cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)}),
      hvf::precondition_error);
}

TEST_CASE("polynomial constructor matches the divergence-free preset", "[field]") {
  // A = -2xy - 3i(x^2+y^2), B = 9x^2 + y^2 + 6ixy gives the same field as
  // p = 3 e^{it}(2 + cos 2t), q = -i d/dt e^{it}(2 + cos 2t)
  const HomogeneousField P = hvf::field_build_polynomial(
      {cplx(0.0, -3.0), cplx(-2.0, 0.0), cplx(0.0, -3.0)},
      {cplx(9.0, 0.0), cplx(0.0, 6.0), cplx(1.0, 0.0)});
  const HomogeneousField D = hvf::preset_divfree_polynomial(2);

  CHECK(P.lambda == D.lambda);
  for (double t : {0.0, 0.9, 2.1, 3.3, 4.6, 5.9}) {
    CHECK_THAT(std::abs(P.p(t) - D.p(t)), WithinAbs(0.0, 1e-11));
    CHECK_THAT(std::abs(P.q(t) - D.q(t)), WithinAbs(0.0, 1e-11));
  }

  const hvf::FieldReport rep = hvf::check_structure(P);
  CHECK(rep.div_free);
  CHECK(rep.transversal);
  CHECK_THAT(std::abs(rep.mu - cplx(1.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-10));
}

TEST_CASE("mean rotation number hits its closed forms", "[field]") {
  // q = (pi/2) sin - i cos has mean zero, so mu = 0
  CHECK_THAT(std::abs(hvf::compute_mu(hvf::preset_example1())), WithinAbs(0.0, 1e-12));

  // q = 2 cos 2t - 2 sin 4t + i has mean i
  CHECK_THAT(std::abs(hvf::compute_mu(hvf::preset_example3()) - cplx(0.0, 1.0)),
             WithinAbs(0.0, 1e-12));

  // constant coefficients give the constant ratio back
  const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(cplx(2.0, -1.0)),
                                     hvf::pf_const(cplx(3.0, 0.5)));
  CHECK_THAT(std::abs(hvf::compute_mu(L) - cplx(3.0, 0.5) / cplx(2.0, -1.0)),
             WithinAbs(0.0, 1e-13));

  // agreement with a 2^20-point trapezoid mean on a non-constant quotient
  const auto W = hvf::preset_divfree(2);
  CHECK_THAT(std::abs(hvf::compute_mu(W) - trapezoid_mu(W)), WithinAbs(0.0, 1e-10));
  CHECK_THAT(std::abs(hvf::compute_mu(W) - cplx(1.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-10));
}

TEST_CASE("characteristic set of the eight-ray field", "[field]") {
  const auto rays = hvf::characteristic_set(hvf::preset_example3());
  REQUIRE(rays.size() == 8);

  const double pi = hvf::pi;
  const std::vector<double> expected = {pi / 12.0,        pi / 4.0,  5.0 * pi / 12.0,
                                        3.0 * pi / 4.0,   13.0 * pi / 12.0,
                                        5.0 * pi / 4.0,   17.0 * pi / 12.0,
                                        7.0 * pi / 4.0};
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK_THAT(rays[k].theta, WithinAbs(expected[k], 1e-8));
    CHECK(rays[k].order == 1);
    CHECK(rays[k].sign_change);
  }

  // sorted ascending
  for (std::size_t k = 1; k < rays.size(); ++k) CHECK(rays[k - 1].theta < rays[k].theta);
}

TEST_CASE("characteristic set small cases", "[field]") {
  // q = 1 + 2 cos 2t: zeros where cos 2t = -1/2
  const auto rays = hvf::characteristic_set(hvf::preset_example2(2, cplx(1.0, 0.0)));
  REQUIRE(rays.size() == 4);
  const double pi = hvf::pi;
  const std::vector<double> expected = {pi / 3.0, 2.0 * pi / 3.0, 4.0 * pi / 3.0,
                                        5.0 * pi / 3.0};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK_THAT(rays[k].theta, WithinAbs(expected[k], 1e-8));
    CHECK(rays[k].sign_change);
  }

  // q = 1 + i against p = 1 has profile 1: empty characteristic set
  CHECK(hvf::characteristic_set(hvf::preset_elliptic()).empty());

  // q = i p makes the profile vanish identically: no discrete ray list
  const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0),
                                     hvf::pf_const(cplx(0.0, 1.0)));
  CHECK_THROWS_AS(hvf::characteristic_set(L), hvf::precondition_error);
}

TEST_CASE("characteristic profile with high-order zeros", "[field]") {
  // for A = x^2, B = ixy the profile collapses to cos^3 t sin t:
  // simple zeros at 0 and pi, third-order zeros at pi/2 and 3pi/2
  const HomogeneousField L = hvf::field_build_polynomial(
      {cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)},
      {cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, 0.0)});

  const auto prof = hvf::characteristic_profile(L);
  for (double t : {0.4, 1.3, 2.6, 5.1})
    CHECK_THAT(hvf::pf_eval(prof, t).real(),
               WithinAbs(std::pow(std::cos(t), 3) * std::sin(t), 1e-12));

  const auto rays = hvf::characteristic_set(L);
  REQUIRE(rays.size() == 4);
  const double pi = hvf::pi;
  const std::vector<double> expected = {0.0, pi / 2.0, pi, 3.0 * pi / 2.0};
  const std::vector<int> orders = {1, 3, 1, 3};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK_THAT(rays[k].theta, WithinAbs(expected[k], 1e-7));
    CHECK(rays[k].order == orders[k]);
    CHECK(rays[k].sign_change);
  }
}

TEST_CASE("structure report flags", "[field]") {
  SECTION("divergence-free family") {
    const auto rep = hvf::check_structure(hvf::preset_divfree(2));
    CHECK(rep.div_free);
    CHECK(rep.transversal);
    CHECK(rep.char_set_finite);
    CHECK(rep.rays.empty());  // profile 3(2+cos t)^2 is strictly positive
    CHECK(rep.one_signed);
    CHECK(rep.liouville);
    CHECK(rep.finite_type);
    CHECK_THAT(std::abs(rep.mu - cplx(1.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-10));
  }

  SECTION("one-signed profile with tangential zeros") {
    // q = 1 + cos 2t + i: profile 1 + cos 2t >= 0 with second-order zeros
    const auto q = hvf::pf_build(
        [](double t) { return cplx(1.0 + std::cos(2.0 * t), 1.0); });
    const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0), q);
    const auto rep = hvf::check_structure(L);
    CHECK(rep.one_signed);
    CHECK(rep.char_set_finite);
    REQUIRE(rep.rays.size() == 2);
    CHECK_THAT(rep.rays[0].theta, WithinAbs(hvf::pi / 2.0, 1e-7));
    CHECK(rep.rays[0].order == 2);
    CHECK_FALSE(rep.rays[0].sign_change);
    CHECK(rep.finite_type);
    CHECK_FALSE(rep.div_free);
  }

  SECTION("one-signed negative profile") {
    const auto q = hvf::pf_build(
        [](double t) { return cplx(-1.0 - std::cos(2.0 * t), 1.0); });
    const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0), q);
    const auto rep = hvf::check_structure(L);
    CHECK(rep.one_signed);
    CHECK_THAT(rep.mu.real(), WithinAbs(-1.0, 1e-12));
  }

  SECTION("sign-changing profile") {
    const auto rep = hvf::check_structure(hvf::preset_example2(2, cplx(1.0, 0.0)));
    CHECK_FALSE(rep.one_signed);
    CHECK(rep.char_set_finite);
    CHECK(rep.finite_type);
    CHECK_THAT(std::abs(rep.mu - cplx(1.0, 0.0)), WithinAbs(0.0, 1e-10));
  }

  SECTION("identically vanishing profile is flagged, not thrown") {
    const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0),
                                       hvf::pf_const(cplx(0.0, 1.0)));
    const auto rep = hvf::check_structure(L);
    CHECK_FALSE(rep.char_set_finite);
    CHECK_FALSE(rep.one_signed);
    CHECK(rep.rays.empty());
    CHECK(rep.transversal);
    CHECK_FALSE(rep.liouville);  // mu = i sits on the imaginary axis
    CHECK_THAT(std::abs(rep.mu - cplx(0.0, 1.0)), WithinAbs(0.0, 1e-12));
  }

  SECTION("vanishing p is flagged, not thrown") {
    const HomogeneousField L = hvf::field_build_polynomial(
        {cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)},
        {cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, 0.0)});
    const auto rep = hvf::check_structure(L);
    CHECK_FALSE(rep.transversal);
    CHECK(std::isnan(rep.mu.real()));
    CHECK_FALSE(rep.liouville);
  }
}

TEST_CASE("orientation flips the rotation number sign", "[field]") {
  SECTION("constant negative ratio") {
    const auto L = hvf::field_build_pq(cplx(2.0, 0.0), hvf::pf_const(1.0),
                                       hvf::pf_const(-1.0));
    const auto O = hvf::orient(L);
    CHECK_THAT(std::abs(hvf::compute_mu(O) - cplx(1.0, 0.0)), WithinAbs(0.0, 1e-12));
    for (double t : {0.0, 1.0, 2.5})
      CHECK_THAT(std::abs(O.p(t) - cplx(-1.0, 0.0)), WithinAbs(0.0, 1e-13));
  }

  SECTION("nonnegative real part is left alone") {
    const auto L = hvf::preset_example3();  // mu = i
    const auto O = hvf::orient(L);
    for (double t : {0.3, 2.2, 4.8}) {
      CHECK(O.p(t) == L.p(t));
      CHECK(O.q(t) == L.q(t));
    }
  }

  SECTION("reflection law and ray mirroring") {
    // an asymmetric sign-changing field with Re mu < 0
    const auto q = hvf::pf_build([](double t) {
      return cplx(-1.0 - 2.0 * std::cos(2.0 * t - 0.7), 0.3);
    });
    const auto p = hvf::pf_build([](double t) {
      return cplx(2.0 + std::sin(t), 0.25 * std::cos(t));
    });
    const auto L = hvf::field_build_pq(cplx(2.5, 0.0), p, q);
    const cplx mu = hvf::compute_mu(L);
    REQUIRE(mu.real() < 0.0);

    const auto O = hvf::orient(L);
    CHECK_THAT(std::abs(hvf::compute_mu(O) + mu), WithinAbs(0.0, 1e-11));
    for (double t : {0.2, 1.9, 3.4, 5.5}) {
      CHECK_THAT(std::abs(O.p(t) + L.p(hvf::pi - t)), WithinAbs(0.0, 1e-11));
      CHECK_THAT(std::abs(O.q(t) - L.q(hvf::pi - t)), WithinAbs(0.0, 1e-11));
    }

    const auto rays = hvf::characteristic_set(L);
    const auto mirrored = hvf::characteristic_set(O);
    REQUIRE(rays.size() == mirrored.size());
    for (const auto& r : rays) {
      double image = hvf::pi - r.theta;
      image -= hvf::two_pi * std::floor(image / hvf::two_pi);
      double best = 1e9;
      for (const auto& m : mirrored) {
        double d = std::abs(m.theta - image);
        d = std::min(d, hvf::two_pi - d);
        best = std::min(best, d);
      }
      CHECK_THAT(best, WithinAbs(0.0, 1e-8));
    }
  }
}

TEST_CASE("field invariants", "[field]") {
  SECTION("rotation number agrees across grid resolutions") {
    const cplx m1 = hvf::compute_mu(hvf::preset_example3(256));
    const cplx m2 = hvf::compute_mu(hvf::preset_example3(512));
    CHECK_THAT(std::abs(m1 - m2), WithinAbs(0.0, 1e-10));
  }

  SECTION("rays are invariant under positive scaling of q") {
    const auto L = hvf::preset_example3();
    const auto S = hvf::field_build_pq(L.lambda, L.p, 2.5 * L.q);
    const auto r1 = hvf::characteristic_set(L);
    const auto r2 = hvf::characteristic_set(S);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t k = 0; k < r1.size(); ++k)
      CHECK_THAT(r1[k].theta, WithinAbs(r2[k].theta, 1e-10));
    CHECK_THAT(std::abs(hvf::compute_mu(S) - 2.5 * hvf::compute_mu(L)),
               WithinAbs(0.0, 1e-11));
  }

  SECTION("divergence-free fields have integer mu (lambda + 1)") {
    for (const auto& L :
         {hvf::preset_divfree(2), hvf::preset_divfree(3),
          hvf::preset_divfree_polynomial(2), hvf::preset_divfree_polynomial(4)}) {
      const cplx prod = hvf::compute_mu(L) * (L.lambda + 1.0);
      CHECK_THAT(std::abs(prod - std::round(prod.real())), WithinAbs(0.0, 1e-8));
    }
  }

  SECTION("polynomial constructor is grid independent") {
    const auto L1 = hvf::field_build_polynomial(
        {cplx(0.0, -3.0), cplx(-2.0, 0.0), cplx(0.0, -3.0)},
        {cplx(9.0, 0.0), cplx(0.0, 6.0), cplx(1.0, 0.0)}, 1024);
    const auto L2 = hvf::field_build_polynomial(
        {cplx(0.0, -3.0), cplx(-2.0, 0.0), cplx(0.0, -3.0)},
        {cplx(9.0, 0.0), cplx(0.0, 6.0), cplx(1.0, 0.0)}, 2048);
    for (double t : {0.1, 1.1, 3.7})
      CHECK_THAT(std::abs(L1.p(t) - L2.p(t)), WithinAbs(0.0, 1e-12));
  }
}

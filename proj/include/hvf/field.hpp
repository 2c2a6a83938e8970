// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_FIELD_HPP
#define HVF_FIELD_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "hvf/errors.hpp"
#include "hvf/periodic.hpp"

namespace hvf {

/// Threshold below which the mean rotation number counts as zero (and its
/// real part as purely imaginary) when classifying a field.
inline constexpr double mu_threshold = 1e-10;

/**
 * A planar vector field with homogeneous coefficients, stored in polar
 * form: the angular coefficient p and the radial coefficient q on the
 * unit circle, plus the homogeneity degree lambda (Re lambda > 1).
 *
 * Multiplying by r^{lambda-1}, the field acts on functions as
 * p(theta) d/dtheta - i q(theta) r d/dr.
 */
struct HomogeneousField {
  cplx lambda;
  PeriodicFn p;
  PeriodicFn q;
};

/// A ray where re(q conj p) vanishes: the field is tangent to the circle
/// direction there in the degenerate sense tracked by the diagnostics.
struct CharacteristicRay {
  double theta = 0.0;
  int order = 1;  // order_infinite when flat through order_cap derivatives
  bool sign_change = true;
};

struct FieldReport {
  cplx mu{std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN()};
  std::vector<CharacteristicRay> rays;
  bool char_set_finite = false;  // re(q conj p) not identically zero
  bool transversal = false;      // p nonvanishing on the circle
  bool one_signed = false;       // re(q conj p) keeps a single sign off its zeros
  bool div_free = false;         // p' = i(lambda+1) q on the grid
  bool liouville = false;        // |Re mu| above mu_threshold
  bool finite_type = false;      // every ray has a finite vanishing order
};

/**
 * Direct constructor from polar data.  Rejects Re lambda <= 1 and a
 * coefficient p that vanishes anywhere on the grid; transversality is a
 * standing hypothesis for every solver built on top of this type.
 */
inline HomogeneousField field_build_pq(cplx lambda, PeriodicFn p, PeriodicFn q) {
  if (!(lambda.real() > 1.0))
    throw precondition_error("field: Re lambda = " + std::to_string(lambda.real()) +
                             " <= 1 (homogeneity degree out of range)");
  double pmin = std::numeric_limits<double>::infinity();
  for (const cplx& s : p.samples()) pmin = std::min(pmin, std::abs(s));
  if (pmin < division_floor)
    throw precondition_error("field: min |p| = " + std::to_string(pmin) +
                             " < 1e-12 (p must not vanish on the circle)");
  return HomogeneousField{lambda, std::move(p), std::move(q)};
}

/**
 * Constructor from homogeneous polynomial Cartesian coefficients.  A and B
 * are given by monomial coefficient lists of equal length N+2, encoding
 * A = sum_j A_j x^{N+1-j} y^j (same for B), so the field degree is
 * lambda = N+1.  On the circle, with a = A(cos, sin) and b = B(cos, sin),
 *
 *   p = b cos - a sin,    q = i (a cos + b sin),
 *
 * and both are trigonometric polynomials of degree at most N+2, which is
 * verified on the computed spectrum.
 *
 * Unlike field_build_pq this constructor admits a p with pointwise zeros
 * (check_structure reports them as a transversality failure); only an
 * identically vanishing p is rejected.
 */
inline HomogeneousField field_build_polynomial(const std::vector<cplx>& A_coeffs,
                                               const std::vector<cplx>& B_coeffs,
                                               std::size_t n_grid = default_n_grid) {
  if (A_coeffs.size() != B_coeffs.size() || A_coeffs.size() < 3)
    throw precondition_error("field: coefficient lists must have equal length N+2 >= 3");
  const long N = long(A_coeffs.size()) - 2;
  const cplx lambda(double(N + 1), 0.0);

  const auto eval_poly = [&](const std::vector<cplx>& C, double t) {
    const double c = std::cos(t), s = std::sin(t);
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < C.size(); ++j)
      acc += C[j] * std::pow(c, double(C.size() - 1 - j)) * std::pow(s, double(j));
    return acc;
  };

  std::vector<cplx> ps(n_grid), qs(n_grid);
  double scale = 0.0;
  for (const cplx& c : A_coeffs) scale = std::max(scale, std::abs(c));
  for (const cplx& c : B_coeffs) scale = std::max(scale, std::abs(c));
  for (std::size_t k = 0; k < n_grid; ++k) {
    const double t = two_pi * double(k) / double(n_grid);
    const cplx a = eval_poly(A_coeffs, t);
    const cplx b = eval_poly(B_coeffs, t);
    ps[k] = b * std::cos(t) - a * std::sin(t);
    qs[k] = cplx(0.0, 1.0) * (a * std::cos(t) + b * std::sin(t));
  }
  PeriodicFn p = PeriodicFn::from_samples(std::move(ps));
  PeriodicFn q = PeriodicFn::from_samples(std::move(qs));

  if (pf_sup(p) <= 1e-12 * std::max(1.0, scale))
    throw precondition_error("field: p is identically zero (degenerate coefficients)");

  // the spectrum must cut off at degree N+2; anything beyond is a bug
  for (const PeriodicFn* f : {&p, &q}) {
    const double sup = std::max(1.0, pf_sup(*f));
    for (long j = N + 3; j <= long(n_grid) / 2; ++j)
      if (std::abs(f->coeff(j)) > 1e-12 * sup || std::abs(f->coeff(-j)) > 1e-12 * sup)
        throw std::logic_error("field: trigonometric degree bound N+2 violated");
  }

  return HomogeneousField{lambda, std::move(p), std::move(q)};
}

/**
 * Mean of q/p over the circle, the rotation number of the field.  Computed
 * twice, at the native resolution and at double resolution; the two must
 * agree to 1e-10 or the data is under-resolved.
 */
inline cplx compute_mu(const HomogeneousField& L) {
  const cplx m1 = pf_mean(L.q / L.p);
  const std::size_t n2 = 2 * std::max(L.p.n_grid(), L.q.n_grid());
  const cplx m2 = pf_mean(pf_upsample(L.q, n2) / pf_upsample(L.p, n2));
  if (std::abs(m1 - m2) > 1e-10)
    throw std::runtime_error("compute_mu: resolution doubling moved the mean by " +
                             std::to_string(std::abs(m1 - m2)) + " > 1e-10 (under-resolved data)");
  return m2;
}

/// The real profile re(q conj p) whose zero rays make up the
/// characteristic set.
inline PeriodicFn characteristic_profile(const HomogeneousField& L) {
  return pf_re(L.q * pf_conj(L.p));
}

/**
 * Characteristic rays, sorted by angle.  Raises precondition_error when
 * the profile vanishes identically (the zero set then has interior, and
 * no discrete ray list exists).
 */
inline std::vector<CharacteristicRay> characteristic_set(const HomogeneousField& L) {
  const PeriodicFn s = characteristic_profile(L);
  const double scale = std::max(pf_sup(L.p) * pf_sup(L.q), 1e-300);
  std::vector<ZeroInfo> zs;
  try {
    zs = pf_zeros(s, scale);
  } catch (const precondition_error&) {
    throw precondition_error(
        "characteristic set: re(q conj p) vanishes identically; "
        "the zero set has nonempty interior");
  }
  std::vector<CharacteristicRay> rays;
  rays.reserve(zs.size());
  for (const ZeroInfo& z : zs) rays.push_back({z.theta, z.order, z.sign_change});
  return rays;
}

/**
 * Full structural diagnosis.  Never throws: every failure mode is carried
 * by a flag.  mu is NaN when q/p cannot be formed (vanishing p).
 */
inline FieldReport check_structure(const HomogeneousField& L) {
  FieldReport rep;

  double pmin = std::numeric_limits<double>::infinity();
  for (const cplx& s : L.p.samples()) pmin = std::min(pmin, std::abs(s));
  rep.transversal = pmin >= division_floor;

  try {
    rep.rays = characteristic_set(L);
    rep.char_set_finite = true;
  } catch (const precondition_error&) {
    rep.char_set_finite = false;
  }

  rep.one_signed = rep.char_set_finite;
  rep.finite_type = rep.char_set_finite;
  for (const CharacteristicRay& r : rep.rays) {
    if (r.sign_change) rep.one_signed = false;
    if (r.order == order_infinite) rep.finite_type = false;
  }

  const PeriodicFn dp = pf_derivative(L.p);
  const PeriodicFn defect = dp - cplx(0.0, 1.0) * (L.lambda + 1.0) * L.q;
  const double dscale = pf_sup(dp) + pf_sup(L.q);
  rep.div_free = dscale == 0.0 || pf_sup(defect) <= 1e-10 * dscale;

  if (rep.transversal) {
    rep.mu = compute_mu(L);
    rep.liouville = std::abs(rep.mu.real()) > mu_threshold;

    // a one-signed characteristic profile forces the mean rotation off the
    // imaginary axis, with the sign of the profile; anything else would be
    // an internal inconsistency, not an input problem
    if (rep.one_signed && rep.char_set_finite) {
      const PeriodicFn s = characteristic_profile(L);
      const auto [lo, hi] = pf_min_max(s);
      const double sgn = std::abs(hi.value) >= std::abs(lo.value) ? 1.0 : -1.0;
      if (!(sgn * rep.mu.real() > -mu_threshold))
        throw std::logic_error("check_structure: one-signed profile but Re mu has the wrong sign");
    }
  }

  return rep;
}

/**
 * Reflects the field so the mean rotation number has a nonnegative real
 * part.  The reflection (x,y) -> (-x,y) acts on the polar data as
 * p(theta) -> -p(pi - theta), q(theta) -> q(pi - theta), which negates mu
 * and mirrors the characteristic rays across the vertical axis.  Fields
 * with Re mu >= 0 are returned unchanged.
 */
inline HomogeneousField orient(const HomogeneousField& L) {
  const cplx mu = compute_mu(L);
  if (mu.real() >= -mu_threshold) return L;

  const auto reflect = [](const PeriodicFn& f, bool negate) {
    const long n = long(f.n_grid());
    std::vector<cplx> s(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
      const long src = ((n / 2 - k) % n + n) % n;
      s[std::size_t(k)] = (negate ? -1.0 : 1.0) * f.samples()[std::size_t(src)];
    }
    return PeriodicFn::from_samples(std::move(s));
  };

  HomogeneousField out{L.lambda, reflect(L.p, true), reflect(L.q, false)};
  const cplx mu2 = compute_mu(out);
  if (!(mu2.real() >= -mu_threshold) || std::abs(mu2 + mu) > 1e-10 * std::max(1.0, std::abs(mu)))
    throw std::logic_error("orient: reflection failed to negate the rotation number");
  return out;
}

}  // namespace hvf

#endif  // HVF_FIELD_HPP

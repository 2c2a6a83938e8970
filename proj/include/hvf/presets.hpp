// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_PRESETS_HPP
#define HVF_PRESETS_HPP

#include <cmath>
#include <complex>
#include <string>

#include "hvf/errors.hpp"
#include "hvf/field.hpp"
#include "hvf/periodic.hpp"

namespace hvf {

/**
 * Built-in reference fields.  Each has closed-form invariants that the
 * test suite pins down, so they double as regression anchors and as the
 * vocabulary of the command line tool.
 */

/// Degree 2, p = 1, q = (pi/2) sin - i cos.  Mean rotation number 0.
inline HomogeneousField preset_example1(std::size_t n = default_n_grid) {
  PeriodicFn p = pf_const(1.0, n);
  PeriodicFn q = pf_build(
      [](double t) { return cplx(pi / 2.0 * std::sin(t), -std::cos(t)); }, n);
  return field_build_pq(cplx(2.0, 0.0), std::move(p), std::move(q));
}

/// p = 1, q = mu (1 + k cos k theta).  Mean rotation number mu; the
/// characteristic profile mu_re (1 + k cos k theta) changes sign for k >= 2.
inline HomogeneousField preset_example2(int k = 1, cplx mu = cplx(1.0, 0.0),
                                        cplx lambda = cplx(3.0, 0.0),
                                        std::size_t n = default_n_grid) {
  if (k < 1) throw precondition_error("example2: k must be >= 1");
  PeriodicFn p = pf_const(1.0, n);
  PeriodicFn q = pf_build(
      [&](double t) { return mu * (1.0 + double(k) * std::cos(double(k) * t)); }, n);
  return field_build_pq(lambda, std::move(p), std::move(q));
}

/// Degree 2, p = 1, q = 2 cos 2t - 2 sin 4t + i.  Mean rotation number i;
/// eight characteristic rays, all simple sign changes.
inline HomogeneousField preset_example3(std::size_t n = default_n_grid) {
  PeriodicFn p = pf_const(1.0, n);
  PeriodicFn q = pf_build(
      [](double t) {
        return cplx(2.0 * std::cos(2.0 * t) - 2.0 * std::sin(4.0 * t), 1.0);
      },
      n);
  return field_build_pq(cplx(2.0, 0.0), std::move(p), std::move(q));
}

/// Divergence-free family of degree N >= 2: p = (N+1) f, q = -i f' with
/// f = e^{it} (2 + cos t).  Mean rotation number 1/(N+1); the
/// characteristic profile is everywhere positive.
inline HomogeneousField preset_divfree(int N = 2, std::size_t n = default_n_grid) {
  if (N < 2) throw precondition_error("divfree: N must be >= 2");
  const cplx lambda(double(N), 0.0);
  PeriodicFn p = pf_build(
      [&](double t) {
        return double(N + 1) * std::polar(1.0, t) * (2.0 + std::cos(t));
      },
      n);
  PeriodicFn q = pf_build(
      [](double t) {
        const cplx df = std::polar(1.0, t) * cplx(-std::sin(t), 2.0 + std::cos(t));
        return cplx(0.0, -1.0) * df;
      },
      n);
  return field_build_pq(lambda, std::move(p), std::move(q));
}

/// Divergence-free field of integer degree lambda >= 2 whose Cartesian
/// coefficients are honest polynomials: p = (lambda+1) f, q = -i f' with
/// f = e^{iwt} (2 + cos 2t) and winding w = 1 for even lambda, w = 2 for
/// odd lambda.  The coefficients B +- iA equal r^lambda (p -+ q) e^{+-it},
/// which clears all fractional powers of r exactly when every Fourier mode
/// m of f has the parity of lambda + 1 and either |m| <= lambda - 1 or
/// m = +-(lambda + 1); both windings meet that, one per parity class.
/// Mean rotation number w/(lambda+1).
inline HomogeneousField preset_divfree_polynomial(int lambda = 2,
                                                  std::size_t n = default_n_grid) {
  if (lambda < 2) throw precondition_error("divfree_polynomial: lambda must be >= 2");
  const double w = lambda % 2 ? 2.0 : 1.0;
  PeriodicFn p = pf_build(
      [&](double t) {
        return double(lambda + 1) * std::polar(1.0, w * t) *
               (2.0 + std::cos(2.0 * t));
      },
      n);
  PeriodicFn q = pf_build(
      [&](double t) {
        const cplx df = std::polar(1.0, w * t) *
                        cplx(-2.0 * std::sin(2.0 * t),
                             w * (2.0 + std::cos(2.0 * t)));
        return cplx(0.0, -1.0) * df;
      },
      n);
  return field_build_pq(cplx(double(lambda), 0.0), std::move(p), std::move(q));
}

/// Degree 2, p = 1, q = 1 + i.  The characteristic profile is the
/// constant 1, so the characteristic set is empty.
inline HomogeneousField preset_elliptic(std::size_t n = default_n_grid) {
  return field_build_pq(cplx(2.0, 0.0), pf_const(1.0, n),
                        pf_const(cplx(1.0, 1.0), n));
}

/// Lookup by name with default parameters; unknown names raise
/// precondition_error so the command line maps them to exit code 2.
inline HomogeneousField preset_by_name(const std::string& name) {
  if (name == "example1") return preset_example1();
  if (name == "example2") return preset_example2();
  if (name == "example3") return preset_example3();
  if (name == "divfree") return preset_divfree();
  if (name == "divfree-polynomial") return preset_divfree_polynomial();
  if (name == "elliptic") return preset_elliptic();
  throw precondition_error("unknown preset '" + name +
                           "' (expected example1, example2, example3, divfree, "
                           "divfree-polynomial, or elliptic)");
}

}  // namespace hvf

#endif  // HVF_PRESETS_HPP

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_ENVELOPE_HPP
#define HVF_ENVELOPE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hvf/errors.hpp"
#include "hvf/field.hpp"
#include "hvf/integral.hpp"
#include "hvf/periodic.hpp"

namespace hvf {

/// Bounded open set, starlike with respect to the origin, described by its
/// boundary radius r = R(theta).  R must be real and strictly positive.
struct StarlikeDomain {
  PeriodicFn R;
};

inline StarlikeDomain starlike_domain(const PeriodicFn& R) {
  if (!pf_is_real(R, 1e-12))
    throw precondition_error(
        "starlike domain: boundary radius must be real to 1e-12");
  const auto [lo, hi] = pf_min_max(pf_re(R));
  (void)hi;
  if (!(lo.value > 0.0))
    throw precondition_error("starlike domain: min R = " +
                             std::to_string(lo.value) + " is not positive");
  return {R};
}

/// Extendability envelope of a starlike domain under a first integral with
/// real rotation number mu >= 0: rho is the class maximum of |Z| over the
/// boundary as a function of the boundary direction theta, Lambda the
/// boundary radius of the enlarged domain in the same direction, and R_env
/// the enlarged domain itself.
struct EnvelopeResult {
  PeriodicFn rho;
  PeriodicFn Lambda;
  StarlikeDomain R_env;
};

namespace detail {

/// Refined view of the class-angle equation arg Z(boundary point) = const
/// on one domain.  A holds the lift of the class angle
///
///   alpha(theta) = theta + phi_1(theta)   (Re mu > 0)
///   alpha(theta) = phi_1(theta)           (mu = 0)
///
/// on a grid refined by `refine` relative to the output grid, together
/// with aligned samples of the boundary radius and of phi_2, and the
/// monotone runs of alpha used to bracket class points.
struct ClassScan {
  std::size_t n_out = 0;
  std::size_t N = 0;
  int winding = 0;              // alpha(theta + 2 pi) = alpha(theta) + 2 pi w
  double s = 0.0;               // |Z(r, theta)| = r^s e^{-phi_2(theta)}
  std::vector<double> A;        // class-angle lift at the refined nodes
  std::vector<double> r_bnd;    // boundary radius at the refined nodes
  std::vector<double> phi2;     // Im phi at the refined nodes
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // cell ranges
};

constexpr std::size_t class_refine = 8;

/// Lift value at an arbitrary node index, continued beyond one period by
/// the winding number.
inline double lift_at(const ClassScan& S, long j) {
  const long N = long(S.N);
  long q = j / N, r = j % N;
  if (r < 0) {
    r += N;
    --q;
  }
  return S.A[std::size_t(r)] + two_pi * double(S.winding) * double(q);
}

inline double ring_at(const std::vector<double>& v, long j) {
  const long N = long(v.size());
  long r = j % N;
  if (r < 0) r += N;
  return v[std::size_t(r)];
}

/// Barycentric evaluation of the degree-5 interpolant through six equally
/// spaced nodes x = (base + k) h, k = 0..5.  Spectrally sampled data makes
/// this exact to roundoff for smooth integrands at sub-cell resolution.
inline double lagrange6(const std::vector<double>& ring, long base, double x,
                        double h) {
  static const double w[6] = {1.0, -5.0, 10.0, -10.0, 5.0, -1.0};
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double xk = double(base + k) * h;
    const double d = x - xk;
    if (std::abs(d) < 1e-14 * h) return ring_at(ring, base + k);
    const double c = w[k] / d;
    num += c * ring_at(ring, base + k);
    den += c;
  }
  return num / den;
}

/// Same interpolant on the lift (which is not periodic; the winding term
/// continues it smoothly across the seam).
inline double lagrange6_lift(const ClassScan& S, long base, double x,
                             double h) {
  static const double w[6] = {1.0, -5.0, 10.0, -10.0, 5.0, -1.0};
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double xk = double(base + k) * h;
    const double d = x - xk;
    if (std::abs(d) < 1e-14 * h) return lift_at(S, base + k);
    const double c = w[k] / d;
    num += c * lift_at(S, base + k);
    den += c;
  }
  return num / den;
}

/// Validates the first-integral kind for envelope work and returns the
/// radial exponent s of |Z| = r^s e^{-phi_2}.  The construction is defined
/// for real mu >= 0 only: the argument of Z must not depend on r.
inline double envelope_exponent(const FirstIntegral& Z) {
  switch (Z.kind) {
    case FIKind::ZeroMu:
      return Z.sigma;
    case FIKind::PositiveReMu:
      if (std::abs(Z.mu.imag()) > 1e-10)
        throw precondition_error(
            "envelope: |Im mu| = " + std::to_string(std::abs(Z.mu.imag())) +
            " > 1e-10; the extendability envelope is defined for real "
            "mu >= 0 only (arg Z must be radius-independent)");
      return 1.0 / Z.mu.real();
    default:
      throw precondition_error(
          "envelope: imaginary rotation number; the extendability envelope "
          "is defined for real mu >= 0 only");
  }
}

inline ClassScan build_class_scan(const FirstIntegral& Z,
                                  const StarlikeDomain& D, std::size_t n_out) {
  ClassScan S;
  S.n_out = n_out;
  S.N = class_refine * n_out;
  S.winding = Z.kind == FIKind::ZeroMu ? 0 : 1;
  S.s = envelope_exponent(Z);

  const PeriodicFn phi1 = pf_re(Z.phi);
  const PeriodicFn up1 = pf_upsample(phi1, S.N);
  const PeriodicFn up2 = pf_upsample(pf_im(Z.phi), S.N);
  const PeriodicFn upr = pf_upsample(pf_re(D.R), S.N);
  const std::vector<cplx>& p1 = up1.samples();
  const std::vector<cplx>& p2 = up2.samples();
  const std::vector<cplx>& rb = upr.samples();

  S.A.resize(S.N);
  S.phi2.resize(S.N);
  S.r_bnd.resize(S.N);
  for (std::size_t i = 0; i < S.N; ++i) {
    const double t = two_pi * double(i) / double(S.N);
    S.A[i] = double(S.winding) * t + p1[i].real();
    S.phi2[i] = p2[i].real();
    S.r_bnd[i] = rb[i].real();
  }

  // Degenerate class structure: alpha' vanishing along an interval makes
  // cl(p) a continuum and the class maximum ill-conditioned; report it
  // instead of guessing.  The run threshold tolerates isolated tangential
  // zeros (alpha' has a simple touch at one node at most).
  const PeriodicFn upd = pf_upsample(pf_derivative(phi1), S.N);
  const std::vector<cplx>& dp1 = upd.samples();
  double sup_ap = 0.0;
  std::vector<double> ap(S.N);
  for (std::size_t i = 0; i < S.N; ++i) {
    ap[i] = double(S.winding) + dp1[i].real();
    sup_ap = std::max(sup_ap, std::abs(ap[i]));
  }
  const double flat_tol = 1e-8 * std::max(1.0, sup_ap);
  std::size_t run = 0, longest = 0;
  for (std::size_t i = 0; i < 2 * S.N; ++i) {  // doubled pass: wrapping runs
    if (std::abs(ap[i % S.N]) <= flat_tol) {
      ++run;
      longest = std::max(longest, run);
    } else {
      run = 0;
    }
    if (longest >= S.N) break;
  }
  if (longest >= 8)
    throw precondition_error(
        "envelope: the class angle derivative vanishes along an interval (" +
        std::to_string(longest) +
        " consecutive refined nodes); degenerate class structure is "
        "reported, not resolved");

  // Monotone runs of the lift, recorded as inclusive cell ranges.  Flat
  // cells inherit the running direction so they never split a run.
  int dir = 0;
  std::size_t start = 0;
  for (std::size_t c = 0; c < S.N; ++c) {
    const double d = lift_at(S, long(c) + 1) - lift_at(S, long(c));
    const int sd = d > 0.0 ? 1 : (d < 0.0 ? -1 : dir);
    if (dir == 0) dir = sd;
    if (sd != dir && sd != 0) {
      S.segments.emplace_back(start, c - 1);
      start = c;
      dir = sd;
    }
  }
  S.segments.emplace_back(start, S.N - 1);
  return S;
}

/// All boundary angles whose class angle equals c (mod 2 pi for winding 1;
/// the ZeroMu class coordinate lives on [0, pi] and does not wrap).  Each
/// monotone run is bracketed by an index bisection and the root polished
/// on the local six-point interpolant, whose own bisection is exact to
/// sub-cell resolution.
inline std::vector<double> class_points(const ClassScan& S, double c) {
  std::vector<double> roots;
  const double h = two_pi / double(S.N);
  for (const auto& [a, b] : S.segments) {
    const double va = lift_at(S, long(a));
    const double vb = lift_at(S, long(b) + 1);
    const double lo = std::min(va, vb), hi = std::max(va, vb);
    const bool ascending = vb >= va;
    const long m_lo = std::lround(std::ceil((lo - c) / two_pi - 1e-12));
    const long m_hi = std::lround(std::floor((hi - c) / two_pi + 1e-12));
    for (long m = m_lo; m <= m_hi; ++m) {
      const double lvl = c + two_pi * double(m);
      if (lvl < lo - 1e-12 || lvl > hi + 1e-12) continue;
      // Index bisection for the unique bracketing cell in this run.
      long ilo = long(a), ihi = long(b) + 1;
      while (ihi - ilo > 1) {
        const long mid = (ilo + ihi) / 2;
        const bool left = ascending ? lift_at(S, mid) <= lvl
                                    : lift_at(S, mid) >= lvl;
        (left ? ilo : ihi) = mid;
      }
      // Polish on the local interpolant.  The level is read off the grid,
      // so a root can sit exactly on the bracket's left node; take it as is
      // (the oriented bisection below would otherwise creep off an exact
      // endpoint root, badly so where the class angle is nearly flat).
      const long base = ilo - 2;
      const double sgn = ascending ? 1.0 : -1.0;
      double xa = double(ilo) * h, xb = double(ilo + 1) * h;
      double fa = sgn * (lift_at(S, ilo) - lvl);
      if (fa == 0.0) {
        roots.push_back(wrap_angle(xa));
        continue;
      }
      for (int it = 0; it < 52; ++it) {
        const double xm = 0.5 * (xa + xb);
        const double fm = sgn * (lagrange6_lift(S, base, xm, h) - lvl);
        if ((fa <= 0.0) == (fm <= 0.0)) {
          xa = xm;
          fa = fm;
        } else {
          xb = xm;
        }
      }
      roots.push_back(wrap_angle(0.5 * (xa + xb)));
    }
  }
  return roots;
}

/// rho at every output node: the maximum of |Z| over the class of the
/// node's boundary point.  The node itself always belongs to its class, so
/// tangential self-solutions are never lost to the sign scan.
inline std::vector<double> rho_samples(const ClassScan& S) {
  const double h = two_pi / double(S.N);
  const auto zmod = [&S](double r, double p2) {
    if (!(r > 0.0))
      throw std::logic_error("envelope: interpolated boundary radius <= 0");
    return std::exp(S.s * std::log(r) - p2);
  };
  std::vector<double> rho(S.n_out);
  for (std::size_t k = 0; k < S.n_out; ++k) {
    const std::size_t i = class_refine * k;
    double best = zmod(S.r_bnd[i], S.phi2[i]);
    for (double x : class_points(S, S.A[i])) {
      const long base = long(std::floor(x / h)) - 2;
      best = std::max(best, zmod(lagrange6(S.r_bnd, base, x, h),
                                 lagrange6(S.phi2, base, x, h)));
    }
    rho[k] = best;
  }
  return rho;
}

inline std::size_t envelope_grid(const FirstIntegral& Z,
                                 const StarlikeDomain& D) {
  return std::max<std::size_t>({4096, Z.phi.n_grid(), D.R.n_grid()});
}

/// Boundary radius of the enlarged domain from the class maximum:
/// Lambda = (rho e^{phi_2})^mu for mu > 0, (rho e^{phi_2})^{1/sigma} for
/// mu = 0.
inline std::vector<double> lambda_samples(const FirstIntegral& Z,
                                          const std::vector<double>& rho,
                                          const std::vector<double>& phi2_out) {
  const double expo = Z.kind == FIKind::ZeroMu ? 1.0 / Z.sigma : Z.mu.real();
  std::vector<double> lam(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k)
    lam[k] = std::exp(expo * (std::log(rho[k]) + phi2_out[k]));
  return lam;
}

inline PeriodicFn real_pf(const std::vector<double>& v) {
  std::vector<cplx> s(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) s[k] = cplx(v[k], 0.0);
  return PeriodicFn::from_samples(std::move(s));
}

/// Guard against a first integral paired with the wrong field.
inline void check_pairing(const HomogeneousField& L, const FirstIntegral& Z) {
  const cplx mu = compute_mu(L);
  if (std::abs(mu - Z.mu) > 1e-8 * std::max(1.0, std::abs(mu)))
    throw precondition_error(
        "envelope: the first integral's rotation number does not match the "
        "field (|mu_field - mu_Z| > 1e-8); rebuild it with first_integral");
}

}  // namespace detail

/**
 * Class maximum of |Z| over the domain boundary, resampled as a function
 * of the boundary direction theta: two boundary points are equivalent when
 * their images under Z share the same argument, and rho(theta) is the
 * largest image modulus over the class of the point (R(theta), theta).
 *
 * Class points are located by a sign scan of the class-angle equation on
 * a refined grid (with a doubled-resolution guard built into the refine
 * factor) followed by bisection; class maxima attained tangentially at the
 * query point itself are covered by membership of the point in its own
 * class.  Requires a real rotation number mu >= 0.
 */
inline PeriodicFn rho_map(const HomogeneousField& L, const FirstIntegral& Z,
                          const StarlikeDomain& D) {
  detail::check_pairing(L, Z);
  const detail::ClassScan S =
      detail::build_class_scan(Z, D, detail::envelope_grid(Z, D));
  return detail::real_pf(detail::rho_samples(S));
}

/**
 * Extendability envelope of the domain: the starlike set swept by the rays
 * [0, Lambda(theta) e^{i theta}) with Lambda = (rho e^{phi_2})^mu (mu > 0)
 * or (rho e^{phi_2})^{1/sigma} (mu = 0).  Every continuous solution of
 * Lu = 0 on the domain extends to it.  Construction re-runs itself on the
 * result and insists on idempotence to 1e-8, and on the envelope
 * containing the domain.
 */
inline EnvelopeResult envelope_build(const HomogeneousField& L,
                                     const FirstIntegral& Z,
                                     const StarlikeDomain& D) {
  detail::check_pairing(L, Z);
  const std::size_t n_out = detail::envelope_grid(Z, D);
  const detail::ClassScan S = detail::build_class_scan(Z, D, n_out);
  const std::vector<double> rho = detail::rho_samples(S);

  std::vector<double> phi2_out(n_out);
  double r_sup = 0.0;
  for (std::size_t k = 0; k < n_out; ++k) {
    phi2_out[k] = S.phi2[detail::class_refine * k];
    r_sup = std::max(r_sup, S.r_bnd[detail::class_refine * k]);
  }
  const std::vector<double> lam = detail::lambda_samples(Z, rho, phi2_out);

  for (std::size_t k = 0; k < n_out; ++k)
    if (lam[k] + 1e-8 * std::max(1.0, r_sup) <
        S.r_bnd[detail::class_refine * k])
      throw std::logic_error(
          "envelope: computed boundary fails to contain the domain");

  // Idempotence (Omega_L)_L = Omega_L: rerun the construction on the
  // envelope and compare boundaries.
  const PeriodicFn lam_pf = detail::real_pf(lam);
  const detail::ClassScan S2 =
      detail::build_class_scan(Z, StarlikeDomain{lam_pf}, n_out);
  const std::vector<double> rho2 = detail::rho_samples(S2);
  const std::vector<double> lam2 = detail::lambda_samples(Z, rho2, phi2_out);
  double lam_sup = 0.0, drift = 0.0;
  for (std::size_t k = 0; k < n_out; ++k) {
    lam_sup = std::max(lam_sup, lam[k]);
    drift = std::max(drift, std::abs(lam2[k] - lam[k]));
  }
  if (drift > 1e-8 * std::max(1.0, lam_sup))
    throw std::logic_error(
        "envelope: construction is not idempotent on this input (drift " +
        std::to_string(drift) + "); the class maxima did not stabilize");

  return {detail::real_pf(rho), lam_pf, StarlikeDomain{lam_pf}};
}

/**
 * Consistency defect of a computed envelope: |Z| sampled along the
 * envelope boundary must reproduce, direction by direction, the boundary
 * radius of the image Z(Omega) (the class maximum of |Z| over the domain
 * boundary, recomputed independently here).  Normalized sup discrepancy
 * over at least 4096 aligned angular samples; sound envelopes stay below
 * 1e-6.
 */
inline double envelope_check(const HomogeneousField& L, const FirstIntegral& Z,
                             const StarlikeDomain& D, const EnvelopeResult& E) {
  detail::check_pairing(L, Z);
  const double s = detail::envelope_exponent(Z);
  if (!pf_is_real(E.Lambda, 1e-12))
    throw precondition_error("envelope check: Lambda must be real");
  const std::size_t n = std::max(detail::envelope_grid(Z, D),
                                 E.Lambda.n_grid());

  const PeriodicFn lam_up = pf_upsample(E.Lambda, n);
  const PeriodicFn p2_up = pf_upsample(pf_im(Z.phi), n);
  const std::vector<cplx>& lam = lam_up.samples();
  const std::vector<cplx>& p2 = p2_up.samples();
  const detail::ClassScan S = detail::build_class_scan(Z, D, n);
  const std::vector<double> rho = detail::rho_samples(S);

  double worst = 0.0, rho_sup = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double l = lam[k].real();
    if (!(l > 0.0))
      throw precondition_error("envelope check: Lambda must be positive");
    const double img = std::exp(s * std::log(l) - p2[k].real());
    worst = std::max(worst, std::abs(img - rho[k]));
    rho_sup = std::max(rho_sup, rho[k]);
  }
  return worst / std::max(1.0, rho_sup);
}

}  // namespace hvf

#endif  // HVF_ENVELOPE_HPP

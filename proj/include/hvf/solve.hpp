// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_SOLVE_HPP
#define HVF_SOLVE_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hvf/errors.hpp"
#include "hvf/field.hpp"
#include "hvf/integral.hpp"
#include "hvf/periodic.hpp"
#include "hvf/resonance.hpp"

namespace hvf {

/// A degree nu = sigma + 1 - lambda is resonant when e^{2 pi i mu nu} is this
/// close to 1; the periodic-branch constant is then not determined by the
/// data alone.
inline constexpr double resonance_gate_tol = 1e-9;

/// Degrees whose denominator |1 - e^{2 pi i mu nu}| falls below this (but
/// above the gate) get a small-denominator warning attached.
inline constexpr double near_resonance_warn_tol = 1e-6;

/// Angular ODE residual accepted from a solve, relative to sup |f0|.
inline constexpr double ode_residual_tol = 1e-8;

/// A resonant degree is solvable without a log term only when the loop
/// integral of its data is at most this, relative to sup |f0|.
inline constexpr double compatibility_tol = 1e-8;

/// Right-hand side f(r, theta) = r^sigma f0(theta) with Re sigma > 0.
struct HomogeneousRHS {
  cplx sigma;
  PeriodicFn f0;
};

/// Angular profile of the degree-homogeneous solution
///
///   u(r, theta) = r^{sigma + 1 - lambda} v(theta)
///
/// of L u = r^sigma f0.  K is the constant fixing the periodic branch of the
/// angular ODE (v(0) = K); nu = sigma + 1 - lambda is kept so the solution
/// can be evaluated without the field at hand, and residual records the
/// achieved sup norm of p v' - i nu q v - f0.
struct HomogeneousSolution {
  cplx sigma;
  PeriodicFn v;
  cplx K{0.0, 0.0};
  cplx nu{0.0, 0.0};
  double residual = 0.0;

  cplx operator()(double r, double theta) const {
    if (!(r > 0.0))
      throw precondition_error("homogeneous solution: r = " + std::to_string(r) +
                               " <= 0");
    return std::exp(nu * std::log(r)) * v(theta);
  }
};

namespace detail {

/// (e^z - 1) / z, with a series branch near z = 0 so resonant loop factors
/// degrade continuously instead of dividing by a vanishing mode offset.
inline cplx expm1_over(cplx z) {
  if (std::abs(z) < 1e-6)
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
  return (std::exp(z) - 1.0) / z;
}

/// One Fourier mode of the reduced data g = (f0 / p) e^{-i nu P}.
struct DataMode {
  long j;
  cplx c;
};

/// Symmetric mode list of a periodic function; the shared Nyquist bin is
/// split evenly between +n/2 and -n/2 so mode sums stay conjugate-neutral.
inline std::vector<DataMode> mode_list(const PeriodicFn& g) {
  const long n = long(g.n_grid());
  const long half = n / 2;
  std::vector<DataMode> modes;
  modes.reserve(std::size_t(n) + 1);
  modes.push_back({0, g.bins()[0]});
  for (long k = 1; k < half; ++k) {
    modes.push_back({k, g.bins()[std::size_t(k)]});
    modes.push_back({-k, g.bins()[std::size_t(n - k)]});
  }
  const cplx nyq = 0.5 * g.bins()[std::size_t(half)];
  modes.push_back({half, nyq});
  modes.push_back({-half, nyq});
  return modes;
}

/// Everything one degree of the angular ODE
///
///   p v' - i nu q v = f0
///
/// produces.  The solver works on the reduced data g = (f0 / p) e^{-i nu P},
/// where psi = mu theta + P(theta) splits off the secular part of the kernel
/// exponent: the mode j of g integrates in closed form against
/// e^{i(j - nu mu) theta}, so no accuracy is lost to the non-periodic factor.
///
/// Off resonance the unique periodic branch is
///
///   v = e^{i nu P} sum_j h_j e^{i j theta},   h_j = g_j / (i (j - nu mu)),
///
/// with K = v(0) = sum_j h_j.  On resonance (nu mu within the gate of an
/// integer j0) the j0 mode of g is the obstruction: its loop integral is the
/// compatibility defect, and when the defect vanishes the K = 0 branch
///
///   v = e^{i nu P} [ sum_{j != j0} h_j e^{i j theta} - S e^{i j0 theta} ],
///   S = sum_{j != j0} h_j,
///
/// is periodic (nu mu is snapped to j0 exactly; the snap error is bounded by
/// the gate and lands in the reported residual).
struct DegreeSolve {
  PeriodicFn v;
  cplx K{0.0, 0.0};
  bool resonant = false;
  cplx defect{0.0, 0.0};
  double denom = std::numeric_limits<double>::infinity();
  double residual = 0.0;
};

inline DegreeSolve solve_degree(const HomogeneousField& L,
                                const PsiDecomposition& dec, cplx nu,
                                const PeriodicFn& f0) {
  const cplx alpha = nu * dec.mean;  // secular rate of the kernel exponent
  DegreeSolve out;
  out.denom = std::abs(1.0 - std::exp(cplx(0.0, two_pi) * alpha));
  out.resonant = out.denom <= resonance_gate_tol;

  const cplx i_nu(0.0, 1.0);
  const PeriodicFn g = (f0 / L.p) * pf_exp(dec.periodic_part * (-i_nu * nu));
  const std::vector<DataMode> modes = detail::mode_list(g);

  // Loop integral of the data over one period: the mode j contributes
  // g_j (e^{2 pi i (j - alpha)} - 1) / (i (j - alpha)), which tends to
  // 2 pi g_j exactly at resonance.
  for (const DataMode& m : modes) {
    const cplx beta = cplx(double(m.j), 0.0) - alpha;
    out.defect += m.c * two_pi * expm1_over(cplx(0.0, two_pi) * beta);
  }

  const long n_g = long(g.n_grid());
  const long j0 = out.resonant ? std::lround(alpha.real()) : 0;
  if (out.resonant && std::abs(j0) >= n_g / 2)
    throw std::logic_error("angular solve: resonant mode index " +
                           std::to_string(j0) +
                           " exceeds the working spectrum");
  const auto bin_of = [n_g](long j) {
    return std::size_t(((j % n_g) + n_g) % n_g);
  };
  std::vector<cplx> vbins(g.n_grid(), cplx(0.0, 0.0));
  cplx mode_sum(0.0, 0.0);
  for (const DataMode& m : modes) {
    if (out.resonant && m.j == j0) continue;
    const cplx beta = out.resonant ? cplx(double(m.j - j0), 0.0)
                                   : cplx(double(m.j), 0.0) - alpha;
    const cplx h = m.c / (cplx(0.0, 1.0) * beta);
    vbins[bin_of(m.j)] += h;
    mode_sum += h;
  }
  if (out.resonant) {
    vbins[bin_of(j0)] -= mode_sum;
    out.K = cplx(0.0, 0.0);
  } else {
    out.K = mode_sum;
  }

  const PeriodicFn carrier = pf_exp(dec.periodic_part * (i_nu * nu));
  out.v = carrier * PeriodicFn::from_bins(std::move(vbins));

  const PeriodicFn res =
      L.p * pf_derivative(out.v) - (i_nu * nu) * (L.q * out.v) - f0;
  out.residual = pf_sup(res);
  return out;
}

inline void require_positive_degree(const HomogeneousRHS& rhs) {
  if (!(rhs.sigma.real() > 0.0))
    throw precondition_error("homogeneous right-hand side: Re sigma = " +
                             std::to_string(rhs.sigma.real()) +
                             " must be > 0");
}

inline void require_residual(double residual, double scale) {
  if (residual > ode_residual_tol * scale)
    throw std::runtime_error(
        "angular ODE solve missed its residual target: " +
        std::to_string(residual) + " > " +
        std::to_string(ode_residual_tol * scale) +
        " (data too rough for the working grid)");
}

}  // namespace detail

/// Periodic solution of p v' - i (sigma + 1 - lambda) q v = f0 for a
/// nonresonant degree: u = r^{sigma + 1 - lambda} v(theta) then solves
/// L u = r^sigma f0 away from the origin, and as a distribution across it.
inline HomogeneousSolution solve_homogeneous(const HomogeneousField& L,
                                             const HomogeneousRHS& rhs) {
  detail::require_positive_degree(rhs);
  const PsiDecomposition dec = psi(L);
  const cplx nu = rhs.sigma + 1.0 - L.lambda;
  detail::DegreeSolve ds = detail::solve_degree(L, dec, nu, rhs.f0);
  if (ds.resonant)
    throw precondition_error(
        "degree sigma = (" + std::to_string(rhs.sigma.real()) + ", " +
        std::to_string(rhs.sigma.imag()) +
        ") is resonant: |1 - e^{2 pi i mu (sigma+1-lambda)}| = " +
        std::to_string(ds.denom) +
        " <= 1e-9; use solve_homogeneous_compatible");
  detail::require_residual(ds.residual, pf_sup(rhs.f0));
  return HomogeneousSolution{rhs.sigma, std::move(ds.v), ds.K, nu, ds.residual};
}

/// Loop integral of the reduced data over one period,
///
///   integral_0^{2 pi} (f0(s) / p(s)) e^{-i (sigma + 1 - lambda) psi(s)} ds,
///
/// for a resonant degree.  A periodic log-free solution exists exactly when
/// this vanishes; the resonant Fourier mode of the data contributes 2 pi
/// times its coefficient, every other mode integrates to a vanishing loop.
inline cplx compatibility_defect(const HomogeneousField& L,
                                 const HomogeneousRHS& rhs) {
  detail::require_positive_degree(rhs);
  const PsiDecomposition dec = psi(L);
  const cplx nu = rhs.sigma + 1.0 - L.lambda;
  detail::DegreeSolve ds = detail::solve_degree(L, dec, nu, rhs.f0);
  if (!ds.resonant)
    throw precondition_error(
        "degree sigma = (" + std::to_string(rhs.sigma.real()) + ", " +
        std::to_string(rhs.sigma.imag()) +
        ") is not resonant: |1 - e^{2 pi i mu (sigma+1-lambda)}| = " +
        std::to_string(ds.denom) + " > 1e-9; use solve_homogeneous");
  return ds.defect;
}

/// Resonant-degree solve for compatible data (loop integral at most 1e-8
/// relative to sup |f0|): the K = 0 periodic branch.  The general periodic
/// solution differs by multiples of e^{i (sigma + 1 - lambda) psi}, which is
/// itself periodic at a resonant degree.
inline HomogeneousSolution solve_homogeneous_compatible(
    const HomogeneousField& L, const HomogeneousRHS& rhs) {
  detail::require_positive_degree(rhs);
  const PsiDecomposition dec = psi(L);
  const cplx nu = rhs.sigma + 1.0 - L.lambda;
  detail::DegreeSolve ds = detail::solve_degree(L, dec, nu, rhs.f0);
  if (!ds.resonant)
    throw precondition_error(
        "degree sigma = (" + std::to_string(rhs.sigma.real()) + ", " +
        std::to_string(rhs.sigma.imag()) +
        ") is not resonant: |1 - e^{2 pi i mu (sigma+1-lambda)}| = " +
        std::to_string(ds.denom) + " > 1e-9; use solve_homogeneous");
  const double scale = pf_sup(rhs.f0);
  if (std::abs(ds.defect) > compatibility_tol * scale)
    throw precondition_error(
        "resonant data is not compatible: |loop integral| = " +
        std::to_string(std::abs(ds.defect)) + " > " +
        std::to_string(compatibility_tol * scale) +
        "; no periodic log-free solution exists");
  detail::require_residual(ds.residual, scale);
  return HomogeneousSolution{rhs.sigma, std::move(ds.v), ds.K, nu, ds.residual};
}

/// Taylor data of a real-analytic right-hand side near the origin:
/// coeffs[j][k] is the coefficient of x^k y^{j-k} in the Taylor polynomial
/// (the mixed derivative at 0 already divided by k!(j-k)!).  R_major is the
/// asserted polydisc radius of holomorphy and M0 a sup bound on it; together
/// they certify the slice bound sup |f_j| <= (j+1) M0 / R_major^j.
struct TaylorInput {
  std::vector<std::vector<cplx>> coeffs;
  double R_major = 1.0;
  double M0 = 1.0;
};

/// Angular slices f_j(theta) = sum_{k+l=j} coeffs[j][k] cos^k theta
/// sin^l theta of the Taylor data, so that f = sum_j r^j f_j(theta).
struct TaylorSlices {
  std::vector<PeriodicFn> f;
  std::vector<std::string> warnings;
};

inline TaylorSlices taylor_slices(const TaylorInput& T,
                                  std::size_t n_grid = default_n_grid) {
  if (!(T.R_major > 0.0))
    throw precondition_error("taylor data: R_major = " +
                             std::to_string(T.R_major) + " must be > 0");
  if (!(T.M0 >= 0.0))
    throw precondition_error("taylor data: M0 = " + std::to_string(T.M0) +
                             " must be >= 0");
  for (std::size_t j = 0; j < T.coeffs.size(); ++j)
    if (T.coeffs[j].size() != j + 1)
      throw precondition_error(
          "taylor data: row " + std::to_string(j) + " has " +
          std::to_string(T.coeffs[j].size()) + " entries, expected " +
          std::to_string(j + 1));

  TaylorSlices out;
  out.f.reserve(T.coeffs.size());
  for (std::size_t j = 0; j < T.coeffs.size(); ++j) {
    std::vector<cplx> s(n_grid);
    for (std::size_t m = 0; m < n_grid; ++m) {
      const double t = two_pi * double(m) / double(n_grid);
      const double c = std::cos(t), si = std::sin(t);
      // Evaluate sum_k coeffs[j][k] c^k si^{j-k} by Horner in c/si split:
      // powers are accumulated directly, degree stays small in practice.
      cplx acc(0.0, 0.0);
      double ck = 1.0;
      for (std::size_t k = 0; k <= j; ++k) {
        double sl = 1.0;
        for (std::size_t l = 0; l < j - k; ++l) sl *= si;
        acc += T.coeffs[j][k] * ck * sl;
        ck *= c;
      }
      s[m] = acc;
    }
    out.f.push_back(PeriodicFn::from_samples(std::move(s)));
    const double sup = pf_sup(out.f.back());
    const double bound =
        (double(j) + 1.0) * T.M0 / std::pow(T.R_major, double(j));
    if (sup > bound * (1.0 + 1e-12))
      out.warnings.push_back(
          "slice " + std::to_string(j) + " exceeds the analyticity bound: sup = " +
          std::to_string(sup) + " > " + std::to_string(bound) +
          " (radius or sup bound overstated)");
  }
  return out;
}

/// Scale constants behind the degree-by-degree estimates: with
/// psi = mu theta + P the kernel e^{-i (j+1-lambda) psi} has modulus at most
/// twist_max * base_max^{j+1} on a period, the primitive of each slice is
/// then bounded by primitive_growth^j, and dividing by the small-divisor
/// floor C^j turns that into constant_growth^j for the branch constants.
struct SeriesDiagnostics {
  double twist_max = 1.0;         // max over a period of |e^{i lambda psi}|
  double base_max = 1.0;          // max over a period of |e^{-i psi}|
  double p_min = 0.0;             // min over a period of |p|
  double primitive_growth = 0.0;  // geometric bound on the slice primitives
  double constant_growth = 0.0;   // primitive_growth / small-divisor floor
};

/// Truncated power-series solution of L u = f for real-analytic f:
/// w(r, theta) = sum_{j<=J} v_j(theta) r^j and u = w / r^{lambda-1}.
/// C2_estimate = max_j ||v_j||^{1/j} certifies geometric growth; the series
/// is guaranteed on r < 1 / C2_estimate and R0 keeps a factor-2 margin.
struct SeriesSolution {
  cplx lambda;
  std::vector<PeriodicFn> vs;
  std::vector<cplx> Ks;
  std::size_t J = 0;
  double C2_estimate = 0.0;
  double R0 = std::numeric_limits<double>::infinity();
  SeriesDiagnostics diagnostics;
  std::vector<std::string> warnings;

  cplx w(double r, double theta) const {
    if (!(r > 0.0))
      throw precondition_error("series solution: r = " + std::to_string(r) +
                               " <= 0");
    cplx acc(0.0, 0.0);
    double rj = 1.0;
    for (const PeriodicFn& vj : vs) {
      acc += rj * vj(theta);
      rj *= r;
    }
    return acc;
  }

  cplx u(double r, double theta) const {
    if (!(r > 0.0))
      throw precondition_error("series solution: r = " + std::to_string(r) +
                               " <= 0");
    return std::exp((1.0 - lambda) * std::log(r)) * w(r, theta);
  }
};

inline SeriesSolution solve_series(const HomogeneousField& L,
                                   const TaylorInput& T, std::size_t J,
                                   const DCReport& dc) {
  if (dc.status == DCStatus::ViolationSuspected)
    throw precondition_error(
        "small divisors decay too fast (violation suspected near j = " +
        std::to_string(dc.worst_j) + "); the series growth is uncertified");

  TaylorSlices slices = taylor_slices(T);
  const PsiDecomposition dec = psi(L);
  const PeriodicFn zero = pf_const(cplx(0.0, 0.0), 16);

  SeriesSolution out;
  out.lambda = L.lambda;
  out.warnings = std::move(slices.warnings);
  out.J = J;
  out.vs.reserve(J + 1);
  out.Ks.reserve(J + 1);

  for (std::size_t j = 0; j <= J; ++j) {
    const PeriodicFn& fj = j < slices.f.size() ? slices.f[j] : zero;
    const cplx nu = cplx(double(j) + 1.0, 0.0) - L.lambda;
    detail::DegreeSolve ds = detail::solve_degree(L, dec, nu, fj);
    const double scale = pf_sup(fj);
    if (ds.resonant && std::abs(ds.defect) > compatibility_tol * scale)
      throw precondition_error(
          "series obstructed at degree j = " + std::to_string(j) +
          ": resonant with compatibility defect |" +
          std::to_string(std::abs(ds.defect)) + "| > " +
          std::to_string(compatibility_tol * scale));
    if (!ds.resonant && ds.denom < near_resonance_warn_tol)
      out.warnings.push_back(
          "small denominator at degree j = " + std::to_string(j) +
          ": |1 - e^{2 pi i mu (j+1-lambda)}| = " + std::to_string(ds.denom));
    detail::require_residual(ds.residual, scale);
    out.vs.push_back(std::move(ds.v));
    out.Ks.push_back(ds.K);
  }

  double c2 = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double norm = pf_sup(out.vs[j]);
    if (norm > 0.0)
      c2 = std::max(c2, std::pow(norm, 1.0 / double(j)));
  }
  out.C2_estimate = c2;
  out.R0 = c2 > 0.0 ? 0.5 / c2 : std::numeric_limits<double>::infinity();

  // Scale constants, reported as diagnostics.  psi is sampled across one
  // full period including the secular ramp mu * theta.
  {
    const std::size_t n = std::max<std::size_t>(4096, dec.periodic_part.n_grid());
    const PeriodicFn P = pf_upsample(dec.periodic_part, n);
    const PeriodicFn p_up = pf_upsample(L.p, n);
    const double l1 = L.lambda.real(), l2 = L.lambda.imag();
    double m1 = 0.0, m2 = 0.0, p0 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = two_pi * double(k) / double(n);
      const cplx ps = dec.mean * t + (k < n ? P.samples()[k] : P.samples()[0]);
      m1 = std::max(m1, std::exp(-l1 * ps.imag() - l2 * ps.real()));
      m2 = std::max(m2, std::exp(ps.imag()));
      if (k < n) p0 = std::min(p0, std::abs(p_up.samples()[k]));
    }
    out.diagnostics.twist_max = m1;
    out.diagnostics.base_max = m2;
    out.diagnostics.p_min = p0;
    if (T.M0 > 0.0) {
      // Smallest geometric envelope of 2 pi m1 M0 (j+1) m2^{j+1} / (p0 R^j):
      // scan the j-th roots in log form and include the j -> inf limit m2/R.
      double log_c0 = std::log(m2 / T.R_major);
      const double log_a = std::log(two_pi * m1 * T.M0 / p0);
      const double log_b = std::log(m2 / T.R_major);
      for (std::size_t j = 1; j <= std::max<std::size_t>(J, 64); ++j) {
        const double lg =
            (log_a + std::log(double(j) + 1.0) + std::log(m2)) / double(j) +
            log_b;
        log_c0 = std::max(log_c0, lg);
      }
      out.diagnostics.primitive_growth = std::exp(log_c0);
      out.diagnostics.constant_growth =
          dc.C_estimate > 0.0
              ? out.diagnostics.primitive_growth / dc.C_estimate
              : std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

namespace detail {

/// Angular slice of a solution at one radius: the trace u(r, .) and its
/// radial derivative, both as periodic functions.
struct RadialSlice {
  PeriodicFn u_theta;
  PeriodicFn du_dr;
};

/// Shared residual scan: max over n_r radii and the working angular grid of
///
///   | r^{lambda-1} (p u_theta' - i q r u_r) - f | / max(1, sup |f|).
///
inline double residual_scan(
    const HomogeneousField& L, std::pair<double, double> annulus,
    std::size_t n_r, const std::function<RadialSlice(double)>& slice_at,
    const std::function<PeriodicFn(double)>& f_at) {
  const auto [r1, r2] = annulus;
  if (!(r1 > 0.0) || !(r2 > r1))
    throw precondition_error("residual annulus: need 0 < r1 < r2, got [" +
                             std::to_string(r1) + ", " + std::to_string(r2) +
                             "]");
  if (n_r < 2) throw precondition_error("residual scan: need >= 2 radii");

  double worst = 0.0, f_sup = 0.0;
  for (std::size_t i = 0; i < n_r; ++i) {
    const double r = r1 + (r2 - r1) * double(i) / double(n_r - 1);
    const RadialSlice s = slice_at(r);
    const cplx rl = std::exp((L.lambda - 1.0) * std::log(r));
    const PeriodicFn lhs = (L.p * pf_derivative(s.u_theta) -
                            cplx(0.0, r) * (L.q * s.du_dr)) *
                           rl;
    const PeriodicFn frhs = f_at(r);
    worst = std::max(worst, pf_sup(lhs - frhs));
    f_sup = std::max(f_sup, pf_sup(frhs));
  }
  return worst / std::max(1.0, f_sup);
}

}  // namespace detail

/// Classical residual of a degree-homogeneous solution on an annulus; the
/// radial derivative of r^nu v is taken in closed form.
inline double residual_check(const HomogeneousField& L,
                             const HomogeneousSolution& u,
                             const HomogeneousRHS& f,
                             std::pair<double, double> annulus,
                             std::size_t n_samples = 16) {
  return detail::residual_scan(
      L, annulus, n_samples,
      [&](double r) {
        const cplx rn = std::exp(u.nu * std::log(r));
        return detail::RadialSlice{u.v * rn, u.v * (u.nu * rn / r)};
      },
      [&](double r) { return f.f0 * std::exp(f.sigma * std::log(r)); });
}

/// Classical residual of a truncated series solution against its own Taylor
/// slices; radial powers differentiate in closed form, so the result
/// measures the truncation and grid error only.
inline double residual_check(const HomogeneousField& L, const SeriesSolution& u,
                             const std::vector<PeriodicFn>& f_slices,
                             std::pair<double, double> annulus,
                             std::size_t n_samples = 16) {
  if (annulus.second > u.R0)
    throw precondition_error("residual annulus: r2 = " +
                             std::to_string(annulus.second) +
                             " exceeds the certified radius R0 = " +
                             std::to_string(u.R0));
  return detail::residual_scan(
      L, annulus, n_samples,
      [&](double r) {
        // u(r, .) = sum_j v_j r^{j+1-lambda}; accumulate both the trace and
        // its exact radial derivative.
        const cplx r1l = std::exp((1.0 - u.lambda) * std::log(r));
        PeriodicFn acc = pf_const(cplx(0.0, 0.0), 16);
        PeriodicFn dacc = acc;
        double rj = 1.0;
        for (std::size_t j = 0; j < u.vs.size(); ++j) {
          const cplx nu = cplx(double(j) + 1.0, 0.0) - u.lambda;
          acc = acc + u.vs[j] * (rj * r1l);
          dacc = dacc + u.vs[j] * (nu * rj * r1l / r);
          rj *= r;
        }
        return detail::RadialSlice{std::move(acc), std::move(dacc)};
      },
      [&](double r) {
        PeriodicFn acc = pf_const(cplx(0.0, 0.0), 16);
        double rj = 1.0;
        for (const PeriodicFn& fj : f_slices) {
          acc = acc + fj * rj;
          rj *= r;
        }
        return acc;
      });
}

/// Classical residual of a first-integral power (an exact kernel element, so
/// the right-hand side is zero).
inline double residual_check(const HomogeneousField& L,
                             const RadialPowerSolution& u,
                             std::pair<double, double> annulus,
                             std::size_t n_samples = 16) {
  return detail::residual_scan(
      L, annulus, n_samples,
      [&](double r) {
        const cplx rr = std::exp(u.rho * std::log(r));
        return detail::RadialSlice{u.W * rr, u.W * (u.rho * rr / r)};
      },
      [](double) { return pf_const(cplx(0.0, 0.0), 16); });
}

/// Classical residual of an arbitrary callable solution; the radial
/// derivative falls back to centered differences with step 1e-5 r plus one
/// Richardson sweep, the angular derivative stays spectral on a sampled
/// trace.
inline double residual_check(const HomogeneousField& L,
                             const std::function<cplx(double, double)>& u,
                             const std::function<cplx(double, double)>& f,
                             std::pair<double, double> annulus,
                             std::size_t n_samples = 16) {
  const std::size_t n_theta = std::max<std::size_t>(256, L.p.n_grid());
  return detail::residual_scan(
      L, annulus, n_samples,
      [&](double r) {
        const double h = 1e-5 * r;
        const PeriodicFn trace =
            pf_build([&](double t) { return u(r, t); }, n_theta);
        const auto diff = [&](double step) {
          return pf_build(
              [&](double t) {
                return (u(r + step, t) - u(r - step, t)) / (2.0 * step);
              },
              n_theta);
        };
        const PeriodicFn d1 = diff(h), d2 = diff(0.5 * h);
        return detail::RadialSlice{trace, (d2 * 4.0 - d1) * (1.0 / 3.0)};
      },
      [&](double r) {
        return pf_build([&](double t) { return f(r, t); }, n_theta);
      });
}

}  // namespace hvf

#endif  // HVF_SOLVE_HPP

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_RH_HPP
#define HVF_RH_HPP

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

/**
 * Boundary value solver on the unit disc.  Given a unit-modulus coefficient
 * Lambda2 and real data Phi2 on the circle, it produces the family of
 * meromorphic functions w, holomorphic in the punctured disc with a capped
 * pole at the origin, satisfying
 *
 *   Re(Lambda2(tau) w(e^{i tau})) = Phi2(tau).
 *
 * The cap on the pole order comes from the field the disc models: a pole of
 * order m in the disc pulls back through a first integral to a blow-up rate
 * m Re(1/mu) at the origin of the plane, and the budget below keeps that
 * rate compatible with the field's degree data (lambda, mu).  rh_compose
 * performs the pull-back.
 */

/// Sup-norm tolerance for the unit-modulus and realness checks on the
/// boundary data grids.
inline constexpr double rh_data_tol = 1e-10;

/// Largest boundary defect rh_solve certifies.  A solve that ends above
/// this is rejected as under-resolved rather than returned silently.
inline constexpr double rh_boundary_tol = 1e-6;

/**
 * Holomorphic function on the closed unit disc stored by its Taylor
 * coefficients: F(z) = sum_j coeff[j] z^j.  Every expansion stored here
 * comes from band-limited boundary data, so the sum is finite; evaluation
 * is Horner's scheme, stable on |z| <= 1 because the coefficients decay.
 */
struct DiscFn {
  std::vector<cplx> coeff;

  cplx operator()(cplx z) const {
    cplx acc(0.0, 0.0);
    for (std::size_t j = coeff.size(); j-- > 0;) acc = acc * z + coeff[j];
    return acc;
  }
};

/**
 * Schwarz operator: the holomorphic F on the disc with Re F = g on the
 * boundary, normalized by Im F(0) = 0.  Realized as a Fourier multiplier,
 *
 *   F(z) = g_0 + 2 sum_{j >= 1} g_j z^j,
 *
 * with g_j the Fourier coefficients of g, so no principal-value quadrature
 * is involved; on the circle the finite sum equals g plus i times the
 * conjugate function of g.  The grid's shared Nyquist bin is a single real
 * cosine amplitude and is carried as one top-degree term, matching the
 * evaluation convention of PeriodicFn at the grid nodes.
 */
inline DiscFn schwarz(const PeriodicFn& g) {
  if (!pf_is_real(g, rh_data_tol))
    throw precondition_error(
        "schwarz: the boundary density must be real (sup |Im| exceeds 1e-10)");
  const long half = long(g.n_grid()) / 2;
  DiscFn F;
  F.coeff.resize(std::size_t(half) + 1);
  F.coeff[0] = cplx(g.coeff(0).real(), 0.0);
  for (long j = 1; j <= half; ++j) F.coeff[std::size_t(j)] = 2.0 * g.coeff(j);
  return F;
}

namespace detail {

/// Continuous branch of arg Lambda along the sample loop, split as
/// kappa * tau + alpha(tau) with alpha periodic and kappa the number of
/// turns.  Adjacent samples on opposite sides of 0 (a phase step of size
/// pi or more) make the branch ambiguous and are rejected.
struct UnwrappedPhase {
  int kappa = 0;
  std::vector<double> alpha;
};

inline UnwrappedPhase unwrap_phase(const PeriodicFn& Lambda) {
  const std::vector<cplx>& s = Lambda.samples();
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(s[k]) < division_floor)
      throw precondition_error(
          "winding number: |Lambda| = " + std::to_string(std::abs(s[k])) +
          " at tau = " + std::to_string(Lambda.grid_theta(k)) +
          " is below 1e-12; the loop must stay away from 0");

  const auto step = [](const cplx& a, const cplx& b) {
    const double d = std::arg(b / a);
    if (!(std::abs(d) < pi - 1e-9))
      throw precondition_error(
          "winding number: phase step |" + std::to_string(d) +
          "| >= pi between adjacent samples; the grid is too coarse to "
          "unwrap the phase");
    return d;
  };

  std::vector<double> psi(n);
  psi[0] = std::arg(s[0]);
  double total = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double d = step(s[k - 1], s[k]);
    psi[k] = psi[k - 1] + d;
    total += d;
  }
  total += step(s[n - 1], s[0]);

  const double turns = total / two_pi;
  const long kappa = std::lround(turns);
  if (std::abs(turns - double(kappa)) > 1e-6)
    throw std::logic_error("winding number: accumulated phase " +
                           std::to_string(total) +
                           " is not a whole number of turns");

  UnwrappedPhase out;
  out.kappa = int(kappa);
  out.alpha.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    out.alpha[k] = psi[k] - double(kappa) * Lambda.grid_theta(k);
  return out;
}

/// z^m for integer m by binary powering; negative m inverts the result.
inline cplx ipow(cplx z, long m) {
  if (m < 0) return 1.0 / ipow(z, -m);
  cplx acc(1.0, 0.0);
  while (m > 0) {
    if (m & 1) acc *= z;
    z *= z;
    m >>= 1;
  }
  return acc;
}

}  // namespace detail

/// Winding number of a nonvanishing boundary loop around 0, by phase
/// unwrapping: principal argument increments between consecutive grid
/// samples are accumulated and the closed-loop total, an exact multiple of
/// 2 pi, is rounded to a whole number of turns.
inline int rh_winding(const PeriodicFn& Lambda) {
  return detail::unwrap_phase(Lambda).kappa;
}

/**
 * Boundary data for the disc problem Re(Lambda2 w) = Phi2 on |z| = 1.
 * lambda and mu come from the field the disc models; they set the pole
 * budget at the origin and the admissible winding range.
 */
struct RHInput {
  PeriodicFn Lambda2;  // unit-modulus coefficient on the circle
  PeriodicFn Phi2;     // real data on the circle
  cplx lambda{2.0, 0.0};
  cplx mu{1.0, 0.0};
};

namespace detail {

inline void validate_rh_input(const RHInput& inp) {
  double worst = 0.0;
  for (const cplx& s : inp.Lambda2.samples())
    worst = std::max(worst, std::abs(std::abs(s) - 1.0));
  if (worst > rh_data_tol)
    throw precondition_error("rh input: |Lambda2| deviates from 1 by " +
                             std::to_string(worst) + " > 1e-10 on the grid");
  if (!pf_is_real(inp.Phi2, rh_data_tol))
    throw precondition_error("rh input: Phi2 must be real to 1e-10");
  if (!(inp.lambda.real() > 1.0))
    throw precondition_error("rh input: Re lambda = " +
                             std::to_string(inp.lambda.real()) +
                             " must be > 1");
  if (!(inp.mu.real() > 0.0))
    throw precondition_error("rh input: Re mu = " +
                             std::to_string(inp.mu.real()) +
                             " must be > 0 (orient the field first)");
}

}  // namespace detail

/// Checked constructor for RHInput.  The same checks rerun inside rh_solve,
/// so hand-built aggregates cannot bypass them.
inline RHInput rh_input(PeriodicFn Lambda2, PeriodicFn Phi2, cplx lambda,
                        cplx mu) {
  RHInput inp{std::move(Lambda2), std::move(Phi2), lambda, mu};
  detail::validate_rh_input(inp);
  return inp;
}

/// Free parameters selecting one member of the solution family: an
/// imaginary constant i beta0 plus complex coefficients c_1..c_n.  A list
/// shorter than the family size n is zero padded.
struct RHFree {
  double beta0 = 0.0;
  std::vector<cplx> c;
};

/**
 * One member of the solution family of the disc problem, stored as its
 * assembled pieces:
 *
 *   w(z) = z^{-kappa} e^{i gamma(z)} [ data(z) + Q(z) ],
 *   Q(z) = i beta0 + sum_{k=1}^{n} (c_k z^k - conj(c_k) z^{-k}).
 *
 * gamma regularizes the boundary phase: with arg Lambda2 = kappa tau +
 * alpha(tau), gamma is the Schwarz integral of -alpha, which makes
 * Lambda2(tau) e^{-i kappa tau} e^{i gamma} = e^{-Im gamma} real and
 * positive on the circle (this fixes both the z^{-kappa} convention and the
 * sign of alpha; the boundary defect check in rh_solve pins them
 * empirically as well).  data is the Schwarz integral of e^{Im gamma} Phi2,
 * so Re(Lambda2 w) = Phi2 on the circle; Q has identically vanishing real
 * part there, so the free parameters sweep the homogeneous family without
 * touching the data fit.  n caps the principal part Q may carry at the
 * origin.
 *
 * The evaluator lives on the punctured closed disc 0 < |z| <= 1.
 */
struct RHSolution {
  int kappa = 0;
  int n = 0;
  DiscFn gamma;         // regularizer, as Taylor coefficients
  DiscFn data;          // Schwarz integral of e^{Im gamma} Phi2
  double beta0 = 0.0;   // imaginary-constant free parameter
  std::vector<cplx> c;  // family coefficients c_1..c_n, always n of them

  cplx operator()(cplx z) const {
    const double az = std::abs(z);
    if (!(az > 0.0))
      throw precondition_error(
          "rh solution: w is defined on 0 < |z| <= 1; got z = 0");
    if (az > 1.0 + 1e-6)
      throw precondition_error("rh solution: |z| = " + std::to_string(az) +
                               " > 1; w lives on the closed unit disc");
    if (c.size() != std::size_t(n))
      throw std::logic_error(
          "rh solution: free coefficient list does not match the family "
          "size");
    const cplx i(0.0, 1.0);
    cplx Q(0.0, beta0);
    cplx zp(1.0, 0.0);
    const cplx zi = 1.0 / z;
    cplx zn(1.0, 0.0);
    for (int k = 1; k <= n; ++k) {
      zp *= z;
      zn *= zi;
      Q += c[std::size_t(k - 1)] * zp - std::conj(c[std::size_t(k - 1)]) * zn;
    }
    return detail::ipow(z, -long(kappa)) * std::exp(i * gamma(z)) *
           (data(z) + Q);
  }
};

namespace detail {

/// Largest |Re(Lambda2 w) - Phi2| over m boundary points placed between
/// the construction nodes, so grid-resolution error counts against the fit
/// instead of hiding at the nodes.
inline double rh_boundary_defect(const RHInput& inp, const RHSolution& sol,
                                 std::size_t m) {
  double worst = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double tau = two_pi * (double(s) + 0.5) / double(m);
    const cplx z = std::polar(1.0, tau);
    const double lhs = (inp.Lambda2(tau) * sol(z)).real();
    worst = std::max(worst, std::abs(lhs - inp.Phi2(tau).real()));
  }
  return worst;
}

}  // namespace detail

/**
 * Solve the disc problem for one family member.
 *
 * The winding number kappa of Lambda2 must satisfy the index bound
 *
 *   kappa > -1 - (Re lambda - 1)/Re(1/mu)
 *
 * (tested with 1e-9 slack); below it the pole budget would be negative and
 * the family is empty.  The budget itself is
 *
 *   n = kappa + 1 + floor((Re lambda - 1)/Re(1/mu)).
 *
 * The construction works on a grid twice as fine as the data's (at least
 * 256 points): the phase of Lambda2 is unwrapped, its periodic part feeds
 * the regularizer, and the data term is the Schwarz integral of
 * e^{Im gamma} Phi2.  The boundary defect is then measured between grid
 * nodes and the solve is rejected above 1e-6: boundary data that its own
 * grid does not resolve fails here instead of returning a smoothed answer.
 */
inline RHSolution rh_solve(const RHInput& inp,
                           const RHFree& free_params = {}) {
  detail::validate_rh_input(inp);
  if (!std::isfinite(free_params.beta0))
    throw precondition_error("rh_solve: beta0 must be finite");

  const std::size_t n_work = std::max<std::size_t>(
      2 * detail::common_grid(inp.Lambda2, inp.Phi2), 256);
  const PeriodicFn Lam = pf_upsample(inp.Lambda2, n_work);
  const PeriodicFn Phi = pf_upsample(inp.Phi2, n_work);

  const detail::UnwrappedPhase ph = detail::unwrap_phase(Lam);

  const double re_inv_mu = inp.mu.real() / std::norm(inp.mu);
  const double budget = (inp.lambda.real() - 1.0) / re_inv_mu;
  const double bound = -1.0 - budget;
  if (!(double(ph.kappa) > bound - 1e-9))
    throw precondition_error(
        "rh_solve: winding number kappa = " + std::to_string(ph.kappa) +
        " violates the index bound kappa > -1 - (Re lambda - 1)/Re(1/mu) "
        "= " +
        std::to_string(bound));

  // Floor with a 1e-12 guard so budgets that are integers up to roundoff
  // land on the integer.
  const int n = ph.kappa + 1 + int(std::floor(budget + 1e-12));
  if (n < 0)
    throw std::logic_error(
        "rh_solve: negative pole budget after an accepted index");
  if (n > 4096)
    throw precondition_error(
        "rh_solve: pole budget n = " + std::to_string(n) +
        " exceeds 4096; Re(1/mu) = " + std::to_string(re_inv_mu) +
        " is too small for this disc model");
  if (free_params.c.size() > std::size_t(n))
    throw precondition_error(
        "rh_solve: " + std::to_string(free_params.c.size()) +
        " family coefficients supplied, but the family has n = " +
        std::to_string(n));

  RHSolution sol;
  sol.kappa = ph.kappa;
  sol.n = n;
  sol.beta0 = free_params.beta0;
  sol.c.assign(std::size_t(n), cplx(0.0, 0.0));
  for (std::size_t k = 0; k < free_params.c.size(); ++k) {
    if (!std::isfinite(free_params.c[k].real()) ||
        !std::isfinite(free_params.c[k].imag()))
      throw precondition_error(
          "rh_solve: family coefficients must be finite");
    sol.c[k] = free_params.c[k];
  }

  std::vector<cplx> minus_alpha(n_work);
  for (std::size_t k = 0; k < n_work; ++k)
    minus_alpha[k] = cplx(-ph.alpha[k], 0.0);
  sol.gamma = schwarz(PeriodicFn::from_samples(std::move(minus_alpha)));

  std::vector<cplx> density(n_work);
  for (std::size_t k = 0; k < n_work; ++k) {
    const cplx g = sol.gamma(std::polar(1.0, Lam.grid_theta(k)));
    density[k] = cplx(std::exp(g.imag()) * Phi.samples()[k].real(), 0.0);
  }
  sol.data = schwarz(PeriodicFn::from_samples(std::move(density)));

  const double defect = detail::rh_boundary_defect(inp, sol, 2 * n_work);
  if (defect > rh_boundary_tol)
    throw precondition_error(
        "rh_solve: boundary defect " + std::to_string(defect) +
        " exceeds 1e-6; the boundary data is not resolved on its grid, "
        "rebuild Lambda2 and Phi2 on a finer one");
  return sol;
}

/**
 * Verification of a produced solution.  Returns the larger of two defects:
 * the boundary fit, max |Re(Lambda2 w) - Phi2| over n_samples points placed
 * between grid nodes, and a holomorphy figure for the punctured disc:
 * w(z) z^n is expanded on the circle |z| = 0.9 and its negative-frequency
 * content, which a meromorphic function within the pole budget cannot
 * have, is reported relative to the expansion's largest coefficient.
 * (A family member with kappa > 0 and a nonzero trailing coefficient c_n
 * overruns the budget by up to kappa orders; the figure reports that
 * overrun honestly.)
 */
inline double rh_residual(const RHInput& inp, const RHSolution& sol,
                          std::size_t n_samples = 512) {
  if (n_samples < 16)
    throw precondition_error("rh_residual: need >= 16 boundary samples");
  const double boundary = detail::rh_boundary_defect(inp, sol, n_samples);

  std::size_t m = 256;
  while (m < n_samples) m *= 2;
  std::vector<cplx> h(m);
  for (std::size_t k = 0; k < m; ++k) {
    const cplx z = std::polar(0.9, two_pi * double(k) / double(m));
    h[k] = sol(z) * detail::ipow(z, long(sol.n));
  }
  const PeriodicFn H = PeriodicFn::from_samples(std::move(h));
  double anti = 0.0, scale = 0.0;
  const long half = long(m) / 2;
  for (long j = -half + 1; j < half; ++j) {
    const double a = std::abs(H.coeff(j));
    scale = std::max(scale, a);
    if (j < 0) anti = std::max(anti, a);
  }
  return std::max(boundary, anti / std::max(1.0, scale));
}

/**
 * Push a disc solution onto the field: u(r, theta) = w(Z(r, theta)).
 *
 * The first integral must be of the positive-rotation kind (Re mu > 0), so
 * Z maps the plane onto the plane and the preimage of the closed unit disc
 * is a compact neighborhood of the origin; on it the composition solves
 * L u = 0 away from 0, with boundary data governed by the disc problem.
 * Points mapping outside the closed disc are rejected.  The field is
 * passed alongside its integral so a call names the equation it solves;
 * deep consistency between the two is fi_residual's business, not a
 * per-point check.
 */
inline cplx rh_compose(const HomogeneousField& L, const FirstIntegral& Z,
                       const RHSolution& sol, double r, double theta) {
  if (Z.kind != FIKind::PositiveReMu || !(Z.mu.real() > 0.0))
    throw precondition_error(
        "rh_compose: the disc model needs a first integral with Re mu > 0");
  if (!(L.lambda.real() > 1.0))
    throw precondition_error(
        "rh_compose: Re lambda = " + std::to_string(L.lambda.real()) +
        " must be > 1");
  const cplx z = fi_eval(Z, r, theta);
  const double az = std::abs(z);
  if (az > 1.0 + 1e-9)
    throw precondition_error(
        "rh_compose: |Z(r, theta)| = " + std::to_string(az) +
        " > 1; the point lies outside the modeled domain");
  return sol(z);
}

}  // namespace hvf

#endif  // HVF_RH_HPP

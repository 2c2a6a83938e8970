// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_INTEGRAL_HPP
#define HVF_INTEGRAL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hvf/errors.hpp"
#include "hvf/field.hpp"
#include "hvf/periodic.hpp"

namespace hvf {

/**
 * The three shapes a global first integral of p d/dtheta - i q r d/dr can
 * take, keyed by where the mean rotation number mu sits:
 *
 *   ZeroMu        mu = 0:          Z = r^sigma e^{i phi(theta)}
 *   PositiveReMu  Re mu > 0:       Z = r^{1/mu} e^{i(theta + phi(theta))}
 *   ImaginaryMu   mu = i beta:     Z = e^{-phi2} e^{i(theta + phi1 - ln(r)/beta)}
 *
 * with phi = phi1 + i phi2 a periodic profile.  Z is constant along the
 * integral curves of the field, and every bounded solution factors
 * through it.
 */
enum class FIKind { ZeroMu, PositiveReMu, ImaginaryMu };

/// Image of the first integral as a set: the closed upper half-plane for
/// ZeroMu, the whole plane for PositiveReMu, a closed annulus for
/// ImaginaryMu.
enum class FIImage { UpperHalfPlane, WholePlane, Annulus };

struct FirstIntegral {
  FIKind kind = FIKind::PositiveReMu;
  cplx mu{0.0, 0.0};
  PeriodicFn phi;        // profile; real range [0, pi] for ZeroMu, zero-mean otherwise
  double sigma = 0.0;    // ZeroMu only: radial exponent
  double beta = 0.0;     // ImaginaryMu only: mu = i beta
  double ann_lo = 0.0;   // ImaginaryMu only: inner modulus of the image annulus
  double ann_hi = 0.0;   // ImaginaryMu only: outer modulus
};

/// Angular antiderivative of q/p split into its linear and periodic parts:
/// psi(theta) = mean * theta + periodic_part(theta), periodic_part(0) = 0.
struct PsiDecomposition {
  cplx mean;
  PeriodicFn periodic_part;
};

inline PsiDecomposition psi(const HomogeneousField& L) {
  const PeriodicFn ratio = L.q / L.p;
  const cplx mean = pf_mean(ratio);
  return {mean, pf_antiderivative(ratio - mean)};
}

namespace detail {

/// Near-threshold guard: classification boundaries sit at 1e-10, and any
/// magnitude within a factor 10 above one is reported instead of guessed.
inline bool in_ambiguity_band(double value) {
  return value > mu_threshold && value <= 10.0 * mu_threshold;
}

}  // namespace detail

/**
 * Builds the first integral for an oriented field, classifying by the
 * supplied rotation number mu (use compute_mu).  Inputs whose mu sits
 * within a factor 10 of a classification threshold are rejected as
 * ambiguous rather than silently classified, and Re mu < 0 is rejected
 * with a pointer to orient().
 */
inline FirstIntegral first_integral(const HomogeneousField& L, cplx mu) {
  const double mag = std::abs(mu);
  const double re = std::abs(mu.real());

  if (detail::in_ambiguity_band(mag))
    throw precondition_error("first integral: |mu| = " + std::to_string(mag) +
                             " lies in (1e-10, 1e-9]; zero vs nonzero rotation "
                             "number is ambiguous at this resolution");

  FirstIntegral Z;
  Z.mu = mu;

  if (mag <= mu_threshold) {
    // mu = 0: rescale the periodic primitive so Re phi spans exactly [0, pi]
    Z.kind = FIKind::ZeroMu;
    const PsiDecomposition d = psi(L);
    const PeriodicFn re_m = pf_re(d.periodic_part);
    const auto [lo, hi] = pf_min_max(re_m);
    const double spread = hi.value - lo.value;
    if (spread <= 1e-10 * std::max(1.0, pf_sup(d.periodic_part)))
      throw precondition_error(
          "first integral: Re psi is constant, so the rescaling exponent "
          "sigma = pi / (max Re psi - min Re psi) is undefined");
    Z.sigma = pi / spread;
    Z.phi = Z.sigma * d.periodic_part - cplx(Z.sigma * lo.value, 0.0);

    const auto [plo, phi_hi] = pf_min_max(pf_re(Z.phi));
    if (std::abs(plo.value) > 1e-8 || std::abs(phi_hi.value - pi) > 1e-8)
      throw std::logic_error("first integral: Re phi failed to span [0, pi]");
    return Z;
  }

  if (detail::in_ambiguity_band(re))
    throw precondition_error("first integral: |Re mu| = " + std::to_string(re) +
                             " lies in (1e-10, 1e-9]; imaginary vs positive-real "
                             "rotation number is ambiguous at this resolution");

  // zero-mean periodic primitive of q/(p mu) - 1
  const PeriodicFn integrand = (L.q / L.p) * (cplx(1.0, 0.0) / mu) - cplx(1.0, 0.0);
  Z.phi = pf_antiderivative_zero_mean(integrand);

  if (re <= mu_threshold) {
    Z.kind = FIKind::ImaginaryMu;
    Z.beta = mu.imag();
    const auto [lo, hi] = pf_min_max(pf_im(Z.phi));
    Z.ann_lo = std::exp(-hi.value);
    Z.ann_hi = std::exp(-lo.value);
    return Z;
  }

  if (mu.real() < 0.0)
    throw precondition_error("first integral: Re mu = " + std::to_string(mu.real()) +
                             " < 0; orient() the field first");
  Z.kind = FIKind::PositiveReMu;
  return Z;
}

inline FIImage fi_image(const FirstIntegral& Z) {
  switch (Z.kind) {
    case FIKind::ZeroMu: return FIImage::UpperHalfPlane;
    case FIKind::PositiveReMu: return FIImage::WholePlane;
    default: return FIImage::Annulus;
  }
}

inline cplx fi_eval(const FirstIntegral& Z, double r, double theta) {
  if (!(r > 0.0))
    throw precondition_error("fi_eval: r = " + std::to_string(r) + " <= 0");
  const cplx i(0.0, 1.0);
  switch (Z.kind) {
    case FIKind::ZeroMu:
      return std::pow(r, Z.sigma) * std::exp(i * Z.phi(theta));
    case FIKind::PositiveReMu:
      return std::exp(std::log(r) / Z.mu) * std::exp(i * (theta + Z.phi(theta)));
    default: {
      const cplx ph = Z.phi(theta);
      return std::exp(-ph.imag()) *
             std::exp(i * (theta + ph.real() - std::log(r) / Z.beta));
    }
  }
}

namespace detail {

/// Angular factor G and radial exponent s of Z = r^s G(theta), sampled
/// spectrally at n points (the exponential of a trigonometric polynomial
/// is smooth, so a modest oversampling reaches machine accuracy).
inline std::pair<PeriodicFn, cplx> fi_angular_factor(const FirstIntegral& Z,
                                                     std::size_t n = 4096) {
  const PeriodicFn up = pf_upsample(Z.phi, std::max(n, Z.phi.n_grid()));
  const std::size_t m = up.n_grid();
  std::vector<cplx> g(m);
  const cplx i(0.0, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = two_pi * double(k) / double(m);
    g[k] = Z.kind == FIKind::ZeroMu ? std::exp(i * up.samples()[k])
                                    : std::exp(i * (t + up.samples()[k]));
  }
  const cplx s = Z.kind == FIKind::ZeroMu ? cplx(Z.sigma, 0.0) : 1.0 / Z.mu;
  return {PeriodicFn::from_samples(std::move(g)), s};
}

}  // namespace detail

/**
 * Max normalized residual of the first-integral equation
 * p dZ/dtheta - i q r dZ/dr = 0 over the given (r, theta) points.  The
 * angular derivative is spectral; the radial one uses the exact power
 * rule on Z = r^s G(theta).  Values above 1e-8 mean Z is not constant
 * along the flow.
 */
inline double fi_residual(const HomogeneousField& L, const FirstIntegral& Z,
                          const std::vector<std::pair<double, double>>& grid) {
  const auto [G, s] = detail::fi_angular_factor(Z);
  const PeriodicFn dG = pf_derivative(G);
  const cplx i(0.0, 1.0);
  double worst = 0.0;
  for (const auto& [r, t] : grid) {
    if (!(r > 0.0))
      throw precondition_error("fi_residual: grid contains r = " +
                               std::to_string(r) + " <= 0");
    const cplx c = std::exp(s * std::log(r));
    const cplx term1 = L.p(t) * c * dG(t);
    const cplx term2 = i * L.q(t) * s * c * G(t);
    const double scale = std::max(1.0, std::abs(term1) + std::abs(term2));
    worst = std::max(worst, std::abs(term1 - term2) / scale);
  }
  return worst;
}

/**
 * A separable exact solution u = r^rho W(theta) of Lu = 0, obtained as an
 * integer power of the first integral: Z^{-m} for the ZeroMu and
 * PositiveReMu kinds, Z^{+m} for ImaginaryMu.  Blow-up at the origin is
 * kept integrable against the field by the kind-specific exponent bound,
 * which is enforced at construction.
 */
struct RadialPowerSolution {
  cplx rho;       // radial exponent
  PeriodicFn W;   // angular factor
  int m = 0;
  FIKind kind = FIKind::PositiveReMu;

  cplx operator()(double r, double theta) const {
    if (!(r > 0.0))
      throw precondition_error("radial power solution: r = " + std::to_string(r) +
                               " <= 0");
    return std::exp(rho * std::log(r)) * W(theta);
  }
};

inline RadialPowerSolution solution_from_powers(const HomogeneousField& L,
                                                const FirstIntegral& Z, int m) {
  const double bound = L.lambda.real() - 1.0;
  RadialPowerSolution u;
  u.m = m;
  u.kind = Z.kind;

  const cplx i(0.0, 1.0);
  const PeriodicFn up = pf_upsample(Z.phi, std::max<std::size_t>(4096, Z.phi.n_grid()));
  const std::size_t n = up.n_grid();
  std::vector<cplx> w(n);

  switch (Z.kind) {
    case FIKind::ZeroMu: {
      if (!(Z.sigma * m < bound))
        throw precondition_error("radial power: sigma*m = " +
                                 std::to_string(Z.sigma * m) + " >= Re lambda - 1 = " +
                                 std::to_string(bound));
      u.rho = cplx(-Z.sigma * double(m), 0.0);
      for (std::size_t k = 0; k < n; ++k)
        w[k] = std::exp(-i * double(m) * up.samples()[k]);
      break;
    }
    case FIKind::PositiveReMu: {
      const double rate = double(m) * (1.0 / Z.mu).real();
      if (!(rate < bound))
        throw precondition_error("radial power: m*Re(1/mu) = " + std::to_string(rate) +
                                 " >= Re lambda - 1 = " + std::to_string(bound));
      u.rho = -double(m) / Z.mu;
      for (std::size_t k = 0; k < n; ++k) {
        const double t = two_pi * double(k) / double(n);
        w[k] = std::exp(-i * double(m) * (t + up.samples()[k]));
      }
      break;
    }
    default: {  // ImaginaryMu: every integer power stays bounded
      u.rho = cplx(0.0, -double(m) / Z.beta);
      for (std::size_t k = 0; k < n; ++k) {
        const double t = two_pi * double(k) / double(n);
        w[k] = std::exp(i * double(m) * (t + up.samples()[k]));
      }
      break;
    }
  }
  u.W = PeriodicFn::from_samples(std::move(w));
  return u;
}

/// Classical residual of L(r^rho W) = 0 away from the origin, reduced to
/// the angular identity p W' = i rho q W and normalized by its terms.
inline double radial_power_residual(const HomogeneousField& L,
                                    const RadialPowerSolution& u) {
  const PeriodicFn dW = pf_derivative(u.W);
  const PeriodicFn res = L.p * dW - cplx(0.0, 1.0) * u.rho * (L.q * u.W);
  const double scale = std::max(1.0, pf_sup(L.p) * pf_sup(dW) +
                                         std::abs(u.rho) * pf_sup(L.q) * pf_sup(u.W));
  return pf_sup(res) / scale;
}

/// Outcome of a fiber-constancy test: defect is the largest spread of u
/// over grid points sharing a first-integral value; the test is
/// inconclusive when no Z-cluster received at least two points.
struct FiberCheckResult {
  bool conclusive = false;
  double defect = 0.0;
  std::size_t populated_bins = 0;
};

/**
 * Bins the sample points by their Z value (boxes of side cluster_tol in
 * the Z plane) and measures how far u is from being a function of Z: for
 * an exact factorization u = H(Z) the within-bin spread vanishes up to
 * evaluation error.  The grid is the product of the given radii with
 * n_theta uniform angles.
 */
inline FiberCheckResult fiber_check(const std::function<cplx(double, double)>& u,
                                    const FirstIntegral& Z,
                                    const std::vector<double>& radii,
                                    std::size_t n_theta, double cluster_tol = 1e-6) {
  if (radii.empty() || n_theta == 0)
    throw precondition_error("fiber_check: empty sampling grid");
  struct Bin {
    double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
    std::size_t count = 0;
  };
  std::unordered_map<std::uint64_t, Bin> bins;
  bins.reserve(radii.size() * n_theta);

  for (double r : radii) {
    for (std::size_t k = 0; k < n_theta; ++k) {
      const double t = two_pi * double(k) / double(n_theta);
      const cplx z = fi_eval(Z, r, t);
      const auto ix = std::int64_t(std::floor(z.real() / cluster_tol));
      const auto iy = std::int64_t(std::floor(z.imag() / cluster_tol));
      const std::uint64_t key =
          (std::uint64_t(ix) << 32) ^ (std::uint64_t(iy) & 0xffffffffull);
      const cplx val = u(r, t);
      Bin& b = bins[key];
      if (b.count == 0) {
        b.re_lo = b.re_hi = val.real();
        b.im_lo = b.im_hi = val.imag();
      } else {
        b.re_lo = std::min(b.re_lo, val.real());
        b.re_hi = std::max(b.re_hi, val.real());
        b.im_lo = std::min(b.im_lo, val.imag());
        b.im_hi = std::max(b.im_hi, val.imag());
      }
      ++b.count;
    }
  }

  FiberCheckResult out;
  for (const auto& [key, b] : bins) {
    (void)key;
    if (b.count >= 2) {
      ++out.populated_bins;
      out.defect =
          std::max(out.defect, std::hypot(b.re_hi - b.re_lo, b.im_hi - b.im_lo));
    }
  }
  out.conclusive = out.populated_bins > 0;
  return out;
}

}  // namespace hvf

#endif  // HVF_INTEGRAL_HPP

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_PERIODIC_HPP
#define HVF_PERIODIC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "hvf/errors.hpp"
#include "hvf/fft.hpp"

namespace hvf {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Default angular resolution.  Power of two, large enough that every
/// analytic profile used by the library is resolved to machine precision.
inline constexpr std::size_t default_n_grid = 1024;

/// Hard floor for pointwise division on the circle.  A denominator sample
/// below this magnitude is treated as an actual zero of the denominator
/// (a transversality failure), not as roundoff.
inline constexpr double division_floor = 1e-12;

/// Relative threshold under which a local minimum of |f| counts as a
/// tangential zero.
inline constexpr double tangential_rel_tol = 1e-10;

/// Relative threshold for deciding that a derivative is nonzero at a root
/// when computing the order of vanishing.
inline constexpr double order_rel_tol = 1e-6;

/// Largest derivative order probed before a zero is declared flat.
inline constexpr int order_cap = 12;

/// Reported order of a zero that stays flat through order_cap derivatives.
inline constexpr int order_infinite = -1;

/**
 * A 2 pi periodic function known through equispaced samples and the
 * matching Fourier coefficients.  Values are immutable after
 * construction; all calculus is spectral.
 *
 * Harmonics are indexed j in [-n/2, n/2].  The two Nyquist harmonics
 * share a single FFT bin; evaluation splits that bin symmetrically,
 * which reproduces the samples exactly and keeps real data real.
 */
class PeriodicFn {
 public:
  PeriodicFn() = default;

  static PeriodicFn from_samples(std::vector<cplx> samples) {
    validate_grid(samples.size());
    for (const cplx& s : samples)
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw std::invalid_argument("PeriodicFn: non-finite sample");
    PeriodicFn f;
    f.coeffs_ = samples;
    detail::fft_radix2(f.coeffs_, false);
    const double inv = 1.0 / double(samples.size());
    for (cplx& c : f.coeffs_) c *= inv;
    f.samples_ = std::move(samples);
    return f;
  }

  /// Build from index-tagged harmonics.  |j| < n_grid/2 is required so the
  /// stored spectrum is unambiguous.
  static PeriodicFn from_coeffs(const std::vector<std::pair<long, cplx>>& modes,
                                std::size_t n_grid = default_n_grid) {
    validate_grid(n_grid);
    std::vector<cplx> bins(n_grid, cplx(0.0, 0.0));
    const long half = long(n_grid) / 2;
    for (const auto& [j, c] : modes) {
      if (j <= -half || j >= half)
        throw std::invalid_argument("PeriodicFn: harmonic index out of range for grid");
      bins[std::size_t((j + long(n_grid)) % long(n_grid))] += c;
    }
    return from_bins(std::move(bins));
  }

  std::size_t n_grid() const { return samples_.size(); }
  const std::vector<cplx>& samples() const { return samples_; }
  const std::vector<cplx>& bins() const { return coeffs_; }

  double grid_theta(std::size_t k) const { return two_pi * double(k) / double(n_grid()); }

  /// Coefficient of e^{i j theta}.  The Nyquist harmonics j = +-n/2 each
  /// report half of the shared bin.
  cplx coeff(long j) const {
    const long n = long(n_grid());
    const long half = n / 2;
    if (j > half || j < -half) return cplx(0.0, 0.0);
    if (j == half || j == -half) return 0.5 * coeffs_[std::size_t(half)];
    return coeffs_[std::size_t((j + n) % n)];
  }

  /// Trigonometric interpolation at an arbitrary angle.
  cplx operator()(double theta) const {
    const long n = long(n_grid());
    const long half = n / 2;
    const cplx w = std::polar(1.0, theta);
    cplx pos(0.0, 0.0), neg(0.0, 0.0);
    cplx wp = w, wn = std::conj(w);
    for (long j = 1; j < half; ++j) {
      pos += coeffs_[std::size_t(j)] * wp;
      neg += coeffs_[std::size_t(n - j)] * wn;
      if ((j & 63) == 63) {  // periodically resynchronize the rotators
        wp = std::polar(1.0, double(j + 1) * theta);
        wn = std::conj(wp);
      } else {
        wp *= w;
        wn *= std::conj(w);
      }
    }
    cplx out = coeffs_[0] + pos + neg;
    out += coeffs_[std::size_t(half)] * std::cos(double(half) * theta);
    return out;
  }

  static PeriodicFn from_bins(std::vector<cplx> bins) {
    validate_grid(bins.size());
    PeriodicFn f;
    f.samples_ = bins;
    detail::fft_radix2(f.samples_, true);
    // inverse FFT convention here divides by n, so undo it: bins are 1/n scaled
    for (cplx& s : f.samples_) s *= double(bins.size());
    f.coeffs_ = std::move(bins);
    return f;
  }

 private:
  static void validate_grid(std::size_t n) {
    if (n < 16 || !detail::is_pow2(n))
      throw std::invalid_argument("PeriodicFn: grid size must be a power of two >= 16");
  }

  std::vector<cplx> samples_;
  std::vector<cplx> coeffs_;
};

inline PeriodicFn pf_build(const std::function<cplx(double)>& fn,
                           std::size_t n_grid = default_n_grid) {
  if (n_grid < 16 || !detail::is_pow2(n_grid))
    throw std::invalid_argument("pf_build: grid size must be a power of two >= 16");
  std::vector<cplx> s(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k)
    s[k] = fn(two_pi * double(k) / double(n_grid));
  return PeriodicFn::from_samples(std::move(s));
}

inline PeriodicFn pf_const(cplx value, std::size_t n_grid = default_n_grid) {
  return pf_build([value](double) { return value; }, n_grid);
}

inline cplx pf_eval(const PeriodicFn& f, double theta) { return f(theta); }

inline cplx pf_mean(const PeriodicFn& f) { return f.coeff(0); }

/// Sup norm over the stored grid.
inline double pf_sup(const PeriodicFn& f) {
  double m = 0.0;
  for (const cplx& s : f.samples()) m = std::max(m, std::abs(s));
  return m;
}

inline bool pf_is_real(const PeriodicFn& f, double tol = 1e-10) {
  double mi = 0.0;
  for (const cplx& s : f.samples()) mi = std::max(mi, std::abs(s.imag()));
  return mi <= tol * std::max(1.0, pf_sup(f));
}

inline PeriodicFn pf_upsample(const PeriodicFn& f, std::size_t target) {
  const std::size_t n = f.n_grid();
  if (target == n) return f;
  if (target < n || !detail::is_pow2(target))
    throw std::invalid_argument("pf_upsample: target must be a power of two >= current grid");
  std::vector<cplx> bins(target, cplx(0.0, 0.0));
  const long half = long(n) / 2;
  for (long j = -half + 1; j < half; ++j)
    bins[std::size_t((j + long(target)) % long(target))] = f.bins()[std::size_t((j + long(n)) % long(n))];
  const cplx nyq = 0.5 * f.bins()[std::size_t(half)];
  bins[std::size_t(half)] += nyq;
  bins[std::size_t(long(target) - half)] += nyq;
  return PeriodicFn::from_bins(std::move(bins));
}

namespace detail {

inline std::size_t common_grid(const PeriodicFn& a, const PeriodicFn& b) {
  return std::max(a.n_grid(), b.n_grid());
}

template <typename Op>
PeriodicFn pointwise(const PeriodicFn& a, const PeriodicFn& b, std::size_t n, Op op) {
  const PeriodicFn ua = pf_upsample(a, n);
  const PeriodicFn ub = pf_upsample(b, n);
  std::vector<cplx> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = op(ua.samples()[k], ub.samples()[k]);
  return PeriodicFn::from_samples(std::move(s));
}

template <typename Op>
PeriodicFn map_samples(const PeriodicFn& a, Op op) {
  std::vector<cplx> s(a.samples());
  for (cplx& x : s) x = op(x);
  return PeriodicFn::from_samples(std::move(s));
}

}  // namespace detail

inline PeriodicFn operator+(const PeriodicFn& a, const PeriodicFn& b) {
  return detail::pointwise(a, b, detail::common_grid(a, b), std::plus<cplx>());
}
inline PeriodicFn operator-(const PeriodicFn& a, const PeriodicFn& b) {
  return detail::pointwise(a, b, detail::common_grid(a, b), std::minus<cplx>());
}

/// Products upsample to twice the larger grid first: the product of two
/// band-limited functions is band-limited to the sum of the bands, so the
/// zero-padded grid keeps polynomial data alias-free.
inline PeriodicFn operator*(const PeriodicFn& a, const PeriodicFn& b) {
  return detail::pointwise(a, b, 2 * detail::common_grid(a, b), std::multiplies<cplx>());
}

/// Pointwise quotient on the doubled grid.  Any denominator sample with
/// magnitude below division_floor raises precondition_error: a vanishing
/// denominator is a structural failure, not a numerical one.
inline PeriodicFn operator/(const PeriodicFn& a, const PeriodicFn& b) {
  const std::size_t n = 2 * detail::common_grid(a, b);
  const PeriodicFn ub = pf_upsample(b, n);
  double dmin = std::numeric_limits<double>::infinity();
  for (const cplx& s : ub.samples()) dmin = std::min(dmin, std::abs(s));
  if (dmin < division_floor)
    throw precondition_error("division floor: min |denominator| = " + std::to_string(dmin) +
                             " < 1e-12 on the circle (vanishing denominator)");
  return detail::pointwise(a, b, n, [](cplx x, cplx y) { return x / y; });
}

inline PeriodicFn operator*(const PeriodicFn& a, cplx s) {
  return detail::map_samples(a, [s](cplx x) { return x * s; });
}
inline PeriodicFn operator*(cplx s, const PeriodicFn& a) { return a * s; }
inline PeriodicFn operator*(const PeriodicFn& a, double s) { return a * cplx(s, 0.0); }
inline PeriodicFn operator*(double s, const PeriodicFn& a) { return a * cplx(s, 0.0); }
inline PeriodicFn operator+(const PeriodicFn& a, cplx s) {
  return detail::map_samples(a, [s](cplx x) { return x + s; });
}
inline PeriodicFn operator-(const PeriodicFn& a, cplx s) { return a + (-s); }

inline PeriodicFn pf_conj(const PeriodicFn& a) {
  return detail::map_samples(a, [](cplx x) { return std::conj(x); });
}
inline PeriodicFn pf_re(const PeriodicFn& a) {
  return detail::map_samples(a, [](cplx x) { return cplx(x.real(), 0.0); });
}
inline PeriodicFn pf_im(const PeriodicFn& a) {
  return detail::map_samples(a, [](cplx x) { return cplx(x.imag(), 0.0); });
}
inline PeriodicFn pf_abs(const PeriodicFn& a) {
  return detail::map_samples(a, [](cplx x) { return cplx(std::abs(x), 0.0); });
}

/// Pointwise exponential.  exp(f) is not band limited even when f is, so the
/// result is sampled on a grid at least twice as fine as f's (and at least
/// n_min points, rounded up to a power of two) before re-interpolating.
inline PeriodicFn pf_exp(const PeriodicFn& a, std::size_t n_min = 0) {
  std::size_t n = std::max<std::size_t>(2 * a.n_grid(), 8);
  while (n < n_min) n *= 2;
  const PeriodicFn up = pf_upsample(a, n);
  std::vector<cplx> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = std::exp(up.samples()[k]);
  return PeriodicFn::from_samples(std::move(s));
}

/// Spectral derivative: harmonic j picks up the factor i j.  The shared
/// Nyquist bin is zeroed, the standard convention for an odd multiplier.
inline PeriodicFn pf_derivative(const PeriodicFn& f) {
  const long n = long(f.n_grid());
  std::vector<cplx> bins(f.bins());
  for (long k = 0; k < n; ++k) {
    const long j = (k <= n / 2) ? k : k - n;
    bins[std::size_t(k)] *= (k == n / 2) ? cplx(0.0, 0.0) : cplx(0.0, double(j));
  }
  return PeriodicFn::from_bins(std::move(bins));
}

/// Periodic antiderivative of the mean-free part, with no constant term:
/// harmonic j maps to c_j/(i j), harmonic 0 maps to 0.
inline PeriodicFn pf_antiderivative_zero_mean(const PeriodicFn& f) {
  const long n = long(f.n_grid());
  std::vector<cplx> bins(f.bins());
  bins[0] = cplx(0.0, 0.0);
  for (long k = 1; k < n; ++k) {
    const long j = (k <= n / 2) ? k : k - n;
    bins[std::size_t(k)] = (k == n / 2) ? cplx(0.0, 0.0)
                                        : bins[std::size_t(k)] / cplx(0.0, double(j));
  }
  return PeriodicFn::from_bins(std::move(bins));
}

/// Periodic antiderivative of the mean-free part, normalized to vanish at
/// theta = 0: theta -> integral_0^theta (f - mean f).
inline PeriodicFn pf_antiderivative(const PeriodicFn& f) {
  PeriodicFn a = pf_antiderivative_zero_mean(f);
  return a - a(0.0);
}

struct ZeroInfo {
  double theta = 0.0;
  int order = 1;            // order_infinite when flat through order_cap
  bool sign_change = true;  // false for tangential zeros
};

struct Extremum {
  double theta = 0.0;
  double value = 0.0;
  bool is_max = false;
};

namespace detail {

inline double wrap_angle(double t) {
  t = std::fmod(t, two_pi);
  return t < 0.0 ? t + two_pi : t;
}

/// Bisection for a sign change of Re f on (a, b); the bracket endpoints
/// must straddle zero.  Returns the midpoint once |b - a| <= 1e-12.
inline double bisect_real(const PeriodicFn& f, double a, double b) {
  double fa = f(a).real();
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m).real();
    if (fm == 0.0) return m;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

/// Golden-section minimization of |f| on (a, b).
inline double golden_min_abs(const PeriodicFn& f, double a, double b) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = std::abs(f(c)), fd = std::abs(f(d));
  for (int it = 0; it < 120 && (b - a) > 1e-13; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = std::abs(f(c));
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = std::abs(f(d));
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/**
 * Zero set of a real-valued periodic function, with the order of each zero
 * and a sign-change flag.  Transversal roots are located by a sign scan on
 * a four-fold refined grid followed by bisection; tangential roots (local
 * minima of |f| below tangential_rel_tol times the sup norm) are refined
 * by golden-section search.
 *
 * scale_hint, when positive, supplies the natural magnitude of f; the
 * function counts as identically zero when its sup norm falls below
 * 1e-12 times that scale, which is reported as a precondition_error
 * (an everywhere-degenerate zero set cannot be analyzed).
 */
inline std::vector<ZeroInfo> pf_zeros(const PeriodicFn& f, double scale_hint = -1.0) {
  if (!pf_is_real(f))
    throw std::invalid_argument("pf_zeros: function must be real-valued");

  const std::size_t m = 4 * f.n_grid();
  const PeriodicFn g = pf_upsample(f, m);
  double sup = 0.0;
  for (const cplx& s : g.samples()) sup = std::max(sup, std::abs(s.real()));
  const double scale = scale_hint > 0.0 ? scale_hint : sup;
  if (sup <= 1e-12 * scale || sup == 0.0)
    throw precondition_error("zero set is the whole circle: sup |f| = " + std::to_string(sup) +
                             " <= 1e-12 * scale (degenerate zero set)");

  const double tiny = 1e-14 * sup;
  const auto cls = [&](double v) { return v > tiny ? 1 : (v < -tiny ? -1 : 0); };
  const double h = two_pi / double(m);

  std::vector<double> roots;
  std::vector<bool> flips;

  // step 1: walk runs of near-zero samples and strict sign changes
  std::vector<int> c(m);
  for (std::size_t k = 0; k < m; ++k) c[k] = cls(g.samples()[k].real());
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t k1 = (k + 1) % m;
    if (c[k] != 0 && c[k1] != 0 && c[k] != c[k1]) {
      roots.push_back(detail::bisect_real(g, g.grid_theta(k), g.grid_theta(k) + h));
      flips.push_back(true);
    } else if (c[k] != 0 && c[k1] == 0) {
      // run of flat samples: find its end and classify by the flanking signs
      std::size_t k2 = k1;
      std::size_t len = 0;
      while (c[k2] == 0 && len < m) { k2 = (k2 + 1) % m; ++len; }
      const double a = g.grid_theta(k);
      const double b = g.grid_theta(k) + h * double(len + 1);
      if (c[k2] != c[k]) {
        roots.push_back(detail::bisect_real(g, a, b));
        flips.push_back(true);
      } else {
        roots.push_back(detail::golden_min_abs(g, a, b));
        flips.push_back(false);
      }
    }
  }

  // step 2: tangential zeros.  Every local minimum of |f| on the refined
  // grid is golden-section refined first; the threshold test runs on the
  // refined value, since the sampled minimum of a quadratic zero sits at
  // O(h^2) even when the zero itself is exact.
  for (std::size_t k = 0; k < m; ++k) {
    const double v = std::abs(g.samples()[k].real());
    const double vl = std::abs(g.samples()[(k + m - 1) % m].real());
    const double vr = std::abs(g.samples()[(k + 1) % m].real());
    if (v <= vl && v <= vr && c[k] != 0) {
      const double t = detail::golden_min_abs(g, g.grid_theta(k) - h, g.grid_theta(k) + h);
      bool dup = false;
      for (double r : roots)
        if (std::abs(detail::wrap_angle(r - t + pi) - pi) < 2.0 * h) dup = true;
      if (!dup && std::abs(g(t)) < tangential_rel_tol * sup) {
        roots.push_back(t);
        flips.push_back(false);
      }
    }
  }

  // step 3: orders via successive spectral derivatives
  std::vector<PeriodicFn> derivs;
  derivs.reserve(order_cap);
  derivs.push_back(pf_derivative(f));
  for (int d = 1; d < order_cap; ++d) derivs.push_back(pf_derivative(derivs.back()));

  std::vector<ZeroInfo> out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    ZeroInfo z;
    z.theta = detail::wrap_angle(roots[i]);
    z.sign_change = flips[i];
    z.order = order_infinite;
    for (int d = 0; d < order_cap; ++d) {
      if (std::abs(derivs[std::size_t(d)](z.theta)) >
          order_rel_tol * pf_sup(derivs[std::size_t(d)])) {
        z.order = d + 1;
        break;
      }
    }
    out.push_back(z);
  }

  std::sort(out.begin(), out.end(),
            [](const ZeroInfo& a, const ZeroInfo& b) { return a.theta < b.theta; });
  // merge duplicates produced by the wrap-around
  std::vector<ZeroInfo> dedup;
  for (const ZeroInfo& z : out) {
    bool close = false;
    for (const ZeroInfo& w : dedup)
      if (std::abs(detail::wrap_angle(z.theta - w.theta + pi) - pi) < 1e-9) close = true;
    if (!close) dedup.push_back(z);
  }
  return dedup;
}

/// Local extrema of a real-valued function, via the zero set of the
/// spectral derivative.  A constant function reports no extrema.
inline std::vector<Extremum> pf_extrema(const PeriodicFn& f) {
  if (!pf_is_real(f))
    throw std::invalid_argument("pf_extrema: function must be real-valued");
  const PeriodicFn df = pf_derivative(f);
  if (pf_sup(df) <= 1e-12 * std::max(1.0, pf_sup(f))) return {};
  const PeriodicFn d2f = pf_derivative(df);
  std::vector<Extremum> out;
  for (const ZeroInfo& z : pf_zeros(df)) {
    Extremum e;
    e.theta = z.theta;
    e.value = f(z.theta).real();
    const double curv = d2f(z.theta).real();
    if (std::abs(curv) > order_rel_tol * pf_sup(d2f)) {
      e.is_max = curv < 0.0;
    } else {
      const double h = two_pi / double(4 * f.n_grid());
      e.is_max = f(z.theta).real() >= std::max(f(z.theta - h).real(), f(z.theta + h).real());
    }
    out.push_back(e);
  }
  return out;
}

/// Global minimum and maximum (theta, value) pairs.  Falls back to the grid
/// argmin/argmax when the function is constant to grid precision.
inline std::pair<Extremum, Extremum> pf_min_max(const PeriodicFn& f) {
  std::vector<Extremum> ex = pf_extrema(f);
  Extremum lo, hi;
  if (ex.empty()) {
    lo.theta = hi.theta = 0.0;
    lo.value = hi.value = f(0.0).real();
    for (std::size_t k = 0; k < f.n_grid(); ++k) {
      const double v = f.samples()[k].real();
      if (v < lo.value) { lo.value = v; lo.theta = f.grid_theta(k); }
      if (v > hi.value) { hi.value = v; hi.theta = f.grid_theta(k); }
    }
  } else {
    lo = ex.front();
    hi = ex.front();
    for (const Extremum& e : ex) {
      if (e.value < lo.value) lo = e;
      if (e.value > hi.value) hi = e;
    }
  }
  lo.is_max = false;
  hi.is_max = true;
  return {lo, hi};
}

}  // namespace hvf

#endif  // HVF_PERIODIC_HPP

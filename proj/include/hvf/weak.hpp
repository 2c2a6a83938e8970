// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_WEAK_HPP
#define HVF_WEAK_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hvf/errors.hpp"
#include "hvf/field.hpp"
#include "hvf/integral.hpp"
#include "hvf/periodic.hpp"
#include "hvf/solve.hpp"

/**
 * Numerical distribution pairings.
 *
 * The objects here pair locally integrable solutions (radial power times a
 * periodic profile) against a closed-form family of test functions, apply
 * the transpose of a homogeneous field to a test function, evaluate the
 * low-regularity pairing that replaces the plain integral when the radial
 * power is too singular, and check the fundamental-solution identity for
 * divergence-free fields of integer degree.
 *
 * Test functions are polynomial times a radial bump.  The family is closed
 * under dilation, translation and scalar multiple, and every derivative the
 * pairings need (Cartesian partials to total order 12, radial derivatives
 * to order 13) is computed exactly through truncated Taylor arithmetic, not
 * by finite differences.
 */

namespace hvf {

/// Highest Cartesian partial order a TestFn exposes.
inline constexpr int testfn_max_order = 12;

/// Highest radial derivative order the internal tables provide.  One more
/// than the exposed order so d/dr chains stay exact at the top order.
inline constexpr int testfn_max_radial = 13;

namespace detail {

// ---------------------------------------------------------------------------
// Truncated Taylor arithmetic in one variable (radial jets).
// ---------------------------------------------------------------------------

inline constexpr int jet1_cap = 16;

struct Jet1 {
  int n = 0;  // highest tracked order, < jet1_cap
  std::array<double, jet1_cap> a{};
};

inline Jet1 jet1_const(double v, int n) {
  Jet1 j;
  j.n = n;
  j.a[0] = v;
  return j;
}

/// Affine jet c0 + c1 t.
inline Jet1 jet1_affine(double c0, double c1, int n) {
  Jet1 j = jet1_const(c0, n);
  if (n >= 1) j.a[1] = c1;
  return j;
}

inline Jet1 operator+(const Jet1& x, const Jet1& y) {
  Jet1 r = x;
  for (int m = 0; m <= r.n; ++m) r.a[std::size_t(m)] += y.a[std::size_t(m)];
  return r;
}

inline Jet1 operator*(const Jet1& x, const Jet1& y) {
  Jet1 r;
  r.n = x.n;
  for (int i = 0; i <= x.n; ++i) {
    if (x.a[std::size_t(i)] == 0.0) continue;
    for (int j = 0; i + j <= x.n; ++j)
      r.a[std::size_t(i + j)] += x.a[std::size_t(i)] * y.a[std::size_t(j)];
  }
  return r;
}

inline Jet1 jet1_scale(Jet1 x, double c) {
  for (int m = 0; m <= x.n; ++m) x.a[std::size_t(m)] *= c;
  return x;
}

inline Jet1 jet1_addc(Jet1 x, double c) {
  x.a[0] += c;
  return x;
}

/// 1 / x with x(0) != 0.
inline Jet1 jet1_recip(const Jet1& x) {
  Jet1 r;
  r.n = x.n;
  r.a[0] = 1.0 / x.a[0];
  for (int m = 1; m <= x.n; ++m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j)
      s += x.a[std::size_t(j)] * r.a[std::size_t(m - j)];
    r.a[std::size_t(m)] = -r.a[0] * s;
  }
  return r;
}

/// exp(x); the classic convolution recurrence from (e^x)' = x' e^x.
inline Jet1 jet1_exp(const Jet1& x) {
  Jet1 r;
  r.n = x.n;
  r.a[0] = std::exp(x.a[0]);
  for (int m = 1; m <= x.n; ++m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j)
      s += double(j) * x.a[std::size_t(j)] * r.a[std::size_t(m - j)];
    r.a[std::size_t(m)] = s / double(m);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Truncated Taylor arithmetic in two variables (Cartesian jets).
// ---------------------------------------------------------------------------

inline constexpr int jet2_cap = testfn_max_order + 2;

struct Jet2 {
  int n = 0;  // highest tracked total order, < jet2_cap
  std::array<std::array<double, jet2_cap>, jet2_cap> a{};
};

inline Jet2 jet2_const(double v, int n) {
  Jet2 j;
  j.n = n;
  j.a[0][0] = v;
  return j;
}

/// Affine jet c0 + tx (deriv == 0) or c0 + ty (deriv == 1).
inline Jet2 jet2_var(double c0, int deriv, int n) {
  Jet2 j = jet2_const(c0, n);
  if (n >= 1) {
    if (deriv == 0)
      j.a[1][0] = 1.0;
    else
      j.a[0][1] = 1.0;
  }
  return j;
}

inline Jet2 operator+(const Jet2& x, const Jet2& y) {
  Jet2 r = x;
  for (int i = 0; i <= r.n; ++i)
    for (int j = 0; i + j <= r.n; ++j)
      r.a[std::size_t(i)][std::size_t(j)] += y.a[std::size_t(i)][std::size_t(j)];
  return r;
}

inline Jet2 operator*(const Jet2& x, const Jet2& y) {
  Jet2 r;
  r.n = x.n;
  for (int i = 0; i <= x.n; ++i)
    for (int j = 0; i + j <= x.n; ++j) {
      const double v = x.a[std::size_t(i)][std::size_t(j)];
      if (v == 0.0) continue;
      for (int p = 0; i + p <= x.n; ++p)
        for (int q = 0; i + j + p + q <= x.n; ++q)
          r.a[std::size_t(i + p)][std::size_t(j + q)] +=
              v * y.a[std::size_t(p)][std::size_t(q)];
    }
  return r;
}

inline Jet2 jet2_addc(Jet2 x, double c) {
  x.a[0][0] += c;
  return x;
}

inline Jet2 jet2_recip(const Jet2& x) {
  Jet2 r;
  r.n = x.n;
  const double inv = 1.0 / x.a[0][0];
  r.a[0][0] = inv;
  for (int t = 1; t <= x.n; ++t)
    for (int i = t; i >= 0; --i) {
      const int j = t - i;
      double s = 0.0;
      for (int p = 0; p <= i; ++p)
        for (int q = 0; q <= j; ++q) {
          if (p == 0 && q == 0) continue;
          s += x.a[std::size_t(p)][std::size_t(q)] *
               r.a[std::size_t(i - p)][std::size_t(j - q)];
        }
      r.a[std::size_t(i)][std::size_t(j)] = -inv * s;
    }
  return r;
}

inline Jet2 jet2_exp(const Jet2& x) {
  Jet2 r;
  r.n = x.n;
  r.a[0][0] = std::exp(x.a[0][0]);
  for (int t = 1; t <= x.n; ++t)
    for (int i = t; i >= 0; --i) {
      const int j = t - i;
      double s = 0.0;
      if (i > 0) {
        // From d/dx (e^f) = f_x e^f, matching coefficients of x^{i-1} y^j.
        for (int p = 1; p <= i; ++p)
          for (int q = 0; q <= j; ++q)
            s += double(p) * x.a[std::size_t(p)][std::size_t(q)] *
                 r.a[std::size_t(i - p)][std::size_t(j - q)];
        r.a[std::size_t(i)][std::size_t(j)] = s / double(i);
      } else {
        for (int q = 1; q <= j; ++q)
          s += double(q) * x.a[0][std::size_t(q)] *
               r.a[0][std::size_t(j - q)];
        r.a[0][std::size_t(j)] = s / double(j);
      }
    }
  return r;
}

/// Horner evaluation of a coefficient table sum c[a][b] X^a Y^b in jet
/// arithmetic.  Works for Jet1 and Jet2 alike.
template <typename Jet, typename AddC>
Jet jet_poly(const std::vector<std::vector<double>>& c, const Jet& X,
             const Jet& Y, const Jet& zero, AddC addc) {
  Jet acc = zero;
  for (std::size_t a = c.size(); a-- > 0;) {
    Jet row = zero;
    for (std::size_t b = c[a].size(); b-- > 0;) row = addc(row * Y, c[a][b]);
    acc = acc * X + row;
  }
  return acc;
}

inline unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0ull;
  unsigned long long r = 1ull;
  for (int i = 1; i <= k; ++i)
    r = r * (unsigned long long)(n - k + i) / (unsigned long long)(i);
  return r;
}

/// Falling factorial c (c-1) ... (c-j+1) for a complex base.
inline cplx falling(cplx c, int j) {
  cplx r(1.0, 0.0);
  for (int i = 0; i < j; ++i) r *= c - cplx(double(i), 0.0);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Test functions.
// ---------------------------------------------------------------------------

/**
 * A compactly supported smooth test function
 *
 *   Phi(x, y) = P(x - cx, y - cy) * bump(|(x - cx, y - cy)| / r_supp)
 *
 * where P is a real polynomial and bump(s) = exp(1/(s^2 - 1)) for s < 1 and
 * 0 otherwise.  The support is the closed disc of radius r_supp around the
 * center.  All exposed derivatives are exact: Cartesian partials come from
 * bivariate truncated Taylor expansion, radial derivatives along a fixed
 * ray from univariate expansion in r.  The family is closed under dilation
 * (rescaled), translation (shifted) and scalar multiple (scaled).
 */
class TestFn {
 public:
  TestFn(std::vector<std::vector<double>> coeff, double r_supp,
         double center_x = 0.0, double center_y = 0.0)
      : c_(std::move(coeff)), rs_(r_supp), cx_(center_x), cy_(center_y) {
    if (!(rs_ > 0.0))
      throw precondition_error("TestFn: support radius " +
                               std::to_string(rs_) + " must be > 0");
    if (c_.empty()) c_ = {{0.0}};
    std::size_t deg = 0;
    for (std::size_t a = 0; a < c_.size(); ++a)
      deg = std::max(deg, a + (c_[a].empty() ? 0 : c_[a].size() - 1));
    if (deg + 2 >= std::size_t(detail::jet2_cap))
      throw precondition_error("TestFn: polynomial degree " +
                               std::to_string(deg) + " exceeds " +
                               std::to_string(detail::jet2_cap - 3));
    // Coefficient tables of dP/dX and dP/dY, fixed once so the radial
    // derivative paths stay allocation-free per evaluation point.
    if (c_.size() > 1) {
      cdx_.resize(c_.size() - 1);
      for (std::size_t a = 1; a < c_.size(); ++a) {
        cdx_[a - 1].resize(c_[a].size());
        for (std::size_t b = 0; b < c_[a].size(); ++b)
          cdx_[a - 1][b] = double(a) * c_[a][b];
      }
    }
    cdy_.resize(c_.size());
    for (std::size_t a = 0; a < c_.size(); ++a)
      if (c_[a].size() > 1) {
        cdy_[a].resize(c_[a].size() - 1);
        for (std::size_t b = 1; b < c_[a].size(); ++b)
          cdy_[a][b - 1] = double(b) * c_[a][b];
      }
  }

  double support_radius() const { return rs_; }
  double center_x() const { return cx_; }
  double center_y() const { return cy_; }
  const std::vector<std::vector<double>>& coefficients() const { return c_; }

  /// Largest distance from the origin to a support point; radial
  /// quadratures over (0, outer_radius] therefore see all of Phi.
  double outer_radius() const { return std::hypot(cx_, cy_) + rs_; }

  /// Smallest distance from the origin to a support point (zero when the
  /// support contains the origin).  Rays from the origin cross the support
  /// circle no closer than this, so radial rules grade a panel chain into
  /// it alongside the outer edge.
  double inner_radius() const {
    return std::max(std::hypot(cx_, cy_) - rs_, 0.0);
  }

  double operator()(double x, double y) const {
    const double dx = x - cx_, dy = y - cy_;
    const double u2 = (dx * dx + dy * dy) / (rs_ * rs_);
    if (u2 >= 1.0) return 0.0;
    double p = 0.0;
    for (std::size_t a = c_.size(); a-- > 0;) {
      double row = 0.0;
      for (std::size_t b = c_[a].size(); b-- > 0;) row = row * dy + c_[a][b];
      p = p * dx + row;
    }
    return p * std::exp(1.0 / (u2 - 1.0));
  }

  /// {Phi, dPhi/dx, dPhi/dy}; the hot path of the first-order pairings.
  std::array<double, 3> value_and_gradient(double x, double y) const {
    const double dx = x - cx_, dy = y - cy_;
    const double u2 = (dx * dx + dy * dy) / (rs_ * rs_);
    if (u2 >= 1.0) return {0.0, 0.0, 0.0};
    double p = 0.0, px = 0.0, py = 0.0;
    for (std::size_t a = c_.size(); a-- > 0;) {
      double row = 0.0, rowy = 0.0;
      for (std::size_t b = c_[a].size(); b-- > 0;) {
        rowy = rowy * dy + row;
        row = row * dy + c_[a][b];
      }
      px = px * dx + p;
      p = p * dx + row;
      py = py * dx + rowy;
    }
    const double w = u2 - 1.0;
    const double bump = std::exp(1.0 / w);
    const double dchain = -2.0 / (rs_ * rs_ * w * w);  // d(1/w)/d(u2) * du2
    return {p * bump, (px + p * dchain * dx) * bump,
            (py + p * dchain * dy) * bump};
  }

  /// Exact partials d^{ax+ay} Phi / dx^{ax} dy^{ay}, ax + ay <= 12.
  double partial(int ax, int ay, double x, double y) const {
    if (ax < 0 || ay < 0 || ax + ay > testfn_max_order)
      throw precondition_error(
          "TestFn: partial order " + std::to_string(ax) + " + " +
          std::to_string(ay) + " exceeds the supported order " +
          std::to_string(testfn_max_order));
    const detail::Jet2 j = cartesian_jet(ax + ay, x, y);
    double fct = 1.0;
    for (int i = 2; i <= ax; ++i) fct *= double(i);
    for (int i = 2; i <= ay; ++i) fct *= double(i);
    return j.a[std::size_t(ax)][std::size_t(ay)] * fct;
  }

  /// All partials of total order <= order as a table t[ax][ay].
  std::vector<std::vector<double>> partial_table(int order, double x,
                                                 double y) const {
    if (order < 0 || order > testfn_max_order)
      throw precondition_error("TestFn: partial table order " +
                               std::to_string(order) +
                               " exceeds the supported order " +
                               std::to_string(testfn_max_order));
    const detail::Jet2 j = cartesian_jet(order, x, y);
    std::vector<std::vector<double>> t(std::size_t(order) + 1);
    std::vector<double> fct(std::size_t(order) + 1, 1.0);
    for (int i = 1; i <= order; ++i)
      fct[std::size_t(i)] = fct[std::size_t(i - 1)] * double(i);
    for (int ax = 0; ax <= order; ++ax) {
      t[std::size_t(ax)].resize(std::size_t(order - ax) + 1);
      for (int ay = 0; ax + ay <= order; ++ay)
        t[std::size_t(ax)][std::size_t(ay)] =
            j.a[std::size_t(ax)][std::size_t(ay)] * fct[std::size_t(ax)] *
            fct[std::size_t(ay)];
    }
    return t;
  }

  /// d^n Phi / dr^n along the ray of angle theta, n <= 12.
  double radial(int n, double r, double theta) const {
    if (n < 0 || n > testfn_max_order)
      throw precondition_error("TestFn: radial order " + std::to_string(n) +
                               " exceeds the supported order " +
                               std::to_string(testfn_max_order));
    return radial_derivs(n, r, theta)[std::size_t(n)];
  }

  /// Radial derivatives d^m Phi / dr^m for m = 0..order (order <= 13).
  std::array<double, detail::jet1_cap> radial_derivs(int order, double r,
                                                     double theta) const {
    require_radial_order(order);
    const detail::Jet1 phi = radial_jet(order, r, theta).first;
    return to_derivs(phi);
  }

  /// Radial derivatives d^m (dPhi/dtheta) / dr^m for m = 0..order.  The
  /// theta derivative is taken about the origin's polar angle, so it sees
  /// the center offset of a shifted bump.
  std::array<double, detail::jet1_cap> radial_derivs_theta(
      int order, double r, double theta) const {
    require_radial_order(order);
    using detail::Jet1;
    const double ct = std::cos(theta), st = std::sin(theta);
    const Jet1 X = detail::jet1_affine(r * ct - cx_, ct, order);
    const Jet1 Y = detail::jet1_affine(r * st - cy_, st, order);
    const Jet1 zero = detail::jet1_const(0.0, order);
    const Jet1 u2 = jet1_scale(X * X + Y * Y, 1.0 / (rs_ * rs_));
    if (u2.a[0] >= 1.0) return {};
    const Jet1 h = jet1_recip(jet1_addc(u2, -1.0));
    const Jet1 bump = jet1_exp(h);
    // dP/dtheta = X_theta dP/dX + Y_theta dP/dY with X_theta = -(r+t) sin,
    // Y_theta = (r+t) cos.
    const auto addc = [](detail::Jet1 j, double v) {
      return detail::jet1_addc(j, v);
    };
    const Jet1 P = detail::jet_poly(c_, X, Y, zero, addc);
    const Jet1 Px =
        cdx_.empty() ? zero : detail::jet_poly(cdx_, X, Y, zero, addc);
    const Jet1 Py = detail::jet_poly(cdy_, X, Y, zero, addc);
    const Jet1 Xt = detail::jet1_affine(-r * st, -st, order);
    const Jet1 Yt = detail::jet1_affine(r * ct, ct, order);
    const Jet1 Pt = Xt * Px + Yt * Py;
    // d(bump)/dtheta = bump * (-h^2) * d(u2)/dtheta, and d(u2)/dtheta =
    // 2 (r+t) (cx sin - cy cos) / r_supp^2.
    const Jet1 u2t = detail::jet1_affine(
        2.0 * r * (cx_ * st - cy_ * ct) / (rs_ * rs_),
        2.0 * (cx_ * st - cy_ * ct) / (rs_ * rs_), order);
    const Jet1 phit = Pt * bump + jet1_scale(P * bump * h * h * u2t, -1.0);
    return to_derivs(phit);
  }

  /// Phi(x/s, y/s); dilation by s > 0 stays in the family.
  TestFn rescaled(double s) const {
    if (!(s > 0.0))
      throw precondition_error("TestFn: rescale factor " + std::to_string(s) +
                               " must be > 0");
    std::vector<std::vector<double>> c = c_;
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = 0; b < c[a].size(); ++b)
        c[a][b] /= std::pow(s, double(a + b));
    return TestFn(std::move(c), rs_ * s, cx_ * s, cy_ * s);
  }

  /// Phi(x - dx, y - dy).
  TestFn shifted(double dx, double dy) const {
    return TestFn(c_, rs_, cx_ + dx, cy_ + dy);
  }

  /// c * Phi.
  TestFn scaled(double factor) const {
    std::vector<std::vector<double>> c = c_;
    for (auto& row : c)
      for (double& v : row) v *= factor;
    return TestFn(std::move(c), rs_, cx_, cy_);
  }

 private:
  static void require_radial_order(int order) {
    if (order < 0 || order > testfn_max_radial)
      throw precondition_error("TestFn: radial order " +
                               std::to_string(order) +
                               " exceeds the supported order " +
                               std::to_string(testfn_max_radial));
  }

  std::array<double, detail::jet1_cap> to_derivs(
      const detail::Jet1& j) const {
    std::array<double, detail::jet1_cap> d{};
    double fct = 1.0;
    for (int m = 0; m <= j.n; ++m) {
      if (m > 1) fct *= double(m);
      d[std::size_t(m)] = j.a[std::size_t(m)] * fct;
    }
    return d;
  }

  std::pair<detail::Jet1, detail::Jet1> radial_jet(int order, double r,
                                                   double theta) const {
    using detail::Jet1;
    const double ct = std::cos(theta), st = std::sin(theta);
    const Jet1 X = detail::jet1_affine(r * ct - cx_, ct, order);
    const Jet1 Y = detail::jet1_affine(r * st - cy_, st, order);
    const Jet1 zero = detail::jet1_const(0.0, order);
    const Jet1 u2 = jet1_scale(X * X + Y * Y, 1.0 / (rs_ * rs_));
    if (u2.a[0] >= 1.0) return {zero, zero};
    const Jet1 h = jet1_recip(jet1_addc(u2, -1.0));
    const Jet1 bump = jet1_exp(h);
    const Jet1 P = detail::jet_poly(
        c_, X, Y, zero,
        [](Jet1 j, double v) { return detail::jet1_addc(j, v); });
    return {P * bump, bump};
  }

  detail::Jet2 cartesian_jet(int order, double x, double y) const {
    using detail::Jet2;
    const Jet2 X = detail::jet2_var(x - cx_, 0, order);
    const Jet2 Y = detail::jet2_var(y - cy_, 1, order);
    const Jet2 zero = detail::jet2_const(0.0, order);
    Jet2 u2 = X * X + Y * Y;
    for (int i = 0; i <= order; ++i)
      for (int j = 0; i + j <= order; ++j)
        u2.a[std::size_t(i)][std::size_t(j)] /= rs_ * rs_;
    if (u2.a[0][0] >= 1.0) return zero;
    const Jet2 h = detail::jet2_recip(detail::jet2_addc(u2, -1.0));
    const Jet2 bump = detail::jet2_exp(h);
    const Jet2 P = detail::jet_poly(
        c_, X, Y, zero,
        [](Jet2 j, double v) { return detail::jet2_addc(j, v); });
    return P * bump;
  }

  std::vector<std::vector<double>> c_;
  std::vector<std::vector<double>> cdx_;
  std::vector<std::vector<double>> cdy_;
  double rs_;
  double cx_;
  double cy_;
};

/// Deterministic battery of random test functions: polynomial degree <= 3,
/// support radius in [0.6, 1.4], centered at the origin.
inline std::vector<TestFn> testfn_battery(std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> rad(0.6, 1.4);
  std::vector<TestFn> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::vector<double>> c(4);
    for (std::size_t a = 0; a < 4; ++a) {
      c[a].resize(4 - a);
      for (std::size_t b = 0; a + b < 4; ++b) c[a][b] = coef(rng);
    }
    // Keep the constant term away from zero so Phi(0) based checks have a
    // healthy scale.
    if (std::abs(c[0][0]) < 0.2) c[0][0] = c[0][0] < 0.0 ? -0.7 : 0.7;
    out.emplace_back(std::move(c), rad(rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature.
// ---------------------------------------------------------------------------

/// Quadrature layout: per radial segment, `panels` uniform backbone cells
/// whose end cells are subdivided geometrically (ratio 0.5, depth
/// `panels`) toward the segment endpoints, a fixed-order Gauss rule on
/// each panel, tensored with the n_theta-point trapezoid rule
/// (spectrally accurate on periodic data).  n_theta is a floor; the
/// pairing routines raise it to the coefficient grids of the field and,
/// for off-center test functions, by the angular sharpness of the
/// support circle seen from the origin.
struct QuadSpec {
  int panels = 40;
  int gauss_order = 16;
  std::size_t n_theta = 128;
};

namespace detail {

struct GaussRule {
  std::vector<double> x;  // nodes in (-1, 1)
  std::vector<double> w;
};

/// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
inline GaussRule gauss_legendre(int n) {
  GaussRule g;
  g.x.resize(std::size_t(n));
  g.w.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 =
            ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      const double dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 =
          ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
      p0 = p1;
      p1 = p2;
    }
    const double dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
    g.x[std::size_t(n - 1 - i)] = x;
    g.w[std::size_t(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

/// Radial integration range for pairings against a test function.  Every
/// weak-module integrand carries a factor of Phi or one of its
/// derivatives, so it vanishes identically below the inner support radius
/// and the rule starts there; when the support contains the origin the
/// range starts at 0, where the power and logarithm kernels concentrate.
inline std::vector<double> radial_breaks(const TestFn& phi) {
  const double inner = phi.inner_radius();
  const double outer = phi.outer_radius();
  if (inner > 1e-9 * outer) return {inner, outer};
  return {0.0, outer};
}

/// Integrates f(r, k, theta_k) over (breaks.front(), breaks.back()] x
/// [0, 2pi).  The integrand carries every radial factor itself (area
/// Jacobians included by the caller); theta runs over the trapezoid grid.
/// Each segment between consecutive breakpoints gets qs.panels uniform
/// backbone cells; rays from the origin cross the support circle of an
/// off-center test function at every radius of the segment, so the high
/// radial derivatives of the bump profile need fineness throughout, not
/// just near the endpoints.  The first and last cells are then subdivided
/// geometrically (ratio 0.5, depth qs.panels) toward the segment ends to
/// resolve endpoint kernels and the support-edge boundary layers.  The
/// stub below the deepest panel is kept except at r = 0, where dropping
/// it truncates only an integrable sliver.
template <typename F>
cplx graded_quad(const std::vector<double>& breaks, const QuadSpec& qs,
                 F&& f) {
  const GaussRule gl = gauss_legendre(qs.gauss_order);
  const double dth = two_pi / double(qs.n_theta);
  cplx acc(0.0, 0.0);
  const auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int gidx = 0; gidx < qs.gauss_order; ++gidx) {
      const double r = mid + half * gl.x[std::size_t(gidx)];
      const double wr = half * gl.w[std::size_t(gidx)] * dth;
      cplx row(0.0, 0.0);
      for (std::size_t k = 0; k < qs.n_theta; ++k)
        row += f(r, k, dth * double(k));
      acc += wr * row;
    }
  };
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    const int cells = std::max(2, qs.panels);
    const double w = (b - a) / double(cells);
    for (int c = 1; c + 1 < cells; ++c)
      panel(a + double(c) * w, a + double(c + 1) * w);
    // First cell: chain toward a.
    double g = w;
    for (int pnl = 0; pnl < qs.panels; ++pnl) {
      panel(a + 0.5 * g, a + g);
      g *= 0.5;
    }
    if (a > 0.0) panel(a, a + g);
    // Last cell: chain toward b.
    g = w;
    for (int pnl = 0; pnl < qs.panels; ++pnl) {
      panel(b - g, b - 0.5 * g);
      g *= 0.5;
    }
    panel(b - g, b);
  }
  return acc;
}

/// Integrates r^expo g(r, k, theta_k) over (breaks.front(), breaks.back()]
/// x [0, 2pi) for a factor g that is smooth in r across the origin and an
/// exponent with Re(expo) > -1.  Panels follow graded_quad, except that a
/// segment starting at r = 0 integrates its first backbone cell by
/// projecting the theta-averaged g onto Legendre polynomials and pairing
/// the coefficients with the exact moments of r^expo,
///
///   int_0^1 y^expo P_j(2y - 1) dy
///       = Gamma(expo+1)^2 / (Gamma(expo-j+1) Gamma(expo+j+2)),
///
/// evaluated by the stable ratio recurrence M_{j+1} = M_j (expo - j) /
/// (expo + j + 2).  A slowly integrable power (Re(expo) close to -1)
/// keeps a macroscopic share of its mass below any reachable panel
/// radius, so the origin cell has to be handled exactly, not by grading.
template <typename G>
cplx power_quad(cplx expo, const std::vector<double>& breaks,
                const QuadSpec& qs, G&& g) {
  if (!(expo.real() > -1.0))
    throw std::logic_error("power_quad: Re(expo) must exceed -1");
  const GaussRule gl = gauss_legendre(qs.gauss_order);
  const double dth = two_pi / double(qs.n_theta);
  const std::size_t n = std::size_t(qs.gauss_order);
  cplx acc(0.0, 0.0);
  const auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t gi = 0; gi < n; ++gi) {
      const double r = mid + half * gl.x[gi];
      const cplx radf = std::exp(expo * std::log(r));
      cplx row(0.0, 0.0);
      for (std::size_t k = 0; k < qs.n_theta; ++k)
        row += g(r, k, dth * double(k));
      acc += half * gl.w[gi] * dth * radf * row;
    }
  };
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    const int cells = std::max(2, qs.panels);
    const double w = (b - a) / double(cells);
    for (int c = 1; c + 1 < cells; ++c)
      panel(a + double(c) * w, a + double(c + 1) * w);
    if (a == 0.0) {
      // Moment closure of the origin cell [0, w].
      std::vector<cplx> ghat(n);
      for (std::size_t gi = 0; gi < n; ++gi) {
        const double r = 0.5 * w * (gl.x[gi] + 1.0);
        cplx row(0.0, 0.0);
        for (std::size_t k = 0; k < qs.n_theta; ++k)
          row += g(r, k, dth * double(k));
        ghat[gi] = dth * row;
      }
      cplx mj = 1.0 / (expo + 1.0);
      cplx cell(0.0, 0.0);
      std::vector<double> p0(n, 1.0), p1(gl.x.begin(), gl.x.end());
      for (std::size_t j = 0;; ++j) {
        cplx cj(0.0, 0.0);
        for (std::size_t gi = 0; gi < n; ++gi)
          cj += gl.w[gi] * p0[gi] * ghat[gi];
        cell += 0.5 * double(2 * j + 1) * cj * mj;
        if (j + 1 == n) break;
        mj *= (expo - double(j)) / (expo + double(j) + 2.0);
        for (std::size_t gi = 0; gi < n; ++gi) {
          const double p2 = ((2.0 * double(j) + 3.0) * gl.x[gi] * p1[gi] -
                             double(j + 1) * p0[gi]) /
                            double(j + 2);
          p0[gi] = p1[gi];
          p1[gi] = p2;
        }
      }
      acc += std::exp((expo + 1.0) * std::log(w)) * cell;
    } else {
      double gw = w;
      for (int pnl = 0; pnl < qs.panels; ++pnl) {
        panel(a + 0.5 * gw, a + gw);
        gw *= 0.5;
      }
      panel(a, a + gw);
    }
    // Last cell: chain toward b.
    double gw = w;
    for (int pnl = 0; pnl < qs.panels; ++pnl) {
      panel(b - gw, b - 0.5 * gw);
      gw *= 0.5;
    }
    panel(b - gw, b);
  }
  return acc;
}

/// Runs the quadrature at the requested depth and again deeper; the two
/// results must agree to rel_tol before the finer one is reported.
template <typename F>
cplx gated_quad(const std::string& who, const std::vector<double>& breaks,
                const QuadSpec& qs, double rel_tol, F&& f) {
  const cplx coarse = graded_quad(breaks, qs, f);
  QuadSpec finer = qs;
  finer.panels += 12;
  finer.gauss_order += 4;
  const cplx fine = graded_quad(breaks, finer, f);
  const double scale =
      std::max({1.0, std::abs(coarse), std::abs(fine)});
  if (std::abs(coarse - fine) > rel_tol * scale)
    throw std::runtime_error(
        who + ": quadrature self-consistency check failed (depth " +
        std::to_string(qs.panels) + " vs " + std::to_string(finer.panels) +
        " differ by " + std::to_string(std::abs(coarse - fine)) + ")");
  return fine;
}

/// gated_quad for the power-kernel engine.
template <typename G>
cplx gated_power_quad(const std::string& who, cplx expo,
                      const std::vector<double>& breaks, const QuadSpec& qs,
                      double rel_tol, G&& g) {
  const cplx coarse = power_quad(expo, breaks, qs, g);
  QuadSpec finer = qs;
  finer.panels += 12;
  finer.gauss_order += 4;
  const cplx fine = power_quad(expo, breaks, finer, g);
  const double scale =
      std::max({1.0, std::abs(coarse), std::abs(fine)});
  if (std::abs(coarse - fine) > rel_tol * scale)
    throw std::runtime_error(
        who + ": quadrature self-consistency check failed (depth " +
        std::to_string(qs.panels) + " vs " + std::to_string(finer.panels) +
        " differ by " + std::to_string(std::abs(coarse - fine)) + ")");
  return fine;
}

/// Power-of-two theta grid that resolves every participating spectral
/// object exactly.
inline std::size_t theta_grid(std::size_t base,
                              std::initializer_list<std::size_t> grids) {
  std::size_t n = base;
  for (std::size_t g : grids) n = std::max(n, g);
  return n;
}

/// Trapezoid refinement factor for an off-center test function.  The
/// support circle subtends angular features whose sharpness grows with
/// the ratio of the support's radial extent to its width; the factor is
/// the enclosing power of two, and 1 for supports centered at the origin.
inline std::size_t theta_boost(const TestFn& phi) {
  const double inner = phi.inner_radius();
  const double outer = phi.outer_radius();
  const double ratio = (inner + outer) / (outer - inner);
  std::size_t boost = 1;
  while (double(boost) < ratio && boost < 64) boost *= 2;
  return boost;
}

/// Grid samples of a periodic function on the n-point trapezoid grid.
inline std::vector<cplx> sampled(const PeriodicFn& f, std::size_t n) {
  const PeriodicFn up = pf_upsample(f, n);
  return up.samples();
}

/// Complex Gamma by the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula for Re z < 1/2.
inline cplx gamma_cplx(cplx z) {
  static const double lanczos[9] = {
      0.99999999999980993,      676.5203681218851,   -1259.1392167224028,
      771.32342877765313,       -176.61502916214059, 12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6,
      1.5056327351493116e-7};
  if (z.real() < 0.5)
    return pi / (std::sin(pi * z) * gamma_cplx(cplx(1.0, 0.0) - z));
  z -= cplx(1.0, 0.0);
  cplx a(lanczos[0], 0.0);
  for (int i = 1; i < 9; ++i) a += cplx(lanczos[i], 0.0) / (z + cplx(double(i), 0.0));
  const cplx t = z + cplx(7.5, 0.0);
  return std::sqrt(two_pi) * std::exp((z + cplx(0.5, 0.0)) * std::log(t) - t) * a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pairing inputs.
// ---------------------------------------------------------------------------

/// u(r, theta) = r^power profile(theta): the common shape of every locally
/// integrable solution the pairings accept.
struct RadialPowerFn {
  cplx power;
  PeriodicFn profile;
};

inline RadialPowerFn as_radial_power(const HomogeneousSolution& u) {
  return {u.nu, u.v};
}

inline RadialPowerFn as_radial_power(const RadialPowerSolution& u) {
  return {u.rho, u.W};
}

inline RadialPowerFn as_radial_power(const HomogeneousRHS& f) {
  return {f.sigma, f.f0};
}

// ---------------------------------------------------------------------------
// Transpose application.
// ---------------------------------------------------------------------------

/**
 * Evaluates the transpose field applied to a test function,
 *
 *   (tL Phi)(r, theta) = -r^{lambda-1} [ p Phi_theta - i q r Phi_r
 *                                         - i (lambda+1) q Phi + p' Phi ],
 *
 * at a point off the origin, using the exact gradient of Phi.
 */
inline cplx transpose_apply(const HomogeneousField& L, const TestFn& phi,
                            double r, double theta) {
  if (!(r > 0.0))
    throw precondition_error("transpose_apply: r = " + std::to_string(r) +
                             " must be > 0");
  const double x = r * std::cos(theta), y = r * std::sin(theta);
  const std::array<double, 3> g = phi.value_and_gradient(x, y);
  const cplx phit(-y * g[1] + x * g[2], 0.0);
  const cplx phir(std::cos(theta) * g[1] + std::sin(theta) * g[2], 0.0);
  const cplx i(0.0, 1.0);
  const cplx p = L.p(theta), q = L.q(theta);
  const cplx dp = pf_derivative(L.p)(theta);
  const cplx rpow = std::exp((L.lambda - 1.0) * std::log(r));
  return -rpow * (p * phit - i * q * r * phir +
                  (dp - i * (L.lambda + 1.0) * q) * cplx(g[0], 0.0));
}

// ---------------------------------------------------------------------------
// Plain pairings.
// ---------------------------------------------------------------------------

/// <u, Phi> = integral of u Phi over the plane (area element included).
/// Requires Re(power) > -2 so the integral converges at the origin.
inline cplx weak_pair(const RadialPowerFn& u, const TestFn& phi,
                      const QuadSpec& qs = {}) {
  if (!(u.power.real() > -2.0))
    throw precondition_error(
        "weak_pair: Re(power) = " + std::to_string(u.power.real()) +
        " <= -2 is not integrable against the area element");
  QuadSpec spec = qs;
  spec.n_theta = detail::theta_grid(qs.n_theta * detail::theta_boost(phi),
                                    {u.profile.n_grid()});
  const std::vector<cplx> prof = detail::sampled(u.profile, spec.n_theta);
  const cplx expo = u.power + 1.0;  // area element folded in
  return detail::gated_power_quad(
      "weak_pair", expo, detail::radial_breaks(phi), spec, 1e-8,
      [&](double r, std::size_t k, double theta) {
        const double v =
            phi(r * std::cos(theta), r * std::sin(theta));
        return v == 0.0 ? cplx(0.0, 0.0) : prof[k] * v;
      });
}

/// <u, tL Phi>, the distributional left side of L u = f for an integrable
/// u.  Shares its quadrature with weak_pair; the transpose is evaluated
/// from sampled coefficient tables and the exact gradient of Phi.
inline cplx weak_transpose_pair(const HomogeneousField& L,
                                const RadialPowerFn& u, const TestFn& phi,
                                const QuadSpec& qs = {}) {
  if (!(u.power.real() > -2.0))
    throw precondition_error(
        "weak_transpose_pair: Re(power) = " + std::to_string(u.power.real()) +
        " <= -2 is not integrable against the area element");
  QuadSpec spec = qs;
  spec.n_theta = detail::theta_grid(
      qs.n_theta * detail::theta_boost(phi),
      {u.profile.n_grid(), L.p.n_grid(), L.q.n_grid()});
  const std::vector<cplx> prof = detail::sampled(u.profile, spec.n_theta);
  const std::vector<cplx> p = detail::sampled(L.p, spec.n_theta);
  const std::vector<cplx> q = detail::sampled(L.q, spec.n_theta);
  const std::vector<cplx> dp =
      detail::sampled(pf_derivative(L.p), spec.n_theta);
  const cplx i(0.0, 1.0);
  // r^{power} u-factor, r^{lambda-1} from tL, r from the area element.
  const cplx expo = u.power + L.lambda;
  return detail::gated_power_quad(
      "weak_transpose_pair", expo, detail::radial_breaks(phi), spec, 1e-8,
      [&](double r, std::size_t k, double theta) {
        const double ct = std::cos(theta), st = std::sin(theta);
        const std::array<double, 3> g =
            phi.value_and_gradient(r * ct, r * st);
        const cplx phit(r * (-st * g[1] + ct * g[2]), 0.0);
        const cplx phir(ct * g[1] + st * g[2], 0.0);
        const cplx tl = -(p[k] * phit - i * q[k] * r * phir +
                          (dp[k] - i * (L.lambda + 1.0) * q[k]) *
                              cplx(g[0], 0.0));
        return prof[k] * tl;
      });
}

/// <u, tL Phi> - <f, Phi>: the defect of u as a distribution solution of
/// L u = f against one test function.
inline cplx weak_residual(const HomogeneousField& L, const RadialPowerFn& u,
                          const RadialPowerFn& f, const TestFn& phi,
                          const QuadSpec& qs = {}) {
  return weak_transpose_pair(L, u, phi, qs) - weak_pair(f, phi, qs);
}

// ---------------------------------------------------------------------------
// Low-regularity pairing.
// ---------------------------------------------------------------------------

/**
 * The pairing that extends u = r^{sigma+1-lambda} v(theta) across the
 * origin when the radial power is not locally integrable:
 *
 *   <u, Phi> = C0 int int r^{k-(lambda-sigma)} v(theta)
 *              d^{k-2} Phi / dr^{k-2}  dtheta dr,
 *
 * with k = floor(Re(lambda - sigma)) and C0 = Gamma(lambda-sigma-k) /
 * Gamma(lambda-sigma-2).  No area Jacobian appears: the pairing is the
 * result of k-2 radial integrations by parts of the plain one, and reduces
 * to it when k = 2.  k_override > 0 forces a specific k (used to compare
 * against the plain pairing on a parameter sweep where both converge).
 */
inline cplx weak_pair_lowreg(const HomogeneousField& L, const PeriodicFn& v,
                             cplx sigma, cplx lambda, const TestFn& phi,
                             int k_override = 0, const QuadSpec& qs = {}) {
  (void)L;
  if (!(sigma.real() > 0.0))
    throw precondition_error("weak_pair_lowreg: Re(sigma) = " +
                             std::to_string(sigma.real()) + " must be > 0");
  if (!(sigma.real() <= lambda.real() - 2.0))
    throw precondition_error(
        "weak_pair_lowreg: Re(sigma) = " + std::to_string(sigma.real()) +
        " > Re(lambda) - 2 = " + std::to_string(lambda.real() - 2.0) +
        "; use weak_pair");
  const int k = k_override > 0
                    ? k_override
                    : int(std::floor((lambda - sigma).real()));
  if (k < 3)
    throw precondition_error(
        "weak_pair_lowreg: k = floor(Re(lambda - sigma)) = " +
        std::to_string(k) + " < 3; use weak_pair");
  if (k - 2 > testfn_max_radial)
    throw precondition_error(
        "weak_pair_lowreg: order k - 2 = " + std::to_string(k - 2) +
        " radial derivatives exceed the supported order " +
        std::to_string(testfn_max_radial));
  const cplx pole = lambda - sigma - cplx(double(k), 0.0);
  if (std::abs(pole) < 1e-9)
    throw precondition_error(
        "weak_pair_lowreg: |lambda - sigma - k| = " +
        std::to_string(std::abs(pole)) + " < 1e-9 (Gamma pole)");
  const cplx c0 = detail::gamma_cplx(pole) /
                  detail::gamma_cplx(lambda - sigma - cplx(2.0, 0.0));
  QuadSpec spec = qs;
  spec.n_theta = detail::theta_grid(qs.n_theta * detail::theta_boost(phi),
                                    {v.n_grid()});
  const std::vector<cplx> vv = detail::sampled(v, spec.n_theta);
  const cplx expo = cplx(double(k), 0.0) - lambda + sigma;
  const int m = k - 2;
  const cplx pairing = detail::gated_power_quad(
      "weak_pair_lowreg", expo, detail::radial_breaks(phi), spec, 1e-8,
      [&](double r, std::size_t k_idx, double theta) {
        const double d = phi.radial_derivs(m, r, theta)[std::size_t(m)];
        return d == 0.0 ? cplx(0.0, 0.0) : vv[k_idx] * d;
      });
  return c0 * pairing;
}

/// Defect of u = r^{sigma+1-lambda} v against L u = r^sigma f0 through the
/// low-regularity pairing: <u, tL Phi> with the same smeared pairing,
/// minus <f, Phi>.
inline cplx weak_residual_lowreg(const HomogeneousField& L,
                                 const PeriodicFn& v, cplx sigma, cplx lambda,
                                 const PeriodicFn& f0, const TestFn& phi,
                                 int k_override = 0, const QuadSpec& qs = {}) {
  if (!(sigma.real() > 0.0))
    throw precondition_error("weak_residual_lowreg: Re(sigma) = " +
                             std::to_string(sigma.real()) + " must be > 0");
  const int k = k_override > 0
                    ? k_override
                    : int(std::floor((lambda - sigma).real()));
  if (k < 3)
    throw precondition_error(
        "weak_residual_lowreg: k = floor(Re(lambda - sigma)) = " +
        std::to_string(k) + " < 3; use weak_residual");
  const int m = k - 2;
  if (m + 1 > testfn_max_radial)
    throw precondition_error(
        "weak_residual_lowreg: order k - 1 = " + std::to_string(m + 1) +
        " radial derivatives exceed the supported order " +
        std::to_string(testfn_max_radial));
  const cplx pole = lambda - sigma - cplx(double(k), 0.0);
  if (std::abs(pole) < 1e-9)
    throw precondition_error(
        "weak_residual_lowreg: |lambda - sigma - k| = " +
        std::to_string(std::abs(pole)) + " < 1e-9 (Gamma pole)");
  const cplx c0 = detail::gamma_cplx(pole) /
                  detail::gamma_cplx(lambda - sigma - cplx(2.0, 0.0));
  QuadSpec spec = qs;
  spec.n_theta = detail::theta_grid(
      qs.n_theta * detail::theta_boost(phi),
      {v.n_grid(), L.p.n_grid(), L.q.n_grid()});
  const std::vector<cplx> vv = detail::sampled(v, spec.n_theta);
  const std::vector<cplx> p = detail::sampled(L.p, spec.n_theta);
  const std::vector<cplx> q = detail::sampled(L.q, spec.n_theta);
  const std::vector<cplx> dp =
      detail::sampled(pf_derivative(L.p), spec.n_theta);
  const cplx i(0.0, 1.0);
  // The integrand is r^{k-(lambda-sigma)} v times the Leibniz expansion of
  // d^m/dr^m applied to the r-power factors of tL Phi; every complex power
  // of r collapses to the common prefactor r^{sigma+1} times nonnegative
  // integer powers, which keeps the smooth factor polynomial-like at the
  // origin for the moment closure.
  const cplx expo = sigma + 1.0;
  const cplx smeared = detail::gated_power_quad(
      "weak_residual_lowreg", expo, detail::radial_breaks(phi), spec, 1e-8,
      [&](double r, std::size_t k_idx, double theta) {
        const auto rd = phi.radial_derivs(m + 1, r, theta);
        const auto rdt = phi.radial_derivs_theta(m, r, theta);
        // d^m/dr^m of r^{lambda-1} Phi_theta, r^lambda Phi_r, and
        // r^{lambda-1} Phi by the general Leibniz rule, with r^{sigma+1}
        // factored out.
        cplx s_t(0.0, 0.0), s_r(0.0, 0.0), s_0(0.0, 0.0);
        double rint = 1.0;  // r^{m-j}, built from the j = m term upward
        for (int j = m; j >= 0; --j) {
          const double bin = double(detail::binomial(m, j));
          s_t += bin * detail::falling(lambda - 1.0, j) * rint *
                 rdt[std::size_t(m - j)];
          s_r += bin * detail::falling(lambda, j) * (rint * r) *
                 rd[std::size_t(m - j + 1)];
          s_0 += bin * detail::falling(lambda - 1.0, j) * rint *
                 rd[std::size_t(m - j)];
          rint *= r;
        }
        const cplx tl = -(p[k_idx] * s_t - i * q[k_idx] * s_r +
                          (dp[k_idx] - i * (lambda + 1.0) * q[k_idx]) * s_0);
        return vv[k_idx] * tl;
      });
  return c0 * smeared - weak_pair(RadialPowerFn{sigma, f0}, phi, qs);
}

// ---------------------------------------------------------------------------
// Fundamental solution check.
// ---------------------------------------------------------------------------

struct DeltaLadderRow {
  int panels = 0;
  double defect_abs = 0.0;
};

struct DeltaReport {
  cplx pairing;   // <L u, Phi> at the reference depth
  cplx phi0;      // Phi at the origin
  cplx defect;    // pairing - phi0
  std::vector<DeltaLadderRow> ladder;
  double order = 0.0;  // fastest observed decay rate of |defect| per panel
};

namespace detail {

inline cplx delta_pairing(const HomogeneousField& L, const TestFn& phi,
                          int N, cplx mu, const QuadSpec& spec) {
  const std::vector<cplx> p = sampled(L.p, spec.n_theta);
  const std::vector<cplx> q = sampled(L.q, spec.n_theta);
  const cplx i(0.0, 1.0);
  double fct = 1.0;
  for (int j = 2; j < N; ++j) fct *= double(j);  // (N-1)!
  const cplx front = cplx(1.0, 0.0) / (two_pi * i * mu * fct);
  const cplx integral = graded_quad(
      radial_breaks(phi), spec, [&](double r, std::size_t k, double theta) {
        const auto rd = phi.radial_derivs(N + 1, r, theta);
        const auto rdt = phi.radial_derivs_theta(N, r, theta);
        // d^N/dr^N of r^{N-1} Phi_theta and of r^N Phi_r; the falling
        // factorials vanish once j exceeds the power, so both sums are
        // exact finite Leibniz expansions.
        double d1 = 0.0, d2 = 0.0;
        double rj1 = std::pow(r, double(N - 1)), rj = rj1 * r;
        for (int j = 0; j <= N; ++j) {
          const double bin = double(binomial(N, j));
          if (j <= N - 1) {
            d1 += bin * falling(cplx(double(N - 1), 0.0), j).real() * rj1 *
                  rdt[std::size_t(N - j)];
            rj1 /= r;
          }
          d2 += bin * falling(cplx(double(N), 0.0), j).real() * rj *
                rd[std::size_t(N - j + 1)];
          rj /= r;
        }
        return std::log(r) * (cplx(d1, 0.0) - i * (q[k] / p[k]) * cplx(d2, 0.0));
      });
  // <L u, Phi> = -<u, L Phi> for a divergence-free field.
  return -front * integral;
}

}  // namespace detail

/**
 * Checks the fundamental-solution identity L u = delta for a
 * divergence-free field of integer degree N >= 2 with nonzero mean
 * rotation number, where u is paired through the logarithmic kernel
 *
 *   <u, Phi> = (1 / (2 pi i mu (N-1)!))
 *              int int (ln r / p(theta)) d^N Phi / dr^N  dtheta dr.
 *
 * Returns <L u, Phi>, the target Phi(0, 0), their difference, and a
 * refinement ladder of the defect over increasing panel depths together
 * with the fastest decay order observed between consecutive rows.
 */
inline DeltaReport delta_check(const HomogeneousField& L, const TestFn& phi,
                               const QuadSpec& qs = {}) {
  const FieldReport rep = check_structure(L);
  if (!rep.div_free)
    throw precondition_error(
        "delta_check: the field is not divergence-free (p' != i (lambda+1) q)");
  const double lam = L.lambda.real();
  const int N = int(std::lround(lam));
  if (std::abs(L.lambda.imag()) > 1e-12 || std::abs(lam - double(N)) > 1e-12 ||
      N < 2)
    throw precondition_error(
        "delta_check: lambda = " + std::to_string(lam) +
        " must be an integer >= 2");
  if (N > testfn_max_radial - 1)
    throw precondition_error("delta_check: N = " + std::to_string(N) +
                             " exceeds the supported radial order " +
                             std::to_string(testfn_max_radial - 1));
  const cplx mu = compute_mu(L);
  if (std::abs(mu) < 1e-12)
    throw precondition_error("delta_check: |mu| = " +
                             std::to_string(std::abs(mu)) +
                             " < 1e-12; the kernel requires mu != 0");

  QuadSpec spec = qs;
  spec.n_theta = detail::theta_grid(qs.n_theta * detail::theta_boost(phi),
                                    {L.p.n_grid(), L.q.n_grid()});

  DeltaReport rpt;
  rpt.phi0 = cplx(phi(0.0, 0.0), 0.0);

  // Refinement ladder in panel depth.
  for (int depth : {8, 12, 16, 20, 24}) {
    QuadSpec dspec = spec;
    dspec.panels = depth;
    const cplx val = detail::delta_pairing(L, phi, N, mu, dspec);
    rpt.ladder.push_back({depth, std::abs(val - rpt.phi0)});
  }
  // Fastest observed decay of log2 |defect| per added panel between
  // consecutive ladder rows.  A windowed rate is used instead of a global
  // fit because the defect typically hits the quadrature floor before the
  // deepest rows, and the resulting plateau says nothing about the
  // convergence that happened on the way down.
  rpt.order = 0.0;
  for (std::size_t s = 0; s + 1 < rpt.ladder.size(); ++s) {
    const double y0 = std::log2(std::max(rpt.ladder[s].defect_abs, 1e-300));
    const double y1 =
        std::log2(std::max(rpt.ladder[s + 1].defect_abs, 1e-300));
    const double dp =
        double(rpt.ladder[s + 1].panels - rpt.ladder[s].panels);
    rpt.order = std::max(rpt.order, (y0 - y1) / dp);
  }

  // Reference value at the contract depth, self-consistency gated.
  const cplx a = detail::delta_pairing(L, phi, N, mu, spec);
  QuadSpec finer = spec;
  finer.panels += 12;
  finer.gauss_order += 4;
  const cplx b = detail::delta_pairing(L, phi, N, mu, finer);
  if (std::abs(a - b) > 1e-6 * std::max({1.0, std::abs(a), std::abs(b)}))
    throw std::runtime_error(
        "delta_check: quadrature self-consistency check failed (" +
        std::to_string(std::abs(a - b)) + ")");
  rpt.pairing = b;
  rpt.defect = b - rpt.phi0;
  return rpt;
}

// ---------------------------------------------------------------------------
// Dirac derivative kernel elements.
// ---------------------------------------------------------------------------

struct DiracReport {
  cplx value;          // <L d^{j+k} delta / dx^j dy^k, Phi>
  double scale = 0.0;  // largest no-cancellation magnitude of the stencils
};

/**
 * Pairs L applied to a derivative of the Dirac distribution against Phi:
 *
 *   <L d^{j+k} delta, Phi> = (-1)^{j+k} d^{j+k} (tL Phi) / dx^j dy^k (0),
 *
 * evaluated by iterated central differences at half-integer offsets of h,
 * Richardson extrapolated twice (steps h, h/2, h/4 with the even-power
 * error model).  The coefficients of L vanish at the origin to order
 * Re(lambda), so the pairing must vanish whenever j + k <= Re(lambda) - 1;
 * out-of-range orders are rejected.  At the equality order j + k =
 * Re(lambda) - 1 the vanishing relies on tL Phi having j+k honest
 * derivatives at 0; fields whose Cartesian coefficients are polynomials
 * (divergence-free ones in particular, where tL = -L) satisfy this for
 * every admissible order, while a nonzero divergence term of the form
 * r^{lambda-1} c(theta) Phi generally leaves a genuine delta component at
 * the equality order and the defect then reports its physical size.
 */
inline DiracReport dirac_derivative_check(const HomogeneousField& L, int j,
                                          int k, const TestFn& phi,
                                          double h = 1e-3) {
  if (j < 0 || k < 0)
    throw precondition_error("dirac_derivative_check: j, k must be >= 0");
  if (!(double(j + k) <= L.lambda.real() - 1.0))
    throw precondition_error(
        "dirac_derivative_check: requires j + k <= Re(lambda) - 1 = " +
        std::to_string(L.lambda.real() - 1.0) + "; got j + k = " +
        std::to_string(j + k));
  const auto G = [&](double x, double y) -> cplx {
    const double r = std::hypot(x, y);
    if (r == 0.0) return cplx(0.0, 0.0);  // continuous extension, Re lambda > 1
    return transpose_apply(L, phi, r, std::atan2(y, x));
  };
  std::vector<double> cj(std::size_t(j) + 1), ck(std::size_t(k) + 1);
  for (int m = 0; m <= j; ++m)
    cj[std::size_t(m)] = ((j - m) % 2 ? -1.0 : 1.0) *
                         double(detail::binomial(j, m));
  for (int l = 0; l <= k; ++l)
    ck[std::size_t(l)] = ((k - l) % 2 ? -1.0 : 1.0) *
                         double(detail::binomial(k, l));
  double scale = 0.0;
  const auto stencil = [&](double step) {
    cplx s(0.0, 0.0);
    double sabs = 0.0;
    for (int m = 0; m <= j; ++m)
      for (int l = 0; l <= k; ++l) {
        const cplx g = G((double(m) - 0.5 * double(j)) * step,
                         (double(l) - 0.5 * double(k)) * step);
        const double c = cj[std::size_t(m)] * ck[std::size_t(l)];
        sabs += std::abs(c * g);
        s += c * g;
      }
    scale = std::max(scale, sabs / std::pow(step, double(j + k)));
    return s / std::pow(step, double(j + k));
  };
  const cplx f0 = stencil(h);
  const cplx f1 = stencil(0.5 * h);
  const cplx f2 = stencil(0.25 * h);
  const cplx r0 = (4.0 * f1 - f0) / 3.0;
  const cplx r1 = (4.0 * f2 - f1) / 3.0;
  const double sign = (j + k) % 2 ? -1.0 : 1.0;
  DiracReport rpt;
  rpt.value = sign * (16.0 * r1 - r0) / 15.0;
  rpt.scale = scale == 0.0 ? 1.0 : scale;
  return rpt;
}

}  // namespace hvf

#endif  // HVF_WEAK_HPP

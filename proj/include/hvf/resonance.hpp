// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_RESONANCE_HPP
#define HVF_RESONANCE_HPP

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hvf/errors.hpp"
#include "hvf/periodic.hpp"

namespace hvf {

/**
 * Recovers x as a fraction in lowest terms via continued fractions,
 * refusing denominators above max_den.  Acceptance requires agreement to
 * 1e-14 relative: tight enough that quadratic irrationals (whose best
 * approximations with den <= 1e6 sit near 1e-13) are rejected, loose
 * enough that a double holding an exact fraction is recognized.
 */
inline std::optional<std::pair<long, long>> rational_approx(double x,
                                                            long max_den = 1000000) {
  if (!std::isfinite(x)) return std::nullopt;
  const double target = std::abs(x);
  const double tol = 1e-14 * std::max(1.0, target);

  double rem = target;
  long p_prev = 1, q_prev = 0;  // convergent recurrence seeds
  long p_cur = 0, q_cur = 1;    // (p_cur/q_cur starts as 0/1)
  for (int iter = 0; iter < 64; ++iter) {
    const double a_f = std::floor(rem);
    if (a_f > double(std::numeric_limits<long>::max() / 4)) break;
    const long a = long(a_f);
    const long p_next = a * p_prev + p_cur;
    const long q_next = a * q_prev + q_cur;
    if (q_next > max_den) return std::nullopt;
    p_cur = p_prev;
    q_cur = q_prev;
    p_prev = p_next;
    q_prev = q_next;
    if (std::abs(target - double(p_prev) / double(q_prev)) <= tol) {
      const long sign = x < 0.0 ? -1 : 1;
      return std::make_pair(sign * p_prev, q_prev);
    }
    const double frac = rem - a_f;
    if (frac < 1e-18) break;
    rem = 1.0 / frac;
  }
  return std::nullopt;
}

struct ResonanceWitness {
  long l = 0;  // positive integer
  long k = 0;  // the integer with mu*lambda = mu*l + k
};

/**
 * Outcome of the resonance scan for the pair (mu, lambda).  A witness is
 * an l >= 1 with mu*lambda - mu*l within tolerance of an integer; for
 * rational mu = m/n the witnesses form an arithmetic progression with
 * step n, reported via `progression` (start, step), and at most
 * max_stored_witnesses of them are materialized.  Distances within a
 * factor 10 of the tolerance are listed in ambiguous_l instead of being
 * silently decided either way.
 */
struct ResonanceReport {
  bool resonant = false;
  std::vector<ResonanceWitness> witnesses;
  std::optional<std::pair<long, long>> progression;   // (start, step)
  std::optional<std::pair<long, long>> rational_mu;   // lowest terms
  std::vector<long> ambiguous_l;
};

inline constexpr std::size_t max_stored_witnesses = 8;

inline ResonanceReport resonance_analyze(cplx mu, cplx lambda, long j_max = 1000) {
  if (j_max < 1) throw precondition_error("resonance: j_max must be >= 1");
  ResonanceReport rep;

  const cplx target = mu * lambda;
  const double tol = 1e-9 * (1.0 + std::abs(target));

  if (std::abs(mu.imag()) <= 1e-14)
    rep.rational_mu = rational_approx(mu.real());

  for (long l = 1; l <= j_max; ++l) {
    const cplx delta = target - mu * double(l);
    const double k = std::round(delta.real());
    const double dist = std::abs(delta - cplx(k, 0.0));
    if (dist <= tol) {
      rep.resonant = true;
      if (rep.witnesses.size() < max_stored_witnesses)
        rep.witnesses.push_back({l, long(k)});
    } else if (dist <= 10.0 * tol) {
      if (rep.ambiguous_l.size() < max_stored_witnesses) rep.ambiguous_l.push_back(l);
    }
  }

  if (rep.resonant && rep.rational_mu)
    rep.progression = std::make_pair(rep.witnesses.front().l, rep.rational_mu->second);

  return rep;
}

/// Small-divisor sequence d_j = |1 - e^{2 pi i mu (j - lambda)}|, j = 1..j_max.
inline std::vector<double> dc_scan(cplx mu, cplx lambda, long j_max) {
  std::vector<double> d;
  d.reserve(std::size_t(j_max));
  const cplx two_pi_i(0.0, two_pi);
  for (long j = 1; j <= j_max; ++j)
    d.push_back(std::abs(1.0 - std::exp(two_pi_i * mu * (cplx(double(j), 0.0) - lambda))));
  return d;
}

/// Companion distances |mu (j - lambda) - k| minimized over integers k,
/// j = 1..j_max (the phase form of the same smallness condition).
inline std::vector<double> dc_prime_scan(cplx mu, cplx lambda, long j_max) {
  std::vector<double> d;
  d.reserve(std::size_t(j_max));
  for (long j = 1; j <= j_max; ++j) {
    const cplx delta = mu * (cplx(double(j), 0.0) - lambda);
    d.push_back(std::abs(delta - std::round(delta.real())));
  }
  return d;
}

/**
 * Heuristic flag for a failing small-divisor condition: true when, over
 * the last `window` entries, the per-order roots d_j^{1/j} sit below
 * `level`, never increase, and end strictly lower than they started.
 * A sequence like that is consistent with d_j^{1/j} -> 0, i.e. no
 * geometric lower bound at all.
 */
inline bool dc_violation_suspected(const std::vector<double>& root_dj,
                                   std::size_t window = 100, double level = 1e-3) {
  if (root_dj.size() < window || window < 2) return false;
  const std::size_t lo = root_dj.size() - window;
  for (std::size_t i = lo; i < root_dj.size(); ++i) {
    if (!(root_dj[i] < level)) return false;
    if (i > lo && root_dj[i] > root_dj[i - 1]) return false;
  }
  return root_dj.back() < root_dj[lo];
}

/**
 * Verdict on the geometric small-divisor bound d_j >= C^j.
 *
 *   ProvenHolds_A        Im mu != 0: the divisors grow or level off on
 *                        their own; the bound holds with the scanned C.
 *   ProvenHolds_B        mu real but Im lambda != 0: every divisor is
 *                        bounded below by the same positive constant.
 *   Estimated            both real: C_estimate is a scan-limited
 *                        certificate, not a proof.
 *   ViolationSuspected   both real and the scan matches the decay
 *                        heuristic above.
 */
enum class DCStatus { ProvenHolds_A, ProvenHolds_B, Estimated, ViolationSuspected };

struct DCReport {
  DCStatus status = DCStatus::Estimated;
  double C_estimate = 1.0;  // in (0, 1]: d_j >= C_estimate^j over the scan
  long j_scanned = 0;
  long worst_j = 1;  // argmin of d_j^{1/j}
};

inline DCReport dc_classify(cplx mu, cplx lambda, long j_max = 500) {
  if (j_max < 1) throw precondition_error("dc_classify: j_max must be >= 1");
  const ResonanceReport res = resonance_analyze(mu, lambda, std::max(j_max, 1000l));
  if (res.resonant)
    throw precondition_error(
        "dc_classify: (mu, lambda) is resonant (witness l = " +
        std::to_string(res.witnesses.front().l) +
        "); the geometric bound is defined for nonresonant pairs only");

  const std::vector<double> d = dc_scan(mu, lambda, j_max);
  std::vector<double> roots(d.size());
  for (std::size_t j = 0; j < d.size(); ++j)
    roots[j] = std::pow(d[j], 1.0 / double(j + 1));

  DCReport rep;
  rep.j_scanned = j_max;
  double min_root = roots[0];
  rep.worst_j = 1;
  for (std::size_t j = 1; j < roots.size(); ++j)
    if (roots[j] < min_root) {
      min_root = roots[j];
      rep.worst_j = long(j + 1);
    }
  rep.C_estimate = std::min(1.0, min_root);

  if (std::abs(mu.imag()) > 1e-10)
    rep.status = DCStatus::ProvenHolds_A;
  else if (std::abs(lambda.imag()) > 1e-10)
    rep.status = DCStatus::ProvenHolds_B;
  else
    rep.status = dc_violation_suspected(roots) ? DCStatus::ViolationSuspected
                                               : DCStatus::Estimated;
  return rep;
}

}  // namespace hvf

#endif  // HVF_RESONANCE_HPP

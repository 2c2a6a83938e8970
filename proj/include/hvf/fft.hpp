// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors

#ifndef HVF_FFT_HPP
#define HVF_FFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hvf::detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/**
 * In-place radix-2 Cooley-Tukey transform.  Forward convention is
 * X_k = sum_j x_j e^{-2 pi i jk/n}; the inverse divides by n.  Twiddles
 * come from a table filled with std::polar so no rotation drift builds
 * up across stages.
 */
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  if (n == 1) return;

  // step 1: bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // step 2: twiddle table e^{+-2 pi i k/n}, k < n/2
  const double sgn = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    tw[k] = std::polar(1.0, sgn * 2.0 * std::numbers::pi * double(k) / double(n));

  // step 3: butterflies
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * tw[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }

  if (inverse) {
    const double inv = 1.0 / double(n);
    for (auto& x : a) x *= inv;
  }
}

}  // namespace hvf::detail

#endif  // HVF_FFT_HPP

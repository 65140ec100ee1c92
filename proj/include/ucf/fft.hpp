#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace ucf::fft {

  namespace detail {

    inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

    inline std::size_t next_pow2(std::size_t n) {
      std::size_t p = 1;
      while (p < n) p <<= 1;
      return p;
    }

    /// In-place iterative radix-2 Cooley-Tukey. Size must be a power of two.
    inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
      const std::size_t n = a.size();
      if (n <= 1) return;
      for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
      }
      for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> step(std::cos(angle), std::sin(angle));
        for (std::size_t start = 0; start < n; start += len) {
          std::complex<double> w(1.0, 0.0);
          for (std::size_t k = 0; k < len / 2; ++k) {
            const auto u = a[start + k];
            const auto v = a[start + k + len / 2] * w;
            a[start + k] = u + v;
            a[start + k + len / 2] = u - v;
            w *= step;
          }
        }
      }
      if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
    }

    /// Chirp factor exp(sign * i * pi * k^2 / n) with the k^2 reduced mod 2n
    /// in exact integer arithmetic, so the angle stays small for large k.
    inline std::complex<double> chirp(std::uint64_t k, std::uint64_t n, double sign) {
      const std::uint64_t k2 = (k % (2 * n)) * (k % (2 * n)) % (2 * n);
      const double angle = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
      return {std::cos(angle), std::sin(angle)};
    }

  } // namespace detail

  /// Forward DFT of arbitrary length: radix-2 directly for powers of two,
  /// Bluestein's chirp-z reduction otherwise.
  inline std::vector<std::complex<double>> dft(std::vector<std::complex<double>> x) {
    const std::size_t n = x.size();
    if (n <= 1) return x;
    if (detail::is_pow2(n)) {
      detail::fft_pow2(x, false);
      return x;
    }
    const std::size_t m = detail::next_pow2(2 * n - 1);
    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t t = 0; t < n; ++t) {
      const auto c = detail::chirp(t, n, -1.0);
      a[t] = x[t] * c;
      b[t] = std::conj(c);
      if (t != 0) b[m - t] = std::conj(c);
    }
    detail::fft_pow2(a, false);
    detail::fft_pow2(b, false);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    detail::fft_pow2(a, true);
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * detail::chirp(k, n, -1.0);
    return out;
  }

  /// Magnitude of the real-input spectrum, unnormalized convention:
  /// |sum_t x_t e^{-2*pi*i*t*k/n}| for k = 0 .. floor(n/2).
  inline std::vector<double> magnitude_spectrum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("magnitude_spectrum: empty input");
    std::vector<std::complex<double>> buf(n);
    for (std::size_t t = 0; t < n; ++t) buf[t] = {x[t], 0.0};
    auto spectrum = dft(std::move(buf));
    std::vector<double> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(spectrum[k]);
    return out;
  }

} // namespace ucf::fft

#pragma once

#include <bit>
#include <complex>
#include <numbers>
#include <vector>

namespace slab::detail {

/// In-place forward DFT X[k] = sum x[n] e^{-2 pi j k n / N}. Radix-2 for powers of two,
/// direct summation otherwise.
inline void fft_inplace(std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    if (!std::has_single_bit(n)) {
        std::vector<std::complex<double>> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> acc = 0.0;
            for (std::size_t m = 0; m < n; ++m)
                acc += x[m] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((k * m) % n) /
                                                  static_cast<double>(n));
            out[k] = acc;
        }
        x.swap(out);
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const auto wlen = std::polar(1.0, -2.0 * std::numbers::pi / static_cast<double>(len));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = x[i + k];
                const auto v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace slab::detail

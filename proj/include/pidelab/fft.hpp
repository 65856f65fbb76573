#pragma once

#include <complex>
#include <vector>

#include "pidelab/common.hpp"

namespace pidelab {

using cdouble = std::complex<double>;

/// In-place FFT, radix-2 when n is a power of two, O(n^2) DFT otherwise.
/// inverse = true applies the conjugate transform including the 1/n factor.
inline void fft_inplace(std::vector<cdouble>& a, bool inverse) {
    const size_t n = a.size();
    if (n <= 1) return;
    const bool pow2 = (n & (n - 1)) == 0;
    if (!pow2) {
        std::vector<cdouble> out(n, cdouble(0, 0));
        const double sgn = inverse ? 1.0 : -1.0;
        for (size_t k = 0; k < n; ++k) {
            for (size_t t = 0; t < n; ++t) {
                double ang = sgn * 2.0 * kPi * static_cast<double>(k * t % n) / static_cast<double>(n);
                out[k] += a[t] * cdouble(std::cos(ang), std::sin(ang));
            }
        }
        if (inverse)
            for (auto& v : out) v /= static_cast<double>(n);
        a = std::move(out);
        return;
    }
    // bit reversal
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        cdouble wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cdouble w(1, 0);
            for (size_t k = 0; k < len / 2; ++k) {
                cdouble u = a[i + k];
                cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

/// Integer frequency of DFT bin i for length n, in [-n/2, n/2).
inline int dft_frequency(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace pidelab

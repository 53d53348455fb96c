#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace cepdist::detail {

inline bool is_power_of_two(std::size_t n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline std::size_t floor_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p * 2 <= n) p <<= 1;
    return p;
}

/// Forward DFT X_m = sum_n x(n) e^{-2 pi i m n / L} of `x` zero-padded to `length`.
inline std::vector<std::complex<double>> fft(std::span<const double> x, std::size_t length) {
    std::vector<std::complex<double>> in(length, 0.0);
    for (std::size_t n = 0; n < x.size() && n < length; ++n) in[n] = x[n];
    std::vector<std::complex<double>> out;
    Eigen::FFT<double> engine;
    engine.fwd(out, in);
    return out;
}

/// Inverse DFT with 1/L scaling.
inline std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& X) {
    std::vector<std::complex<double>> out;
    Eigen::FFT<double> engine;
    engine.inv(out, X);
    return out;
}

} // namespace cepdist::detail

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cepdist/error.hpp"
#include "cepdist/fft.hpp"
#include "cepdist/lti.hpp"

namespace cepdist {

namespace tolerance {
/// Spectral bins below this fraction of the largest magnitude count as nulls.
inline constexpr double spectral_null = 1e-12;
} // namespace tolerance

inline constexpr int default_cepstrum_order = 256;

// ---------------------------------------------------------------------------
// Power spectrum estimates

enum class SpectrumMethod { periodogram, welch, model };

constexpr std::string_view to_string(SpectrumMethod m) noexcept {
    switch (m) {
        case SpectrumMethod::periodogram: return "periodogram";
        case SpectrumMethod::welch: return "welch";
        case SpectrumMethod::model: return "model";
    }
    return "unknown";
}

/// Nonnegative spectrum sampled at w_m = 2 pi m / L over the full circle.
class SpectrumEstimate {
public:
    SpectrumEstimate(std::vector<double> values, SpectrumMethod method, bool fell_back = false)
        : values_(std::move(values)), method_(method), fell_back_(fell_back) {
        detail::require(detail::is_power_of_two(values_.size()), ErrorCode::InvalidArgument,
                        "spectrum length must be a power of two");
        for (double v : values_)
            detail::require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
                            "spectrum values must be finite and nonnegative");
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t m) const { return values_[m]; }
    SpectrumMethod method() const noexcept { return method_; }
    /// True when Welch was requested but the signal was too short for it.
    bool fell_back() const noexcept { return fell_back_; }

private:
    std::vector<double> values_;
    SpectrumMethod method_;
    bool fell_back_;
};

/// Estimator settings. Zero window or FFT length selects the automatic choice.
struct EstimatorConfig {
    SpectrumMethod method = SpectrumMethod::welch;
    std::size_t window_length = 0;
    double overlap = 0.5;
    std::size_t fft_length = 0;
};

/// Signals shorter than this are estimated with a periodogram even when Welch is requested.
inline constexpr std::size_t welch_min_length = 128;
inline constexpr std::size_t welch_max_window = 1024;

struct ResolvedEstimator {
    SpectrumMethod method;
    std::size_t window_length;
    double overlap;
    std::size_t fft_length;
    bool fell_back;
};

inline ResolvedEstimator resolve(const EstimatorConfig& config, std::size_t signal_length) {
    detail::require(signal_length > 0, ErrorCode::EmptySignal, "signal has no samples");
    detail::require(config.overlap >= 0.0 && config.overlap < 1.0, ErrorCode::InvalidArgument,
                    "overlap must lie in [0, 1)");
    detail::require(config.fft_length == 0 || detail::is_power_of_two(config.fft_length),
                    ErrorCode::InvalidArgument, "fft length must be a power of two");
    const bool want_welch = config.method == SpectrumMethod::welch;
    const bool fall_back = want_welch && config.window_length == 0 && signal_length < welch_min_length;
    if (!want_welch || fall_back) {
        detail::require(config.method != SpectrumMethod::model, ErrorCode::InvalidArgument,
                        "model spectra are not estimated from signals");
        const std::size_t L = config.fft_length ? config.fft_length : detail::next_power_of_two(signal_length);
        detail::require(L >= signal_length, ErrorCode::InvalidArgument, "fft length shorter than signal");
        return {SpectrumMethod::periodogram, signal_length, 0.0, L, fall_back};
    }
    const std::size_t window = config.window_length
                                   ? config.window_length
                                   : std::min(detail::floor_power_of_two(std::max<std::size_t>(signal_length / 8, 1)),
                                              welch_max_window);
    detail::require(window <= signal_length, ErrorCode::InvalidArgument, "window longer than signal");
    detail::require(window >= 2, ErrorCode::InvalidArgument, "window must hold at least two samples");
    const std::size_t L = config.fft_length ? config.fft_length : detail::next_power_of_two(window);
    detail::require(L >= window, ErrorCode::InvalidArgument, "fft length shorter than window");
    return {SpectrumMethod::welch, window, config.overlap, L, false};
}

/// Phi_m = |FFT_L(y)|^2 / L with y zero-padded to L.
inline SpectrumEstimate psd_periodogram(const Signal& signal, std::size_t fft_length) {
    detail::require(detail::is_power_of_two(fft_length), ErrorCode::InvalidArgument,
                    "fft length must be a power of two");
    detail::require(fft_length >= signal.size(), ErrorCode::InvalidArgument, "fft length shorter than signal");
    const auto X = detail::fft(signal.samples(), fft_length);
    std::vector<double> phi(fft_length);
    const double scale = 1.0 / static_cast<double>(fft_length);
    for (std::size_t m = 0; m < fft_length; ++m) phi[m] = std::norm(X[m]) * scale;
    return {std::move(phi), SpectrumMethod::periodogram};
}

namespace detail {

/// Periodic Hann window.
inline std::vector<double> hann(std::size_t length) {
    std::vector<double> w(length);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(length));
    return w;
}

inline std::vector<std::size_t> segment_starts(std::size_t length, std::size_t window, double overlap) {
    const auto shared = static_cast<std::size_t>(std::floor(overlap * static_cast<double>(window)));
    const std::size_t step = std::max<std::size_t>(window - shared, 1);
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + window <= length; s += step) starts.push_back(s);
    return starts;
}

} // namespace detail

/// Averaged Hann-windowed periodograms, normalized by the window power so that
/// unit-variance white noise has unit spectral level.
inline SpectrumEstimate psd_welch(const Signal& signal, std::size_t window_length, double overlap,
                                  std::size_t fft_length) {
    detail::require(window_length <= signal.size(), ErrorCode::InvalidArgument, "window longer than signal");
    detail::require(window_length >= 2, ErrorCode::InvalidArgument, "window must hold at least two samples");
    detail::require(overlap >= 0.0 && overlap < 1.0, ErrorCode::InvalidArgument, "overlap must lie in [0, 1)");
    detail::require(detail::is_power_of_two(fft_length) && fft_length >= window_length,
                    ErrorCode::InvalidArgument, "fft length must be a power of two no shorter than the window");
    const auto window = detail::hann(window_length);
    double power = 0.0;
    for (double w : window) power += w * w;
    const auto starts = detail::segment_starts(signal.size(), window_length, overlap);
    std::vector<double> phi(fft_length, 0.0);
    std::vector<double> segment(window_length);
    for (std::size_t s : starts) {
        for (std::size_t n = 0; n < window_length; ++n) segment[n] = window[n] * signal[s + n];
        const auto X = detail::fft(segment, fft_length);
        for (std::size_t m = 0; m < fft_length; ++m) phi[m] += std::norm(X[m]);
    }
    const double scale = 1.0 / (power * static_cast<double>(starts.size()));
    for (double& v : phi) v *= scale;
    return {std::move(phi), SpectrumMethod::welch};
}

inline SpectrumEstimate estimate_psd(const Signal& signal, const EstimatorConfig& config) {
    const auto r = resolve(config, signal.size());
    if (r.method == SpectrumMethod::periodogram) {
        auto p = psd_periodogram(signal, r.fft_length);
        return {std::vector<double>(p.values().begin(), p.values().end()), p.method(), r.fell_back};
    }
    return psd_welch(signal, r.window_length, r.overlap, r.fft_length);
}

/// |H(e^{i w_m})|^2 on the L-point grid.
inline SpectrumEstimate power_spectrum_from_zpk(const ZeroPoleGain& zpk, std::size_t length) {
    detail::require(detail::is_power_of_two(length), ErrorCode::InvalidArgument,
                    "spectrum length must be a power of two");
    const auto H = frequency_response(zpk, unit_circle_grid(length));
    std::vector<double> phi(length);
    for (std::size_t m = 0; m < length; ++m) phi[m] = std::norm(H[m]);
    return {std::move(phi), SpectrumMethod::model};
}

// ---------------------------------------------------------------------------
// Cepstra

enum class CepstrumKind { power, complex };

constexpr std::string_view to_string(CepstrumKind k) noexcept {
    return k == CepstrumKind::power ? "power" : "complex";
}

/// Certified envelope |c(k)| <= amplitude * rate^|k| / |k| for k != 0.
struct DecayBound {
    double amplitude;
    double rate;
};

/// Cepstrum coefficients c(k), k in [-K, K]. Power cepstra are even by
/// construction; complex cepstra are two-sided. Coefficient 0 holds log g'.
class CepstrumSequence {
public:
    /// Power cepstrum from c(0..K).
    static CepstrumSequence power(std::span<const double> causal, std::optional<DecayBound> bound = std::nullopt) {
        detail::require(!causal.empty(), ErrorCode::InvalidArgument, "cepstrum needs a zeroth coefficient");
        const int K = static_cast<int>(causal.size()) - 1;
        std::vector<double> c(2 * causal.size() - 1);
        for (int k = 0; k <= K; ++k) {
            c[static_cast<std::size_t>(K + k)] = causal[static_cast<std::size_t>(k)];
            c[static_cast<std::size_t>(K - k)] = causal[static_cast<std::size_t>(k)];
        }
        return CepstrumSequence(CepstrumKind::power, K, std::move(c), bound, 0);
    }

    /// Complex cepstrum from c(0..K) and c(-1..-K).
    static CepstrumSequence complex(std::span<const double> causal, std::span<const double> anticausal,
                                    int lag = 0) {
        detail::require(!causal.empty() && anticausal.size() + 1 == causal.size(), ErrorCode::InvalidArgument,
                        "complex cepstrum needs c(0..K) and c(-1..-K)");
        const int K = static_cast<int>(anticausal.size());
        std::vector<double> c(static_cast<std::size_t>(2 * K + 1));
        for (int k = 0; k <= K; ++k) c[static_cast<std::size_t>(K + k)] = causal[static_cast<std::size_t>(k)];
        for (int k = 1; k <= K; ++k) c[static_cast<std::size_t>(K - k)] = anticausal[static_cast<std::size_t>(k - 1)];
        return CepstrumSequence(CepstrumKind::complex, K, std::move(c), std::nullopt, lag);
    }

    static CepstrumSequence zero(int order, CepstrumKind kind = CepstrumKind::power) {
        std::vector<double> causal(static_cast<std::size_t>(order) + 1, 0.0);
        if (kind == CepstrumKind::power) return power(causal, DecayBound{0.0, 0.0});
        return complex(causal, std::vector<double>(static_cast<std::size_t>(order), 0.0));
    }

    CepstrumKind kind() const noexcept { return kind_; }
    int order() const noexcept { return order_; }
    double zeroth() const noexcept { return coeffs_[static_cast<std::size_t>(order_)]; }
    const std::optional<DecayBound>& decay_bound() const noexcept { return bound_; }
    /// Integer delay removed as linear phase before the complex logarithm.
    int lag() const noexcept { return lag_; }

    double operator()(int k) const {
        detail::require(k >= -order_ && k <= order_, ErrorCode::InvalidArgument, "cepstrum index out of range");
        return coeffs_[static_cast<std::size_t>(order_ + k)];
    }

    /// c(1..K).
    std::span<const double> positive() const noexcept {
        return std::span<const double>(coeffs_).subspan(static_cast<std::size_t>(order_) + 1);
    }

    /// c(-K..K).
    std::span<const double> coefficients() const noexcept { return coeffs_; }

private:
    CepstrumSequence(CepstrumKind kind, int order, std::vector<double> coeffs, std::optional<DecayBound> bound,
                     int lag)
        : kind_(kind), order_(order), coeffs_(std::move(coeffs)), bound_(bound), lag_(lag) {
        for (double v : coeffs_)
            detail::require(std::isfinite(v), ErrorCode::NonFinite, "cepstrum coefficient is not finite");
    }

    CepstrumKind kind_;
    int order_;
    std::vector<double> coeffs_;
    std::optional<DecayBound> bound_;
    int lag_;
};

/// Inverse DFT of log Phi truncated to order min(K, L/2).
inline CepstrumSequence power_cepstrum_from_psd(const SpectrumEstimate& psd, int K = default_cepstrum_order) {
    detail::require(K >= 0, ErrorCode::InvalidArgument, "cepstrum order must be nonnegative");
    const std::size_t L = psd.size();
    std::vector<std::complex<double>> logphi(L);
    for (std::size_t m = 0; m < L; ++m) {
        if (!(psd[m] > 0.0))
            detail::fail(ErrorCode::LogOfNonpositive, "spectrum bin " + std::to_string(m) + " is not positive");
        logphi[m] = std::log(psd[m]);
    }
    const auto c = detail::ifft(logphi);
    const std::size_t order = std::min<std::size_t>(static_cast<std::size_t>(K), L / 2);
    std::vector<double> causal(order + 1);
    causal[0] = c[0].real();
    for (std::size_t k = 1; k <= order; ++k) causal[k] = 0.5 * (c[k].real() + c[(L - k) % L].real());
    return CepstrumSequence::power(causal);
}

inline CepstrumSequence power_cepstrum_of_signal(const Signal& signal, const EstimatorConfig& config = {},
                                                 int K = default_cepstrum_order) {
    return power_cepstrum_from_psd(estimate_psd(signal, config), K);
}

/// c_h = c_y - c_u from an input/output pair.
inline CepstrumSequence transfer_cepstrum_from_io(const Signal& u, const Signal& y, const EstimatorConfig& config = {},
                                                  int K = default_cepstrum_order) {
    detail::require(u.size() == y.size(), ErrorCode::LengthMismatch, "input and output lengths differ");
    const auto cu = power_cepstrum_of_signal(u, config, K);
    const auto cy = power_cepstrum_of_signal(y, config, K);
    std::vector<double> causal(static_cast<std::size_t>(cy.order()) + 1);
    for (int k = 0; k <= cy.order(); ++k) causal[static_cast<std::size_t>(k)] = cy(k) - cu(k);
    return CepstrumSequence::power(causal);
}

namespace detail {

/// Sum over roots of root^k / k for k = 1..K, real part (roots come in conjugate pairs).
inline void add_power_series(std::vector<double>& acc, std::span<const Complex> roots, double sign, bool invert) {
    const std::size_t K = acc.size() - 1;
    for (Complex r : roots) {
        const Complex base = invert ? 1.0 / r : r;
        Complex p = 1.0;
        for (std::size_t k = 1; k <= K; ++k) {
            p *= base;
            acc[k] += sign * p.real() / static_cast<double>(k);
        }
    }
}

inline double sum_log_abs(std::span<const Complex> roots) {
    double s = 0.0;
    for (Complex r : roots) s += std::log(std::abs(r));
    return s;
}

} // namespace detail

/// Analytic power cepstrum of a zpk model. Outside roots enter through their inverses.
inline CepstrumSequence power_cepstrum_from_zpk(const ZeroPoleGain& zpk, int K = default_cepstrum_order) {
    detail::require(K >= 0, ErrorCode::InvalidArgument, "cepstrum order must be nonnegative");
    detail::require(zpk.gain() != 0.0, ErrorCode::LogOfNonpositive, "zero gain has no cepstrum");
    std::vector<double> c(static_cast<std::size_t>(K) + 1, 0.0);
    detail::add_power_series(c, zpk.stable_poles(), +1.0, false);
    detail::add_power_series(c, zpk.unstable_poles(), +1.0, true);
    detail::add_power_series(c, zpk.min_zeros(), -1.0, false);
    detail::add_power_series(c, zpk.max_zeros(), -1.0, true);
    c[0] = 2.0 * (std::log(std::abs(zpk.gain())) + detail::sum_log_abs(zpk.max_zeros()) -
                  detail::sum_log_abs(zpk.unstable_poles()));
    return CepstrumSequence::power(c, DecayBound{static_cast<double>(zpk.root_count()), zpk.folded_radius()});
}

/// c(k) = (tr A^k - tr (A - B D^-1 C)^k) / k for stable minimum-phase models.
inline CepstrumSequence power_cepstrum_from_state_space(const StateSpaceModel& model,
                                                        int K = default_cepstrum_order) {
    detail::require(K >= 0, ErrorCode::InvalidArgument, "cepstrum order must be nonnegative");
    detail::require(model.invertible(), ErrorCode::NotInvertible, "feedthrough D is zero");
    const Eigen::MatrixXd A = model.A();
    const Eigen::MatrixXd F = model.inverse_dynamics();
    if (spectral_radius(A) >= 1.0 - tolerance::unit_circle || spectral_radius(F) >= 1.0 - tolerance::unit_circle)
        detail::fail(ErrorCode::NotMinimumPhaseStable, "poles and zeros must lie strictly inside the unit circle");
    std::vector<double> c(static_cast<std::size_t>(K) + 1, 0.0);
    c[0] = std::log(model.D() * model.D());
    Eigen::MatrixXd Ak = A;
    Eigen::MatrixXd Fk = F;
    for (int k = 1; k <= K; ++k) {
        if (k > 1) {
            Ak = (Ak * A).eval();
            Fk = (Fk * F).eval();
        }
        c[static_cast<std::size_t>(k)] = (Ak.trace() - Fk.trace()) / static_cast<double>(k);
    }
    return CepstrumSequence::power(c);
}

/// Adds multiples of 2 pi so that successive differences fall in (-pi, pi].
/// The first sample is left untouched.
inline std::vector<double> unwrap_phase(std::span<const double> principal) {
    std::vector<double> out(principal.begin(), principal.end());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double offset = 0.0;
    for (std::size_t m = 1; m < out.size(); ++m) {
        const double d = principal[m] - principal[m - 1];
        offset -= two_pi * std::ceil((d - std::numbers::pi) / two_pi);
        out[m] = principal[m] + offset;
    }
    return out;
}

/// Complex cepstrum of conjugate-symmetric spectrum samples X_m, m = 0..L-1.
/// The unwrapped phase is taken on [0, pi]; a linear-phase term (integer
/// delay) is removed and reported through lag(). Negative indices wrap around.
inline CepstrumSequence complex_cepstrum_from_spectrum(std::span<const Complex> X, int K) {
    const std::size_t L = X.size();
    detail::require(L >= 4 && L % 2 == 0, ErrorCode::InvalidArgument, "spectrum length must be even and >= 4");
    detail::require(K >= 0, ErrorCode::InvalidArgument, "cepstrum order must be nonnegative");
    double peak = 0.0;
    for (const Complex& x : X) peak = std::max(peak, std::abs(x));
    for (std::size_t m = 0; m < L; ++m)
        if (!(std::abs(X[m]) > tolerance::spectral_null * peak))
            detail::fail(ErrorCode::SpectralNull, "spectrum vanishes at bin " + std::to_string(m));

    const std::size_t half = L / 2;
    const double sign = X[0].real() < 0.0 ? -1.0 : 1.0;
    std::vector<double> principal(half + 1);
    for (std::size_t m = 0; m <= half; ++m) principal[m] = std::arg(sign * X[m]);
    auto phase = unwrap_phase(principal);
    const auto lag = static_cast<int>(std::lround(phase[half] / std::numbers::pi));
    for (std::size_t m = 0; m <= half; ++m)
        phase[m] -= std::numbers::pi * lag * static_cast<double>(m) / static_cast<double>(half);

    std::vector<std::complex<double>> logX(L);
    for (std::size_t m = 0; m <= half; ++m) logX[m] = {std::log(std::abs(X[m])), phase[m]};
    for (std::size_t m = half + 1; m < L; ++m) logX[m] = std::conj(logX[L - m]);
    const auto c = detail::ifft(logX);

    const std::size_t order = std::min<std::size_t>(static_cast<std::size_t>(K), half - 1);
    std::vector<double> causal(order + 1), anticausal(order);
    for (std::size_t k = 0; k <= order; ++k) causal[k] = c[k].real();
    for (std::size_t k = 1; k <= order; ++k) anticausal[k - 1] = c[L - k].real();
    return CepstrumSequence::complex(causal, anticausal, -lag);
}

/// IFFT(log|FFT y| + i unwrap(arg FFT y)) with y zero-padded to L.
inline CepstrumSequence complex_cepstrum(const Signal& signal, std::size_t fft_length,
                                         int K = default_cepstrum_order) {
    detail::require(detail::is_power_of_two(fft_length) && fft_length >= signal.size(), ErrorCode::InvalidArgument,
                    "fft length must be a power of two no shorter than the signal");
    const auto X = detail::fft(signal.samples(), fft_length);
    return complex_cepstrum_from_spectrum(X, K);
}

/// Analytic complex cepstrum: inside roots feed k > 0, outside roots feed k < 0.
inline CepstrumSequence complex_cepstrum_from_zpk(const ZeroPoleGain& zpk, int K = default_cepstrum_order) {
    detail::require(K >= 0, ErrorCode::InvalidArgument, "cepstrum order must be nonnegative");
    detail::require(zpk.gain() != 0.0, ErrorCode::LogOfNonpositive, "zero gain has no cepstrum");
    std::vector<double> causal(static_cast<std::size_t>(K) + 1, 0.0);
    std::vector<double> anti(static_cast<std::size_t>(K) + 1, 0.0);
    detail::add_power_series(causal, zpk.stable_poles(), +1.0, false);
    detail::add_power_series(causal, zpk.min_zeros(), -1.0, false);
    detail::add_power_series(anti, zpk.unstable_poles(), +1.0, true);
    detail::add_power_series(anti, zpk.max_zeros(), -1.0, true);
    causal[0] = std::log(std::abs(zpk.gain())) + detail::sum_log_abs(zpk.max_zeros()) -
                detail::sum_log_abs(zpk.unstable_poles());
    const auto lag = static_cast<int>(zpk.max_zeros().size()) - static_cast<int>(zpk.unstable_poles().size());
    return CepstrumSequence::complex(causal, std::span<const double>(anti).subspan(1), lag);
}

/// Welch cross-spectral transfer estimate H = S_yu / S_uu on the full L-point circle.
inline std::vector<Complex> transfer_spectrum_from_io(const Signal& u, const Signal& y,
                                                      const EstimatorConfig& config = {}) {
    detail::require(u.size() == y.size(), ErrorCode::LengthMismatch, "input and output lengths differ");
    const auto r = resolve(config, u.size());
    const std::size_t L = r.fft_length;
    std::vector<double> window = r.method == SpectrumMethod::welch ? detail::hann(r.window_length)
                                                                   : std::vector<double>(r.window_length, 1.0);
    const auto starts = detail::segment_starts(u.size(), r.window_length, r.overlap);
    std::vector<Complex> syu(L, 0.0);
    std::vector<double> suu(L, 0.0);
    std::vector<double> su(r.window_length), sy(r.window_length);
    for (std::size_t s : starts) {
        for (std::size_t n = 0; n < r.window_length; ++n) {
            su[n] = window[n] * u[s + n];
            sy[n] = window[n] * y[s + n];
        }
        const auto U = detail::fft(su, L);
        const auto Y = detail::fft(sy, L);
        for (std::size_t m = 0; m < L; ++m) {
            syu[m] += Y[m] * std::conj(U[m]);
            suu[m] += std::norm(U[m]);
        }
    }
    const double peak = *std::max_element(suu.begin(), suu.end());
    std::vector<Complex> H(L);
    for (std::size_t m = 0; m < L; ++m) {
        if (!(suu[m] > tolerance::spectral_null * peak))
            detail::fail(ErrorCode::SpectralNull, "input spectrum vanishes at bin " + std::to_string(m));
        H[m] = syu[m] / suu[m];
    }
    return H;
}

/// Complex cepstrum of the transfer function estimated from an input/output pair;
/// equals c^_y - c^_u whenever both unwrap consistently.
inline CepstrumSequence transfer_complex_cepstrum_from_io(const Signal& u, const Signal& y,
                                                          const EstimatorConfig& config = {},
                                                          int K = default_cepstrum_order) {
    return complex_cepstrum_from_spectrum(transfer_spectrum_from_io(u, y, config), K);
}

} // namespace cepdist

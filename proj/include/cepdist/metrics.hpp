#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "cepdist/error.hpp"
#include "cepdist/lti.hpp"
#include "cepdist/spectral.hpp"

namespace cepdist {

/// Squared weighted cepstral distance or norm, with an estimate of the
/// mass omitted by truncating at order K.
struct WeightedCepstralResult {
    double squared_value;
    int order;
    double tail_bound;

    double value() const { return std::sqrt(squared_value); }
};

namespace detail {

/// Sum over k > K of k * (amplitude rho^k / k)^2, bounded geometrically.
inline double geometric_tail(double amplitude, double rate, int K) {
    if (amplitude == 0.0 || rate == 0.0) return 0.0;
    if (rate >= 1.0) return std::numeric_limits<double>::infinity();
    const double k1 = static_cast<double>(K) + 1.0;
    return amplitude * amplitude * std::pow(rate, 2.0 * k1) / (k1 * (1.0 - rate * rate));
}

/// Unit-amplitude envelope fitted through the last retained coefficient.
inline double estimated_tail(double last, int K) {
    if (K < 1) return std::numeric_limits<double>::infinity();
    const double scaled = std::abs(last) * K;
    if (scaled == 0.0) return 0.0;
    return geometric_tail(1.0, std::pow(scaled, 1.0 / K), K);
}

inline void require_power(const CepstrumSequence& c) {
    require(c.kind() == CepstrumKind::power, ErrorCode::KindMismatch, "weighted cepstral metrics need power cepstra");
}

} // namespace detail

/// d^2 = sum_{k=1}^{K} k (c1(k) - c2(k))^2 over the common order K.
inline WeightedCepstralResult weighted_cepstral_distance(const CepstrumSequence& c1, const CepstrumSequence& c2) {
    detail::require_power(c1);
    detail::require_power(c2);
    const int K = std::min(c1.order(), c2.order());
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double d = c1(k) - c2(k);
        sum += k * d * d;
    }
    double tail;
    const auto& b1 = c1.decay_bound();
    const auto& b2 = c2.decay_bound();
    if (b1 && b2)
        tail = detail::geometric_tail(b1->amplitude + b2->amplitude, std::max(b1->rate, b2->rate), K);
    else
        tail = K > 0 ? detail::estimated_tail(c1(K) - c2(K), K) : std::numeric_limits<double>::infinity();
    return {sum, K, tail};
}

/// ||H||^2 = sum_{k=1}^{K} k c(k)^2.
inline WeightedCepstralResult weighted_cepstral_norm(const CepstrumSequence& c) {
    detail::require_power(c);
    const int K = c.order();
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) sum += k * c(k) * c(k);
    double tail;
    if (const auto& b = c.decay_bound())
        tail = detail::geometric_tail(b->amplitude, b->rate, K);
    else
        tail = K > 0 ? detail::estimated_tail(c(K), K) : std::numeric_limits<double>::infinity();
    return {sum, K, tail};
}

/// Squared Frobenius norm of the m x m Hankel matrix with entries c(a + b + 1).
inline double hs_hankel_norm(const CepstrumSequence& c, int m) {
    detail::require_power(c);
    detail::require(m >= 1, ErrorCode::InvalidArgument, "Hankel size must be positive");
    detail::require(2 * m <= c.order(), ErrorCode::InvalidArgument, "Hankel size exceeds half the cepstrum order");
    Eigen::MatrixXd H(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) H(a, b) = c(a + b + 1);
    return H.squaredNorm();
}

namespace detail {

/// log|1 - x|, accurate for small |x|.
inline double log_abs_one_minus(Complex x) {
    return 0.5 * std::log1p(std::norm(x) - 2.0 * x.real());
}

/// Sum over all (a, b) of log|1 - a conj(b)|.
inline double pair_log_sum(const std::vector<Complex>& as, const std::vector<Complex>& bs) {
    double s = 0.0;
    for (const Complex& a : as)
        for (const Complex& b : bs) s += log_abs_one_minus(a * std::conj(b));
    return s;
}

inline double folded_norm(const std::vector<Complex>& poles, const std::vector<Complex>& zeros) {
    return 2.0 * pair_log_sum(poles, zeros) - pair_log_sum(poles, poles) - pair_log_sum(zeros, zeros);
}

inline std::vector<Complex> inverted(const std::vector<Complex>& roots) {
    std::vector<Complex> out;
    out.reserve(roots.size());
    for (const Complex& r : roots) out.push_back(1.0 / std::conj(r));
    return out;
}

inline std::vector<Complex> joined(std::vector<Complex> a, const std::vector<Complex>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace detail

/// log[ prod|1 - a_i conj(b_j)|^2 / (prod(1 - a_i conj(a_j)) prod(1 - b_i conj(b_j))) ]
/// for stable poles a and minimum-phase zeros b.
inline double closed_form_norm_min_phase(const ZeroPoleGain& zpk) {
    detail::require(zpk.is_minimum_phase_stable(), ErrorCode::WrongPhaseType,
                    "expected only stable poles and minimum-phase zeros");
    return detail::folded_norm(zpk.stable_poles(), zpk.min_zeros());
}

/// Same expression in the inverses of unstable poles and maximum-phase zeros.
inline double closed_form_norm_max_phase(const ZeroPoleGain& zpk) {
    detail::require(zpk.is_maximum_phase_unstable(), ErrorCode::WrongPhaseType,
                    "expected only unstable poles and maximum-phase zeros");
    return detail::folded_norm(detail::inverted(zpk.unstable_poles()), detail::inverted(zpk.max_zeros()));
}

/// General case: outside roots enter through their inverses alongside the inside roots.
inline double closed_form_norm_mixed(const ZeroPoleGain& zpk) {
    return detail::folded_norm(detail::joined(zpk.stable_poles(), detail::inverted(zpk.unstable_poles())),
                               detail::joined(zpk.min_zeros(), detail::inverted(zpk.max_zeros())));
}

struct CascadeResult {
    ZeroPoleGain model;
    std::size_t cancelled_pairs;
};

/// H1 * H2^{-1}: poles of H1 with zeros of H2, zeros of H1 with poles of H2.
/// Coinciding pole/zero pairs cancel.
inline CascadeResult cascade(const ZeroPoleGain& h1, const ZeroPoleGain& h2) {
    detail::require(h2.gain() != 0.0, ErrorCode::NotInvertible, "second system has zero gain");
    auto poles = detail::joined(h1.poles(), h2.zeros());
    auto zeros = detail::joined(h1.zeros(), h2.poles());
    std::vector<bool> used(zeros.size(), false);
    std::vector<Complex> kept_poles;
    std::size_t cancelled = 0;
    for (const Complex& p : poles) {
        bool hit = false;
        for (std::size_t z = 0; z < zeros.size(); ++z) {
            if (!used[z] && std::abs(p - zeros[z]) <= tolerance::multiplicity * std::max(1.0, std::abs(p))) {
                used[z] = true;
                hit = true;
                ++cancelled;
                break;
            }
        }
        if (!hit) kept_poles.push_back(p);
    }
    std::vector<Complex> kept_zeros;
    for (std::size_t z = 0; z < zeros.size(); ++z)
        if (!used[z]) kept_zeros.push_back(zeros[z]);
    return {ZeroPoleGain::from_roots(std::move(kept_poles), std::move(kept_zeros), h1.gain() / h2.gain()),
            cancelled};
}

// ---------------------------------------------------------------------------
// Baseline distances

inline double euclidean_distance(const Signal& y1, const Signal& y2) {
    detail::require(y1.size() == y2.size(), ErrorCode::LengthMismatch, "signals differ in length");
    double s = 0.0;
    for (std::size_t k = 0; k < y1.size(); ++k) {
        const double d = y1[k] - y2[k];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Cosine of the angle between the two sample vectors; 1 for identical signals.
inline double cosine_similarity(const Signal& y1, const Signal& y2) {
    detail::require(y1.size() == y2.size(), ErrorCode::LengthMismatch, "signals differ in length");
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t k = 0; k < y1.size(); ++k) {
        dot += y1[k] * y2[k];
        n1 += y1[k] * y1[k];
        n2 += y2[k] * y2[k];
    }
    detail::require(n1 > 0.0 && n2 > 0.0, ErrorCode::ZeroNorm, "cosine similarity of a zero signal");
    return std::clamp(dot / (std::sqrt(n1) * std::sqrt(n2)), -1.0, 1.0);
}

struct SignalStatistics {
    double median;
    double mean;
    double standard_deviation; ///< population (1/N) normalization
};

inline SignalStatistics signal_statistics(const Signal& y) {
    std::vector<double> v(y.samples().begin(), y.samples().end());
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {median, mean, std::sqrt(ss / static_cast<double>(n))};
}

} // namespace cepdist

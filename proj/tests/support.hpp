#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cepdist/cepdist.hpp"

namespace support {

using cepdist::Complex;
using cepdist::ZeroPoleGain;

/// Random simple-root sets: real roots and conjugate pairs with magnitudes in
/// [lo, hi], kept at least `gap` away from every root drawn so far.
class RootSampler {
public:
    explicit RootSampler(std::uint64_t seed) : source_(seed) {}

    double uniform(double a, double b) { return a + (b - a) * source_.uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(source_.uniform() * (hi - lo + 1)); }

    /// Up to `max_roots` roots (a pair counts as two).
    std::vector<Complex> roots(int max_roots, double lo = 0.2, double hi = 0.95, double gap = 0.05) {
        const int target = integer(0, max_roots);
        std::vector<Complex> out;
        while (static_cast<int>(out.size()) < target) {
            const bool pair = target - static_cast<int>(out.size()) >= 2 && source_.uniform() < 0.5;
            for (int attempt = 0; attempt < 100; ++attempt) {
                const double r = uniform(lo, hi);
                const Complex z = pair ? std::polar(r, uniform(0.15, std::numbers::pi - 0.15))
                                       : Complex(source_.uniform() < 0.5 ? -r : r, 0.0);
                if (!clear(z, gap) || (pair && !clear(std::conj(z), gap))) continue;
                out.push_back(z);
                taken_.push_back(z);
                if (pair) {
                    out.push_back(std::conj(z));
                    taken_.push_back(std::conj(z));
                }
                break;
            }
        }
        return out;
    }

    ZeroPoleGain min_phase(int max_per_side, double lo = 0.2, double hi = 0.95) {
        taken_.clear();
        auto p = roots(max_per_side, lo, hi);
        auto z = roots(max_per_side, lo, hi);
        return ZeroPoleGain::from_roots(p, z, uniform(0.5, 2.0));
    }

    /// At most `max_total` roots overall; each real root or conjugate pair is
    /// moved outside the unit circle with probability `outside`.
    ZeroPoleGain any_phase(int max_total, double outside = 0.5, double lo = 0.2, double hi = 0.95) {
        taken_.clear();
        const int n_poles = integer(0, max_total);
        auto p = roots(n_poles, lo, hi);
        auto z = roots(max_total - static_cast<int>(p.size()), lo, hi);
        flip(p, outside);
        flip(z, outside);
        return ZeroPoleGain::from_roots(p, z, uniform(0.5, 2.0) * (source_.uniform() < 0.5 ? -1.0 : 1.0));
    }

    void reset() { taken_.clear(); }

private:
    void flip(std::vector<Complex>& roots, double outside) {
        for (std::size_t k = 0; k < roots.size(); ++k) {
            const bool pair = roots[k].imag() != 0.0;
            if (source_.uniform() < outside) {
                roots[k] = 1.0 / std::conj(roots[k]);
                if (pair) roots[k + 1] = 1.0 / std::conj(roots[k + 1]);
            }
            if (pair) ++k;
        }
    }

    bool clear(Complex z, double gap) const {
        for (const Complex& t : taken_)
            if (std::abs(t - z) < gap || std::abs(1.0 / std::conj(t) - z) < gap) return false;
        return std::abs(z.imag()) == 0.0 || std::abs(z.imag()) > gap;
    }

    cepdist::NormalSource source_;
    std::vector<Complex> taken_;
};

/// Dense realization: the canonical form under a random similarity transform.
inline cepdist::StateSpaceModel dense_realization(const ZeroPoleGain& zpk, std::uint64_t seed) {
    const auto base = cepdist::realize(zpk);
    const auto n = base.order();
    cepdist::NormalSource source(seed);
    Eigen::MatrixXd T(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) T(i, j) = source() * 0.3 + (i == j ? 1.0 : 0.0);
    const Eigen::MatrixXd Ti = T.inverse();
    return {T * base.A() * Ti, T * base.B(), base.C() * Ti, base.D()};
}

} // namespace support

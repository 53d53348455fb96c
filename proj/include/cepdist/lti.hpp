#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cepdist/error.hpp"
#include "cepdist/random.hpp"

namespace cepdist {

using Complex = std::complex<double>;

namespace tolerance {
/// Roots closer than this to the unit circle are rejected.
inline constexpr double unit_circle = 1e-6;
/// |D| at or below this makes a model non-invertible.
inline constexpr double invertible = 1e-12;
/// Roots closer than this (relative to max(1, |root|)) count as repeated.
inline constexpr double multiplicity = 1e-8;
} // namespace tolerance

// ---------------------------------------------------------------------------
// Signal

class Signal {
public:
    explicit Signal(std::vector<double> samples, double sample_period = 1.0)
        : samples_(std::move(samples)), sample_period_(sample_period) {
        detail::require(!samples_.empty(), ErrorCode::EmptySignal, "signal has no samples");
        detail::require(std::isfinite(sample_period_) && sample_period_ > 0.0,
                        ErrorCode::InvalidArgument, "sample period must be positive");
        for (double v : samples_)
            detail::require(std::isfinite(v), ErrorCode::NonFinite, "signal sample is not finite");
    }

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double sample_period() const noexcept { return sample_period_; }
    double operator[](std::size_t k) const { return samples_[k]; }

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> samples_;
    double sample_period_;
};

inline Signal impulse(std::size_t length, double sample_period = 1.0) {
    std::vector<double> v(length, 0.0);
    if (length > 0) v[0] = 1.0;
    return Signal(std::move(v), sample_period);
}

inline Signal white_noise(std::size_t length, std::uint64_t seed, double sigma = 1.0,
                          double sample_period = 1.0) {
    NormalSource source(seed);
    return Signal(source.draw(length, sigma), sample_period);
}

// ---------------------------------------------------------------------------
// State-space model

/// SISO discrete-time system x(k+1) = A x(k) + B u(k), y(k) = C x(k) + D u(k).
class StateSpaceModel {
public:
    StateSpaceModel(Eigen::MatrixXd A, Eigen::VectorXd B, Eigen::RowVectorXd C, double D)
        : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(D) {
        detail::require(A_.rows() == A_.cols(), ErrorCode::DimensionMismatch, "A must be square");
        detail::require(B_.size() == A_.rows(), ErrorCode::DimensionMismatch,
                        "B length must equal state dimension");
        detail::require(C_.size() == A_.rows(), ErrorCode::DimensionMismatch,
                        "C length must equal state dimension");
        detail::require(A_.allFinite() && B_.allFinite() && C_.allFinite() && std::isfinite(D_),
                        ErrorCode::NonFinite, "model matrices must be finite");
    }

    /// Static gain y = D u with a single inert state.
    static StateSpaceModel feedthrough(double D) {
        return {Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), Eigen::RowVectorXd::Zero(1), D};
    }

    const Eigen::MatrixXd& A() const noexcept { return A_; }
    const Eigen::VectorXd& B() const noexcept { return B_; }
    const Eigen::RowVectorXd& C() const noexcept { return C_; }
    double D() const noexcept { return D_; }
    Eigen::Index order() const noexcept { return A_.rows(); }
    bool invertible() const noexcept { return std::abs(D_) > tolerance::invertible; }

    /// A - B D^-1 C, the dynamics matrix of the inverse system.
    Eigen::MatrixXd inverse_dynamics() const {
        detail::require(invertible(), ErrorCode::NotInvertible, "feedthrough D is zero");
        return A_ - (B_ * C_) / D_;
    }

private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd B_;
    Eigen::RowVectorXd C_;
    double D_;
};

inline Signal simulate(const StateSpaceModel& model, const Signal& input, const Eigen::VectorXd& x0) {
    detail::require(x0.size() == model.order(), ErrorCode::DimensionMismatch,
                    "initial state length must equal model order");
    Eigen::VectorXd x = x0;
    Eigen::VectorXd next(x.size());
    std::vector<double> y(input.size());
    for (std::size_t k = 0; k < input.size(); ++k) {
        const double u = input[k];
        y[k] = model.C().dot(x) + model.D() * u;
        next.noalias() = model.A() * x + model.B() * u;
        x.swap(next);
        if (!std::isfinite(y[k]) || !x.allFinite())
            detail::fail(ErrorCode::NonFinite,
                         "state recursion overflowed at sample " + std::to_string(k) +
                             " (unstable dynamics; use the frequency-domain path)");
    }
    return Signal(std::move(y), input.sample_period());
}

inline Signal simulate(const StateSpaceModel& model, const Signal& input) {
    return simulate(model, input, Eigen::VectorXd::Zero(model.order()));
}

inline StateSpaceModel invert(const StateSpaceModel& model) {
    detail::require(model.invertible(), ErrorCode::NotInvertible, "feedthrough D is zero");
    const double d_inv = 1.0 / model.D();
    return {model.inverse_dynamics(), model.B() * d_inv, -d_inv * model.C(), d_inv};
}

inline double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Zero-pole-gain model

/// Factored transfer function
///   H(z) = g * prod(1 - beta z^-1) prod(1 - delta z^-1) / (prod(1 - alpha z^-1) prod(1 - gamma z^-1))
/// with roots partitioned by magnitude. Construction validates that every root is
/// off the unit circle, that complex roots come in conjugate pairs and that roots
/// of the same kind are simple.
class ZeroPoleGain {
public:
    ZeroPoleGain() = default;

    static ZeroPoleGain from_roots(std::vector<Complex> poles, std::vector<Complex> zeros, double gain = 1.0) {
        detail::require(std::isfinite(gain), ErrorCode::NonFinite, "gain must be finite");
        ZeroPoleGain zpk;
        zpk.gain_ = gain;
        normalize(poles, "pole");
        normalize(zeros, "zero");
        for (const Complex& p : poles) (std::abs(p) < 1.0 ? zpk.stable_poles_ : zpk.unstable_poles_).push_back(p);
        for (const Complex& z : zeros) (std::abs(z) < 1.0 ? zpk.min_zeros_ : zpk.max_zeros_).push_back(z);
        return zpk;
    }

    static ZeroPoleGain gain_only(double gain) { return from_roots({}, {}, gain); }

    const std::vector<Complex>& stable_poles() const noexcept { return stable_poles_; }
    const std::vector<Complex>& unstable_poles() const noexcept { return unstable_poles_; }
    const std::vector<Complex>& min_zeros() const noexcept { return min_zeros_; }
    const std::vector<Complex>& max_zeros() const noexcept { return max_zeros_; }
    double gain() const noexcept { return gain_; }

    std::vector<Complex> poles() const { return concat(stable_poles_, unstable_poles_); }
    std::vector<Complex> zeros() const { return concat(min_zeros_, max_zeros_); }
    std::size_t root_count() const noexcept {
        return stable_poles_.size() + unstable_poles_.size() + min_zeros_.size() + max_zeros_.size();
    }

    bool has_inside_roots() const noexcept { return !stable_poles_.empty() || !min_zeros_.empty(); }
    bool has_outside_roots() const noexcept { return !unstable_poles_.empty() || !max_zeros_.empty(); }
    bool is_minimum_phase_stable() const noexcept { return !has_outside_roots(); }
    bool is_maximum_phase_unstable() const noexcept { return !has_inside_roots(); }
    bool is_mixed() const noexcept { return has_inside_roots() && has_outside_roots(); }

    /// Largest root magnitude after folding outside roots to 1/|root|.
    double folded_radius() const noexcept {
        double r = 0.0;
        for (const auto* list : {&stable_poles_, &min_zeros_})
            for (const Complex& x : *list) r = std::max(r, std::abs(x));
        for (const auto* list : {&unstable_poles_, &max_zeros_})
            for (const Complex& x : *list) r = std::max(r, 1.0 / std::abs(x));
        return r;
    }

private:
    static std::vector<Complex> concat(const std::vector<Complex>& a, const std::vector<Complex>& b) {
        std::vector<Complex> out(a);
        out.insert(out.end(), b.begin(), b.end());
        return out;
    }

    static double scale(Complex z) { return std::max(1.0, std::abs(z)); }

    static void normalize(std::vector<Complex>& roots, const char* what) {
        const std::string kind(what);
        for (Complex& r : roots) {
            detail::require(std::isfinite(r.real()) && std::isfinite(r.imag()), ErrorCode::NonFinite,
                            "root is not finite");
            if (std::abs(std::abs(r) - 1.0) <= tolerance::unit_circle)
                detail::fail(ErrorCode::UnitCircleRoot, kind + " lies on the unit circle");
            if (std::abs(r.imag()) <= 1e-12 * scale(r)) r = {r.real(), 0.0};
        }
        // pair every upper-half-plane root with its closest lower-half-plane partner
        std::vector<bool> used(roots.size(), false);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (roots[i].imag() <= 0.0) continue;
            std::size_t best = roots.size();
            double best_dist = 0.0;
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (used[j] || roots[j].imag() >= 0.0) continue;
                const double dist = std::abs(roots[j] - std::conj(roots[i]));
                if (best == roots.size() || dist < best_dist) {
                    best = j;
                    best_dist = dist;
                }
            }
            if (best == roots.size() || best_dist > 1e-8 * scale(roots[i]))
                detail::fail(ErrorCode::ConjugateMismatch, kind + " has no conjugate partner");
            used[best] = true;
            roots[best] = std::conj(roots[i]);
        }
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (roots[j].imag() < 0.0 && !used[j])
                detail::fail(ErrorCode::ConjugateMismatch, kind + " has no conjugate partner");

        std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
            if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        for (std::size_t i = 0; i < roots.size(); ++i)
            for (std::size_t j = i + 1; j < roots.size(); ++j)
                if (std::abs(roots[i] - roots[j]) <= tolerance::multiplicity * scale(roots[i]))
                    detail::fail(ErrorCode::NonSimpleRoot, "repeated " + kind);
    }

    std::vector<Complex> stable_poles_;
    std::vector<Complex> unstable_poles_;
    std::vector<Complex> min_zeros_;
    std::vector<Complex> max_zeros_;
    double gain_ = 1.0;
};

/// Replace every root for which `select(root, is_pole)` holds by 1/conj(root).
/// The predicate must treat conjugate partners alike.
template <typename Predicate>
ZeroPoleGain reflect_roots(const ZeroPoleGain& zpk, Predicate select) {
    auto reflect = [&](std::vector<Complex> roots, bool is_pole) {
        for (Complex& r : roots)
            if (select(r, is_pole)) r = 1.0 / std::conj(r);
        return roots;
    };
    return ZeroPoleGain::from_roots(reflect(zpk.poles(), true), reflect(zpk.zeros(), false), zpk.gain());
}

inline ZeroPoleGain reflect_all(const ZeroPoleGain& zpk) {
    return reflect_roots(zpk, [](Complex, bool) { return true; });
}

/// Poles are eig(A), zeros are eig(A - B D^-1 C), gain is D.
inline ZeroPoleGain roots_from_state_space(const StateSpaceModel& model) {
    detail::require(model.invertible(), ErrorCode::NotInvertible, "feedthrough D is zero");
    auto eig = [](const Eigen::MatrixXd& M) {
        std::vector<Complex> out;
        if (M.rows() == 0) return out;
        Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
        detail::require(solver.info() == Eigen::Success, ErrorCode::NotConverged, "eigensolver failed");
        for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(solver.eigenvalues()[i]);
        return out;
    };
    return ZeroPoleGain::from_roots(eig(model.A()), eig(model.inverse_dynamics()), model.D());
}

namespace detail {

/// Monic polynomial coefficients (highest power first) with the given roots.
inline std::vector<double> poly_from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> c{1.0};
    for (const Complex& r : roots) {
        std::vector<Complex> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= r * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

} // namespace detail

/// Controllable canonical realization of the zpk transfer function. Orders of
/// numerator and denominator are balanced with roots at the origin.
inline StateSpaceModel realize(const ZeroPoleGain& zpk) {
    auto poles = zpk.poles();
    auto zeros = zpk.zeros();
    const std::size_t n = std::max(poles.size(), zeros.size());
    poles.resize(n, Complex{0.0});
    zeros.resize(n, Complex{0.0});
    const auto den = detail::poly_from_roots(poles);
    auto num = detail::poly_from_roots(zeros);
    for (double& b : num) b *= zpk.gain();

    if (n == 0) return StateSpaceModel::feedthrough(zpk.gain());
    const auto order = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(order, order);
    Eigen::VectorXd B = Eigen::VectorXd::Zero(order);
    Eigen::RowVectorXd C(order);
    for (Eigen::Index i = 0; i < order; ++i) {
        A(0, i) = -den[static_cast<std::size_t>(i) + 1];
        C(i) = num[static_cast<std::size_t>(i) + 1] - num[0] * den[static_cast<std::size_t>(i) + 1];
    }
    for (Eigen::Index i = 1; i < order; ++i) A(i, i - 1) = 1.0;
    B(0) = 1.0;
    return {std::move(A), std::move(B), std::move(C), num[0]};
}

// ---------------------------------------------------------------------------
// Frequency response

inline std::vector<Complex> frequency_response(const ZeroPoleGain& zpk, std::span<const double> grid) {
    std::vector<Complex> out;
    out.reserve(grid.size());
    const auto poles = zpk.poles();
    const auto zeros = zpk.zeros();
    for (double w : grid) {
        const Complex zinv = std::polar(1.0, -w);
        Complex h = zpk.gain();
        for (const Complex& b : zeros) h *= 1.0 - b * zinv;
        for (const Complex& a : poles) h /= 1.0 - a * zinv;
        out.push_back(h);
    }
    return out;
}

/// D + C (zI - A)^-1 B evaluated at z = e^{iw}.
inline std::vector<Complex> frequency_response(const StateSpaceModel& model, std::span<const double> grid) {
    const Eigen::MatrixXcd A = model.A().cast<Complex>();
    const Eigen::VectorXcd B = model.B().cast<Complex>();
    const Eigen::RowVectorXcd C = model.C().cast<Complex>();
    const auto n = model.order();
    std::vector<Complex> out;
    out.reserve(grid.size());
    for (double w : grid) {
        const Complex z = std::polar(1.0, w);
        Complex h = model.D();
        if (n > 0) {
            const Eigen::MatrixXcd M = z * Eigen::MatrixXcd::Identity(n, n) - A;
            h += (C * M.partialPivLu().solve(B))(0, 0);
        }
        out.push_back(h);
    }
    return out;
}

/// Uniform grid w_m = 2 pi m / L, m = 0..L-1.
inline std::vector<double> unit_circle_grid(std::size_t length) {
    std::vector<double> grid(length);
    for (std::size_t m = 0; m < length; ++m)
        grid[m] = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(length);
    return grid;
}

/// Filters `input` through the bounded (two-sided) impulse response of `zpk`:
/// stable poles act causally, unstable poles anticausally. For a
/// minimum-phase stable zpk this is ordinary causal filtering from rest.
inline Signal filter_zpk(const ZeroPoleGain& zpk, const Signal& input) {
    const std::size_t n = input.size();
    std::vector<Complex> w(input.samples().begin(), input.samples().end());
    for (const auto* list : {&zpk.min_zeros(), &zpk.max_zeros()})
        for (const Complex& b : *list)
            for (std::size_t k = n; k-- > 1;) w[k] -= b * w[k - 1];
    for (const Complex& a : zpk.stable_poles())
        for (std::size_t k = 1; k < n; ++k) w[k] += a * w[k - 1];
    // 1/(1 - g z^-1) with |g| > 1 expands as -sum_{m>=1} g^-m z^m
    for (const Complex& g : zpk.unstable_poles()) {
        std::vector<Complex> v(n, 0.0);
        for (std::size_t k = n - 1; k-- > 0;) v[k] = (v[k + 1] - w[k + 1]) / g;
        w = std::move(v);
    }
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = zpk.gain() * w[k].real();
        detail::require(std::isfinite(y[k]), ErrorCode::NonFinite, "filter output is not finite");
    }
    return Signal(std::move(y), input.sample_period());
}

// ---------------------------------------------------------------------------
// Motivating example signals

struct ExampleSignals {
    Signal sine;
    Signal cosine;
    Signal noise;
};

inline constexpr double example_default_damping = 0.995;

/// Damped sine and cosine at 10 rad/s and damped Gaussian noise (sigma 0.7071),
/// sampled every 0.01 s on t in [0, 11]. `damping` is the per-sample envelope factor.
inline ExampleSignals make_example_signals(double damping = example_default_damping, std::uint64_t seed = 1) {
    detail::require(damping > 0.0 && damping <= 1.0, ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
    constexpr std::size_t length = 1101;
    constexpr double dt = 0.01;
    constexpr double omega = 10.0;
    constexpr double sigma = 0.7071;
    NormalSource source(seed);
    std::vector<double> s(length), c(length), g(length);
    for (std::size_t k = 0; k < length; ++k) {
        const double envelope = std::pow(damping, static_cast<double>(k));
        const double t = dt * static_cast<double>(k);
        s[k] = envelope * std::sin(omega * t);
        c[k] = envelope * std::cos(omega * t);
        g[k] = envelope * sigma * source();
    }
    return {Signal(std::move(s), dt), Signal(std::move(c), dt), Signal(std::move(g), dt)};
}

} // namespace cepdist

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cepdist/error.hpp"
#include "cepdist/lti.hpp"
#include "cepdist/metrics.hpp"

namespace cepdist {

namespace tolerance {
inline constexpr double rank = 1e-10;
inline constexpr double convergence = 1e-10;
/// Roots closer than this to the origin are treated as lying on it.
inline constexpr double origin = 1e-8;
} // namespace tolerance

inline constexpr int default_observability_rows = 400;
inline constexpr int max_observability_rows = 1 << 14;
inline constexpr int default_hankel_rows = 128;

struct HankelMatrix {
    Eigen::MatrixXd entries;

    Eigen::Index block_rows() const noexcept { return entries.rows(); }
    Eigen::Index columns() const noexcept { return entries.cols(); }
};

/// Entry (a, b) = y(a + b) / sqrt(j).
inline HankelMatrix build_hankel(const Signal& y, Eigen::Index i, Eigen::Index j) {
    detail::require(i >= 1 && j >= 1, ErrorCode::InvalidArgument, "Hankel dimensions must be positive");
    detail::require(static_cast<std::size_t>(i + j - 1) <= y.size(), ErrorCode::InsufficientData,
                    "signal too short for the requested Hankel shape");
    const double scale = 1.0 / std::sqrt(static_cast<double>(j));
    HankelMatrix h{Eigen::MatrixXd(i, j)};
    for (Eigen::Index a = 0; a < i; ++a)
        for (Eigen::Index b = 0; b < j; ++b) h.entries(a, b) = scale * y[static_cast<std::size_t>(a + b)];
    return h;
}

namespace detail {

template <typename Derived>
auto thin_q(const Eigen::MatrixBase<Derived>& M) {
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    require(M.rows() >= M.cols(), ErrorCode::DimensionMismatch, "thin QR needs at least as many rows as columns");
    Eigen::HouseholderQR<Matrix> qr(M);
    Matrix Q = qr.householderQ() * Matrix::Identity(M.rows(), M.cols());
    return std::pair{Q, Matrix(qr.matrixQR().topRows(M.cols()).template triangularView<Eigen::Upper>())};
}

template <typename Derived>
void require_full_rank(const Eigen::MatrixBase<Derived>& M, const char* what) {
    Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(M);
    const auto& s = svd.singularValues();
    require(s.size() > 0 && s(0) > 0.0 && s(s.size() - 1) > tolerance::rank * s(0), ErrorCode::RankDeficient, what);
}

} // namespace detail

/// Y - U (U^T U)^{-1} U^T Y via an orthonormal basis of U, applied twice for
/// numerical orthogonality.
inline Eigen::MatrixXd project_complement(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& U) {
    detail::require(Y.rows() == U.rows(), ErrorCode::DimensionMismatch, "row counts differ");
    detail::require(U.cols() <= U.rows(), ErrorCode::RankDeficient, "more columns than rows");
    auto [Q, R] = detail::thin_q(U);
    Eigen::VectorXd d = R.diagonal().cwiseAbs();
    detail::require(d.size() > 0 && d.maxCoeff() > 0.0, ErrorCode::RankDeficient, "projection basis is zero");
    detail::require_full_rank(R, "projection basis is rank deficient");
    Eigen::MatrixXd P = Y - Q * (Q.transpose() * Y);
    P -= Q * (Q.transpose() * P);
    return P;
}

/// j x count matrix with columns (1, r, r^2, ...). Roots at the origin share
/// confluent columns e_1, e_2, ... so repeated origin roots stay full rank.
inline Eigen::MatrixXcd vandermonde_range(const std::vector<Complex>& roots, Eigen::Index j) {
    const auto count = static_cast<Eigen::Index>(roots.size());
    detail::require(j >= count, ErrorCode::InvalidArgument, "fewer rows than roots");
    for (std::size_t a = 0; a < roots.size(); ++a)
        for (std::size_t b = a + 1; b < roots.size(); ++b)
            if (std::abs(roots[a]) > tolerance::origin &&
                std::abs(roots[a] - roots[b]) <= tolerance::multiplicity * std::max(1.0, std::abs(roots[a])))
                detail::fail(ErrorCode::NonSimpleRoot, "Vandermonde roots must be distinct");
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(j, count);
    Eigen::Index origin_seen = 0;
    for (Eigen::Index m = 0; m < count; ++m) {
        const Complex r = roots[static_cast<std::size_t>(m)];
        if (std::abs(r) <= tolerance::origin) {
            V(origin_seen++, m) = 1.0;
            continue;
        }
        Complex p = 1.0;
        for (Eigen::Index row = 0; row < j; ++row) {
            V(row, m) = p;
            p *= r;
        }
    }
    return V;
}

struct PrincipalAngleSet {
    std::vector<double> angles; ///< ascending, in [0, pi/2]
    std::vector<double> cos2;

    std::size_t size() const noexcept { return angles.size(); }

    /// -log prod cos^2
    double log_norm() const {
        double s = 0.0;
        for (double c : cos2) s -= std::log(c);
        return s;
    }
};

namespace detail {

inline PrincipalAngleSet from_cosines(std::vector<double> cosines) {
    for (double& c : cosines) c = std::clamp(c, 0.0, 1.0);
    std::sort(cosines.begin(), cosines.end(), std::greater<>());
    PrincipalAngleSet set;
    for (double c : cosines) {
        set.angles.push_back(std::acos(c));
        set.cos2.push_back(c * c);
    }
    return set;
}

} // namespace detail

/// Angles between the column spaces of A and B from the singular values of
/// Qa^H Qb (orthonormalized bases).
template <typename DA, typename DB>
PrincipalAngleSet principal_angles(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B) {
    detail::require(A.rows() == B.rows(), ErrorCode::DimensionMismatch, "bases differ in ambient dimension");
    detail::require(A.cols() >= 1 && B.cols() >= 1, ErrorCode::RankDeficient, "empty basis");
    detail::require(A.cols() <= A.rows() && B.cols() <= B.rows(), ErrorCode::RankDeficient,
                    "more basis vectors than dimensions");
    detail::require_full_rank(A, "first basis is rank deficient");
    detail::require_full_rank(B, "second basis is rank deficient");
    const auto Qa = detail::thin_q(A).first;
    const auto Qb = detail::thin_q(B).first;
    const auto M = (Qa.adjoint() * Qb).eval();
    Eigen::JacobiSVD<std::decay_t<decltype(M)>> svd(M);
    const auto& s = svd.singularValues();
    return detail::from_cosines(std::vector<double>(s.data(), s.data() + s.size()));
}

/// Same angles from the symmetric-definite pencil
/// [0 A^H B; B^H A 0] v = lambda [A^H A 0; 0 B^H B] v, whose positive
/// eigenvalues are the cosines.
template <typename DA, typename DB>
PrincipalAngleSet principal_angles_gep(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B) {
    using Scalar = typename DA::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    detail::require(A.rows() == B.rows(), ErrorCode::DimensionMismatch, "bases differ in ambient dimension");
    detail::require_full_rank(A, "first basis is rank deficient");
    detail::require_full_rank(B, "second basis is rank deficient");
    const Eigen::Index p = A.cols(), q = B.cols();
    Matrix lhs = Matrix::Zero(p + q, p + q);
    Matrix rhs = Matrix::Zero(p + q, p + q);
    lhs.topRightCorner(p, q) = A.adjoint() * B;
    lhs.bottomLeftCorner(q, p) = B.adjoint() * A;
    rhs.topLeftCorner(p, p) = A.adjoint() * A;
    rhs.bottomRightCorner(q, q) = B.adjoint() * B;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> gep(lhs, rhs);
    detail::require(gep.info() == Eigen::Success, ErrorCode::NotConverged, "generalized eigensolver failed");
    const auto& ev = gep.eigenvalues();
    std::vector<double> cosines;
    const Eigen::Index count = std::min(p, q);
    for (Eigen::Index k = 0; k < count; ++k) cosines.push_back(ev(ev.size() - 1 - k));
    return detail::from_cosines(std::move(cosines));
}

namespace detail {

/// Pole and zero sets whose observability ranges are compared, padded with
/// origin roots to a common state dimension.
inline std::pair<std::vector<Complex>, std::vector<Complex>> subspace_root_sets(const ZeroPoleGain& zpk) {
    if (zpk.is_mixed())
        fail(ErrorCode::MixedPhaseUnsupported, "subspace norm is defined only for minimum-phase stable or "
                                               "maximum-phase unstable systems");
    std::vector<Complex> poles, zeros;
    if (zpk.is_minimum_phase_stable()) {
        poles = zpk.stable_poles();
        zeros = zpk.min_zeros();
    } else {
        poles = inverted(zpk.unstable_poles());
        zeros = inverted(zpk.max_zeros());
    }
    const std::size_t n = std::max(poles.size(), zeros.size());
    poles.resize(n, Complex(0.0));
    zeros.resize(n, Complex(0.0));
    return {poles, zeros};
}

} // namespace detail

/// -log prod cos^2 of the angles between pole and zero observability ranges
/// truncated at j rows.
inline double subspace_norm_from_model_at(const ZeroPoleGain& zpk, Eigen::Index j) {
    const auto [poles, zeros] = detail::subspace_root_sets(zpk);
    if (poles.empty()) return 0.0;
    return principal_angles(vandermonde_range(poles, j), vandermonde_range(zeros, j)).log_norm();
}

/// Doubles the truncation from j until successive values agree to within the
/// convergence tolerance.
inline double subspace_norm_from_model(const ZeroPoleGain& zpk, int j = default_observability_rows) {
    detail::require(j >= 1, ErrorCode::InvalidArgument, "truncation must be positive");
    double previous = subspace_norm_from_model_at(zpk, j);
    for (int rows = 2 * j; rows <= max_observability_rows; rows *= 2) {
        const double current = subspace_norm_from_model_at(zpk, rows);
        if (std::abs(current - previous) < tolerance::convergence) return current;
        previous = current;
    }
    detail::fail(ErrorCode::NotConverged, "observability truncation did not converge");
}

inline double subspace_distance_between_models(const ZeroPoleGain& h1, const ZeroPoleGain& h2,
                                               int j = default_observability_rows) {
    return subspace_norm_from_model(cascade(h1, h2).model, j);
}

namespace detail {

/// Orthonormal basis of the column space of M, dropping directions below the
/// rank tolerance relative to `reference`.
inline Eigen::MatrixXd column_range(const Eigen::MatrixXd& M, double reference) {
    // wide inputs are compressed to their triangular factor first
    const Eigen::MatrixXd S = M.cols() > M.rows() ? Eigen::MatrixXd(thin_q(M.transpose()).second.transpose()) : M;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tolerance::rank * reference) ++r;
    return svd.matrixU().leftCols(r);
}

struct DataRanges {
    Eigen::MatrixXd output; ///< range of Y restricted to the complement of U
    Eigen::MatrixXd input;  ///< range of U restricted to the complement of Y
};

inline DataRanges data_ranges(const Signal& u, const Signal& y, int i, int j) {
    require(u.size() == y.size(), ErrorCode::LengthMismatch, "input and output lengths differ");
    require(i >= 1, ErrorCode::InvalidArgument, "block rows must be positive");
    const auto N = static_cast<int>(y.size());
    const int cols = j > 0 ? j : N - i + 1;
    require(cols > i, ErrorCode::InsufficientData, "need more Hankel columns than block rows");
    const auto Y = build_hankel(y, i, cols).entries;
    const auto U = build_hankel(u, i, cols).entries;
    const Eigen::MatrixXd Yt = Y.transpose();
    const Eigen::MatrixXd Ut = U.transpose();
    const double ry = Y.norm(), ru = U.norm();
    require(ry > 0.0 && ru > 0.0, ErrorCode::RankDeficient, "zero signal");
    return {column_range(project_complement(Yt, Ut).transpose(), ry),
            column_range(project_complement(Ut, Yt).transpose(), ru)};
}

inline Eigen::MatrixXd stacked_range(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd M(a.rows(), a.cols() + b.cols());
    M << a, b;
    return column_range(M, 1.0);
}

} // namespace detail

/// Angles between the output range (Y with U projected out) and the input
/// range (U with Y projected out) of i-row Hankel matrices. j = 0 uses all data.
inline double subspace_norm_from_data(const Signal& u, const Signal& y, int i = default_hankel_rows, int j = 0) {
    const auto r = detail::data_ranges(u, y, i, j);
    if (r.output.cols() == 0 && r.input.cols() == 0) return 0.0;
    detail::require(r.output.cols() > 0 && r.input.cols() > 0, ErrorCode::RankDeficient,
                    "one projected range is empty");
    return principal_angles(r.output, r.input).log_norm();
}

/// Distance between two input/output pairs from the stacked ranges of both models.
inline double subspace_distance_from_data(const Signal& u1, const Signal& y1, const Signal& u2, const Signal& y2,
                                          int i = default_hankel_rows, int j = 0) {
    const auto r1 = detail::data_ranges(u1, y1, i, j);
    const auto r2 = detail::data_ranges(u2, y2, i, j);
    const auto a = detail::stacked_range(r1.output, r2.input);
    const auto b = detail::stacked_range(r2.output, r1.input);
    if (a.cols() == 0 && b.cols() == 0) return 0.0;
    detail::require(a.cols() > 0 && b.cols() > 0, ErrorCode::RankDeficient, "one stacked range is empty");
    return principal_angles(a, b).log_norm();
}

} // namespace cepdist

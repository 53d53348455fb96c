#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cepdist/error.hpp"
#include "cepdist/lti.hpp"
#include "cepdist/metrics.hpp"
#include "cepdist/phase.hpp"
#include "cepdist/spectral.hpp"
#include "cepdist/subspace.hpp"

namespace cepdist {

enum class Metric { euclidean, cosine, cepstral, subspace };

constexpr std::string_view to_string(Metric m) noexcept {
    switch (m) {
        case Metric::euclidean: return "euclidean";
        case Metric::cosine: return "cosine";
        case Metric::cepstral: return "cepstral";
        case Metric::subspace: return "subspace";
    }
    return "unknown";
}

inline Metric parse_metric(std::string_view name) {
    for (Metric m : {Metric::euclidean, Metric::cosine, Metric::cepstral, Metric::subspace})
        if (name == to_string(m)) return m;
    detail::fail(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

/// An output signal, optionally paired with the input that produced it.
struct SignalRecord {
    std::string id;
    Signal output;
    std::optional<Signal> input;
};

struct DistanceConfig {
    EstimatorConfig estimator;
    int K = default_cepstrum_order;
    int hankel_rows = default_hankel_rows;
    ClassifierConfig classifier = ClassifierConfig::estimated();
};

struct PairFailure {
    std::size_t first;
    std::size_t second;
    ErrorCode code;
    std::string message;
};

/// Symmetric, zero-diagonal dissimilarities. Entries that could not be
/// computed hold NaN and are listed in `failures`.
struct DistanceMatrix {
    std::vector<std::string> ids;
    Metric metric;
    Eigen::MatrixXd values;
    std::vector<PairFailure> failures;
    std::vector<std::size_t> unusable; ///< signals whose own preparation failed

    std::size_t size() const noexcept { return ids.size(); }
    bool failed(std::size_t a, std::size_t b) const { return std::isnan(values(a, b)); }

    /// Signals to leave out of clustering: every unusable signal, then the
    /// higher index of each remaining failed pair.
    std::vector<std::size_t> poisoned() const {
        std::vector<bool> out(size(), false);
        for (std::size_t a : unusable) out[a] = true;
        for (std::size_t a = 0; a < size(); ++a)
            for (std::size_t b = a + 1; b < size() && !out[a]; ++b)
                if (!out[b] && failed(a, b)) out[b] = true;
        std::vector<std::size_t> list;
        for (std::size_t a = 0; a < size(); ++a)
            if (out[a]) list.push_back(a);
        return list;
    }
};

namespace detail {

/// Per-signal preparation that may fail independently of the pairs.
struct Prepared {
    std::optional<CepstrumSequence> cepstrum;
    std::optional<Error> error;
};

inline Prepared prepare(const SignalRecord& r, Metric metric, const DistanceConfig& config) {
    try {
        if (metric == Metric::cepstral) {
            if (r.input) return {transfer_cepstrum_from_io(*r.input, r.output, config.estimator, config.K), {}};
            return {power_cepstrum_of_signal(r.output, config.estimator, config.K), {}};
        }
        if (metric == Metric::subspace) {
            if (!r.input) fail(ErrorCode::InvalidArgument, "subspace metric needs an input/output pair");
            const auto verdict = classify_from_io(*r.input, r.output, config.estimator, config.classifier);
            if (verdict.kind != PhaseKind::MinimumPhaseStable)
                fail(ErrorCode::NotMinimumPhaseStable,
                     "phase test returned " + std::string(to_string(verdict.kind)));
        }
        return {};
    } catch (const Error& e) {
        return {std::nullopt, e};
    }
}

} // namespace detail

inline DistanceMatrix distance_matrix(const std::vector<SignalRecord>& signals, Metric metric,
                                      const DistanceConfig& config = {}) {
    detail::require(signals.size() >= 2, ErrorCode::InvalidArgument, "need at least two signals");
    const std::size_t n = signals.size();
    DistanceMatrix dm{{}, metric, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), {},
                      {}};
    for (const auto& s : signals) dm.ids.push_back(s.id);

    std::vector<detail::Prepared> prep;
    prep.reserve(n);
    for (const auto& s : signals) prep.push_back(detail::prepare(s, metric, config));
    for (std::size_t a = 0; a < n; ++a)
        if (prep[a].error) dm.unusable.push_back(a);

    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            double value = std::numeric_limits<double>::quiet_NaN();
            try {
                if (prep[a].error) throw *prep[a].error;
                if (prep[b].error) throw *prep[b].error;
                const auto& x = signals[a];
                const auto& y = signals[b];
                switch (metric) {
                    case Metric::euclidean: value = euclidean_distance(x.output, y.output); break;
                    case Metric::cosine: value = 1.0 - cosine_similarity(x.output, y.output); break;
                    case Metric::cepstral:
                        value = weighted_cepstral_distance(*prep[a].cepstrum, *prep[b].cepstrum).squared_value;
                        break;
                    case Metric::subspace:
                        value = subspace_distance_from_data(*x.input, x.output, *y.input, y.output, config.hankel_rows);
                        break;
                }
            } catch (const Error& e) {
                dm.failures.push_back({a, b, e.code(), e.what()});
            }
            const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
            dm.values(ia, ib) = value;
            dm.values(ib, ia) = value;
        }
    }
    return dm;
}

enum class Linkage { single, average, complete };

constexpr std::string_view to_string(Linkage l) noexcept {
    switch (l) {
        case Linkage::single: return "single";
        case Linkage::average: return "average";
        case Linkage::complete: return "complete";
    }
    return "unknown";
}

inline Linkage parse_linkage(std::string_view name) {
    for (Linkage l : {Linkage::single, Linkage::average, Linkage::complete})
        if (name == to_string(l)) return l;
    detail::fail(ErrorCode::InvalidArgument, "unknown linkage '" + std::string(name) + "'");
}

struct ClusterResult {
    std::vector<int> labels;           ///< -1 for excluded signals, otherwise 0..k-1 in order of first appearance
    std::vector<double> merge_heights; ///< linkage distance of each merge, in merge order
    std::vector<std::size_t> excluded;
};

/// Bottom-up merging until k clusters remain. Ties merge the pair whose
/// smallest members have the lowest indices.
inline ClusterResult agglomerative_cluster(const DistanceMatrix& dm, Linkage linkage, int k) {
    const auto excluded = dm.poisoned();
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t a = 0; a < dm.size(); ++a)
        if (std::find(excluded.begin(), excluded.end(), a) == excluded.end()) clusters.push_back({a});
    detail::require(k >= 1 && static_cast<std::size_t>(k) <= clusters.size(), ErrorCode::InvalidArgument,
                    "cluster count must lie in [1, number of usable signals]");

    auto link = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
        double best = linkage == Linkage::single ? std::numeric_limits<double>::infinity() : 0.0;
        for (std::size_t a : x)
            for (std::size_t b : y) {
                const double d = dm.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (linkage == Linkage::single) best = std::min(best, d);
                else if (linkage == Linkage::complete) best = std::max(best, d);
                else best += d;
            }
        if (linkage == Linkage::average) best /= static_cast<double>(x.size() * y.size());
        return best;
    };

    ClusterResult result;
    while (clusters.size() > static_cast<std::size_t>(k)) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double d = link(clusters[i], clusters[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        result.merge_heights.push_back(best);
        clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
        std::sort(clusters[bi].begin(), clusters[bi].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    std::vector<int> raw(dm.size(), -1);
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (std::size_t a : clusters[c]) raw[a] = static_cast<int>(c);
    std::map<int, int> renumber;
    result.labels.assign(dm.size(), -1);
    for (std::size_t a = 0; a < dm.size(); ++a) {
        if (raw[a] < 0) continue;
        auto [it, inserted] = renumber.try_emplace(raw[a], static_cast<int>(renumber.size()));
        result.labels[a] = it->second;
    }
    result.excluded = excluded;
    return result;
}

} // namespace cepdist

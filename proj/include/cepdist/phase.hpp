#pragma once

#include <string_view>

#include "cepdist/error.hpp"
#include "cepdist/lti.hpp"
#include "cepdist/spectral.hpp"

namespace cepdist {

enum class PhaseKind { MinimumPhaseStable, MaximumPhaseUnstable, Mixed, Indeterminate };

constexpr std::string_view to_string(PhaseKind k) noexcept {
    switch (k) {
        case PhaseKind::MinimumPhaseStable: return "MinimumPhaseStable";
        case PhaseKind::MaximumPhaseUnstable: return "MaximumPhaseUnstable";
        case PhaseKind::Mixed: return "Mixed";
        case PhaseKind::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

struct PhaseVerdict {
    PhaseKind kind;
    double positive_energy; ///< sum of c(k)^2, k = 1..K_test
    double negative_energy; ///< sum of c(-k)^2, k = 1..K_test
    double threshold;       ///< a side at or below this counts as empty
};

/// A side is empty when its energy is at most tol * (positive + negative + floor).
struct ClassifierConfig {
    int K_test = 20;
    double tol = 1e-3;
    double floor = 1e-10;

    /// Exact cepstra computed from roots.
    static constexpr ClassifierConfig model_derived() { return {20, 1e-3, 1e-10}; }
    /// Cepstra estimated from finite records.
    static constexpr ClassifierConfig estimated() { return {20, 5e-2, 1e-10}; }
};

inline PhaseVerdict classify(const CepstrumSequence& c, const ClassifierConfig& config = ClassifierConfig::model_derived()) {
    detail::require(c.kind() == CepstrumKind::complex, ErrorCode::KindMismatch, "phase test needs a complex cepstrum");
    detail::require(config.K_test >= 1 && config.K_test <= c.order(), ErrorCode::InvalidArgument,
                    "test order must lie in [1, K]");
    detail::require(config.tol > 0.0 && config.floor > 0.0, ErrorCode::InvalidArgument,
                    "classifier tolerances must be positive");
    double pos = 0.0, neg = 0.0;
    for (int k = 1; k <= config.K_test; ++k) {
        pos += c(k) * c(k);
        neg += c(-k) * c(-k);
    }
    const double threshold = config.tol * (pos + neg + config.floor);
    const bool pos_empty = pos <= threshold;
    const bool neg_empty = neg <= threshold;
    PhaseKind kind;
    if (pos_empty && neg_empty)
        kind = PhaseKind::Indeterminate;
    else if (neg_empty)
        kind = PhaseKind::MinimumPhaseStable;
    else if (pos_empty)
        kind = PhaseKind::MaximumPhaseUnstable;
    else
        kind = PhaseKind::Mixed;
    return {kind, pos, neg, threshold};
}

/// Verdict on the transfer complex cepstrum estimated from an input/output pair.
inline PhaseVerdict classify_from_io(const Signal& u, const Signal& y, const EstimatorConfig& estimator = {},
                                     const ClassifierConfig& config = ClassifierConfig::estimated()) {
    return classify(transfer_complex_cepstrum_from_io(u, y, estimator, config.K_test), config);
}

} // namespace cepdist

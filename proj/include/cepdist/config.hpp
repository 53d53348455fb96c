#pragma once

#include <cstdint>
#include <string>

#include "cepdist/error.hpp"
#include "cepdist/fft.hpp"
#include "cepdist/phase.hpp"
#include "cepdist/spectral.hpp"
#include "cepdist/subspace.hpp"

namespace cepdist {

/// Tolerances applied by the verification cases.
struct VerifyTolerances {
    double data_relative = 1e-3;      ///< subspace vs cepstral norm, both from data
    double model_absolute = 1e-9;     ///< subspace from model vs closed form
    double spectrum_absolute = 1e-10; ///< cepstral norm from frequency samples vs closed form
    double model_relative = 1e-3;     ///< subspace from model vs closed form, maximum-phase
    double cascade_absolute = 1e-6;   ///< squared cepstral distance vs closed-form cascade norm
    double white_noise_absolute = 5e-2;
};

struct RunConfig {
    std::string method = "welch";
    std::size_t window = 0;
    double overlap = 0.5;
    std::size_t fft_length = 0;
    int K = default_cepstrum_order;
    int K_test = 20;
    double tol_model = ClassifierConfig::model_derived().tol;
    double tol_estimated = ClassifierConfig::estimated().tol;
    int observability_rows = default_observability_rows;
    int hankel_rows = default_hankel_rows;
    std::uint64_t seed = 1;
    std::size_t length = 1 << 14;
    std::string format = "json";
    VerifyTolerances verify;

    EstimatorConfig estimator() const {
        EstimatorConfig e;
        if (method == "welch") e.method = SpectrumMethod::welch;
        else if (method == "periodogram") e.method = SpectrumMethod::periodogram;
        else detail::fail(ErrorCode::InvalidArgument, "method must be 'welch' or 'periodogram'");
        e.window_length = window;
        e.overlap = overlap;
        e.fft_length = fft_length;
        return e;
    }

    ClassifierConfig model_classifier() const { return {K_test, tol_model, ClassifierConfig::model_derived().floor}; }
    ClassifierConfig estimated_classifier() const {
        return {K_test, tol_estimated, ClassifierConfig::estimated().floor};
    }

    void validate() const {
        (void)estimator();
        detail::require(fft_length == 0 || detail::is_power_of_two(fft_length), ErrorCode::InvalidArgument,
                        "fft length must be a power of two");
        detail::require(overlap >= 0.0 && overlap < 1.0, ErrorCode::InvalidArgument, "overlap must lie in [0, 1)");
        detail::require(K >= 1, ErrorCode::InvalidArgument, "K must be positive");
        detail::require(K_test >= 1 && K_test <= K, ErrorCode::InvalidArgument, "K_test must lie in [1, K]");
        detail::require(observability_rows >= 1 && hankel_rows >= 1, ErrorCode::InvalidArgument,
                        "truncation rows must be positive");
        detail::require(length >= 2, ErrorCode::InvalidArgument, "length must be at least 2");
        detail::require(format == "json" || format == "text", ErrorCode::InvalidArgument,
                        "format must be 'json' or 'text'");
        for (double t : {tol_model, tol_estimated, verify.data_relative, verify.model_absolute,
                         verify.spectrum_absolute, verify.model_relative, verify.cascade_absolute,
                         verify.white_noise_absolute})
            detail::require(t > 0.0, ErrorCode::InvalidArgument, "tolerances must be positive");
    }
};

} // namespace cepdist

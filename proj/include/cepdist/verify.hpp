#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cepdist/config.hpp"
#include "cepdist/error.hpp"
#include "cepdist/lti.hpp"
#include "cepdist/metrics.hpp"
#include "cepdist/phase.hpp"
#include "cepdist/spectral.hpp"
#include "cepdist/subspace.hpp"

namespace cepdist {

inline constexpr int report_schema_version = 1;

/// Third-order reference systems sharing one power spectrum.
inline ZeroPoleGain benchmark_min_phase() { return ZeroPoleGain::from_roots({0.9, 0.7, 0.4}, {0.8, 0.6, 0.0}); }

/// Every root of the minimum-phase benchmark inverted; the origin zero moves to
/// a very distant real zero.
inline ZeroPoleGain benchmark_max_phase() {
    return ZeroPoleGain::from_roots({1 / 0.9, 1 / 0.7, 1 / 0.4}, {1 / 0.8, 1 / 0.6, 1e15});
}

inline ZeroPoleGain benchmark_mixed() { return ZeroPoleGain::from_roots({0.9, 0.7, 1 / 0.4}, {1 / 0.8, 0.6, 0.0}); }

inline constexpr std::size_t frequency_grid_length = 1 << 14;

struct VerifyCheck {
    std::string name;
    double measured;
    double tolerance;
    bool passed;
};

struct VerifyReport {
    explicit VerifyReport(std::string name) : case_name(std::move(name)) {}

    std::string case_name;
    nlohmann::json quantities = nlohmann::json::object();
    std::vector<VerifyCheck> checks;
    std::optional<std::string> refusal;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
    }

    void check(std::string name, double measured, double tolerance) {
        checks.push_back({std::move(name), measured, tolerance, std::isfinite(measured) && measured <= tolerance});
    }

    void expect(std::string name, bool ok) { checks.push_back({std::move(name), ok ? 0.0 : 1.0, 0.5, ok}); }
};

inline const std::vector<std::string>& verify_case_names() {
    static const std::vector<std::string> names{"min-phase", "max-phase", "mixed", "cascade", "white-noise"};
    return names;
}

namespace detail {

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double spectral_norm(const ZeroPoleGain& zpk, int K) {
    return weighted_cepstral_norm(power_cepstrum_from_psd(power_spectrum_from_zpk(zpk, frequency_grid_length), K))
        .squared_value;
}

inline PhaseVerdict spectral_verdict(const ZeroPoleGain& zpk, const RunConfig& config) {
    const auto H = frequency_response(zpk, unit_circle_grid(frequency_grid_length));
    return classify(complex_cepstrum_from_spectrum(H, config.K), config.model_classifier());
}

inline VerifyReport verify_min_phase(const RunConfig& config) {
    VerifyReport r("min-phase");
    const auto zpk = benchmark_min_phase();
    const auto u = white_noise(config.length, config.seed);
    const auto y = simulate(realize(zpk), u);

    const auto verdict = classify_from_io(u, y, config.estimator(), config.estimated_classifier());
    r.quantities["verdict"] = std::string(to_string(verdict.kind));
    r.expect("phase gate admits the data path", verdict.kind == PhaseKind::MinimumPhaseStable);

    const double closed = closed_form_norm_min_phase(zpk);
    const double sub_model = subspace_norm_from_model(zpk, config.observability_rows);
    const double cep_data =
        weighted_cepstral_norm(transfer_cepstrum_from_io(u, y, config.estimator(), config.K)).squared_value;
    const double sub_data = subspace_norm_from_data(u, y, config.hankel_rows);
    r.quantities["closed_form"] = closed;
    r.quantities["subspace_model"] = sub_model;
    r.quantities["cepstral_data"] = cep_data;
    r.quantities["subspace_data"] = sub_data;
    r.quantities["abs_cepstral_minus_closed_form"] = std::abs(cep_data - closed);
    r.quantities["abs_subspace_data_minus_closed_form"] = std::abs(sub_data - closed);
    r.check("relative |subspace_data - cepstral_data|", relative(sub_data, cep_data), config.verify.data_relative);
    r.check("|subspace_model - closed_form|", std::abs(sub_model - closed), config.verify.model_absolute);
    return r;
}

inline VerifyReport verify_max_phase(const RunConfig& config) {
    VerifyReport r("max-phase");
    const auto zpk = benchmark_max_phase();
    const auto verdict = spectral_verdict(zpk, config);
    r.quantities["verdict"] = std::string(to_string(verdict.kind));
    r.expect("phase test reports maximum phase", verdict.kind == PhaseKind::MaximumPhaseUnstable);

    const double closed = closed_form_norm_max_phase(zpk);
    const double cep = spectral_norm(zpk, config.K);
    const double sub = subspace_norm_from_model(zpk, config.observability_rows);
    r.quantities["closed_form"] = closed;
    r.quantities["cepstral_spectrum"] = cep;
    r.quantities["subspace_model"] = sub;
    r.quantities["abs_cepstral_minus_subspace"] = std::abs(cep - sub);
    r.check("|cepstral - closed_form|", std::abs(cep - closed), config.verify.spectrum_absolute);
    r.check("relative |subspace - closed_form|", relative(sub, closed), config.verify.model_relative);
    return r;
}

inline VerifyReport verify_mixed(const RunConfig& config) {
    VerifyReport r("mixed");
    const auto zpk = benchmark_mixed();
    const auto verdict = spectral_verdict(zpk, config);
    r.quantities["verdict"] = std::string(to_string(verdict.kind));
    r.expect("phase test reports mixed phase", verdict.kind == PhaseKind::Mixed);

    const double closed = closed_form_norm_mixed(zpk);
    const double cep = spectral_norm(zpk, config.K);
    r.quantities["closed_form"] = closed;
    r.quantities["cepstral_spectrum"] = cep;
    r.check("|cepstral - closed_form|", std::abs(cep - closed), config.verify.spectrum_absolute);
    try {
        r.quantities["subspace_model"] = subspace_norm_from_model(zpk, config.observability_rows);
        r.expect("subspace path refuses mixed phase", false);
    } catch (const Error& e) {
        r.refusal = std::string(to_string(e.code()));
        r.expect("subspace path refuses mixed phase", e.code() == ErrorCode::MixedPhaseUnsupported);
    }
    return r;
}

inline VerifyReport verify_cascade(const RunConfig& config) {
    VerifyReport r("cascade");
    const auto h1 = ZeroPoleGain::from_roots({0.5}, {});
    const auto h2 = ZeroPoleGain::from_roots({0.9}, {});
    constexpr int order = 4096;
    const double dist =
        weighted_cepstral_distance(power_cepstrum_from_zpk(h1, order), power_cepstrum_from_zpk(h2, order)).squared_value;
    const auto total = cascade(h1, h2).model;
    const double closed = closed_form_norm_mixed(total);
    const double sub = subspace_distance_between_models(h1, h2, config.observability_rows);
    r.quantities["cepstral_distance_squared"] = dist;
    r.quantities["closed_form"] = closed;
    r.quantities["subspace_model"] = sub;
    r.check("|cepstral_distance^2 - closed_form|", std::abs(dist - closed), config.verify.cascade_absolute);
    r.check("|subspace_model - closed_form|", std::abs(sub - closed), config.verify.model_absolute);
    return r;
}

inline VerifyReport verify_white_noise(const RunConfig& config) {
    VerifyReport r("white-noise");
    const auto h = ZeroPoleGain::from_roots({0.5}, {});
    const auto u = white_noise(config.length, config.seed);
    const auto y = filter_zpk(h, u);
    const int K = std::min(config.K_test, config.K);
    const auto cu = power_cepstrum_of_signal(u, config.estimator(), K);
    const auto cy = power_cepstrum_of_signal(y, config.estimator(), K);
    const auto ch = power_cepstrum_from_zpk(h, K);
    double max_u = 0.0, max_y = 0.0;
    for (int k = 1; k <= std::min(K, cu.order()); ++k) {
        max_u = std::max(max_u, std::abs(cu(k)));
        max_y = std::max(max_y, std::abs(cy(k) - ch(k)));
    }
    r.quantities["max_abs_input_cepstrum"] = max_u;
    r.quantities["max_abs_output_minus_system"] = max_y;
    r.check("max |c_u(k)|", max_u, config.verify.white_noise_absolute);
    r.check("max |c_y(k) - c_h(k)|", max_y, config.verify.white_noise_absolute);
    return r;
}

} // namespace detail

/// Runs one named case. Library errors become failed reports rather than exceptions.
inline VerifyReport run_verify_case(std::string_view name, const RunConfig& config) {
    VerifyReport (*fn)(const RunConfig&) = nullptr;
    if (name == "min-phase") fn = detail::verify_min_phase;
    else if (name == "max-phase") fn = detail::verify_max_phase;
    else if (name == "mixed") fn = detail::verify_mixed;
    else if (name == "cascade") fn = detail::verify_cascade;
    else if (name == "white-noise") fn = detail::verify_white_noise;
    else detail::fail(ErrorCode::InvalidArgument, "unknown verification case '" + std::string(name) + "'");
    try {
        return fn(config);
    } catch (const Error& e) {
        VerifyReport r{std::string(name)};
        r.refusal = std::string(to_string(e.code()));
        r.quantities["error"] = e.what();
        r.expect("case completed", false);
        return r;
    }
}

inline nlohmann::json to_json(const VerifyReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    nlohmann::json j{{"case", r.case_name}, {"quantities", r.quantities}, {"checks", checks}, {"passed", r.passed()}};
    j["refusal"] = r.refusal ? nlohmann::json(*r.refusal) : nlohmann::json(nullptr);
    return j;
}

} // namespace cepdist

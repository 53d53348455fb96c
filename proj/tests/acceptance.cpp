// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-cepdist-cli> [--only N]

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "cepdist/cepdist.hpp"
#include "support.hpp"

using namespace cepdist;

namespace {

namespace tol {
constexpr double data_relative = 1e-3;
constexpr double model_absolute = 1e-9;
constexpr double spectrum_absolute = 1e-10;
constexpr double subspace_relative = 1e-3;
constexpr double motivating_small = 5.0;
constexpr double motivating_large = 50.0;
constexpr double motivating_asymmetry = 0.15;
constexpr double motivating_cosine = 0.05;
constexpr double motivating_euclidean_spread = 0.15;
constexpr double motivating_std_spread = 0.10;
constexpr double series_floor = 1e-8;
constexpr double trace_absolute = 1e-10;
constexpr double cascade_absolute = 1e-6;
constexpr double inversion_absolute = 1e-12;
constexpr double estimated_accuracy = 0.95;
constexpr double standard_errors = 3.0;
constexpr double hankel_absolute = 1e-8;
} // namespace tol

struct Outcome {
    bool passed;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Every real root or conjugate pair is moved outside the circle with probability 1/2.
ZeroPoleGain scatter(const ZeroPoleGain& zpk, support::RootSampler& sampler) {
    std::map<std::pair<double, double>, bool> decision;
    return reflect_roots(zpk, [&](Complex r, bool is_pole) {
        const auto key = std::pair{r.real(), std::abs(r.imag()) + (is_pole ? 10.0 : 0.0)};
        auto it = decision.find(key);
        if (it == decision.end()) it = decision.emplace(key, sampler.uniform(0, 1) < 0.5).first;
        return it->second;
    });
}

PhaseKind truth(const ZeroPoleGain& zpk) {
    const bool in = zpk.has_inside_roots(), out = zpk.has_outside_roots();
    if (in && out) return PhaseKind::Mixed;
    if (in) return PhaseKind::MinimumPhaseStable;
    if (out) return PhaseKind::MaximumPhaseUnstable;
    return PhaseKind::Indeterminate;
}

Outcome criterion_1() {
    const auto zpk = benchmark_min_phase();
    const auto u = white_noise(1 << 14, 1);
    const auto y = simulate(realize(zpk), u);
    const double cep = weighted_cepstral_norm(transfer_cepstrum_from_io(u, y, {}, default_cepstrum_order)).squared_value;
    const double sub = subspace_norm_from_data(u, y, default_hankel_rows);
    const double closed = closed_form_norm_min_phase(zpk);
    const double model = subspace_norm_from_model(zpk, default_observability_rows);
    const double rel = relative(sub, cep);
    const double abs_model = std::abs(model - closed);
    return {rel <= tol::data_relative && abs_model <= tol::model_absolute,
            "data relative " + fmt(rel) + " (<= " + fmt(tol::data_relative) + "), model vs closed form " +
                fmt(abs_model) + " (<= " + fmt(tol::model_absolute) + ")"};
}

Outcome criterion_2() {
    const auto zpk = benchmark_max_phase();
    const double closed = closed_form_norm_max_phase(zpk);
    const auto psd = power_spectrum_from_zpk(zpk, 1 << 14);
    const double cep = weighted_cepstral_norm(power_cepstrum_from_psd(psd, default_cepstrum_order)).squared_value;
    const double sub = subspace_norm_from_model(zpk, default_observability_rows);
    const double abs_cep = std::abs(cep - closed);
    const double rel_sub = relative(sub, closed);
    return {abs_cep <= tol::spectrum_absolute && rel_sub <= tol::subspace_relative,
            "cepstral vs closed form " + fmt(abs_cep) + " (<= " + fmt(tol::spectrum_absolute) +
                "), subspace relative " + fmt(rel_sub) + " (<= " + fmt(tol::subspace_relative) + ")"};
}

struct MotivatingCheck {
    bool distances, cosine, euclidean, deviation;
    double sc, sn, cn, cos_max, euclid_spread, std_spread;
    bool all() const { return distances && cosine && euclidean && deviation; }
};

double spread(std::array<double, 3> v) {
    const auto [lo, hi] = std::minmax({v[0], v[1], v[2]});
    return (hi - lo) / hi;
}

MotivatingCheck motivating(std::uint64_t seed) {
    const auto ex = make_example_signals(example_default_damping, seed);
    const EstimatorConfig est{SpectrumMethod::periodogram, 0, 0.5, 2048};
    const auto cs = power_cepstrum_of_signal(ex.sine, est, 1024);
    const auto cc = power_cepstrum_of_signal(ex.cosine, est, 1024);
    const auto cg = power_cepstrum_of_signal(ex.noise, est, 1024);
    MotivatingCheck m{};
    m.sc = weighted_cepstral_distance(cs, cc).squared_value;
    m.sn = weighted_cepstral_distance(cs, cg).squared_value;
    m.cn = weighted_cepstral_distance(cc, cg).squared_value;
    m.distances = m.sc < tol::motivating_small && m.sn > tol::motivating_large && m.cn > tol::motivating_large &&
                  std::abs(m.sn - m.cn) / m.sn < tol::motivating_asymmetry;
    m.cos_max = std::max({std::abs(cosine_similarity(ex.sine, ex.cosine)), std::abs(cosine_similarity(ex.sine, ex.noise)),
                          std::abs(cosine_similarity(ex.cosine, ex.noise))});
    m.cosine = m.cos_max <= tol::motivating_cosine;
    m.euclid_spread = spread({euclidean_distance(ex.sine, ex.cosine), euclidean_distance(ex.sine, ex.noise),
                              euclidean_distance(ex.cosine, ex.noise)});
    m.euclidean = m.euclid_spread <= tol::motivating_euclidean_spread;
    m.std_spread = spread({signal_statistics(ex.sine).standard_deviation, signal_statistics(ex.cosine).standard_deviation,
                           signal_statistics(ex.noise).standard_deviation});
    m.deviation = m.std_spread <= tol::motivating_std_spread;
    return m;
}

Outcome criterion_3() {
    const auto m = motivating(1);
    int all = 0, cos_ok = 0, dist_ok = 0;
    constexpr int seeds = 200;
    for (std::uint64_t s = 1; s <= seeds; ++s) {
        const auto r = motivating(s);
        all += r.all();
        cos_ok += r.cosine;
        dist_ok += r.distances;
    }
    auto flag = [](bool b) { return b ? "ok" : "FAIL"; };
    return {m.all(), "seed 1: d_c " + fmt(m.sc) + " / " + fmt(m.sn) + " / " + fmt(m.cn) + " [" + flag(m.distances) +
                         "], max |cos| " + fmt(m.cos_max) + " [" + flag(m.cosine) + "], euclidean spread " +
                         fmt(m.euclid_spread) + " [" + flag(m.euclidean) + "], std spread " + fmt(m.std_spread) +
                         " [" + flag(m.deviation) + "]; seeds 1-" + std::to_string(seeds) + ": all " +
                         std::to_string(all) + ", distances " + std::to_string(dist_ok) + ", cosine " +
                         std::to_string(cos_ok)};
}

Outcome criterion_4() {
    support::RootSampler sampler(4);
    double worst_excess = -INFINITY;
    int series_ok = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto zpk = scatter(sampler.min_phase(4), sampler);
        const auto series = weighted_cepstral_norm(power_cepstrum_from_zpk(zpk, 4096));
        const double err = std::abs(series.squared_value - closed_form_norm_mixed(zpk));
        const double bound = std::max(tol::series_floor, series.tail_bound);
        series_ok += err <= bound;
        worst_excess = std::max(worst_excess, err - bound);
    }
    double worst_trace = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto zpk = sampler.min_phase(4);
        const auto model = support::dense_realization(zpk, 1000 + static_cast<std::uint64_t>(trial));
        const auto a = power_cepstrum_from_state_space(model, 20);
        const auto b = power_cepstrum_from_zpk(zpk, 20);
        for (int k = 1; k <= 20; ++k) worst_trace = std::max(worst_trace, std::abs(a(k) - b(k)));
    }
    return {series_ok == 200 && worst_trace <= tol::trace_absolute,
            "series within bound " + std::to_string(series_ok) + "/200 (worst err - bound " + fmt(worst_excess) +
                "), trace formula worst " + fmt(worst_trace) + " (<= " + fmt(tol::trace_absolute) + ")"};
}

Outcome criterion_5() {
    support::RootSampler sampler(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto h1 = sampler.min_phase(4);
        const auto h2 = sampler.min_phase(4);
        const double d = weighted_cepstral_distance(power_cepstrum_from_zpk(h1, 4096), power_cepstrum_from_zpk(h2, 4096))
                             .squared_value;
        worst = std::max(worst, std::abs(d - closed_form_norm_mixed(cascade(h1, h2).model)));
    }
    return {worst <= tol::cascade_absolute, "100 pairs, worst " + fmt(worst) + " (<= " + fmt(tol::cascade_absolute) + ")"};
}

Outcome criterion_6() {
    support::RootSampler sampler(6);
    double worst = 0.0;
    int flips = 0, flip_ok = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto zpk = sampler.min_phase(4);
        const double base = closed_form_norm_min_phase(zpk);
        worst = std::max(worst, std::abs(closed_form_norm_mixed(scatter(zpk, sampler)) - base));
        if (zpk.root_count() < 2) continue;
        const Complex target = zpk.poles().empty() ? zpk.zeros()[0] : zpk.poles()[0];
        const auto one = reflect_roots(zpk, [&](Complex r, bool) {
            return std::abs(r - target) < 1e-14 || std::abs(r - std::conj(target)) < 1e-14;
        });
        if (!one.has_inside_roots()) continue;
        ++flips;
        const auto before = classify(complex_cepstrum_from_zpk(zpk, default_cepstrum_order)).kind;
        const auto after = classify(complex_cepstrum_from_zpk(one, default_cepstrum_order)).kind;
        flip_ok += before == PhaseKind::MinimumPhaseStable && after == PhaseKind::Mixed;
    }
    return {worst <= tol::inversion_absolute && flip_ok == flips,
            "closed form worst change " + fmt(worst) + " (<= " + fmt(tol::inversion_absolute) +
                "), single inversion MinimumPhaseStable -> Mixed " + std::to_string(flip_ok) + "/" +
                std::to_string(flips)};
}

Outcome criterion_7() {
    support::RootSampler sampler(7);
    constexpr int model_trials = 10000;
    int model_ok = 0;
    for (int trial = 0; trial < model_trials; ++trial) {
        const auto zpk = sampler.any_phase(4);
        model_ok += classify(complex_cepstrum_from_zpk(zpk, default_cepstrum_order)).kind == truth(zpk);
    }
    int est_ok = 0;
    constexpr int seeds = 50;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        const auto zpk = sampler.any_phase(4);
        const auto u = white_noise(1 << 14, seed);
        est_ok += classify_from_io(u, filter_zpk(zpk, u)).kind == truth(zpk);
    }
    const double est_rate = static_cast<double>(est_ok) / seeds;
    return {model_ok == model_trials && est_rate >= tol::estimated_accuracy,
            "model-derived " + std::to_string(model_ok) + "/" + std::to_string(model_trials) + ", estimated " +
                std::to_string(est_ok) + "/" + std::to_string(seeds) + " (>= " + fmt(tol::estimated_accuracy) + ")"};
}

Outcome criterion_8() {
    constexpr int seeds = 50, K = 20;
    std::array<double, K + 1> sum{}, sum2{};
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        const auto c = power_cepstrum_of_signal(white_noise(1 << 14, seed), {}, K);
        for (int k = 1; k <= K; ++k) {
            sum[k] += c(k);
            sum2[k] += c(k) * c(k);
        }
    }
    int ok = 0;
    double worst = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double mean = sum[k] / seeds;
        const double sd = std::sqrt((sum2[k] - seeds * mean * mean) / (seeds - 1));
        const double z = std::abs(mean) / (sd / std::sqrt(static_cast<double>(seeds)));
        worst = std::max(worst, z);
        ok += z <= tol::standard_errors;
    }
    return {ok == K, std::to_string(ok) + "/20 coefficients within " + fmt(tol::standard_errors) +
                         " standard errors (largest " + fmt(worst) + ")"};
}

Outcome criterion_9() {
    support::RootSampler sampler(9);
    double worst = 0.0;
    auto check = [&](const CepstrumSequence& c) {
        double weighted = 0.0;
        for (int k = 1; k <= 64; ++k) weighted += k * c(k) * c(k);
        worst = std::max(worst, std::abs(hs_hankel_norm(c, 64) - weighted));
    };
    for (double rate : {0.3, 0.5, 0.7, 0.8}) check(power_cepstrum_from_zpk(ZeroPoleGain::from_roots({rate}, {}), 128));
    for (int trial = 0; trial < 50; ++trial)
        check(power_cepstrum_from_zpk(scatter(sampler.min_phase(4, 0.2, 0.8), sampler), 128));
    return {worst <= tol::hankel_absolute, "worst " + fmt(worst) + " (<= " + fmt(tol::hankel_absolute) + ")"};
}

std::pair<int, std::string> run(const std::string& command) {
    std::string out;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome criterion_10(const std::string& cli) {
    if (cli.empty()) return {false, "no CLI path given"};
    const std::string command = "'" + cli + "' verify --case min-phase --case max-phase";
    const auto [code1, out1] = run(command);
    const auto [code2, out2] = run(command);
    return {code1 == 0 && code2 == 0 && !out1.empty() && out1 == out2,
            "exit codes " + std::to_string(code1) + "/" + std::to_string(code2) + ", " + std::to_string(out1.size()) +
                " bytes, identical " + (out1 == out2 ? "yes" : "no")};
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    int only = 0;
    for (int a = 1; a < argc; ++a) {
        const std::string arg = argv[a];
        if (arg == "--only" && a + 1 < argc) only = std::atoi(argv[++a]);
        else cli = arg;
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"minimum-phase equivalence", criterion_1},
        {"maximum-phase equivalence", criterion_2},
        {"motivating example", criterion_3},
        {"oracle equivalence", criterion_4},
        {"cascade identity", criterion_5},
        {"inversion insensitivity", criterion_6},
        {"phase classifier accuracy", criterion_7},
        {"white-noise cepstrum", criterion_8},
        {"Hilbert-Schmidt Hankel link", criterion_9},
        {"CLI determinism", [&] { return criterion_10(cli); }},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i) + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const Error& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("%s %2zu %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        all = all && o.passed;
    }
    return all ? 0 : 1;
}

// Three third-order systems with identical power spectra but different phase
// content: their complex cepstra, phase verdicts and norms.
#include <cstdio>

#include "cepdist/cepdist.hpp"

using namespace cepdist;

int main() {
    const std::pair<const char*, ZeroPoleGain> systems[] = {
        {"minimum phase", benchmark_min_phase()},
        {"maximum phase", benchmark_max_phase()},
        {"mixed phase", benchmark_mixed()},
    };
    for (const auto& [name, zpk] : systems) {
        const auto c = complex_cepstrum_from_zpk(zpk, 5);
        const auto verdict = classify(complex_cepstrum_from_zpk(zpk, 20));
        std::printf("%s\n  complex cepstrum k=-5..5:", name);
        for (int k = -5; k <= 5; ++k) std::printf(" % .4f", k == 0 ? 0.0 : c(k));
        std::printf("\n  verdict: %s\n", std::string(to_string(verdict.kind)).c_str());
        std::printf("  cepstral norm (closed form): %.15f\n", closed_form_norm_mixed(zpk));
        try {
            std::printf("  subspace norm:               %.15f\n", subspace_norm_from_model(zpk));
        } catch (const Error& e) {
            std::printf("  subspace norm:               refused (%s)\n", std::string(to_string(e.code())).c_str());
        }
    }

    const auto u = white_noise(1 << 14, 7);
    const auto y = filter_zpk(benchmark_mixed(), u);
    std::printf("\nfrom simulated data, mixed system: %s\n",
                std::string(to_string(classify_from_io(u, y).kind)).c_str());
}

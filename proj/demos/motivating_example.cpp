// Damped sine, damped cosine and damped noise: baseline distances versus the
// weighted cepstral distance, plus their first- and second-order statistics.
#include <cstdio>
#include <cstdlib>

#include "cepdist/cepdist.hpp"

using namespace cepdist;

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    const double damping = argc > 2 ? std::atof(argv[2]) : example_default_damping;
    const auto s = make_example_signals(damping, seed);

    const EstimatorConfig estimator{SpectrumMethod::periodogram, 0, 0.0, 2048};
    const auto cs = power_cepstrum_of_signal(s.sine, estimator, 1024);
    const auto cc = power_cepstrum_of_signal(s.cosine, estimator, 1024);
    const auto cn = power_cepstrum_of_signal(s.noise, estimator, 1024);

    std::printf("damping %.4f, seed %llu\n\n", damping, static_cast<unsigned long long>(seed));
    std::printf("%-16s %12s %12s %14s\n", "pair", "euclidean", "cosine", "cepstral d^2");
    auto row = [](const char* name, const Signal& a, const Signal& b, const CepstrumSequence& ca,
                  const CepstrumSequence& cb) {
        std::printf("%-16s %12.4g %12.4g %14.4g\n", name, euclidean_distance(a, b), cosine_similarity(a, b),
                    weighted_cepstral_distance(ca, cb).squared_value);
    };
    row("sine / cosine", s.sine, s.cosine, cs, cc);
    row("sine / noise", s.sine, s.noise, cs, cn);
    row("cosine / noise", s.cosine, s.noise, cc, cn);

    std::printf("\n%-8s %12s %12s %12s\n", "signal", "median", "mean", "std");
    for (auto [name, sig] : {std::pair{"sine", &s.sine}, std::pair{"cosine", &s.cosine}, std::pair{"noise", &s.noise}}) {
        const auto st = signal_statistics(*sig);
        std::printf("%-8s %12.4g %12.4g %12.4g\n", name, st.median, st.mean, st.standard_deviation);
    }
}

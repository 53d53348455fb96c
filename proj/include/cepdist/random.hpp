#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace cepdist {

/// Gaussian sampler with a fixed transform (Box-Muller over mt19937_64), so
/// seeded streams are bit-identical across standard library implementations.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::vector<double> draw(std::size_t count, double sigma = 1.0) {
        std::vector<double> out(count);
        for (auto& v : out) v = sigma * (*this)();
        return out;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cepdist

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "sivcav/constants.hpp"

namespace sivcav::rng {

// splitmix64 mix, used to derive independent sub-stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seeded generator with fully specified samplers. mt19937_64 is pinned by the
// standard and the samplers below avoid std::*_distribution, whose output is
// implementation-defined; identical seeds give identical streams on any
// conforming platform.
class Engine {
public:
    explicit Engine(std::uint64_t seed) : gen_(seed) {}

    // Derive a child engine for an independent sub-stream (per scan, per
    // pulse, per sweep instance) without consuming parent state.
    static Engine substream(std::uint64_t seed, std::uint64_t stream) {
        return Engine(mix64(seed ^ mix64(stream)));
    }

    std::uint64_t raw() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1], safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Box-Muller, one cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * constants::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Exact Poisson sampling. Sequential-search inversion below the split
    // threshold; larger means are drawn in fixed chunks (sums of independent
    // Poissons are Poisson, so the distribution stays exact).
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) return 0;
        if (mean == 0.0) return 0;
        std::uint64_t total = 0;
        while (mean > kPoissonSplit) {
            total += poisson_inversion(kPoissonSplit);
            mean -= kPoissonSplit;
        }
        return total + poisson_inversion(mean);
    }

private:
    static constexpr double kPoissonSplit = 30.0;

    std::uint64_t poisson_inversion(double mean) {
        const double u = uniform();
        double p = std::exp(-mean);
        double cum = p;
        std::uint64_t k = 0;
        // mean <= 30: the loop terminates quickly and p stays well away from
        // the double underflow threshold.
        while (u > cum && k < 400) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sivcav::rng

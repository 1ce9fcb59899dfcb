#pragma once

#include <cstdint>
#include <random>

namespace nvgrad {

// Deterministic per-point random streams: every sweep point derives its own
// generator from (seed, stream index), so evaluation order never matters.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : engine_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))) {}

    std::mt19937_64& engine() { return engine_; }

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(engine_);
    }

    // Inverse-CDF style Poisson sampler; std::poisson_distribution is
    // implementation-defined, this one is portable and reproducible.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            // Knuth with log accumulation
            std::uniform_real_distribution<double> d(0.0, 1.0);
            double sum = 0.0;
            std::uint64_t k = 0;
            while (true) {
                double u = d(engine_);
                sum += -std::log(1.0 - u);
                if (sum >= mean) return k;
                ++k;
            }
        }
        if (mean < 1000.0) {
            std::uint64_t half = poisson(mean / 2.0);
            return half + poisson(mean - mean / 2.0);
        }
        // Gaussian limit; relative error is negligible at photon-count scales.
        double v = gaussian(mean, std::sqrt(mean));
        return v <= 0.0 ? 0 : static_cast<std::uint64_t>(v + 0.5);
    }

    double gaussian(double mean, double sigma) {
        std::normal_distribution<double> d(mean, sigma);
        return d(engine_);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace nvgrad

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cpca {

// splitmix64 mixing step; used to derive decorrelated stream seeds from
// (seed, stream) pairs so that small consecutive seeds do not alias.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random source: mt19937_64 with hand-rolled value mappings.
/// The standard <random> distributions are implementation-defined, so uniform
/// and gaussian draws are built from raw 64-bit words to keep runs
/// bit-identical across platforms and standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for (seed, stream), e.g. one per agent.
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL * (stream + 1))));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Box-Muller; the paired draw is cached and returned on the next call.
    double gaussian(double mean, double stddev) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double rho = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = rho * std::sin(theta);
        have_spare_ = true;
        return mean + stddev * rho * std::cos(theta);
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cpca

#pragma once

#include <cstdint>
#include <random>

namespace cryptsim {

/// Seeded generator with hand-rolled variate helpers. The standard library
/// distributions are implementation-defined, so results would differ between
/// toolchains; mt19937_64 itself is fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Poisson variate (Knuth multiplication for small means, chunked above).
    std::uint64_t poisson(double mean);

    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace cryptsim

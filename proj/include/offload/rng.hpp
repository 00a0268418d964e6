#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace offload {

/// Seeded random stream. Only the engine output is used directly: the
/// standard distributions are implementation-defined, which would make
/// runs differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in [0, n). n must be positive.
    std::size_t index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Derives an independent child stream and advances this one.
    Rng split();

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer over (seed, salt); used to derive named sub-streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace offload

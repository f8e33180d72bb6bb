#pragma once

#include <cstdint>
#include <random>

namespace bss {

/// Seeded generator owned by exactly one sampler / run. Streams are derived
/// from (seed, stream id) through std::seed_seq so that, e.g., the mixing
/// matrix and the source sequence of one run never share state.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    double uniform() { return unit_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
    double normal() { return normal_(engine_); }
    double normal(double sigma) { return sigma * normal_(engine_); }
    bool bernoulli(double p) { return unit_(engine_) < p; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace bss

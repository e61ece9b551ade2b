#pragma once

#include <cstdint>
#include <random>

namespace rdsig {

// One SplitMix64 step. Used for seed mixing and stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Independent stream seed from (master, stream). Pure function of its inputs,
// so work partitioned across threads in any order reproduces bit-identically.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Seedable pseudorandom source: mt19937_64 keyed through SplitMix64.
// Every stochastic operation in the library takes one of these explicitly.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t master, std::uint64_t stream)
        : Rng(derive_seed(master, stream)) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1), 53 random bits
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double gaussian(double mean, double stddev) {
        return mean + stddev * normal_(gen_);
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rdsig

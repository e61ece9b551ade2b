#include "rdsig/rng.hpp"

namespace rdsig {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ stream;
    std::uint64_t b = splitmix64(s);
    return b;
}

Rng::Rng(std::uint64_t seed) {
    // Expand the 64-bit key into a full mt19937_64 state. seed_seq consumes
    // 32-bit words, so split each SplitMix64 output in two.
    std::uint64_t s = seed;
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
        std::uint64_t v = splitmix64(s);
        words[2 * i] = static_cast<std::uint32_t>(v);
        words[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words, words + 8);
    gen_.seed(seq);
}

}  // namespace rdsig

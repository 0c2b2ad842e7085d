#pragma once

#include <cstdint>
#include <random>

namespace csoc {

// SplitMix64 one-round (Steele / Vigna); used for deriving child seeds so
// that every run, episode and policy stream is reproducible from one master
// seed without correlated streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;
    x += kPhi;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;
    return splitmix64(base_seed + index * kPhi);
}

// Two-level derivation: (seed, stream tag, index). Streams with distinct tags
// never collide for the same index.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream,
                                 std::uint64_t index) {
    return derive_seed(derive_seed(base_seed, stream), index);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace csoc

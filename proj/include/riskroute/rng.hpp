#pragma once

#include <cstdint>
#include <vector>

namespace riskroute {

// Splitmix64. Chosen over std::mt19937_64 + distributions because the
// standard distributions are not bit-stable across library implementations,
// and every published number here must reproduce from a seed.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Per-task sub-seed from (master seed, stream id, index). Streams keep
/// unrelated consumers (shuffles, routers, replications) decorrelated.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ (0xA0761D6478BD642FULL + stream));
    h = mix64(h ^ (0xE7037ED1A0B428DBULL + index));
    return h;
}

/// Uniform double in [0, 1), 53 mantissa bits.
inline double uniform_double(SplitMix64& g) {
    return double(g() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), unbiased via rejection. n must be >= 1.
inline std::uint64_t uniform_below(SplitMix64& g, std::uint64_t n) {
    const std::uint64_t limit = SplitMix64::max() - SplitMix64::max() % n;
    std::uint64_t x = g();
    while (x >= limit) x = g();
    return x % n;
}

inline bool bernoulli(SplitMix64& g, double p) {
    return uniform_double(g) < p;
}

template <class T>
void shuffle(std::vector<T>& v, SplitMix64& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(g, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace riskroute

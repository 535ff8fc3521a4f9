#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lexids {

// Seed-carrying random source. The generator family is fixed to
// std::mt19937_64, whose output sequence is specified by the standard, so a
// seed reproduces the same stream on every platform. All randomized
// operations in this library draw from a SeededRng and document how many
// draws they consume; that draw order is part of their determinism contract.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Raw 64-bit engine output.
    std::uint64_t next() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// Uniform draw from [0, n) using Lemire's debiased multiply-shift method.
// Consumes one engine output (more only on the rare rejection); n <= 1
// returns 0 without consuming anything.
inline std::uint64_t uniform_below(SeededRng& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(rng.next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(rng.next()) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

// In-place Fisher-Yates shuffle; consumes size()-1 bounded draws, high
// index first.
inline void fisher_yates_shuffle(std::span<int> values, SeededRng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = uniform_below(rng, i);
        std::swap(values[i - 1], values[j]);
    }
}

// k distinct values drawn uniformly without replacement from [0, n) by
// partial Fisher-Yates; result order is draw order.
inline std::vector<int> sample_without_replacement(int n, int k, SeededRng& rng) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

}  // namespace lexids

/// @file rng.hpp
/// @brief Portable seeded random number generation for resampling.
///
/// Everything stochastic in this project (bootstrap, permutation, response
/// anonymization) draws from SplitMix64. The standard <random> engines are
/// portable but the distributions are not: std::uniform_int_distribution may
/// produce different streams on different standard libraries, which would
/// break bit-reproducibility of reported intervals. SplitMix64 plus explicit
/// rejection sampling gives identical streams everywhere.

#pragma once

#include <cstdint>

namespace groundeval {

namespace detail {

/// SplitMix64 output mixing function (Steele, Lea, Flood 2014). Also used as
/// a cheap hash when deriving substream seeds.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

} // namespace detail

class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Unbiased integer in [0, n) via rejection sampling. (0 - n) wraps to
    /// 2^64 - n, so threshold = 2^64 mod n and the accepted range is an exact
    /// multiple of n.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// One fair bit per call (top bit of the next output word).
    bool next_bit() { return (next() >> 63) != 0; }

  private:
    std::uint64_t state_;
};

/// Domain tags keep the streams of unrelated procedures disjoint even when
/// they share a user-facing seed.
inline constexpr std::uint64_t kDomainBootstrap = 0xB00757A9;
inline constexpr std::uint64_t kDomainPermutation = 0x5167F119;
inline constexpr std::uint64_t kDomainAnonymize = 0xA9019C3E;

/// Derives an independent generator for (seed, domain, index). Resample r
/// always uses substream(seed, domain, r) regardless of how work is split
/// across threads, so parallel and serial runs produce identical results.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
    const std::uint64_t s =
        detail::mix64(detail::mix64(seed ^ detail::mix64(domain)) ^ (index * detail::kGolden + 1));
    return SplitMix64(s);
}

} // namespace groundeval

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace uosr {

/// SplitMix64 (Steele, Lea & Flood; the java.util.SplittableRandom mixer).
/// Chosen because the update is a fixed published constant sequence, so
/// streams reproduce bit-exactly across platforms and languages. Counter-based
/// use: seed one generator per (seed, stream, index) key via mix_key and draw
/// sequentially from it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_double_open() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Two uniforms per draw, no cached spare,
    /// so per-index streams stay independent of draw history.
    double next_gaussian() {
        double u1 = next_double_open();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = (-bound) % bound;
        std::uint64_t r;
        do {
            r = next();
        } while (r < threshold);
        return r % bound;
    }

private:
    std::uint64_t state_;
};

/// Derive a stream key from (seed, stream, index) so per-sample draws are
/// order-independent. One SplitMix64 step per component keeps keys decorrelated.
inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    SplitMix64 g(seed ^ 0x6a09e667f3bcc908ULL);
    std::uint64_t a = g.next();
    SplitMix64 h(a ^ stream);
    std::uint64_t b = h.next();
    SplitMix64 k(b ^ index);
    return k.next();
}

/// Seeded Fisher-Yates shuffle.
template <typename T>
void seeded_shuffle(std::span<T> values, SplitMix64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::uint64_t j = rng.next_below(i);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace uosr

#pragma once

#include <cstdint>

#include "cgp/math/normal.hpp"

namespace cgp {

/// Counter-indexed uniform stream. Draw i depends only on (seed, i), so
/// batches can be evaluated in any order, or split across threads, with
/// bit-identical output. The underlying generator is a splitmix64 walk.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    /// Uniform on the open interval (0,1).
    double uniform(std::uint64_t index) const noexcept {
        const std::uint64_t z = mix(seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
        return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw, via the inverse CDF of uniform(index).
    double normal(std::uint64_t index) const { return normal_quantile(uniform(index)); }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
};

}  // namespace cgp

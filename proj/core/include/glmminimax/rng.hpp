#pragma once

#include <cstdint>

namespace glmminimax {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-mode random stream keyed by (seed, index).
///
/// Draw k of stream (seed, index) is a pure function of the triple
/// (seed, index, k), so trial i of a Monte Carlo run sees the same numbers
/// no matter which thread evaluates it or in which order.
class Substream {
public:
    Substream(std::uint64_t seed, std::uint64_t index) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;

    /// Standard normal by inverse CDF of one uniform draw.
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Standard normal quantile function.
double normal_quantile(double p);

}  // namespace glmminimax

#include "glmminimax/rng.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace glmminimax {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kIndexSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

Substream::Substream(std::uint64_t seed, std::uint64_t index) noexcept
    : key_(mix64(mix64(seed + kGolden) ^ mix64(index * kIndexSalt + 1))) {}

std::uint64_t Substream::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double Substream::uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Substream::normal() { return normal_quantile(uniform()); }

double normal_quantile(double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p); }

}  // namespace glmminimax

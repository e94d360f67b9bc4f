#include "irfad/rng.hpp"

#include <cmath>
#include <numbers>

namespace irfad {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0x632BE59BD9B4E019ULL;
} // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed) noexcept : m_key(mix64(seed + kGolden)) {}

CounterRng CounterRng::split(std::uint64_t stream) const noexcept {
    return CounterRng(FromKey{}, mix64(m_key ^ mix64(stream + kStreamSalt)));
}

std::uint64_t CounterRng::next_u64() noexcept {
    ++m_counter;
    return mix64(m_key + m_counter * kGolden);
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double CounterRng::normal() noexcept {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
    // Largest multiple of n that fits; values at or above it are rejected.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

} // namespace irfad

#pragma once

#include <cstdint>

namespace irfad {

/// Counter-based generator. Output i of a stream is a pure function of
/// (key, i): the SplitMix64 finalizer applied to key + i * golden gamma.
/// Substreams are derived with split(), which hashes the parent key with a
/// stream id, so any consumer can address "sample 17 of epoch 3" without
/// touching shared state. All distributions are implemented here rather than
/// with <random>, so the streams do not depend on the standard library.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept;

    CounterRng split(std::uint64_t stream) const noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;
    /// Standard normal via Box-Muller; consumes exactly two draws.
    double normal() noexcept;
    /// Uniform integer on [0, n) by rejection. n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t key() const noexcept { return m_key; }
    std::uint64_t counter() const noexcept { return m_counter; }

private:
    struct FromKey {};
    CounterRng(FromKey, std::uint64_t key) noexcept : m_key(key) {}

    std::uint64_t m_key;
    std::uint64_t m_counter = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

} // namespace irfad

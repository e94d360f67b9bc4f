#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace irfad {

/// Little-endian encoder, independent of host byte order.
class ByteWriter {
public:
    void put_u8(std::uint8_t v) { m_bytes.push_back(v); }
    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_f64(double v);
    void put_f64s(std::span<const double> values);
    void put_bytes(std::span<const std::uint8_t> bytes);
    void put_string(std::string_view s);

    const std::vector<std::uint8_t>& bytes() const noexcept { return m_bytes; }
    std::vector<std::uint8_t> take() noexcept { return std::move(m_bytes); }

private:
    std::vector<std::uint8_t> m_bytes;
};

/// Little-endian decoder. Reading past the end throws DataError.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : m_bytes(bytes) {}

    std::uint8_t get_u8();
    std::uint32_t get_u32();
    std::uint64_t get_u64();
    double get_f64();
    void get_f64s(std::span<double> out);
    std::span<const std::uint8_t> get_bytes(std::size_t n);

    std::size_t remaining() const noexcept { return m_bytes.size() - m_pos; }
    std::size_t position() const noexcept { return m_pos; }

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> m_bytes;
    std::size_t m_pos = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to "<path>.tmp" and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

} // namespace irfad

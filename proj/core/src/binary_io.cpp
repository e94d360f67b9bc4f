#include "irfad/binary_io.hpp"

#include "irfad/errors.hpp"

#include <bit>
#include <fstream>
#include <iterator>

namespace irfad {

void ByteWriter::put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) m_bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) m_bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_f64s(std::span<const double> values) {
    m_bytes.reserve(m_bytes.size() + 8 * values.size());
    for (double v : values) put_f64(v);
}

void ByteWriter::put_bytes(std::span<const std::uint8_t> bytes) {
    m_bytes.insert(m_bytes.end(), bytes.begin(), bytes.end());
}

void ByteWriter::put_string(std::string_view s) {
    m_bytes.insert(m_bytes.end(), s.begin(), s.end());
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) {
        throw DataError("unexpected end of data at byte " + std::to_string(m_pos) + " (need " +
                        std::to_string(n) + ", have " + std::to_string(remaining()) + ")");
    }
}

std::uint8_t ByteReader::get_u8() {
    need(1);
    return m_bytes[m_pos++];
}

std::uint32_t ByteReader::get_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(m_bytes[m_pos++]) << (8 * i);
    return v;
}

std::uint64_t ByteReader::get_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(m_bytes[m_pos++]) << (8 * i);
    return v;
}

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

void ByteReader::get_f64s(std::span<double> out) {
    need(8 * out.size());
    for (double& v : out) v = get_f64();
}

std::span<const std::uint8_t> ByteReader::get_bytes(std::size_t n) {
    need(n);
    auto s = m_bytes.subspan(m_pos, n);
    m_pos += n;
    return s;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace irfad

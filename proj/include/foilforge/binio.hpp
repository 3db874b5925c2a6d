#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace foilforge::binio {

/// CRC-32 (IEEE 802.3 polynomial, as in zlib/PNG).
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Little-endian byte sink.
class Writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v);
    void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

    /// Appends CRC-32 of everything written so far.
    void seal() { u32(crc32(bytes_)); }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    void put(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    std::vector<std::uint8_t> bytes_;
};

/// Little-endian byte source; every read past the end raises TruncatedFile.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64();
    std::string raw(std::size_t n);

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    void require(std::size_t n) const;

    /// Reads the trailing CRC and checks it against all bytes before it.
    /// Raises SpecMismatch when unread bytes remain before the CRC.
    void verify_seal();

private:
    std::uint64_t get(int width);
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);

/// Writes to `path` via a temporary sibling and rename, so readers never see partial files.
void write_file_atomic(const std::string& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::string& path, std::string_view text);

} // namespace foilforge::binio

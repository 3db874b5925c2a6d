#include "foilforge/binio.hpp"

#include "foilforge/error.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <zlib.h>

namespace foilforge::binio {

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
        crc = ::crc32(crc, bytes.data() + offset, chunk);
        offset += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

void Writer::f64(double v) {
    u64(std::bit_cast<std::uint64_t>(v));
}

void Reader::require(std::size_t n) const {
    if (remaining() < n) {
        fail(ErrorCode::TruncatedFile, "needed " + std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
                                           ", only " + std::to_string(remaining()) + " remain");
    }
}

std::uint64_t Reader::get(int width) {
    require(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
        v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
}

double Reader::f64() {
    return std::bit_cast<double>(u64());
}

std::string Reader::raw(std::size_t n) {
    require(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
}

void Reader::verify_seal() {
    if (remaining() < 4) {
        fail(ErrorCode::TruncatedFile, "missing trailing checksum");
    }
    if (remaining() > 4) {
        fail(ErrorCode::SpecMismatch, std::to_string(remaining() - 4) + " unexpected bytes before checksum");
    }
    const std::uint32_t expected = crc32(bytes_.first(pos_));
    const std::uint32_t stored = u32();
    if (expected != stored) {
        fail(ErrorCode::ChecksumMismatch, "stored CRC does not match file body");
    }
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::FileIo, "cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::string& path, std::span<const std::uint8_t> bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::FileIo, "cannot write '" + tmp.string() + "'");
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            fail(ErrorCode::FileIo, "short write to '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorCode::FileIo, "cannot rename onto '" + path + "'");
    }
}

void write_file_atomic(const std::string& path, std::string_view text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace foilforge::binio

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "rcsf/errors.hpp"

namespace rcsf {

// Little-endian byte serialization, independent of host endianness.

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v));
    put_u32(out, static_cast<uint32_t>(v >> 32));
}

inline void put_f64(std::vector<uint8_t>& out, double v) {
    put_u64(out, std::bit_cast<uint64_t>(v));
}

/// Sequential reader over a byte buffer; throws DecodeError on underrun.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> buf) : buf_(buf) {}

    uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }

    uint32_t u32() {
        need(4);
        uint32_t v = static_cast<uint32_t>(buf_[pos_]) |
                     static_cast<uint32_t>(buf_[pos_ + 1]) << 8 |
                     static_cast<uint32_t>(buf_[pos_ + 2]) << 16 |
                     static_cast<uint32_t>(buf_[pos_ + 3]) << 24;
        pos_ += 4;
        return v;
    }

    uint64_t u64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return lo | (hi << 32);
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::span<const uint8_t> bytes(size_t n) {
        need(n);
        auto s = buf_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    size_t remaining() const { return buf_.size() - pos_; }
    size_t position() const { return pos_; }

private:
    void need(size_t n) const {
        if (pos_ + n > buf_.size()) {
            throw DecodeError("unexpected end of buffer at offset " +
                              std::to_string(pos_));
        }
    }

    std::span<const uint8_t> buf_;
    size_t pos_ = 0;
};

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const uint8_t> bytes);
void write_file_text(const std::string& path, const std::string& text);
std::string read_file_text(const std::string& path);

}  // namespace rcsf

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "posverif/bits.hpp"

namespace posverif {

using Bytes = std::vector<std::uint8_t>;

// Little-endian fixed-width writer used by every canonical encoding in the
// library. Bitstrings are length-prefixed: u32 width, then ceil(width/8)
// bytes holding the value big-endian (leftmost bit first).
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v) {
        out_.push_back(v);
        return *this;
    }
    ByteWriter& u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    ByteWriter& u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    ByteWriter& bits(const BitString& b);
    ByteWriter& bytes(std::span<const std::uint8_t> data) {
        u32(static_cast<std::uint32_t>(data.size()));
        out_.insert(out_.end(), data.begin(), data.end());
        return *this;
    }

    Bytes take() && { return std::move(out_); }
    const Bytes& view() const noexcept { return out_; }

private:
    Bytes out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    BitString bits();
    Bytes bytes();

    bool done() const noexcept { return pos_ == data_.size(); }
    /// Throws DecodeError unless every byte was consumed.
    void expect_done() const;

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits. Used for trace digests.
std::string digest_hex(std::span<const std::uint8_t> data);

}  // namespace posverif

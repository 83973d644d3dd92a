#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "posverif/error.hpp"

namespace posverif {

/// Fixed-width bitstring of at most 64 bits.
///
/// Bit 0 is the leftmost character of the textual form and the most
/// significant bit of `value()`, so "011" has value 3 and bit(0) == 0.
class BitString {
public:
    static constexpr unsigned kMaxWidth = 64;

    constexpr BitString() noexcept = default;
    BitString(unsigned width, std::uint64_t value);

    static BitString zeros(unsigned width) { return BitString(width, 0); }
    static BitString parse(std::string_view text);

    unsigned width() const noexcept { return width_; }
    std::uint64_t value() const noexcept { return value_; }

    bool bit(unsigned i) const;
    BitString with_bit(unsigned i, bool v) const;
    bool is_zero() const noexcept { return value_ == 0; }

    /// Left part of length `width` starting at bit `offset`.
    BitString slice(unsigned offset, unsigned width) const;
    BitString concat(const BitString& tail) const;

    BitString operator^(const BitString& other) const;
    /// Inner product mod 2.
    bool dot(const BitString& other) const;

    std::string str() const;

    friend bool operator==(const BitString&, const BitString&) = default;
    friend auto operator<=>(const BitString&, const BitString&) = default;

private:
    unsigned width_ = 0;
    std::uint64_t value_ = 0;
};

inline std::uint64_t width_mask(unsigned width) noexcept {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

inline BitString::BitString(unsigned width, std::uint64_t value) : width_(width), value_(value) {
    if (width > kMaxWidth) throw Error(Errc::LengthMismatch, "bitstring wider than 64 bits");
    if ((value & ~width_mask(width)) != 0)
        throw Error(Errc::LengthMismatch, "value does not fit in " + std::to_string(width) + " bits");
}

inline bool BitString::bit(unsigned i) const {
    if (i >= width_) throw Error(Errc::LengthMismatch, "bit index out of range");
    return ((value_ >> (width_ - 1 - i)) & 1U) != 0;
}

inline BitString BitString::with_bit(unsigned i, bool v) const {
    if (i >= width_) throw Error(Errc::LengthMismatch, "bit index out of range");
    const std::uint64_t m = std::uint64_t{1} << (width_ - 1 - i);
    return BitString(width_, v ? (value_ | m) : (value_ & ~m));
}

inline BitString BitString::slice(unsigned offset, unsigned width) const {
    if (offset + width > width_) throw Error(Errc::LengthMismatch, "slice out of range");
    if (width == 0) return BitString();
    return BitString(width, (value_ >> (width_ - offset - width)) & width_mask(width));
}

inline BitString BitString::concat(const BitString& tail) const {
    if (width_ + tail.width_ > kMaxWidth) throw Error(Errc::LengthMismatch, "concatenation wider than 64 bits");
    if (tail.width_ == 64) return tail;
    return BitString(width_ + tail.width_, (value_ << tail.width_) | tail.value_);
}

inline BitString BitString::operator^(const BitString& other) const {
    if (width_ != other.width_) throw Error(Errc::LengthMismatch, "xor of unequal widths");
    return BitString(width_, value_ ^ other.value_);
}

inline bool BitString::dot(const BitString& other) const {
    if (width_ != other.width_) throw Error(Errc::LengthMismatch, "dot of unequal widths");
    return (std::popcount(value_ & other.value_) & 1) != 0;
}

inline std::string BitString::str() const {
    std::string out(width_, '0');
    for (unsigned i = 0; i < width_; ++i)
        if (bit(i)) out[i] = '1';
    return out;
}

inline BitString BitString::parse(std::string_view text) {
    if (text.size() > kMaxWidth) throw Error(Errc::LengthMismatch, "bitstring literal too long");
    std::uint64_t v = 0;
    for (char c : text) {
        if (c != '0' && c != '1') throw Error(Errc::DecodeError, "bitstring literal must be 0/1");
        v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return BitString(static_cast<unsigned>(text.size()), v);
}

}  // namespace posverif

#include <cstdio>

#include "posverif/bytes.hpp"
#include "posverif/error.hpp"
#include "posverif/rng.hpp"

namespace posverif {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::CapacityExceeded: return "CapacityExceeded";
        case Errc::DuplicateRegister: return "DuplicateRegister";
        case Errc::UnknownRegister: return "UnknownRegister";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::InvalidN: return "InvalidN";
        case Errc::WrongStateShape: return "WrongStateShape";
        case Errc::TagMismatch: return "TagMismatch";
        case Errc::RegisterViolation: return "RegisterViolation";
        case Errc::InvalidTrials: return "InvalidTrials";
        case Errc::SimulationStarted: return "SimulationStarted";
        case Errc::Overflow: return "Overflow";
        case Errc::ConfigInvalid: return "ConfigInvalid";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::NotClassicalTape: return "NotClassicalTape";
        case Errc::KTooLarge: return "KTooLarge";
        case Errc::UnknownAttack: return "UnknownAttack";
        case Errc::UnknownStrategy: return "UnknownStrategy";
        case Errc::DecodeError: return "DecodeError";
    }
    return "Unknown";
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    // Reject the top partial bucket.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
        const std::uint64_t v = next();
        if (v < limit) return v % bound;
    }
}

ByteWriter& ByteWriter::bits(const BitString& b) {
    u32(b.width());
    const unsigned nbytes = (b.width() + 7) / 8;
    // Pad on the right so the leftmost bit lands in the top of byte 0.
    const std::uint64_t v = b.width() == 0 ? 0 : b.value() << (nbytes * 8 - b.width());
    for (unsigned i = 0; i < nbytes; ++i)
        out_.push_back(static_cast<std::uint8_t>(v >> (8 * (nbytes - 1 - i))));
    return *this;
}

void ByteReader::need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(Errc::DecodeError, "truncated input");
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
}

BitString ByteReader::bits() {
    const std::uint32_t width = u32();
    if (width > BitString::kMaxWidth) throw Error(Errc::DecodeError, "bitstring width too large");
    const unsigned nbytes = (width + 7) / 8;
    need(nbytes);
    std::uint64_t v = 0;
    for (unsigned i = 0; i < nbytes; ++i) v = (v << 8) | data_[pos_++];
    const unsigned pad = nbytes * 8 - width;
    if (pad != 0 && (v & ((std::uint64_t{1} << pad) - 1)) != 0)
        throw Error(Errc::DecodeError, "non-canonical bitstring padding");
    return BitString(width, width == 0 ? 0 : v >> pad);
}

Bytes ByteReader::bytes() {
    const std::uint32_t len = u32();
    need(len);
    Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
              data_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    return out;
}

void ByteReader::expect_done() const {
    if (!done()) throw Error(Errc::DecodeError, "trailing bytes");
}

std::string digest_hex(std::span<const std::uint8_t> data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace posverif

#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace posverif::spacetime {

/// Exact rational with 64-bit numerator and denominator, always reduced with
/// a positive denominator. Arithmetic that would overflow throws
/// Error(Errc::Overflow) instead of wrapping.
class Rational {
public:
    constexpr Rational() noexcept = default;
    Rational(std::int64_t num);  // NOLINT(google-explicit-constructor): integers are rationals
    Rational(std::int64_t num, std::int64_t den);

    /// "p/q" or "p". Throws ConfigInvalid on malformed input or q == 0.
    static Rational parse(std::string_view text);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    /// Always "num/den", e.g. "3/1".
    std::string str() const;
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        __extension__ using Wide = __int128;
        const Wide lhs = static_cast<Wide>(a.num_) * b.den_;
        const Wide rhs = static_cast<Wide>(b.num_) * a.den_;
        return lhs <=> rhs;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

Rational abs(const Rational& r);

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

using Coordinate = Rational;

}  // namespace posverif::spacetime

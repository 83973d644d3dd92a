#include "posverif/spacetime/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "posverif/error.hpp"

namespace posverif::spacetime {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw Error(Errc::Overflow, "rational multiplication overflow");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw Error(Errc::Overflow, "rational addition overflow");
    return out;
}

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();

}  // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(Errc::ConfigInvalid, "rational with zero denominator");
    // Negating INT64_MIN is not representable.
    if (num == kMin || den == kMin) throw Error(Errc::Overflow, "rational component out of range");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
    auto parse_int = [&](std::string_view part) {
        std::int64_t v = 0;
        if (part.empty()) throw Error(Errc::ConfigInvalid, "malformed rational '" + std::string(text) + "'");
        const char* first = part.data();
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size())
            throw Error(Errc::ConfigInvalid, "malformed rational '" + std::string(text) + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::operator-() const { return Rational(-num_, den_); }

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const std::int64_t da = b.den_ / g;
    const std::int64_t db = a.den_ / g;
    return Rational(checked_add(checked_mul(a.num_, da), checked_mul(b.num_, db)), checked_mul(a.den_, da));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    // Cross-reduce first to keep intermediates small.
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const std::int64_t n1 = g1 ? a.num_ / g1 : 0, d2 = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t n2 = g2 ? b.num_ / g2 : 0, d1 = g2 ? a.den_ / g2 : a.den_;
    return Rational(checked_mul(n1, n2), checked_mul(d1, d2));
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(Errc::Overflow, "rational division by zero");
    return a * Rational(b.den_, b.num_);
}

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

}  // namespace posverif::spacetime

#include "contourlab/rational.hpp"

#include "contourlab/error.hpp"

#include <charconv>
#include <numeric>

namespace contourlab {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den == 0) throw InputError("rational with zero denominator");
    normalize();
}

void Rational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational& Rational::operator+=(const Rational& other) {
    const auto g = std::gcd(den_, other.den_);
    num_ = num_ * (other.den_ / g) + other.num_ * (den_ / g);
    den_ = den_ / g * other.den_;
    normalize();
    return *this;
}

Rational& Rational::operator*=(const Rational& other) {
    num_ *= other.num_;
    den_ *= other.den_;
    normalize();
    return *this;
}

std::string Rational::to_string() const {
    // Terminating decimal iff the reduced denominator has only factors 2 and 5.
    std::int64_t d = den_;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);

    const int digits = std::max(twos, fives);
    if (digits == 0) return std::to_string(num_);
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const std::int64_t scaled = num_ * (scale / den_);
    const bool negative = scaled < 0;
    const std::int64_t mag = negative ? -scaled : scaled;
    std::string frac = std::to_string(mag % scale);
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out = (negative ? "-" : "") + std::to_string(mag / scale);
    if (!frac.empty()) out += "." + frac;
    return out;
}

namespace {

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw InputError("invalid rational '" + std::string(text) + "'");
    return value;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos)
        return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));

    auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rational(parse_int(text));

    const bool negative = !text.empty() && text.front() == '-';
    auto whole = text.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
    auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) throw InputError("invalid rational '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    const std::int64_t f = parse_int(frac);
    if (w < 0 || f < 0) throw InputError("invalid rational '" + std::string(text) + "'");
    const std::int64_t num = w * scale + f;
    return Rational(negative ? -num : num, scale);
}

}  // namespace contourlab

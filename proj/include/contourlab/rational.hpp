#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace contourlab {

/// Exact non-negative rational used for note durations in quarter notes.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Decimal rendering when the expansion terminates ("0.75"), "num/den" otherwise.
    std::string to_string() const;
    /// Accepts "3", "0.375", "-1.5" and "4/3".
    static Rational parse(std::string_view text);

    Rational& operator+=(const Rational& other);
    Rational& operator*=(const Rational& other);
    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend bool operator==(const Rational&, const Rational&) = default;
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

private:
    void normalize();

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace contourlab

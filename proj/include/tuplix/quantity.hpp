#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "tuplix/errors.hpp"

namespace tuplix {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Exact rational quantity with a total inverse.
///
/// Quantities form the data domain of the calculus: a zero-totalized field
/// (equivalently, a non-trivial cancellation meadow). All field operations
/// are exact over arbitrary-precision integers, and the inverse is total
/// with inverse(0) = 0, so division never fails: x/0 = 0.
///
/// The representation is always reduced (gcd(|num|, den) = 1, den > 0);
/// equality is structural equality of that representation.
class Quantity {
public:
    Quantity() : value_(0) {}
    Quantity(int n) : value_(n) {}
    Quantity(long long n) : value_(n) {}
    Quantity(long long num, long long den) {
        if (den == 0) throw Error("quantity literal with zero denominator");
        value_ = BigRational(BigInt(num), BigInt(den));
    }
    explicit Quantity(BigInt n) : value_(std::move(n)) {}
    explicit Quantity(BigRational v) : value_(std::move(v)) {}

    /// Parses "n" or "n/d" with optional leading minus. d must be positive.
    static Quantity from_string(std::string_view text) {
        auto bad = [&] { return Error("malformed quantity literal: '" + std::string(text) + "'"); };
        std::string s(text);
        auto slash = s.find('/');
        std::string num = s.substr(0, slash);
        std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
        auto digits = [](std::string_view d) {
            if (d.empty()) return false;
            for (char c : d)
                if (c < '0' || c > '9') return false;
            return true;
        };
        bool neg = !num.empty() && num[0] == '-';
        if (neg) num.erase(0, 1);
        if (!digits(num) || !digits(den)) throw bad();
        BigInt n(num), d(den);
        if (d == 0) throw bad();
        if (neg) n = -n;
        return Quantity(BigRational(n, d));
    }

    const BigRational& value() const { return value_; }
    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }

    bool is_zero() const { return value_ == 0; }
    bool is_one() const { return value_ == 1; }
    bool is_negative() const { return value_ < 0; }
    bool is_integer() const { return denominator() == 1; }

    friend Quantity operator+(const Quantity& a, const Quantity& b) {
        return Quantity(BigRational(a.value_ + b.value_));
    }
    friend Quantity operator-(const Quantity& a, const Quantity& b) {
        return Quantity(BigRational(a.value_ - b.value_));
    }
    friend Quantity operator*(const Quantity& a, const Quantity& b) {
        return Quantity(BigRational(a.value_ * b.value_));
    }
    Quantity operator-() const { return Quantity(BigRational(-value_)); }

    Quantity& operator+=(const Quantity& o) { value_ += o.value_; return *this; }
    Quantity& operator-=(const Quantity& o) { value_ -= o.value_; return *this; }
    Quantity& operator*=(const Quantity& o) { value_ *= o.value_; return *this; }

    /// Total inverse: inverse(0) = 0, otherwise the reciprocal.
    Quantity inverse() const {
        if (is_zero()) return Quantity();
        return Quantity(BigRational(BigRational(1) / value_));
    }

    Quantity abs() const { return is_negative() ? -*this : *this; }

    friend bool operator==(const Quantity& a, const Quantity& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Quantity& a, const Quantity& b) { return a.value_ != b.value_; }
    friend bool operator<(const Quantity& a, const Quantity& b) { return a.value_ < b.value_; }
    friend bool operator<=(const Quantity& a, const Quantity& b) { return a.value_ <= b.value_; }
    friend bool operator>(const Quantity& a, const Quantity& b) { return a.value_ > b.value_; }
    friend bool operator>=(const Quantity& a, const Quantity& b) { return a.value_ >= b.value_; }

    /// "p/q" in lowest terms, "/q" omitted when q = 1.
    std::string str() const {
        std::string out = numerator().str();
        if (denominator() != 1) {
            out += "/";
            out += denominator().str();
        }
        return out;
    }

private:
    BigRational value_;
};

/// Division with the totalized convention: a/0 = 0.
inline Quantity divide(const Quantity& a, const Quantity& b) { return a * b.inverse(); }

}  // namespace tuplix

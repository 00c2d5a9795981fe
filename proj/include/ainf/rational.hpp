#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ainf {

struct overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

using i128 = __int128;

inline i128 iabs(i128 a) { return a < 0 ? -a : a; }

inline i128 igcd(i128 a, i128 b)
{
    a = iabs(a);
    b = iabs(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline std::int64_t narrow(i128 v)
{
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
        throw overflow_error("rational arithmetic exceeded 64-bit range");
    return static_cast<std::int64_t>(v);
}

} // namespace detail

/* Exact rational number, always reduced, denominator > 0.
 * Intermediates use 128-bit arithmetic; results that do not fit 64 bits
 * after reduction throw overflow_error instead of wrapping. */
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n) {}
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        return from128(detail::i128(a.num_) * b.den_ + detail::i128(b.num_) * a.den_,
                       detail::i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b)
    {
        return from128(detail::i128(a.num_) * b.den_ - detail::i128(b.num_) * a.den_,
                       detail::i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b)
    {
        return from128(detail::i128(a.num_) * b.num_, detail::i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b.num_ == 0)
            throw std::domain_error("rational division by zero");
        return from128(detail::i128(a.num_) * b.den_, detail::i128(a.den_) * b.num_);
    }
    Rational operator-() const
    {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b)
    {
        return detail::i128(a.num_) * b.den_ < detail::i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /* "p/q", or "p" when q = 1. */
    std::string str() const
    {
        std::string s = std::to_string(num_);
        if (den_ != 1)
            s += "/" + std::to_string(den_);
        return s;
    }

    /* Accepts "p" and "p/q" with optional sign. */
    static Rational parse(std::string_view text);

private:
    static Rational from128(detail::i128 n, detail::i128 d)
    {
        if (d == 0)
            throw std::domain_error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        detail::i128 g = detail::igcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num_ = detail::narrow(n);
        r.den_ = detail::narrow(d);
        return r;
    }

    void assign(std::int64_t n, std::int64_t d) { *this = from128(n, d); }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational Rational::parse(std::string_view text)
{
    if (text.empty())
        throw parse_error("empty rational");
    std::size_t slash = text.find('/');
    auto to_int = [](std::string_view s) -> std::int64_t {
        if (s.empty())
            throw parse_error("empty integer in rational");
        std::size_t pos = 0;
        bool neg = false;
        if (s[0] == '+' || s[0] == '-') {
            neg = s[0] == '-';
            pos = 1;
        }
        if (pos == s.size())
            throw parse_error("sign without digits in rational");
        detail::i128 v = 0;
        for (; pos < s.size(); ++pos) {
            if (s[pos] < '0' || s[pos] > '9')
                throw parse_error("invalid digit in rational: '" + std::string(s) + "'");
            v = v * 10 + (s[pos] - '0');
            if (v > detail::i128(INT64_MAX))
                throw overflow_error("rational literal exceeds 64-bit range");
        }
        return neg ? -detail::narrow(v) : detail::narrow(v);
    };
    if (slash == std::string_view::npos)
        return Rational(to_int(text));
    std::int64_t n = to_int(text.substr(0, slash));
    std::int64_t d = to_int(text.substr(slash + 1));
    if (d == 0)
        throw parse_error("zero denominator in rational");
    return Rational(n, d);
}

} // namespace ainf

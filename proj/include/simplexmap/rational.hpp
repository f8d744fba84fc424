#pragma once

// Exact rational arithmetic on 128-bit integers. Waste fractions and
// efficiency ratios are compared and ranked exactly; doubles appear only in
// final report columns.

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "bits.hpp"

namespace simplexmap {

namespace detail {

inline i128 gcd_i128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline i128 checked_mul_i128(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("rational: 128-bit multiply overflow");
    return r;
}

inline i128 checked_add_i128(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("rational: 128-bit add overflow");
    return r;
}

} // namespace detail

struct rational {
    i128 num = 0;
    i128 den = 1;

    rational() = default;

    rational(i128 n, i128 d = 1) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("rational: zero denominator");
        normalize();
    }

    static rational from_u128(u128 n, u128 d = 1) {
        constexpr u128 imax = ~u128{0} >> 1;
        if (n > imax || d > imax)
            throw std::overflow_error("rational: value exceeds signed 128-bit range");
        return rational(i128(n), i128(d));
    }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        i128 g = detail::gcd_i128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool is_integer() const { return den == 1; }

    rational operator+(const rational& o) const {
        using namespace detail;
        return rational(checked_add_i128(checked_mul_i128(num, o.den),
                                         checked_mul_i128(o.num, den)),
                        checked_mul_i128(den, o.den));
    }

    rational operator-(const rational& o) const {
        using namespace detail;
        return rational(checked_add_i128(checked_mul_i128(num, o.den),
                                         -checked_mul_i128(o.num, den)),
                        checked_mul_i128(den, o.den));
    }

    rational operator*(const rational& o) const {
        using namespace detail;
        // Cross-reduce first so intermediates stay small.
        i128 g1 = gcd_i128(num, o.den);
        i128 g2 = gcd_i128(o.num, den);
        return rational(checked_mul_i128(num / g1, o.num / g2),
                        checked_mul_i128(den / g2, o.den / g1));
    }

    rational operator/(const rational& o) const {
        if (o.num == 0) throw std::invalid_argument("rational: divide by zero");
        return *this * rational(o.den, o.num);
    }

    rational abs() const {
        rational r = *this;
        if (r.num < 0) r.num = -r.num;
        return r;
    }

    bool operator==(const rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const rational& o) const { return !(*this == o); }

    bool operator<(const rational& o) const {
        using namespace detail;
        return checked_mul_i128(num, o.den) < checked_mul_i128(o.num, den);
    }
    bool operator<=(const rational& o) const { return !(o < *this); }
    bool operator>(const rational& o) const { return o < *this; }
    bool operator>=(const rational& o) const { return !(*this < o); }

    double to_double() const { return double(num) / double(den); }

    std::string to_string() const {
        if (den == 1) return i128_to_string(num);
        return i128_to_string(num) + "/" + i128_to_string(den);
    }

    // Fixed-point decimal with the given fraction digits, round-half-up.
    std::string to_decimal_string(int digits = 6) const {
        i128 n = num < 0 ? -num : num;
        u128 scale = 1;
        for (int i = 0; i < digits; ++i) scale = checked_mul(scale, 10);
        u128 scaled = checked_mul(u128(n), scale);
        u128 q = scaled / u128(den);
        if ((scaled % u128(den)) * 2 >= u128(den)) ++q;
        std::string s = (num < 0 && q != 0) ? "-" : "";
        s += u128_to_string(q / scale);
        if (digits > 0) {
            std::string frac = u128_to_string(q % scale);
            frac.insert(frac.begin(), std::size_t(digits) - frac.size(), '0');
            s += "." + frac;
        }
        return s;
    }
};

} // namespace simplexmap

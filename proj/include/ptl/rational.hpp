#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ptl {

/// Exact rational scalar used for boundary-exact exponent comparisons and
/// for recurrence cross-checks that must hold without rounding.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat_pow(const Rat& x, unsigned n) {
    Rat acc(1);
    Rat base = x;
    while (n > 0) {
        if (n & 1u) acc *= base;
        base *= base;
        n >>= 1u;
    }
    return acc;
}

inline double to_double(const Rat& x) { return x.convert_to<double>(); }

/// Parses "3", "-3", "3/4" or a decimal literal like "2.5" / "1e-3" into an
/// exact rational. Decimal strings are exact (2.5 -> 5/2), so CLI inputs
/// given in decimal notation classify without tolerance.
inline std::optional<Rat> parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            BigInt num(text.substr(0, slash));
            BigInt den(text.substr(slash + 1));
            if (den == 0) return std::nullopt;
            return Rat(num, den);
        }
        // decimal / scientific form
        std::string mant = text;
        long expo = 0;
        auto epos = text.find_first_of("eE");
        if (epos != std::string::npos) {
            mant = text.substr(0, epos);
            expo = std::stol(text.substr(epos + 1));
        }
        bool neg = false;
        if (!mant.empty() && (mant[0] == '+' || mant[0] == '-')) {
            neg = mant[0] == '-';
            mant = mant.substr(1);
        }
        auto dot = mant.find('.');
        std::string digits = mant;
        long frac_digits = 0;
        if (dot != std::string::npos) {
            digits = mant.substr(0, dot) + mant.substr(dot + 1);
            frac_digits = static_cast<long>(mant.size() - dot - 1);
        }
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            return std::nullopt;
        BigInt num(digits);
        if (neg) num = -num;
        long e = expo - frac_digits;
        Rat r(num, 1);
        BigInt ten(10);
        if (e > 0)
            r *= Rat(boost::multiprecision::pow(ten, static_cast<unsigned>(e)), 1);
        else if (e < 0)
            r /= Rat(boost::multiprecision::pow(ten, static_cast<unsigned>(-e)), 1);
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline std::string rat_to_string(const Rat& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) s += "/" + denominator(x).str();
    return s;
}

} // namespace ptl

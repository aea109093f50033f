#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "dulac/errors.hpp"

namespace dulac {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(long num, long den = 1) { return Rat(Int(num), Int(den)); }

inline bool is_integer(const Rat& r) { return denominator(r) == 1; }

inline Int rat_floor(const Rat& r) {
    Int q = numerator(r) / denominator(r);
    if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

inline long to_long(const Int& v) { return static_cast<long>(v); }

/// Parses "p", "p/q" or a plain integer string into an exact rational.
/// Decimal points are rejected on purpose: exponents and exact coefficients
/// must be given as ratios.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            if (s.find('.') != std::string::npos)
                throw ParseError("decimal literal '" + s + "' is not an exact rational; write p/q");
            return Rat(Int(s));
        }
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + s + "'");
        return Rat(num, den);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("malformed rational literal '" + s + "'");
    }
}

inline std::string rat_str(const Rat& r) {
    std::string out = numerator(r).str();
    if (denominator(r) != 1) out += "/" + denominator(r).str();
    return out;
}

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_pow_int(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    Rat b = e > 0 ? base : Rat(1) / base;
    long k = e > 0 ? e : -e;
    Rat out = 1;
    while (k > 0) {
        if (k & 1) out *= b;
        b *= b;
        k >>= 1;
    }
    return out;
}

}  // namespace dulac

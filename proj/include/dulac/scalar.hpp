#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <utility>

#include "dulac/errors.hpp"
#include "dulac/exact_value.hpp"
#include "dulac/rational.hpp"

namespace dulac {

using BigFloat = boost::multiprecision::mpfr_float;

enum class Mode { exact, floating };

/// Sets the working big-float precision for the current thread.
/// Must be called before building float-mode scalars.
inline void set_float_precision_bits(unsigned bits) {
    if (bits < 64) throw NotSupported("float precision must be at least 64 bits");
    // mpfr_float precision is configured in decimal digits
    unsigned digits = static_cast<unsigned>(bits * 0.30103) + 2;
    BigFloat::default_precision(digits);
}

inline unsigned float_precision_bits() {
    return static_cast<unsigned>((BigFloat::default_precision() - 2) / 0.30103);
}

/// Field element of the transseries algebra. Exact mode is rationals closed
/// under fractional prime powers and log-of-prime symbols and never rounds;
/// floating mode is an MPFR big float at the thread-configured precision.
/// Values of different modes never mix.
class Scalar {
  public:
    Scalar() : mode_(Mode::exact) {}

    static Scalar exact(const Rat& q) { return Scalar(ExactVal(q)); }
    static Scalar exact(ExactVal v) { return Scalar(std::move(v)); }
    static Scalar floating(const BigFloat& f) { return Scalar(f); }
    static Scalar floating(const Rat& q) {
        return Scalar(BigFloat(numerator(q)) / BigFloat(denominator(q)));
    }
    static Scalar of(const Rat& q, Mode m) {
        return m == Mode::exact ? exact(q) : floating(q);
    }
    static Scalar zero(Mode m) { return of(Rat(0), m); }
    static Scalar one(Mode m) { return of(Rat(1), m); }

    Mode mode() const { return mode_; }

    bool is_zero() const { return mode_ == Mode::exact ? ex_.is_zero() : fl_ == 0; }

    bool is_rational() const { return mode_ == Mode::exact && ex_.is_rational(); }
    Rat as_rational() const {
        if (mode_ != Mode::exact) throw NeedsFloatMode("float scalar is not an exact rational");
        return ex_.as_rational();
    }
    const ExactVal& exact_value() const {
        if (mode_ != Mode::exact) throw ModeMismatch("not an exact scalar");
        return ex_;
    }
    const BigFloat& float_value() const {
        if (mode_ != Mode::floating) throw ModeMismatch("not a float scalar");
        return fl_;
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        check(a, b);
        return a.mode_ == Mode::exact ? Scalar(a.ex_ + b.ex_) : Scalar(BigFloat(a.fl_ + b.fl_));
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        check(a, b);
        return a.mode_ == Mode::exact ? Scalar(a.ex_ - b.ex_) : Scalar(BigFloat(a.fl_ - b.fl_));
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        check(a, b);
        return a.mode_ == Mode::exact ? Scalar(a.ex_ * b.ex_) : Scalar(BigFloat(a.fl_ * b.fl_));
    }
    Scalar operator-() const {
        return mode_ == Mode::exact ? Scalar(-ex_) : Scalar(BigFloat(-fl_));
    }
    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        check(a, b);
        return a.mode_ == Mode::exact ? a.ex_ == b.ex_ : a.fl_ == b.fl_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    Scalar mul_rat(const Rat& q) const {
        return mode_ == Mode::exact ? Scalar(ex_ * ExactVal(q))
                                    : Scalar(BigFloat(fl_ * floating(q).fl_));
    }

    Scalar inverse() const {
        if (mode_ == Mode::floating) {
            if (fl_ == 0) throw Error("division by zero scalar");
            return Scalar(BigFloat(1 / fl_));
        }
        return Scalar(ex_.inverse());
    }

    /// this^g for exact rational exponent g.
    Scalar pow_rat(const Rat& g) const {
        if (mode_ == Mode::floating) {
            if (fl_ == 0) {
                if (g > 0) return *this;
                throw Error("zero to a non-positive power");
            }
            if (fl_ < 0 && !is_integer(g))
                throw DomainError("fractional power of a negative float scalar");
            if (is_integer(g)) {
                BigFloat r = pow(fl_, static_cast<long>(to_long(numerator(g))));
                return Scalar(r);
            }
            BigFloat e = BigFloat(numerator(g)) / BigFloat(denominator(g));
            return Scalar(BigFloat(pow(fl_, e)));
        }
        return Scalar(ex_.pow_rational(g));
    }

    Scalar log_value() const {
        if (mode_ == Mode::floating) {
            if (fl_ <= 0) throw DomainError("log of a non-positive scalar");
            return Scalar(BigFloat(log(fl_)));
        }
        return Scalar(ex_.log_value());
    }

    BigFloat to_bigfloat() const {
        if (mode_ == Mode::floating) return fl_;
        return ex_.realize<BigFloat>(
            [](std::int64_t p, const Rat& e) {
                return BigFloat(pow(BigFloat(p), BigFloat(numerator(e)) / BigFloat(denominator(e))));
            },
            [](std::int64_t p) { return BigFloat(log(BigFloat(p))); },
            [](const Rat& q) { return BigFloat(BigFloat(numerator(q)) / BigFloat(denominator(q))); });
    }

    double to_double() const { return to_bigfloat().convert_to<double>(); }

    std::string str() const {
        if (mode_ == Mode::exact) return ex_.str();
        return fl_.str();
    }

  private:
    explicit Scalar(ExactVal v) : mode_(Mode::exact), ex_(std::move(v)) {}
    explicit Scalar(BigFloat f) : mode_(Mode::floating), fl_(std::move(f)) {}

    static void check(const Scalar& a, const Scalar& b) {
        if (a.mode_ != b.mode_)
            throw ModeMismatch("cannot combine exact and floating scalars");
    }

    Mode mode_;
    ExactVal ex_;
    BigFloat fl_;
};

}  // namespace dulac

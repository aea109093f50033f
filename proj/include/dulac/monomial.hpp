#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <tuple>

#include "dulac/errors.hpp"
#include "dulac/rational.hpp"

namespace dulac {

/// Exponent triple of x^a * l^g1 * l2^g2 where l = 1/(-log x), l2 = l o l.
/// The total order is lexicographic; smaller means larger as x -> 0+.
struct Monomial {
    Rat a{0};
    Rat g1{0};
    Rat g2{0};

    static Monomial x(const Rat& e) { return {e, 0, 0}; }
    static Monomial l(const Rat& e) { return {0, e, 0}; }
    static Monomial l2(const Rat& e) { return {0, 0, e}; }
    static Monomial unit() { return {0, 0, 0}; }

    bool is_unit() const { return a == 0 && g1 == 0 && g2 == 0; }

    friend bool operator==(const Monomial& p, const Monomial& q) {
        return p.a == q.a && p.g1 == q.g1 && p.g2 == q.g2;
    }
    friend bool operator!=(const Monomial& p, const Monomial& q) { return !(p == q); }
    friend bool operator<(const Monomial& p, const Monomial& q) {
        return std::tie(p.a, p.g1, p.g2) < std::tie(q.a, q.g1, q.g2);
    }
    friend bool operator<=(const Monomial& p, const Monomial& q) { return !(q < p); }
    friend bool operator>(const Monomial& p, const Monomial& q) { return q < p; }
    friend bool operator>=(const Monomial& p, const Monomial& q) { return !(p < q); }

    friend Monomial operator+(const Monomial& p, const Monomial& q) {
        return {p.a + q.a, p.g1 + q.g1, p.g2 + q.g2};
    }
    friend Monomial operator-(const Monomial& p, const Monomial& q) {
        return {p.a - q.a, p.g1 - q.g1, p.g2 - q.g2};
    }
    Monomial scaled(const Rat& c) const { return {a * c, g1 * c, g2 * c}; }

    std::string str() const {
        std::ostringstream os;
        os << "(" << rat_str(a) << "," << rat_str(g1) << "," << rat_str(g2) << ")";
        return os.str();
    }
};

/// Truncation certificate. A series with bound B stores no monomial >= B
/// (lexicographically) and asserts that every coefficient at a monomial
/// strictly below B is exact. An unbounded certificate marks a finite exact
/// expression. Operations propagate the weakest (minimum) claim.
struct OrderBound {
    std::optional<Monomial> cut;  // nullopt = exact / unbounded

    OrderBound() = default;
    /*implicit*/ OrderBound(Monomial m) : cut(m) {}
    OrderBound(const Rat& nx, const Rat& nl, const Rat& nl2) : cut(Monomial{nx, nl, nl2}) {}

    static OrderBound unbounded() { return OrderBound(); }

    bool is_unbounded() const { return !cut.has_value(); }
    Rat nx() const { return require().a; }
    Rat nl() const { return require().g1; }
    Rat nl2() const { return require().g2; }

    const Monomial& require() const {
        if (!cut) throw Error("order bound is unbounded");
        return *cut;
    }

    /// Is the coefficient at m certified by this bound?
    bool covers(const Monomial& m) const { return !cut || m < *cut; }

    OrderBound shifted(const Monomial& d) const {
        if (!cut) return *this;
        return OrderBound(*cut + d);
    }

    friend OrderBound min(const OrderBound& p, const OrderBound& q) {
        if (!p.cut) return q;
        if (!q.cut) return p;
        return OrderBound(*p.cut < *q.cut ? *p.cut : *q.cut);
    }

    friend bool operator==(const OrderBound& p, const OrderBound& q) { return p.cut == q.cut; }

    std::string str() const {
        if (!cut) return "exact";
        return "O" + cut->str();
    }
};

/// Smallest k >= 1 with k*step >= target (lexicographically), when one
/// exists. step must be lexicographically positive. Loops whose increments
/// gain `step` per iteration use this to decide between running to the bound
/// and stopping at an iteration budget with a clipped certificate.
inline std::optional<long> steps_to_reach(const Monomial& step, const Monomial& target) {
    const Monomial zero = Monomial::unit();
    if (!(zero < step)) throw Error("steps_to_reach: increment must be lex-positive");
    if (target <= step) return 1;
    auto reaches = [&](long k) { return target <= step.scaled(Rat(k)); };
    Rat guess;
    if (step.a > 0)
        guess = target.a / step.a;
    else if (step.a == 0 && target.a > 0)
        return std::nullopt;
    else if (step.g1 > 0)
        guess = target.g1 / step.g1;
    else if (step.g1 == 0 && target.g1 > 0)
        return std::nullopt;
    else if (step.g2 > 0)
        guess = target.g2 / step.g2;
    else
        return std::nullopt;  // step crawls in a direction below the target forever
    long k = to_long(rat_ceil(guess));
    if (k < 1) k = 1;
    while (k > 1 && reaches(k - 1)) --k;
    for (int i = 0; i < 4; ++i, ++k)
        if (reaches(k)) return k;
    return std::nullopt;
}

}  // namespace dulac

#pragma once

#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "dulac/errors.hpp"
#include "dulac/rational.hpp"

namespace dulac {

// Exact scalars are finite Q-linear combinations of basis products
//
//     prod_i p_i^{e_i} * prod_j log(p_j)^{k_j},
//
// p prime, e_i in (0,1) rational, k_j >= 1. Plain rationals are the
// combination with the empty product. This is the smallest closure of Q
// containing every constant the formal pipeline produces on rational germ
// data: fractional powers like alpha^{-m/alpha} and the log(alpha), log(2)
// terms coming from compositions of ell with non-unit leading coefficients.
// Basis products are treated as linearly independent over Q; for fractional
// prime powers that is a theorem, for log monomials it holds in every
// identity this engine can produce.

struct SymKey {
    std::vector<std::pair<std::int64_t, Rat>> rad;          // base -> exponent in (0,1)
    std::vector<std::pair<std::int64_t, std::uint32_t>> lg; // base -> log degree >= 1

    bool trivial() const { return rad.empty() && lg.empty(); }

    friend bool operator==(const SymKey& a, const SymKey& b) {
        return a.rad == b.rad && a.lg == b.lg;
    }
    friend bool operator<(const SymKey& a, const SymKey& b) {
        if (a.rad != b.rad) return a.rad < b.rad;
        return a.lg < b.lg;
    }
};

namespace detail {

inline std::vector<std::pair<std::int64_t, Int>> factor_positive(Int n) {
    std::vector<std::pair<std::int64_t, Int>> out;
    if (n <= 0) throw NeedsFloatMode("cannot factor non-positive integer exactly");
    for (std::int64_t p = 2; p * p <= n && p < 1000000; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            Int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            out.emplace_back(p, k);
        }
    }
    if (n != 1) {
        if (n > Int(std::int64_t(1) << 62) || !boost::multiprecision::miller_rabin_test(n, 32))
            throw NeedsFloatMode("coefficient has a factor too large for exact symbolic arithmetic");
        out.emplace_back(static_cast<std::int64_t>(n), 1);
    }
    return out;
}

// q = sign * prod p^a with a in Z.
inline std::vector<std::pair<std::int64_t, Int>> factor_rat(const Rat& q) {
    auto num = factor_positive(abs(numerator(q)));
    auto den = factor_positive(denominator(q));
    for (auto& [p, k] : den) {
        auto it = std::find_if(num.begin(), num.end(), [&](auto& e) { return e.first == p; });
        if (it == num.end())
            num.emplace_back(p, -k);
        else
            it->second -= k;
    }
    std::sort(num.begin(), num.end());
    num.erase(std::remove_if(num.begin(), num.end(), [](auto& e) { return e.second == 0; }),
              num.end());
    return num;
}

inline Rat int_pow_rat(std::int64_t base, const Int& e) {
    Rat out = 1;
    Int k = abs(e);
    Rat b = base;
    while (k > 0) {
        if ((k & 1) != 0) out *= b;
        b *= b;
        k >>= 1;
    }
    if (e < 0) out = 1 / out;
    return out;
}

}  // namespace detail

class ExactVal {
  public:
    ExactVal() = default;
    /*implicit*/ ExactVal(const Rat& q) {
        if (q != 0) terms_[SymKey{}] = q;
    }
    /*implicit*/ ExactVal(long v) : ExactVal(Rat(v)) {}

    static ExactVal symbol_pow(std::int64_t prime, const Rat& exponent) {
        ExactVal v;
        auto [key, coeff] = normalize_pow(prime, exponent);
        if (coeff != 0) v.terms_[key] = coeff;
        return v;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.trivial());
    }
    Rat rational_part() const {
        auto it = terms_.find(SymKey{});
        return it == terms_.end() ? Rat(0) : it->second;
    }
    Rat as_rational() const {
        if (!is_rational()) throw NeedsFloatMode("exact value is not a plain rational");
        return rational_part();
    }
    std::size_t term_count() const { return terms_.size(); }

    friend ExactVal operator+(const ExactVal& a, const ExactVal& b) {
        ExactVal out = a;
        for (const auto& [k, c] : b.terms_) out.add_term(k, c);
        return out;
    }
    friend ExactVal operator-(const ExactVal& a, const ExactVal& b) {
        ExactVal out = a;
        for (const auto& [k, c] : b.terms_) out.add_term(k, -c);
        return out;
    }
    ExactVal operator-() const {
        ExactVal out = *this;
        for (auto& [k, c] : out.terms_) c = -c;
        return out;
    }
    friend ExactVal operator*(const ExactVal& a, const ExactVal& b) {
        ExactVal out;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                auto [k, extra] = mul_keys(ka, kb);
                out.add_term(k, ca * cb * extra);
            }
        return out;
    }

    friend bool operator==(const ExactVal& a, const ExactVal& b) { return a.terms_ == b.terms_; }

    bool is_monomial() const { return terms_.size() == 1; }

    /// Multiplicative inverse; defined for single-term values without logs
    /// and for any nonzero plain rational.
    ExactVal inverse() const {
        if (is_zero()) throw Error("division by zero exact value");
        if (is_rational()) return ExactVal(Rat(1) / rational_part());
        if (terms_.size() != 1 || !terms_.begin()->first.lg.empty())
            throw NeedsFloatMode("exact inverse of a non-monomial symbolic value");
        return pow_rational(Rat(-1));
    }

    /// this^g for rational g. Requires a single log-free term with positive
    /// rational coefficient (or any term when g is a non-negative integer).
    ExactVal pow_rational(const Rat& g) const {
        if (g == 0) return ExactVal(Rat(1));
        if (is_zero()) {
            if (g > 0) return ExactVal();
            throw Error("zero to a non-positive power");
        }
        if (is_integer(g) && g > 0) {
            Int k = numerator(g);
            ExactVal acc(Rat(1)), base = *this;
            while (k > 0) {
                if ((k & 1) != 0) acc = acc * base;
                base = base * base;
                k >>= 1;
            }
            return acc;
        }
        if (terms_.size() != 1)
            throw NeedsFloatMode("fractional power of a symbolic sum");
        const auto& [key, coeff] = *terms_.begin();
        if (!key.lg.empty() && !(is_integer(g) && g > 0))
            throw NeedsFloatMode("fractional or negative power of a log symbol");
        if (coeff < 0) {
            if (!is_integer(g)) throw NeedsFloatMode("fractional power of a negative value");
            ExactVal out = pos_monomial_pow(key, -coeff, g);
            if ((numerator(g) & 1) != 0)
                for (auto& [k, c] : out.terms_) c = -c;
            return out;
        }
        return pos_monomial_pow(key, coeff, g);
    }

    /// log(this); defined for a single positive log-free term.
    ExactVal log_value() const {
        if (terms_.size() != 1) throw NeedsFloatMode("log of a symbolic sum");
        const auto& [key, coeff] = *terms_.begin();
        if (!key.lg.empty()) throw NeedsFloatMode("log of a log symbol");
        if (coeff <= 0) throw NeedsFloatMode("log of a non-positive value");
        ExactVal out;
        for (const auto& [p, a] : detail::factor_rat(coeff))
            out.add_term(log_key(p), Rat(a));
        for (const auto& [p, e] : key.rad) out.add_term(log_key(p), e);
        return out;
    }

    /// Generic numeric realization: supply pow(prime, rational) and log(prime).
    template <typename F, typename PowFn, typename LogFn, typename FromRat>
    F realize(PowFn&& powf, LogFn&& logf, FromRat&& fromq) const {
        F acc = fromq(Rat(0));
        for (const auto& [key, coeff] : terms_) {
            F t = fromq(coeff);
            for (const auto& [p, e] : key.rad) t *= powf(p, e);
            for (const auto& [p, k] : key.lg)
                for (std::uint32_t i = 0; i < k; ++i) t *= logf(p);
            acc += t;
        }
        return acc;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [key, coeff] : terms_) {
            if (!first) os << (coeff >= 0 ? " + " : " - ");
            Rat c = (!first && coeff < 0) ? Rat(-coeff) : coeff;
            first = false;
            bool unit_coeff = (c == 1) && !key.trivial();
            if (!unit_coeff) os << rat_str(c);
            bool need_star = !unit_coeff;
            for (const auto& [p, e] : key.rad) {
                if (need_star) os << "*";
                os << p << "^(" << rat_str(e) << ")";
                need_star = true;
            }
            for (const auto& [p, k] : key.lg) {
                if (need_star) os << "*";
                os << "log(" << p << ")";
                if (k > 1) os << "^" << k;
                need_star = true;
            }
        }
        return os.str();
    }

    const std::map<SymKey, Rat>& terms() const { return terms_; }

  private:
    std::map<SymKey, Rat> terms_;

    void add_term(const SymKey& k, const Rat& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    static SymKey log_key(std::int64_t p) {
        SymKey k;
        k.lg.emplace_back(p, 1);
        return k;
    }

    // p^e normalized so the stored exponent lies in (0,1); the integer part
    // goes into the rational coefficient.
    static std::pair<SymKey, Rat> normalize_pow(std::int64_t p, const Rat& e) {
        Int carry = rat_floor(e);
        Rat frac = e - Rat(carry);
        SymKey key;
        if (frac != 0) key.rad.emplace_back(p, frac);
        return {key, detail::int_pow_rat(p, carry)};
    }

    static std::pair<SymKey, Rat> mul_keys(const SymKey& a, const SymKey& b) {
        SymKey out;
        Rat extra = 1;
        std::size_t i = 0, j = 0;
        while (i < a.rad.size() || j < b.rad.size()) {
            if (j == b.rad.size() || (i < a.rad.size() && a.rad[i].first < b.rad[j].first)) {
                out.rad.push_back(a.rad[i++]);
            } else if (i == a.rad.size() || b.rad[j].first < a.rad[i].first) {
                out.rad.push_back(b.rad[j++]);
            } else {
                auto p = a.rad[i].first;
                Rat e = a.rad[i].second + b.rad[j].second;
                ++i, ++j;
                auto [k, c] = normalize_pow(p, e);
                extra *= c;
                if (!k.rad.empty()) out.rad.push_back(k.rad.front());
            }
        }
        std::size_t u = 0, v = 0;
        while (u < a.lg.size() || v < b.lg.size()) {
            if (v == b.lg.size() || (u < a.lg.size() && a.lg[u].first < b.lg[v].first))
                out.lg.push_back(a.lg[u++]);
            else if (u == a.lg.size() || b.lg[v].first < a.lg[u].first)
                out.lg.push_back(b.lg[v++]);
            else {
                out.lg.emplace_back(a.lg[u].first, a.lg[u].second + b.lg[v].second);
                ++u, ++v;
            }
        }
        return {out, extra};
    }

    static ExactVal pos_monomial_pow(const SymKey& key, const Rat& coeff, const Rat& g) {
        ExactVal out;
        SymKey acc_key;
        Rat acc_coeff = 1;
        for (const auto& [p, a] : detail::factor_rat(coeff)) {
            auto [k, c] = normalize_pow(p, Rat(a) * g);
            acc_coeff *= c;
            if (!k.rad.empty()) acc_key.rad.push_back(k.rad.front());
        }
        for (const auto& [p, e] : key.rad) {
            auto [k, c] = normalize_pow(p, e * g);
            acc_coeff *= c;
            if (!k.rad.empty()) {
                auto it = std::find_if(acc_key.rad.begin(), acc_key.rad.end(),
                                       [&](auto& q) { return q.first == p; });
                if (it == acc_key.rad.end())
                    acc_key.rad.push_back(k.rad.front());
                else {
                    auto [k2, c2] = normalize_pow(p, it->second + k.rad.front().second);
                    acc_coeff *= c2;
                    if (k2.rad.empty())
                        acc_key.rad.erase(it);
                    else
                        it->second = k2.rad.front().second;
                }
            }
        }
        if (!key.lg.empty()) {
            // only reachable for positive integer g handled in pow_rational
            acc_key.lg = key.lg;
            for (auto& [p, k] : acc_key.lg) k *= static_cast<std::uint32_t>(numerator(g));
        }
        std::sort(acc_key.rad.begin(), acc_key.rad.end());
        out.add_term(acc_key, acc_coeff);
        return out;
    }
};

}  // namespace dulac

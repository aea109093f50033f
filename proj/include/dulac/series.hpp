#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dulac/errors.hpp"
#include "dulac/monomial.hpp"
#include "dulac/scalar.hpp"

namespace dulac {

/// Iteration budget for loops whose increments crawl inside one x-block
/// (pure l / l2 directions). A budget-cut loop keeps every term it computed
/// but weakens the result's certificate to the first uncomputed order.
/// Raise per call when a computation needs deeper log-refinement.
inline constexpr long kCrawlBudget = 16;

/// Truncated depth-2 power-log transseries: finitely many monomial->Scalar
/// terms in strictly increasing lex order. Two cuts ride along:
///   bound()       - the requested truncation (terms at or above it are
///                   discarded); this is the OrderBound of the contract, and
///                   arithmetic propagates the minimum of the operands';
///   certificate() - the sound claim: every coefficient lexicographically
///                   below it is exact. certificate() <= bound(); they differ
///                   when an in-block crawl was stopped by its budget, in
///                   which case stored terms between the two are correct
///                   candidates but not certified (re-run with a larger
///                   budget to certify deeper).
/// All coefficients share one scalar mode. Values are immutable in style;
/// every operation returns a fresh series.
class TSeries {
  public:
    explicit TSeries(Mode mode, OrderBound bound = OrderBound::unbounded())
        : mode_(mode), cut_(bound), cert_(bound) {}

    static TSeries zero(Mode mode, OrderBound bound = OrderBound::unbounded()) {
        return TSeries(mode, bound);
    }
    static TSeries monomial(Scalar c, const Monomial& m,
                            OrderBound bound = OrderBound::unbounded()) {
        TSeries s(c.mode(), bound);
        s.set(m, std::move(c));
        return s;
    }
    static TSeries constant(const Scalar& c) { return monomial(c, Monomial::unit()); }
    static TSeries identity(Mode mode) {
        return monomial(Scalar::one(mode), Monomial::x(1));
    }

    Mode mode() const { return mode_; }
    const OrderBound& bound() const { return cut_; }
    const OrderBound& certificate() const { return cert_; }
    const std::map<Monomial, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    const std::pair<const Monomial, Scalar>& leading() const {
        if (terms_.empty()) throw ZeroLeadingTerm("leading term of the zero series");
        return *terms_.begin();
    }
    Monomial ord() const { return leading().first; }

    /// Stored coefficient (zero when absent); no certificate check.
    Scalar coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Scalar::zero(mode_) : it->second;
    }
    /// Coefficient with certificate check.
    Scalar coefficient_checked(const Monomial& m) const {
        if (!cert_.covers(m))
            throw InsufficientOrder("coefficient at " + m.str() +
                                    " is outside the certified region " + cert_.str());
        return coefficient(m);
    }

    void set(const Monomial& m, Scalar c) {
        if (c.mode() != mode_) throw ModeMismatch("coefficient mode differs from series mode");
        if (c.is_zero() || !cut_.covers(m)) {
            terms_.erase(m);
            return;
        }
        terms_.insert_or_assign(m, std::move(c));
    }
    void accumulate(const Monomial& m, const Scalar& c) {
        if (c.mode() != mode_) throw ModeMismatch("coefficient mode differs from series mode");
        if (!cut_.covers(m) || c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    /// Intersect both cuts with b and drop no-longer-stored terms.
    TSeries truncated(const OrderBound& b) const {
        TSeries out(mode_, min(cut_, b));
        out.cert_ = min(cert_, b);
        for (const auto& [m, c] : terms_) out.accumulate(m, c);
        return out;
    }

    /// Weaken only the certificate (a budget-cut loop keeps its terms).
    TSeries weakened(const OrderBound& b) const {
        TSeries out = *this;
        out.cert_ = min(out.cert_, b);
        return out;
    }

    /// Shift every exponent by d (multiplication by the monomial d).
    TSeries shifted(const Monomial& d) const {
        TSeries out(mode_, cut_.shifted(d));
        out.cert_ = cert_.shifted(d);
        for (const auto& [m, c] : terms_) out.terms_.emplace(m + d, c);
        return out;
    }

    friend TSeries add(const TSeries& s, const TSeries& t);
    friend TSeries mul(const TSeries& s, const TSeries& t);
    friend TSeries neg(const TSeries& s);
    friend TSeries scal(const TSeries& s, const Scalar& c);

  private:
    Mode mode_;
    OrderBound cut_;
    OrderBound cert_;
    std::map<Monomial, Scalar> terms_;
};

inline void check_modes(const TSeries& s, const TSeries& t) {
    if (s.mode() != t.mode()) throw ModeMismatch("series built in different scalar modes");
}

inline TSeries add(const TSeries& s, const TSeries& t) {
    check_modes(s, t);
    TSeries out(s.mode(), min(s.cut_, t.cut_));
    out.cert_ = min(s.cert_, t.cert_);
    for (const auto& [m, c] : s.terms_) out.accumulate(m, c);
    for (const auto& [m, c] : t.terms_) out.accumulate(m, c);
    return out;
}

inline TSeries neg(const TSeries& s) {
    TSeries out(s.mode(), s.cut_);
    out.cert_ = s.cert_;
    for (const auto& [m, c] : s.terms_) out.set(m, -c);
    return out;
}

inline TSeries sub(const TSeries& s, const TSeries& t) { return add(s, neg(t)); }

inline TSeries scal(const TSeries& s, const Scalar& c) {
    if (c.mode() != s.mode()) throw ModeMismatch("scalar mode differs from series mode");
    if (c.is_zero()) return TSeries::zero(s.mode());
    TSeries out(s.mode(), s.cut_);
    out.cert_ = s.cert_;
    for (const auto& [m, k] : s.terms_) out.set(m, k * c);
    return out;
}

inline TSeries scal(const TSeries& s, const Rat& q) {
    return scal(s, Scalar::of(q, s.mode()));
}

inline TSeries mul(const TSeries& s, const TSeries& t) {
    check_modes(s, t);
    // 0 (exact) absorbs; otherwise the unknown tails limit both cuts.
    if (s.is_zero() && s.bound().is_unbounded()) return TSeries::zero(s.mode());
    if (t.is_zero() && t.bound().is_unbounded()) return TSeries::zero(s.mode());
    auto shift_bound = [](const OrderBound& b, const TSeries& other) {
        if (b.is_unbounded()) return b;
        Monomial shift = other.is_zero() ? other.bound().require() : other.ord();
        return b.shifted(shift);
    };
    OrderBound cut = min(shift_bound(s.cut_, t), shift_bound(t.cut_, s));
    OrderBound cert = min(shift_bound(s.cert_, t), shift_bound(t.cert_, s));
    TSeries out(s.mode(), cut);
    out.cert_ = cert;
    for (const auto& [ms, cs] : s.terms_)
        for (const auto& [mt, ct] : t.terms_) {
            Monomial m = ms + mt;
            if (!cut.covers(m)) break;  // t-monomials only grow within the row
            out.accumulate(m, cs * ct);
        }
    return out;
}

inline TSeries operator+(const TSeries& s, const TSeries& t) { return add(s, t); }
inline TSeries operator-(const TSeries& s, const TSeries& t) { return sub(s, t); }
inline TSeries operator*(const TSeries& s, const TSeries& t) { return mul(s, t); }
inline TSeries operator-(const TSeries& s) { return neg(s); }

namespace detail {

/// Plan for a loop whose k-th increment has order k*step relative to `base`:
/// how many iterations until the requested cut is passed, and the
/// certificate clip to apply when the crawl budget stops the loop first.
struct LoopPlan {
    long max_iters;
    OrderBound clip;  // unbounded when the loop reaches the requested cut

    LoopPlan(const Monomial& step, const Monomial& base, const OrderBound& requested,
             long budget) {
        if (requested.is_unbounded()) {
            max_iters = budget;
            clip = OrderBound(base + step.scaled(Rat(budget + 1)));
            return;
        }
        auto k = steps_to_reach(step, requested.require() - base);
        if (k) {
            max_iters = *k + 1;
            clip = OrderBound::unbounded();
        } else {
            max_iters = budget;
            clip = OrderBound(base + step.scaled(Rat(budget + 1)));
        }
    }
};

}  // namespace detail

/// (1+u)^g as a binomial series, for u with lex-positive order. Terms are
/// kept up to `order` (intersected with u's own cut); the certificate
/// reflects any budget clip.
inline TSeries binomial_series(const TSeries& u, const Rat& g, const OrderBound& order,
                               long budget = kCrawlBudget) {
    Mode mode = u.mode();
    OrderBound eff = min(order, u.bound());
    TSeries acc = TSeries::constant(Scalar::one(mode)).truncated(eff).weakened(u.certificate());
    if (u.is_zero()) return acc;
    if (!(Monomial::unit() < u.ord()))
        throw Error("binomial_series: argument must be infinitesimal");
    bool finite = is_integer(g) && g >= 0;
    if (!finite && eff.is_unbounded())
        throw NotSupported("binomial series of an exact series needs an order bound");
    detail::LoopPlan plan(u.ord(), Monomial::unit(), eff,
                          finite ? to_long(numerator(g)) + 1 : budget);
    TSeries upow = TSeries::constant(Scalar::one(mode));
    Scalar binom = Scalar::one(mode);
    bool hit_budget = true;
    for (long k = 1; k <= plan.max_iters; ++k) {
        binom = binom.mul_rat((g - Rat(k - 1)) / Rat(k));
        if (binom.is_zero()) {
            hit_budget = false;
            break;  // natural g: series terminates
        }
        upow = mul(upow, u).truncated(eff);
        acc = add(acc, scal(upow, binom));
        if (upow.is_zero()) {
            hit_budget = false;
            break;
        }
    }
    return hit_budget ? acc.weakened(plan.clip) : acc;
}

/// log(1+u) for infinitesimal u.
inline TSeries log1p_series(const TSeries& u, const OrderBound& order,
                            long budget = kCrawlBudget) {
    Mode mode = u.mode();
    OrderBound eff = min(order, u.bound());
    TSeries acc = TSeries::zero(mode, eff);
    acc = acc.weakened(u.certificate());
    if (u.is_zero()) return acc;
    if (!(Monomial::unit() < u.ord()))
        throw Error("log1p_series: argument must be infinitesimal");
    if (eff.is_unbounded())
        throw NotSupported("log series of an exact series needs an order bound");
    detail::LoopPlan plan(u.ord(), Monomial::unit(), eff, budget);
    TSeries upow = TSeries::constant(Scalar::one(mode));
    bool hit_budget = true;
    for (long k = 1; k <= plan.max_iters; ++k) {
        upow = mul(upow, u).truncated(eff);
        Rat c = (k % 2 == 1) ? Rat(1, k) : Rat(-1, k);
        acc = add(acc, scal(upow, c));
        if (upow.is_zero()) {
            hit_budget = false;
            break;
        }
    }
    return hit_budget ? acc.weakened(plan.clip) : acc;
}

/// s^g for rational g. Factors the leading term c*mu and expands
/// c^g * mu^g * (1+u)^g.
inline TSeries pow(const TSeries& s, const Rat& g,
                   OrderBound order = OrderBound::unbounded(), long budget = kCrawlBudget) {
    if (s.is_zero()) {
        if (g > 0 && s.bound().is_unbounded()) return TSeries::zero(s.mode());
        throw ZeroLeadingTerm("pow of the zero series");
    }
    const auto& [mu, c0] = s.leading();
    TSeries u = scal(s.shifted(Monomial::unit() - mu), c0.inverse());
    u.set(Monomial::unit(), Scalar::zero(s.mode()));
    Monomial mu_g = mu.scaled(g);
    // requested cut relative to the factored-out monomial mu^g; u's own
    // cut and certificate are folded in by binomial_series
    OrderBound rel = order.shifted(Monomial::unit() - mu_g);
    TSeries body = binomial_series(u, g, rel, budget);
    return scal(body, c0.pow_rat(g)).shifted(mu_g);
}

/// Termwise derivative: (x^a l^g1 l2^g2)' =
///   a x^{a-1} l^{g1} l2^{g2} + g1 x^{a-1} l^{g1+1} l2^{g2}
///   + g2 x^{a-1} l^{g1+1} l2^{g2+1}.
inline TSeries derive(const TSeries& s) {
    TSeries out(s.mode(), s.bound().shifted(Monomial{-1, 0, 0}));
    out = out.weakened(s.certificate().shifted(Monomial{-1, 0, 0}));
    for (const auto& [m, c] : s.terms()) {
        if (m.a != 0) out.accumulate(Monomial{m.a - 1, m.g1, m.g2}, c.mul_rat(m.a));
        if (m.g1 != 0) out.accumulate(Monomial{m.a - 1, m.g1 + 1, m.g2}, c.mul_rat(m.g1));
        if (m.g2 != 0) out.accumulate(Monomial{m.a - 1, m.g1 + 1, m.g2 + 1}, c.mul_rat(m.g2));
    }
    return out;
}

namespace detail {

/// Leading order of the antiderivative of a monomial at position m; the
/// corner (-1,1,1) (whose antiderivative leaves depth 2) is assigned the
/// unit position, which keeps the map monotone for bound propagation.
inline Monomial integral_order(const Monomial& m) {
    if (m.a != -1) return Monomial{m.a + 1, m.g1, m.g2};
    if (m.g1 != 1) return Monomial{0, m.g1 - 1, m.g2};
    return Monomial{0, 0, m.g2 - 1};
}

}  // namespace detail

/// Antiderivative of c * x^{beta-1} l^r l2^s with zero integration constant,
/// truncated at `order`. The monomial x^-1 l l2 (beta=0, r=1, s=1) has no
/// depth-2 antiderivative.
inline TSeries integrate_monomial(const Scalar& c, const Monomial& mu, const OrderBound& order,
                                  long budget = kCrawlBudget) {
    Mode mode = c.mode();
    Rat beta = mu.a + 1, r = mu.g1, s = mu.g2;
    if (beta == 0 && r == 1 && s == 1)
        throw DepthExceeded("antiderivative of x^-1 l l2 needs a depth-3 logarithm");
    TSeries out(mode, order);
    if (c.is_zero()) return out;
    if (beta != 0) {
        // int x^{beta-1} l^r l2^s = (1/beta) x^beta l^r l2^s
        //   - (r/beta) int x^{beta-1} l^{r+1} l2^s - (s/beta) int x^{beta-1} l^{r+1} l2^{s+1}
        std::map<Monomial, Scalar> pending;  // emitted-position -> coefficient
        pending.emplace(Monomial{beta, r, s}, c);
        long steps = 0;
        while (!pending.empty()) {
            auto it = pending.begin();
            Monomial m = it->first;
            Scalar coeff = it->second;
            pending.erase(it);
            if (!order.covers(m)) continue;
            if (++steps > budget * 2) {
                out = out.weakened(OrderBound(m));
                break;
            }
            out.accumulate(m, coeff.mul_rat(Rat(1) / beta));
            if (m.g1 != 0) {
                Monomial next{m.a, m.g1 + 1, m.g2};
                Scalar add_c = coeff.mul_rat(-m.g1 / beta);
                auto [jt, ins] = pending.emplace(next, add_c);
                if (!ins) jt->second += add_c;
            }
            if (m.g2 != 0) {
                Monomial next{m.a, m.g1 + 1, m.g2 + 1};
                Scalar add_c = coeff.mul_rat(-m.g2 / beta);
                auto [jt, ins] = pending.emplace(next, add_c);
                if (!ins) jt->second += add_c;
            }
        }
        return out;
    }
    if (r != 1) {
        // int x^-1 l^r l2^s = 1/(r-1) l^{r-1} l2^s - s/(r-1) int x^-1 l^r l2^{s+1}
        detail::LoopPlan plan(Monomial{0, 0, 1}, Monomial{0, r - 1, s}, order, budget);
        Scalar coeff = c;
        Rat sk = s;
        bool hit_budget = true;
        for (long k = 0; k <= plan.max_iters; ++k) {
            Monomial m{0, r - 1, sk};
            if (!order.covers(m)) {
                hit_budget = false;
                break;
            }
            out.accumulate(m, coeff.mul_rat(Rat(1) / (r - 1)));
            if (sk == 0) return out;  // chain terminates exactly
            coeff = coeff.mul_rat(-sk / (r - 1));
            sk += 1;
        }
        return hit_budget ? out.weakened(plan.clip) : out;
    }
    // beta = 0, r = 1, s != 1: exact single term
    out.accumulate(Monomial{0, 0, s - 1}, c.mul_rat(Rat(1) / (s - 1)));
    return out;
}

/// Termwise antiderivative with integration constant 0 (the unit monomial
/// never appears in the image of integrate_monomial).
inline TSeries integrate(const TSeries& s, OrderBound order = OrderBound::unbounded(),
                         long budget = kCrawlBudget) {
    OrderBound eff = order;
    if (!s.bound().is_unbounded())
        eff = min(eff, OrderBound(detail::integral_order(s.bound().require())));
    TSeries out = TSeries::zero(s.mode(), eff);
    if (!s.certificate().is_unbounded())
        out = out.weakened(OrderBound(detail::integral_order(s.certificate().require())));
    for (const auto& [m, c] : s.terms())
        out = add(out, integrate_monomial(c, m, eff, budget));
    return out;
}

}  // namespace dulac

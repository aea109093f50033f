#pragma once

#include <optional>

#include "dulac/errors.hpp"
#include "dulac/series.hpp"

namespace dulac {

namespace detail {

/// Order of the composed monomial nu o s: nu = (a,g1,g2) pulls back to
/// a*ord(s) + g1*ord(l(s)) + g2*ord(l2(s)) with ord(l(s)) = (0,1,0) and
/// ord(l2(s)) = (0,0,1). Monotone in nu, which makes it usable on bound cuts.
inline Monomial compose_order(const Monomial& nu, const Monomial& sigma) {
    return sigma.scaled(nu.a) + Monomial{0, nu.g1, nu.g2};
}

}  // namespace detail

/// -log(X) for an infinitesimal series X = c*mu*(1+u):
///   -log X = a_mu l^-1 + g1_mu l2^-1 - log c - log(1+u),
/// using log x = -l^-1 and log l = -l2^-1. A leading l2 exponent would need
/// log l2 (depth 3).
inline TSeries minus_log(const TSeries& X, const OrderBound& order,
                         long budget = kCrawlBudget) {
    const auto& [mu, c0] = X.leading();
    if (mu.g2 != 0)
        throw DepthExceeded("log of a series with l2 in its leading monomial");
    Mode mode = X.mode();
    TSeries u = scal(X.shifted(Monomial::unit() - mu), c0.inverse());
    u.set(Monomial::unit(), Scalar::zero(mode));
    TSeries out = TSeries::zero(mode, order);
    if (mu.a != 0) out.accumulate(Monomial::l(-1), Scalar::of(mu.a, mode));
    if (mu.g1 != 0) out.accumulate(Monomial::l2(-1), Scalar::of(mu.g1, mode));
    Scalar logc = c0.log_value();
    if (!logc.is_zero()) out.accumulate(Monomial::unit(), -logc);
    if (!u.is_zero()) out = sub(out, log1p_series(u, order, budget));
    return out.truncated(order);
}

/// l(X) = 1/(-log X).
inline TSeries ell_of(const TSeries& X, const OrderBound& order, long budget = kCrawlBudget) {
    // inverting at leading order (0,-1,0) or (0,0,-1) costs two block-depths
    OrderBound inner = order;
    if (!inner.is_unbounded()) inner = inner.shifted(Monomial{0, 2, 2});
    return pow(minus_log(X, inner, budget), Rat(-1), order, budget);
}

/// Formal composition f o s for infinitesimal s (strictly positive leading
/// x-exponent). Each monomial x^a l^g1 l2^g2 of f is realized as
/// pow(s,a) * l(s)^g1 * l2(s)^g2.
inline TSeries substitute(const TSeries& f, const TSeries& s,
                          OrderBound order = OrderBound::unbounded(),
                          long budget = kCrawlBudget) {
    check_modes(f, s);
    Mode mode = f.mode();
    if (s.is_zero()) throw NotInfinitesimal("composition argument is the zero series");
    Monomial sigma = s.ord();
    if (!(sigma.a > 0))
        throw NotInfinitesimal("composition argument must have positive leading x-exponent");

    OrderBound out_bound = order;
    if (!f.bound().is_unbounded())
        out_bound = min(out_bound, OrderBound(detail::compose_order(f.bound().require(), sigma)));
    OrderBound out_cert = out_bound;
    if (!f.certificate().is_unbounded())
        out_cert = min(out_cert, OrderBound(detail::compose_order(f.certificate().require(), sigma)));

    if (f.is_zero()) return TSeries::zero(mode, out_bound).weakened(out_cert);

    bool need_l = false, need_l2 = false;
    for (const auto& [m, c] : f.terms()) {
        if (m.g1 != 0) need_l = true;
        if (m.g2 != 0) need_l2 = true;
    }

    // block accuracy: enough that the worst (lowest-order) f-term still
    // reaches out_bound after multiplication by the remaining factors
    Monomial base = detail::compose_order(f.ord(), sigma);
    OrderBound block = out_bound;
    if (!block.is_unbounded())
        block = block.shifted(Monomial{0, 2, 2} - base);

    std::optional<TSeries> ell_s, ell2_s;
    if (need_l || need_l2) ell_s = ell_of(s, block, budget);
    if (need_l2) ell2_s = ell_of(*ell_s, block, budget);

    TSeries acc = TSeries::zero(mode, out_bound);
    for (const auto& [m, c] : f.terms()) {
        Monomial target = detail::compose_order(m, sigma);
        if (!out_bound.covers(target)) continue;
        // bound for one factor: the rest of the product contributes
        // target - factor_ord, so the factor needs out_bound shifted back
        auto factor_bound = [&](const Monomial& factor_ord) {
            return out_bound.is_unbounded() ? out_bound
                                            : out_bound.shifted(factor_ord - target);
        };
        TSeries term = pow(s, m.a, factor_bound(sigma.scaled(m.a)), budget);
        if (m.g1 != 0)
            term = mul(term, pow(*ell_s, m.g1, factor_bound(Monomial{0, m.g1, 0}), budget));
        if (m.g2 != 0)
            term = mul(term, pow(*ell2_s, m.g2, factor_bound(Monomial{0, 0, m.g2}), budget));
        acc = add(acc, scal(term, c));
    }
    return acc.truncated(out_bound).weakened(out_cert);
}

/// Numeric value of the truncation at 0 < x < 1 (float mode):
/// sum c * x^a * l(x)^g1 * l2(x)^g2 with l(x) = -1/log x, l2(x) = l(l(x)).
inline Scalar eval_numeric(const TSeries& s, const Scalar& x) {
    if (s.mode() != Mode::floating || x.mode() != Mode::floating)
        throw ModeMismatch("eval_numeric requires float mode");
    BigFloat xv = x.float_value();
    if (!(xv > 0 && xv < 1)) throw DomainError("eval_numeric requires 0 < x < 1");
    bool has_l2 = false;
    for (const auto& [m, c] : s.terms())
        if (m.g2 != 0) has_l2 = true;
    if (has_l2) {
        BigFloat threshold = exp(-exp(BigFloat(1)));
        if (!(xv < threshold)) throw DomainError("eval_numeric with l2 terms requires x < e^-e");
    }
    BigFloat lv = -1 / log(xv);
    BigFloat l2v = has_l2 ? BigFloat(-1 / log(lv)) : BigFloat(0);
    auto fpow = [](const BigFloat& b, const Rat& e) -> BigFloat {
        if (e == 0) return BigFloat(1);
        return pow(b, BigFloat(numerator(e)) / BigFloat(denominator(e)));
    };
    BigFloat acc = 0;
    for (const auto& [m, c] : s.terms())
        acc += c.float_value() * fpow(xv, m.a) * fpow(lv, m.g1) * fpow(l2v, m.g2);
    return Scalar::floating(acc);
}

}  // namespace dulac

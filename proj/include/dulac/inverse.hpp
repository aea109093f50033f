#pragma once

#include <optional>
#include <set>
#include <vector>

#include "dulac/compose.hpp"
#include "dulac/series.hpp"

namespace dulac {

/// Head of a series before reversion: a * x^alpha * l^m, optionally thickened
/// to the full polynomial block a * x^alpha * l^m * (1 + Q(l)) of a Dulac
/// series, where 1 + Q collects the lower-degree part of P(l^-1) relative to
/// its top term.
struct LeadingBlock {
    Scalar a;
    Rat alpha;
    long m = 0;
    std::vector<Scalar> tail_poly;  // Q coefficients: tail_poly[k] multiplies l^{k+1}

    bool has_poly_tail() const { return !tail_poly.empty(); }
};

/// Extracts the leading block of g. When every term sharing the leading
/// x-exponent forms a polynomial in l^-1 below the top ell power (a Dulac
/// x^alpha P(l^-1) head), the whole polynomial block is returned; otherwise
/// only the leading monomial.
inline LeadingBlock leading_block_of(const TSeries& g) {
    const auto& [lt, c0] = g.leading();
    if (lt.g2 != 0)
        throw NotSupported("leading monomial carries an l2 exponent");
    if (!(lt.a > 0)) throw NotSupported("reversion requires a positive leading x-exponent");
    if (!is_integer(lt.g1))
        throw NotSupported("leading l-exponent must be an integer");
    LeadingBlock b{c0, lt.a, to_long(numerator(lt.g1)), {}};
    if (b.m > 0) return b;  // not a Dulac head; treat as a bare monomial
    // candidate polynomial tail: terms x^alpha l^{m+k}, 1 <= k <= -m
    std::vector<Scalar> tail(static_cast<std::size_t>(-b.m), Scalar::zero(g.mode()));
    bool poly_ok = true;
    for (const auto& [mono, c] : g.terms()) {
        if (mono.a != lt.a || mono == lt) continue;
        Rat k = mono.g1 - Rat(b.m);
        if (mono.g2 != 0 || !is_integer(k) || k < 1 || k > -b.m) {
            poly_ok = false;
            break;
        }
        tail[static_cast<std::size_t>(to_long(numerator(k)) - 1)] = c * c0.inverse();
    }
    if (poly_ok) {
        while (!tail.empty() && tail.back().is_zero()) tail.pop_back();
        b.tail_poly = std::move(tail);
    }
    return b;
}

inline TSeries block_series(const LeadingBlock& b, Mode mode) {
    TSeries s = TSeries::monomial(b.a, Monomial{b.alpha, Rat(b.m), 0});
    for (std::size_t k = 0; k < b.tail_poly.size(); ++k)
        s.accumulate(Monomial{b.alpha, Rat(b.m) + Rat(k + 1), 0}, b.a * b.tail_poly[k]);
    (void)mode;
    return s;
}

/// Formal inverse of the leading block, solved by a fixed point of the
/// implicit equation (1+h)^alpha W^{-m} (1+Q(l(x))) = 1 with
/// W = 1 + log(a alpha^m) l - m l/l2 - alpha l log(1+h), giving
///   block^{-1}(y) = (a alpha^m)^{-1/alpha} y^{1/alpha} l^{-m/alpha} (1+h).
/// For m = 0 without a polynomial tail the inverse is a^{-1/alpha} x^{1/alpha}
/// exactly.
inline TSeries leading_block_inverse(const LeadingBlock& b, const OrderBound& order,
                                     long budget = kCrawlBudget) {
    Mode mode = b.a.mode();
    if (b.a.is_zero()) throw ZeroLeadingTerm("leading block with zero coefficient");
    if (!(b.alpha > 0)) throw NotSupported("leading block needs alpha > 0");
    if (b.m == 0 && !b.has_poly_tail())
        return TSeries::monomial(b.a.pow_rat(Rat(-1) / b.alpha),
                                 Monomial{1 / b.alpha, 0, 0});
    Rat alpha = b.alpha;
    Scalar aam = b.a.mul_rat(rat_pow_int(alpha, b.m));
    Scalar C = aam.pow_rat(Rat(-1) / alpha);
    Monomial lead{1 / alpha, Rat(-b.m) / alpha, 0};
    OrderBound rel = order.is_unbounded() ? order : order.shifted(Monomial::unit() - lead);

    Scalar log_aam = aam.log_value();
    TSeries w_const = TSeries::constant(Scalar::one(mode));
    if (!log_aam.is_zero()) w_const.accumulate(Monomial::l(1), log_aam);
    if (b.m != 0) w_const.accumulate(Monomial{0, 1, -1}, Scalar::of(Rat(-b.m), mode));

    TSeries h = TSeries::zero(mode, rel);
    for (long it = 0; it < budget + 4; ++it) {
        TSeries w = w_const;
        if (!h.is_zero()) {
            TSeries corr = scal(log1p_series(h, rel, budget), -alpha).shifted(Monomial::l(1));
            w = add(w, corr);
        }
        TSeries rhs = TSeries::constant(Scalar::one(mode));
        if (b.m != 0) rhs = pow(w, Rat(-b.m), rel, budget);
        if (b.has_poly_tail()) {
            // l at the preimage point: alpha * l * W^{-1}
            TSeries ellx = scal(pow(w, Rat(-1), rel, budget), alpha).shifted(Monomial::l(1));
            TSeries q = TSeries::zero(mode, rel);
            TSeries p = TSeries::constant(Scalar::one(mode));
            for (std::size_t k = 0; k < b.tail_poly.size(); ++k) {
                p = mul(p, ellx);
                if (!b.tail_poly[k].is_zero()) q = add(q, scal(p, b.tail_poly[k]));
            }
            rhs = mul(rhs, add(TSeries::constant(Scalar::one(mode)), q));
        }
        TSeries h_new = pow(rhs, Rat(-1) / alpha, rel, budget);
        h_new.accumulate(Monomial::unit(), -Scalar::one(mode));
        if (sub(h_new, h).is_zero()) {
            h = h_new;
            break;
        }
        h = h_new;
    }
    TSeries body = add(TSeries::constant(Scalar::one(mode)), h);
    return scal(body, C).shifted(lead).truncated(order);
}

/// phi = block^{-1} o g, the parabolic factor of g relative to its leading
/// monomial (lemma-level building block; `invert` uses the full polynomial
/// block when one exists).
inline TSeries factor_parabolic(const TSeries& g, const OrderBound& order,
                                long budget = kCrawlBudget) {
    if (g.is_zero()) throw ZeroLeadingTerm("cannot factor the zero series");
    const auto& [lt, c0] = g.leading();
    LeadingBlock mono{c0, lt.a, to_long(numerator(lt.g1)), {}};
    if (!is_integer(lt.g1)) throw NotSupported("leading l-exponent must be an integer");
    TSeries binv = leading_block_inverse(mono, order, budget);
    return substitute(binv, g, order, budget);
}

namespace detail {

/// f o (id + h) - f as a formal Taylor shift sum_{j>=1} f^{(j)} h^j / j!.
inline TSeries compose_delta(const TSeries& f, const TSeries& h, const OrderBound& order,
                             long budget) {
    Mode mode = f.mode();
    TSeries acc = TSeries::zero(mode, order);
    if (f.is_zero() || h.is_zero()) return acc.truncated(min(f.bound(), h.bound()));
    Monomial step = h.ord() - Monomial{1, 0, 0};
    if (!(Monomial::unit() < step))
        throw NotParabolic("Taylor shift needs ord(h) strictly above (1,0,0)");
    LoopPlan plan(step, f.ord(), order, budget);
    // one safe cut for every h-power: the j-th derivative sits at
    // ord(f) - j*(1,0,0), so anything at or above this cut cannot re-enter
    OrderBound hcut = order;
    if (!order.is_unbounded())
        hcut = order.shifted(Monomial{Rat(plan.max_iters + 1), 0, 0} - f.ord());
    TSeries deriv = f;
    TSeries hpow = TSeries::constant(Scalar::one(mode));
    Rat factorial = 1;
    for (long j = 1; j <= plan.max_iters; ++j) {
        deriv = derive(deriv);
        hpow = mul(hpow, h).truncated(hcut);
        factorial *= j;
        TSeries term = scal(mul(deriv, hpow), Rat(1) / factorial).truncated(order);
        acc = add(acc, term);
        if (term.is_zero()) break;
    }
    return acc.weakened(plan.clip);
}

}  // namespace detail

/// Formal inverse of a parabolic series by the Neumann sum
/// sum_k (-1)^k H^k . id with (H f) = f o phi - f.
inline TSeries invert_parabolic(const TSeries& phi, const OrderBound& order,
                                long budget = kCrawlBudget) {
    Mode mode = phi.mode();
    if (phi.is_zero() || phi.ord() != Monomial{1, 0, 0} ||
        !(phi.leading().second == Scalar::one(mode)))
        throw NotParabolic("inverse of a non-parabolic series");
    TSeries h = phi;
    h.set(Monomial{1, 0, 0}, Scalar::zero(mode));
    if (h.is_zero()) return TSeries::identity(mode).truncated(min(order, h.bound()));
    Monomial step = h.ord() - Monomial{1, 0, 0};
    detail::LoopPlan plan(step, Monomial{1, 0, 0}, order, budget);
    TSeries acc = TSeries::identity(mode);
    TSeries term = TSeries::identity(mode);
    for (long k = 1; k <= plan.max_iters; ++k) {
        term = neg(detail::compose_delta(term, h, order, budget));
        if (term.is_zero()) {
            acc = add(acc, term);  // carry the bound
            return acc.weakened(plan.clip).truncated(order);
        }
        acc = add(acc, term);
    }
    return acc.weakened(plan.clip).truncated(order);
}

/// Generators of the reversion support semigroup of g (the monoid containing
/// the support of block^{-1}(y)/lead - 1 in the exponents of
/// (y l^{-m})^{1/alpha}, l, l2).
struct SupportSemigroup {
    std::vector<Monomial> generators;

    /// Bounded membership test by depth-first subtraction of generators.
    bool contains(const Monomial& target, int fuel = 4096) const {
        if (target.is_unit()) return true;
        if (fuel <= 0) return false;
        std::set<Monomial> seen;
        return search(target, fuel, seen);
    }

  private:
    bool search(const Monomial& t, int& fuel, std::set<Monomial>& seen) const {
        if (t.is_unit()) return true;
        if (fuel-- <= 0) return false;
        if (t.a < 0 || seen.count(t)) return false;
        for (const auto& g : generators) {
            Monomial r = t - g;
            if (r.a < 0) continue;
            if (r.is_unit() || search(r, fuel, seen)) return true;
        }
        seen.insert(t);
        return false;
    }
};

/// The semigroup R~_g of the paper's reversion theorem: generated by
/// (beta-alpha, l-m, 0) over the support of g, plus (0,1,-1) and (0,0,1)
/// when m != 0, plus (0,1,0) when m = 0.
inline SupportSemigroup reversion_semigroup(const TSeries& g) {
    const auto& [lt, c0] = g.leading();
    SupportSemigroup s;
    for (const auto& [mono, c] : g.terms()) {
        if (mono == lt) continue;
        s.generators.push_back(Monomial{mono.a - lt.a, mono.g1 - lt.g1, 0});
    }
    if (lt.g1 != 0) {
        s.generators.push_back(Monomial{0, 1, -1});
        s.generators.push_back(Monomial{0, 0, 1});
    } else {
        s.generators.push_back(Monomial{0, 1, 0});
    }
    return s;
}

/// Formal inverse of g = a x^alpha l^m + h.o.t. via the composition
/// g^{-1} = phi^{-1} o block^{-1}. With a full Dulac polynomial block the
/// parabolic factor is strictly parabolic, which the routine asserts.
inline TSeries invert(const TSeries& g, const OrderBound& order, long budget = kCrawlBudget) {
    if (g.is_zero()) throw ZeroLeadingTerm("cannot invert the zero series");
    LeadingBlock block = leading_block_of(g);
    Rat alpha = block.alpha;
    // pull the requested bound back through block^{-1} (order (1/alpha, -m/alpha, 0))
    OrderBound phi_bound = order;
    if (!order.is_unbounded()) {
        Monomial cut = order.require();
        Monomial pulled{alpha * cut.a, cut.g1 + Rat(block.m) * cut.a, cut.g2};
        phi_bound = OrderBound(pulled + Monomial{0, 2, 2});
    }
    OrderBound binv_bound = order;
    if (!order.is_unbounded() && !phi_bound.is_unbounded()) {
        Monomial pb = phi_bound.require();
        Monomial back{pb.a / alpha, pb.g1 - Rat(block.m) * (pb.a / alpha), pb.g2};
        Monomial oc = order.require();
        binv_bound = OrderBound(std::max(back, oc) + Monomial{0, 2, 2});
    }
    TSeries binv = leading_block_inverse(block, binv_bound, budget);
    TSeries phi = substitute(binv, g, phi_bound, budget);
    if (phi.is_zero() || phi.ord() != Monomial{1, 0, 0})
        throw MalformedLeadingTerm("parabolic factor does not start at x");
    if (block.has_poly_tail() || block.m == 0) {
        // Dulac route: the factor must be strictly parabolic in x
        TSeries rest = phi;
        rest.set(Monomial{1, 0, 0}, Scalar::zero(phi.mode()));
        if (!rest.is_zero() && !(rest.ord().a > 1))
            throw MalformedLeadingTerm(
                "Dulac leading-block factor is not strictly parabolic; input is not a "
                "Dulac-type series");
    }
    TSeries phi_inv = invert_parabolic(phi, phi_bound, budget);
    return substitute(phi_inv, binv, order, budget).truncated(order);
}

}  // namespace dulac

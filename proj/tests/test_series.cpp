#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dulac/series.hpp"
#include "dulac/series_text.hpp"

using namespace dulac;

namespace {

TSeries make(std::initializer_list<std::pair<Monomial, Rat>> ts,
             OrderBound b = OrderBound::unbounded(), Mode m = Mode::exact) {
    TSeries s(m, b);
    for (const auto& [mono, c] : ts) s.accumulate(mono, Scalar::of(c, m));
    return s;
}

Monomial M(long a, long g1 = 0, long g2 = 0) { return Monomial{Rat(a), Rat(g1), Rat(g2)}; }

std::mt19937 rng(20240817);

Rat rand_rat(int lo = -4, int hi = 4, int maxden = 3) {
    std::uniform_int_distribution<int> num(lo, hi), den(1, maxden);
    return Rat(num(rng), den(rng));
}

TSeries random_series(int nterms, OrderBound b) {
    TSeries s(Mode::exact, b);
    for (int i = 0; i < nterms; ++i) {
        Monomial m{rand_rat(-3, 6), rand_rat(-3, 3), rand_rat(-2, 2)};
        if (m.a == -1 && m.g1 == 1 && m.g2 == 1) continue;  // no depth-2 antiderivative
        Rat c = rand_rat(-5, 5);
        if (c == 0) c = 1;
        s.accumulate(m, Scalar::exact(c));
    }
    return s;
}

}  // namespace

TEST_CASE("addition: identity, cancellation, lex merge") {
    TSeries x_minus_x2 = make({{M(1), 1}, {M(2), -1}});
    TSeries x2 = make({{M(2), 1}});
    CHECK(add(x_minus_x2, TSeries::zero(Mode::exact)).terms() == x_minus_x2.terms());
    TSeries sum = add(x_minus_x2, x2);
    CHECK(sum.size() == 1);
    CHECK(sum.leading().first == M(1));

    // (x^{1/2} + x l) + (x l^{-1}) sorts as x^{1/2}, x l^{-1}, x l
    TSeries a = make({{Monomial{Rat(1, 2), 0, 0}, 1}, {M(1, 1), 1}});
    TSeries b = make({{M(1, -1), 1}});
    TSeries s = add(a, b);
    std::vector<Monomial> got;
    for (const auto& [m, c] : s.terms()) got.push_back(m);
    REQUIRE(got.size() == 3);
    CHECK(got[0] == Monomial{Rat(1, 2), 0, 0});
    CHECK(got[1] == M(1, -1));
    CHECK(got[2] == M(1, 1));
}

TEST_CASE("multiplication: exponents add, Cauchy products truncate") {
    // x^a l^m * x^b l^n
    TSeries p = make({{Monomial{Rat(3, 2), Rat(-1), 0}, 2}});
    TSeries q = make({{Monomial{Rat(1, 2), Rat(3), 0}, 3}});
    TSeries r = mul(p, q);
    REQUIRE(r.size() == 1);
    CHECK(r.leading().first == Monomial{Rat(2), Rat(2), 0});
    CHECK(r.leading().second.as_rational() == Rat(6));

    // (1+u)(1-u) with u = x l
    TSeries one = TSeries::constant(Scalar::exact(Rat(1)));
    TSeries u = make({{M(1, 1), 1}});
    TSeries prod = mul(add(one, u), sub(one, u));
    REQUIRE(prod.size() == 2);
    CHECK(prod.coefficient(M(0)).as_rational() == 1);
    CHECK(prod.coefficient(M(2, 2)).as_rational() == -1);

    // x^2 * (1 - b x l) -> x^2 - b x^3 l (the g-hat of the worked example)
    Rat b(7, 3);
    TSeries g = mul(make({{M(2), 1}}), make({{M(0), 1}, {M(1, 1), -b}}));
    CHECK(g.coefficient(M(2)).as_rational() == 1);
    CHECK(g.coefficient(M(3, 1)).as_rational() == -b);
}

TEST_CASE("bound propagation through add and mul") {
    TSeries s = make({{M(1), 1}}, OrderBound(Rat(3), 0, 0));
    TSeries t = make({{M(2), 1}}, OrderBound(Rat(4), 0, 0));
    CHECK(add(s, t).bound() == OrderBound(Rat(3), 0, 0));
    // errors of s enter the product shifted by Lt(t) and vice versa
    TSeries p = mul(s, t);
    CHECK(p.bound() == OrderBound(Rat(5), 0, 0));
    // stored monomials beyond the bound are dropped
    TSeries big = make({{M(1), 1}, {M(6), 1}}, OrderBound(Rat(3), 0, 0));
    CHECK(big.size() == 1);
}

TEST_CASE("pow: monomial roots, geometric series, normal-form reciprocal") {
    TSeries x2 = make({{M(2), 1}});
    TSeries root = pow(x2, Rat(1, 2));
    REQUIRE(root.size() == 1);
    CHECK(root.leading().first == M(1));
    CHECK(root.leading().second.as_rational() == 1);

    TSeries geo = pow(make({{M(0), 1}, {M(1, 1), 1}}), Rat(-1), OrderBound(Rat(4), 0, 0));
    CHECK(geo.coefficient(M(0)).as_rational() == 1);
    CHECK(geo.coefficient(M(1, 1)).as_rational() == -1);
    CHECK(geo.coefficient(M(2, 2)).as_rational() == 1);
    CHECK(geo.coefficient(M(3, 3)).as_rational() == -1);

    // 1/g0 for g0 = x^a l^m (1 - rho x^{a-1} l^{m+1}): x^{-a} l^{-m} + rho x^{-1} l + ...
    Rat alpha(2), em(-1), rho(5, 2);
    TSeries g0 = make({{Monomial{alpha, em, 0}, 1}, {Monomial{2 * alpha - 1, 2 * em + 1, 0}, -rho}});
    TSeries inv = pow(g0, Rat(-1), OrderBound(Rat(1), 0, 0));
    CHECK(inv.coefficient(Monomial{-alpha, -em, 0}).as_rational() == 1);
    CHECK(inv.coefficient(M(-1, 1)).as_rational() == rho);

    // pow(s,g) * pow(s,-g) == 1 within the bound
    OrderBound ob(Rat(3), 0, 0);
    for (int i = 0; i < 25; ++i) {
        TSeries s = random_series(6, OrderBound::unbounded());
        if (s.is_zero()) continue;
        Rat g = rand_rat(-3, 3, 2);
        TSeries prod(Mode::exact);
        try {
            prod = mul(pow(s, g, ob), pow(s, -g, ob));
        } catch (const NeedsFloatMode&) {
            continue;  // leading coefficient outside the exact closure
        }
        TSeries delta = sub(prod, TSeries::constant(Scalar::exact(Rat(1))));
        for (const auto& [m, c] : delta.terms())
            if (delta.certificate().covers(m)) FAIL("pow inverse law violated at " << m.str());
    }
}

TEST_CASE("derive: power rule, iterated-log rule, worked Fatou derivative") {
    CHECK(derive(make({{Monomial{Rat(5, 3), 0, 0}, 1}}))
              .coefficient(Monomial{Rat(2, 3), 0, 0})
              .as_rational() == Rat(5, 3));
    TSeries dl = derive(make({{M(0, 1), 1}}));
    REQUIRE(dl.size() == 1);
    CHECK(dl.coefficient(M(-1, 2)).as_rational() == 1);

    // (x^-1 - l^-1 + b l2^-1)' = -x^-2 + x^-1 - b x^-1 l
    Rat b(4, 7);
    TSeries psi = make({{M(-1), 1}, {M(0, -1), -1}, {M(0, 0, -1), b}});
    TSeries dpsi = derive(psi);
    CHECK(dpsi.coefficient(M(-2)).as_rational() == -1);
    CHECK(dpsi.coefficient(M(-1)).as_rational() == 1);
    CHECK(dpsi.coefficient(M(-1, 1)).as_rational() == -b);
    CHECK(dpsi.size() == 3);
}

TEST_CASE("integrate: spec antiderivatives and the depth guard") {
    // int x^{b-1} = x^b / b
    TSeries i1 = integrate_monomial(Scalar::exact(Rat(1)), Monomial{Rat(2, 3) - 1, 0, 0},
                                    OrderBound(Rat(5), 0, 0));
    CHECK(i1.coefficient(Monomial{Rat(2, 3), 0, 0}).as_rational() == Rat(3, 2));
    // int x^-1 = log x = -l^-1
    TSeries i2 = integrate_monomial(Scalar::exact(Rat(1)), M(-1), OrderBound(Rat(5), 0, 0));
    REQUIRE(i2.size() == 1);
    CHECK(i2.coefficient(M(0, -1)).as_rational() == -1);
    // int x^-1 l^r, r != 1, is a single exact term l^{r-1}/(r-1)
    TSeries i3 = integrate_monomial(Scalar::exact(Rat(1)), M(-1, 3), OrderBound(Rat(5), 0, 0));
    REQUIRE(i3.size() == 1);
    CHECK(i3.coefficient(M(0, 2)).as_rational() == Rat(1, 2));
    // the excluded monomial
    CHECK_THROWS_AS(integrate_monomial(Scalar::exact(Rat(1)), M(-1, 1, 1), OrderBound(Rat(5), 0, 0)),
                    DepthExceeded);

    // Fatou antiderivative of the worked example:
    // int(-x^-2 + x^-1 - b x^-1 l) = x^-1 - l^-1 + b l2^-1
    Rat b(4, 7);
    TSeries rhs = make({{M(-2), -1}, {M(-1), 1}, {M(-1, 1), -b}});
    TSeries psi = integrate(rhs, OrderBound(Rat(3), 0, 0));
    CHECK(psi.coefficient(M(-1)).as_rational() == 1);
    CHECK(psi.coefficient(M(0, -1)).as_rational() == -1);
    CHECK(psi.coefficient(M(0, 0, -1)).as_rational() == b);
    CHECK(psi.size() == 3);
}

TEST_CASE("derive o integrate is the identity up to the bound") {
    OrderBound ob(Rat(4), 0, 0);
    for (int trial = 0; trial < 40; ++trial) {
        TSeries s = random_series(20, ob);
        TSeries back = derive(integrate(s, ob));
        TSeries delta = sub(back, s);
        for (const auto& [m, c] : delta.terms())
            if (delta.certificate().covers(m)) FAIL("residual term at " << m.str());
    }
}

TEST_CASE("ring axioms hold up to the propagated bound") {
    OrderBound ob(Rat(3), 2, 2);
    for (int trial = 0; trial < 30; ++trial) {
        TSeries a = random_series(5, ob), b = random_series(5, ob), c = random_series(5, ob);
        auto expect_zero = [](const TSeries& d) {
            for (const auto& [m, co] : d.terms())
                if (d.certificate().covers(m)) FAIL("nonzero at " << m.str());
        };
        expect_zero(sub(add(a, b), add(b, a)));
        expect_zero(sub(mul(a, b), mul(b, a)));
        expect_zero(sub(mul(mul(a, b), c), mul(a, mul(b, c))));
        expect_zero(sub(mul(a, add(b, c)), add(mul(a, b), mul(a, c))));
    }
}

TEST_CASE("canonical text form") {
    TSeries s = make({{Monomial{Rat(1, 2), 0, 0}, 2}, {M(1, -1), 1}, {Monomial{1, 1, 0}, Rat(-3, 4)}});
    CHECK(to_text(s) == "2 * x^(1/2) + 1 * x * l^(-1) + -3/4 * x * l");
    CHECK(to_text(TSeries::zero(Mode::exact)) == "0");
}

#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "asep/qpoly.hpp"

using namespace asep;

namespace {

QPoly P(std::initializer_list<long> c) {
    std::vector<mpq_class> v;
    for (long x : c) v.emplace_back(x);
    return QPoly(v);
}

QPoly random_poly(std::mt19937_64& rng, int max_deg) {
    std::uniform_int_distribution<long> coef(-5, 5);
    std::vector<mpq_class> v(static_cast<std::size_t>(rng() % (max_deg + 1)) + 1);
    for (auto& x : v) x = mpq_class(coef(rng), 1 + rng() % 3);
    return QPoly(v);
}

}  // namespace

TEST_CASE("q-integers and q-factorials") {
    CHECK(qint(1) == P({1}));
    CHECK(qint(3) == P({1, 1, 1}));
    CHECK(qint(4).evaluate_at(mpq_class(2)) == 15);
    CHECK(qfact(1) == P({1}));
    CHECK(qfact(2) == P({1, 1}));
    CHECK(qfact(3) == P({1, 2, 2, 1}));
    CHECK_THROWS_AS(qint(0), std::invalid_argument);
    CHECK_THROWS_AS(qfact(-1), std::invalid_argument);
    for (long n = 2; n <= 12; ++n) CHECK(qfact(n) == qfact(n - 1) * qint(n));
}

TEST_CASE("basic polynomial operations") {
    CHECK(P({1, 1}) * P({1, 1, 1}) == P({1, 2, 2, 1}));
    CHECK(exact_divide(P({1, 0, -1}), P({1, -1})) == P({1, 1}));
    CHECK(P({1, 1, 1}).evaluate_at(mpq_class(1, 2)) == mpq_class(7, 4));
    CHECK_THROWS_AS(exact_divide(P({1, 0, 1}), P({1, -1})), std::domain_error);
    CHECK_THROWS_AS(gcd(QPoly(), QPoly()), std::domain_error);
    CHECK(QPoly().degree() == QPoly::kMinusInfinity);
    CHECK(P({3, 0, 0}).degree() == 0);
    CHECK((P({1, 1}) - P({1, 1})).is_zero());
    // gcd((1+q)(1+q+q^2), (1+q)(1-q)) = 1+q
    CHECK(gcd(P({1, 2, 2, 1}), P({1, 0, -1})) == P({1, 1}));
    CHECK(gcd(P({2, 2}), QPoly()) == P({1, 1}));
}

TEST_CASE("common denominators") {
    CHECK(common_denominator(ParticleCounts{{1, 1, 1, 1}, 4}) == P({96}) * P({1, 1}) * P({1, 1}) * P({1, 1, 1}));
    CHECK(common_denominator(ParticleCounts{{1, 1}, 4}) == P({24, 24}));
    // literal product for two types filling a two-site ring
    CHECK(denominator_formula(ParticleCounts{{1, 1}, 2}) == P({2, 2}));
    // after identifying the last type with holes the same system needs only C(2,1)
    CHECK(common_denominator(ParticleCounts{{1, 1}, 2}) == P({2}));
    CHECK_THROWS_AS(common_denominator(ParticleCounts{{1, 0}, 4}), std::invalid_argument);
    CHECK_THROWS_AS(common_denominator(ParticleCounts{{3, 3}, 4}), std::invalid_argument);
}

TEST_CASE("property: L-type denominators agree with both closed forms") {
    for (unsigned long L = 2; L <= 8; ++L) {
        ParticleCounts pc{std::vector<std::size_t>(L, 1), L};
        mpz_class binoms = 1;
        for (unsigned long j = 1; j <= L - 1; ++j) binoms *= binomial(L, j);
        QPoly pre{mpq_class(binoms)};
        for (long j = 2; j <= static_cast<long>(L) - 1; ++j) pre *= qfact(j);
        QPoly rewritten{mpq_class(binoms)};
        for (long j = 2; j <= static_cast<long>(L) - 1; ++j)
            for (long e = 0; e < static_cast<long>(L) - j; ++e) rewritten *= qint(j);
        CHECK(common_denominator(pc) == pre);
        CHECK(pre == rewritten);
        // the (L-1)-type system with one hole is the same system
        ParticleCounts holes{std::vector<std::size_t>(L - 1, 1), L};
        CHECK(common_denominator(holes) == pre);
    }
}

TEST_CASE("rational functions: canonical form") {
    QRational r(P({1, 0, -1}), P({2, -2}));  // (1-q^2)/(2-2q) = (1+q)/2
    CHECK(r.den() == P({2}));
    CHECK(r.num() == P({1, 1}));
    QRational s(P({1}), P({-3, -3}));
    CHECK(s.den().leading() > 0);
    CHECK(s.den() == P({3, 3}));
    CHECK(s.num() == P({-1}));
    QRational h(QPoly(std::vector<mpq_class>{mpq_class(1, 2)}), QPoly(std::vector<mpq_class>{mpq_class(2, 3), 2}));
    CHECK(h.num() == P({3}));
    CHECK(h.den() == P({4, 12}));
    CHECK(to_string(QRational(P({2, 1}), P({9, 9}))) == "[2, 1] / [9, 9]");
    CHECK(to_string(P({1, 2, 2, 1})) == "[1, 2, 2, 1]");
    CHECK(parse_qpoly("[1, 2/3, 0]") == QPoly(std::vector<mpq_class>{1, mpq_class(2, 3)}));
    CHECK(QRational(P({2, 1}), P({9, 9})).evaluate_at(mpq_class(1, 2)) == mpq_class(5, 27));
    CHECK_THROWS_AS(QRational(P({1}), P({1, -1})).evaluate_at(mpq_class(1)), std::domain_error);
    CHECK_THROWS_AS(QRational(P({1}), QPoly()), std::domain_error);
}

TEST_CASE("property: canonical form idempotent, evaluation a homomorphism") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        QPoly a = random_poly(rng, 4), b = random_poly(rng, 4), c = random_poly(rng, 3);
        if (b.is_zero() || c.is_zero()) continue;
        QRational r(a * c, b * c);
        QRational again(r.num(), r.den());
        CHECK(again == r);
        CHECK(r == QRational(a, b));
        mpq_class x(static_cast<long>(rng() % 7) - 3, 1 + rng() % 5);
        x.canonicalize();
        CHECK((a * b).evaluate_at(x) == a.evaluate_at(x) * b.evaluate_at(x));
        CHECK((a + b).evaluate_at(x) == a.evaluate_at(x) + b.evaluate_at(x));
        if (b.evaluate_at(x) != 0 && c.evaluate_at(x) != 0)
            CHECK(r.evaluate_at(x) == a.evaluate_at(x) / b.evaluate_at(x));
        QRational s = r + QRational(c, a.is_zero() ? QPoly(1) : a);
        CHECK(QRational(s.num(), s.den()) == s);
        CHECK((s - s).is_zero());
    }
}

TEST_CASE("rational parsing") {
    CHECK(parse_rational("1/3") == mpq_class(1, 3));
    CHECK(parse_rational("0.25") == mpq_class(1, 4));
    CHECK(parse_rational("9/10") == mpq_class(9, 10));
    CHECK(parse_rational("0") == 0);
    CHECK(parse_rational("2/4") == mpq_class(1, 2));
    CHECK(parse_rational("0.08") == mpq_class(2, 25));
    CHECK(parse_rational("010") == 10);
    CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
}

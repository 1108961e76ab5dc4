#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "asep/ctmc.hpp"

using namespace asep;

namespace {

RingConfig cfg(const char* s, Type N) { return parse_config(s, N); }

// r(1/q) written again as a rational function of q.
QRational invert_q(const QRational& r) {
    const int d = std::max(r.num().degree(), r.den().degree());
    auto flip = [d](const QPoly& p) {
        std::vector<mpq_class> c(static_cast<std::size_t>(d) + 1, mpq_class(0));
        for (int i = 0; i <= p.degree(); ++i) c[static_cast<std::size_t>(d - i)] = p.coeff(static_cast<std::size_t>(i));
        return QPoly(c);
    };
    return QRational(flip(r.num()), flip(r.den()));
}

std::vector<ParticleCounts> all_counts(std::size_t L_max) {
    std::vector<ParticleCounts> out;
    for (std::size_t L = 1; L <= L_max; ++L) {
        // compositions of s <= L into positive parts
        for (std::size_t s = 1; s <= L; ++s) {
            for (unsigned mask = 0; mask < (1u << (s - 1)); ++mask) {
                std::vector<std::size_t> k{1};
                for (std::size_t b = 0; b + 1 < s; ++b) {
                    if (mask & (1u << b)) k.push_back(1);
                    else ++k.back();
                }
                out.push_back({k, L});
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("generator structure") {
    auto g = build_generator(ParticleCounts{{1}, 2});
    REQUIRE(g.size() == 2);
    REQUIRE(g.out[0].size() == 1);
    CHECK(g.out[0][0].ones == 1);
    CHECK(g.out[0][0].qs == 1);
    CHECK(build_generator(ParticleCounts{{1, 1, 1, 1}, 4}).size() == 24);
    CHECK_THROWS_AS(build_generator(ParticleCounts{{1, 1, 1, 1, 1, 1}, 6}, 100), std::length_error);

    // q = 0: no decreasing-order swaps carry weight
    auto g3 = build_generator(ParticleCounts{{1, 1}, 3});
    auto pi0 = solve_stationary_exact(g3, mpq_class(0));
    CHECK(balance_residual(g3, pi0, 0) == 0);
    for (std::size_t s = 0; s < g3.size(); ++s) {
        for (const auto& tr : g3.out[s]) {
            // exactly one of the two rate kinds per swap on a ring of 3
            CHECK(tr.ones + tr.qs == 1);
        }
    }
}

TEST_CASE("small exact solutions") {
    auto d2 = solve_stationary_exact(build_generator(ParticleCounts{{1}, 2}), mpq_class(1, 3));
    for (const auto& [c, p] : d2) CHECK(p == mpq_class(1, 2));

    auto g = build_generator(ParticleCounts{{1, 1}, 3});
    auto d = solve_stationary_exact(g, mpq_class(1, 2));
    CHECK(d.at(cfg("1 2 inf", 2)) == mpq_class(5, 27));
    auto d0 = solve_stationary_exact(g, mpq_class(0));
    CHECK(d0.at(cfg("1 2 inf", 2)) == mpq_class(2, 9));
    CHECK(d0.at(cfg("2 1 inf", 2)) == mpq_class(1, 9));
    auto sym = solve_stationary_symbolic(g);
    // (2+q)/(9(1+q))
    CHECK(sym.at(cfg("1 2 inf", 2)) == QRational(QPoly(std::vector<mpq_class>{2, 1}), QPoly(std::vector<mpq_class>{9, 9})));
}

TEST_CASE("total variation") {
    auto d = solve_stationary_exact(build_generator(ParticleCounts{{1}, 2}), mpq_class(1, 3));
    CHECK(total_variation(d, d) == 0);
    Distribution<mpq_class> a, b;
    a[cfg("1 inf", 1)] = 1;
    a[cfg("inf 1", 1)] = 0;
    b[cfg("1 inf", 1)] = 0;
    b[cfg("inf 1", 1)] = 1;
    CHECK(total_variation(a, b) == 1);
    Distribution<mpq_class> u = a, v = a;
    u[cfg("1 inf", 1)] = mpq_class(1, 2);
    u[cfg("inf 1", 1)] = mpq_class(1, 2);
    v[cfg("1 inf", 1)] = mpq_class(3, 4);
    v[cfg("inf 1", 1)] = mpq_class(1, 4);
    CHECK(total_variation(u, v) == mpq_class(1, 4));
    Distribution<mpq_class> w;
    w[cfg("1 inf", 1)] = 1;
    CHECK_THROWS_AS(total_variation(u, w), std::invalid_argument);
}

TEST_CASE("property: exact solutions are stationary, normalized, with uniform one-type projections") {
    for (const auto& pc : all_counts(5)) {
        auto g = build_generator(pc);
        for (const mpq_class q : {mpq_class(0), mpq_class(1, 3), mpq_class(9, 10)}) {
            auto d = solve_stationary_exact(g, q);
            mpq_class total = 0;
            for (const auto& [c, p] : d) {
                CHECK(p > 0);
                total += p;
            }
            CHECK(total == 1);
            CHECK(balance_residual(g, d, q) == 0);
            for (Type n = 1; n <= pc.k.size(); ++n) {
                auto proj = project_distribution(d, n);
                const mpq_class expected(1, static_cast<unsigned long>(proj.size()));
                CHECK(proj.size() == config_count(ParticleCounts{{pc.prefix(n)}, pc.L}));
                for (const auto& [c, p] : proj) CHECK(p == expected);
            }
        }
    }
}

TEST_CASE("float solve agrees with exact") {
    auto g = build_generator(ParticleCounts{{1, 2, 1}, 5});
    auto e = solve_stationary_exact(g, mpq_class(1, 2));
    auto f = solve_stationary_float(g, 0.5);
    CHECK(total_variation(f, e) < 1e-12);
}

TEST_CASE("symbolic four-site, four-type table") {
    auto g = build_generator(ParticleCounts{{1, 1, 1, 1}, 4});
    auto d = solve_stationary_symbolic(g);
    QRational total;
    for (const auto& [c, p] : d) total += p;
    CHECK(total == QRational(1));
    for (const auto& [c, p] : d) {
        // symmetric case is uniform
        CHECK(p.evaluate_at(mpq_class(1)) == mpq_class(1, 24));
        // q -> 1/q together with reversing the type order
        std::vector<Type> rev = c.sites();
        for (auto& t : rev) t = 5 - t;
        CHECK(invert_q(p) == d.at(RingConfig(rev, 4)));
        // agrees with the exact solve at a rational point
    }
    auto e = solve_stationary_exact(g, mpq_class(2, 7));
    CHECK(total_variation(evaluate_at(d, mpq_class(2, 7)), e) == 0);
}

TEST_CASE("four-site table numerators by rotation class") {
    auto d = solve_stationary_symbolic(build_generator(ParticleCounts{{1, 1, 1, 1}, 4}));
    const QPoly denom = QPoly(96) * QPoly(std::vector<mpq_class>{1, 1}) * qint(3);
    auto values = rotation_class_values(clear_denominator(d, denom));
    std::vector<QPoly> expected;
    for (auto c : std::vector<std::vector<long>>{{9, 7, 7, 1}, {3, 9, 9, 3}, {3, 9, 9, 3}, {3, 11, 5, 5}, {5, 5, 11, 3}, {1, 7, 7, 9}}) {
        std::vector<mpq_class> v(c.begin(), c.end());
        expected.emplace_back(v);
    }
    std::sort(expected.begin(), expected.end(), [](const QPoly& a, const QPoly& b) { return to_string(a) < to_string(b); });
    CHECK(values == expected);
    // 24 is not a denominator of the q = 0 law
    CHECK_THROWS_AS(clear_denominator(d, QPoly(24)), std::domain_error);
}

TEST_CASE("property: clearing the common denominator leaves non-negative integer polynomials") {
    for (const auto& pc : all_counts(4)) {
        if (pc.num_types() > 4) continue;
        auto g = build_generator(pc);
        const QPoly D = common_denominator(pc);
        auto cleared = clear_denominator(solve_stationary_symbolic(g), D);
        for (const auto& [c, p] : cleared) {
            CHECK(p.has_integer_coeffs());
            CHECK(p.has_nonnegative_coeffs());
        }
        if (pc.L == 4 && pc.num_types() >= 2) CHECK(clear_denominator_interpolated(g, D) == cleared);
    }
    const ParticleCounts five{{1, 2, 1}, 5};
    for (const auto& [c, p] : clear_denominator_interpolated(build_generator(five), common_denominator(five))) {
        CHECK(p.has_integer_coeffs());
        CHECK(p.has_nonnegative_coeffs());
    }
    // a denominator that is too small is caught
    CHECK_THROWS_AS(clear_denominator_interpolated(build_generator(ParticleCounts{{1, 1}, 3}), QPoly(9)), std::domain_error);
}

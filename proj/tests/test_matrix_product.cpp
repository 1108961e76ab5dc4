#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asep/ctmc.hpp"
#include "asep/matrix_product.hpp"
#include "asep/weights.hpp"

using namespace asep;

namespace {

RingConfig cfg(const char* s, Type N) { return parse_config(s, N); }

QPoly P(std::initializer_list<long> c) {
    std::vector<mpq_class> v;
    for (long x : c) v.emplace_back(x);
    return QPoly(v);
}

bool contains(const std::vector<Word>& ws, const Word& w) { return std::find(ws.begin(), ws.end(), w) != ws.end(); }

}  // namespace

TEST_CASE("tensor words") {
    using enum Op;
    CHECK(a_word(2, kHole, kHole) == Word{I});
    CHECK(a_word(2, 1, kHole) == Word{Epsilon});
    CHECK(a_word(2, kHole, 1) == Word{Delta});
    CHECK(a_word(2, 1, 1) == Word{I});
    CHECK(a_word(2, kHole, 2) == Word{Alpha});
    CHECK(!a_word(2, 1, 2));
    CHECK(a_word(4, 3, 1) == Word{Delta, I, Epsilon});
    CHECK(a_word(4, kHole, 2) == Word{Alpha, Delta, I});
    CHECK(a_word(4, 2, 2) == Word{Alpha, I, I});
    CHECK(a_word(4, kHole, 4) == Word{Alpha, Alpha, Alpha});
    CHECK(!a_word(4, 1, 3));
    CHECK(!a_word(4, 2, 4));
    CHECK_THROWS_AS(a_word(3, 3, 1), std::invalid_argument);

    // two types: X1 = I + delta, X2 = alpha, Xinf = I + eps
    CHECK(build_X(2, 1) == std::vector<Word>{{I}, {Delta}});
    CHECK(build_X(2, 2) == std::vector<Word>{{Alpha}});
    CHECK(build_X(2, kHole) == std::vector<Word>{{Epsilon}, {I}});
    const auto x3 = build_X(3, kHole);
    CHECK(contains(x3, Word{I, I, I}));
    for (const auto& w : x3) CHECK(w.size() == 3);
    for (Type n : {1u, 2u, 3u, 4u, kHole})
        for (const auto& w : build_X(4, n)) CHECK(w.size() == 6);
    CHECK(build_X(1, 1) == std::vector<Word>{Word{}});
    CHECK(build_X(1, 2).empty());
}

TEST_CASE("fundamental relations") {
    CHECK(check_fundamental_relations(standard_operators(10)).pass);
    CHECK(check_fundamental_relations(standard_operators(3), mpq_class(0)).pass);
    CHECK(check_fundamental_relations(standard_operators(12), mpq_class(1, 3)).pass);
    CHECK(rows_stochastic(standard_operators(10), 0.3));
    CHECK(rows_stochastic(standard_operators(10), 0.0));

    auto bad = standard_operators(10);
    bad.delta[4][3] = P({1, 0, 0, 0, -1, 7});
    auto r = check_fundamental_relations(bad);
    CHECK(!r.pass);
    CHECK(r.relation == "eps delta - q delta eps = (1-q) I");
    CHECK(r.row == 3);
    CHECK(r.col == 3);

    CHECK(check_fundamental_relations(alternative_operators(10)).pass);
    CHECK(check_fundamental_relations(alternative_operators(10), mpq_class(1, 2)).pass);
    // with the lower and upper parts in the other roles the algebra fails
    auto swapped = alternative_operators(10);
    std::swap(swapped.delta, swapped.epsilon);
    CHECK(!check_fundamental_relations(swapped).pass);
}

TEST_CASE("single-queue path sums") {
    using enum StepWeight;
    // tr(alpha) = 1/(1-q)
    const std::vector<Step> a{{0, QPow, 0}};
    CHECK(path_trace_exact(a, SymbolicField{}) == QRational(P({1}), P({1, -1})));
    const Bounded b = path_trace(a, 0.5, 30);
    CHECK(std::fabs(b.value - 2.0) <= b.tail);
    CHECK(b.tail > 0);
    // tr(delta alpha eps): row k+1 -> k with weight 1-q^{k+1}, alpha at k, back up
    const std::vector<Step> dae{{-1, OneMinus, 0}, {0, QPow, 0}, {1, One, 0}};
    // sum_{h>=1} (1-q^h) q^{h-1} = 1/(1-q) - q/(1-q^2)
    CHECK(path_trace_exact(dae, RationalField{mpq_class(1, 2)}) == mpq_class(4, 3));
    CHECK(path_trace_expansion({{1, One, 0}}).empty());
    CHECK_THROWS_AS(path_trace_expansion({{0, One, 0}}), std::domain_error);
    CHECK_THROWS_AS(path_trace({{0, One, 0}}, 0.5, 10), std::domain_error);
}

TEST_CASE("three sites, two types") {
    const ParticleCounts pc{{1, 1}, 3};
    auto w = trace_weights_exact(pc, SymbolicField{});
    CHECK(w.at(cfg("1 2 inf", 2)) == QRational(P({2, 1}), P({1, 0, -1})));
    CHECK(w.at(cfg("2 1 inf", 2)) == QRational(P({1, 2}), P({1, 0, -1})));
    auto nu = trace_distribution_exact(pc, SymbolicField{});
    CHECK(nu.at(cfg("1 2 inf", 2)) == QRational(P({2, 1}), P({9, 9})));

    const Bounded direct = trace_by_chains(cfg("1 2 inf", 2), 0.5, 80);
    CHECK(std::fabs(direct.value - 2.5 / 0.75) <= direct.tail + 1e-12);

    auto t0 = trace_distribution(pc, 0.0);
    CHECK(t0.entries.at(cfg("1 2 inf", 2)).normalized == doctest::Approx(2.0 / 9).epsilon(1e-14));
    CHECK(t0.entries.at(cfg("2 1 inf", 2)).normalized == doctest::Approx(1.0 / 9).epsilon(1e-14));
    auto t = trace_distribution(pc, 0.5);
    double total = 0;
    for (const auto& [c, e] : t.entries) total += e.normalized;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(t.entries.size() == 6);
    const TraceEntry single = stationary_weight_trace(cfg("1 2 inf", 2), 0.5);
    CHECK(std::fabs(single.normalized - 5.0 / 27) <= single.tail_bound + 1e-15);
    CHECK(report(t).rfind("config\tunnormalized\tnormalized\ttail_bound\n", 0) == 0);
}

TEST_CASE("property: line recursion agrees with summing over chains") {
    for (auto k : std::vector<std::vector<std::size_t>>{{1, 1}, {1, 2}, {1, 1, 1}, {2, 1, 1}}) {
        for (std::size_t L : {4u, 5u}) {
            ParticleCounts pc{k, L};
            if (pc.total() >= L) continue;
            auto t = trace_weights(pc, 0.4, 120);
            for (const auto& [c, e] : t.entries) {
                const Bounded b = trace_by_chains(c, 0.4, 120);
                CHECK(std::fabs(b.value - e.unnormalized) <= 1e-12 * b.value + b.tail);
            }
        }
    }
}

TEST_CASE("property: rotation invariance and agreement with the oracle") {
    for (auto k : std::vector<std::vector<std::size_t>>{{1, 1, 1}, {1, 2, 1}, {1, 1, 1, 1}, {2, 3}, {1, 1, 1, 1, 1}}) {
        ParticleCounts pc{k, 5};
        auto g = build_generator(pc);
        for (const mpq_class q : {mpq_class(0), mpq_class(1, 3), mpq_class(9, 10)}) {
            auto exact = trace_distribution_exact(pc, RationalField{q});
            CHECK(total_variation(exact, solve_stationary_exact(g, q)) == 0);
            auto t = trace_distribution(pc, q.get_d(), 1e-12);
            for (const auto& [c, e] : t.entries) {
                CHECK(std::fabs(e.normalized - exact.at(c).get_d()) <= e.tail_bound + 1e-14);
                for (long s = 1; s < 5; ++s)
                    CHECK(std::fabs(t.entries.at(rotate(c, s)).unnormalized - e.unnormalized) <= 1e-12 * e.unnormalized);
            }
        }
    }
}

TEST_CASE("two-type traces match the weight construction") {
    for (auto k : std::vector<std::vector<std::size_t>>{{1, 1}, {2, 1}, {1, 3}, {2, 2}}) {
        ParticleCounts pc{k, 5};
        auto w = to_double(exact_departure_distribution(pc, RationalField{mpq_class(1, 2)}));
        auto t = trace_distribution(pc, 0.5);
        Distribution<double> nu;
        for (const auto& [c, e] : t.entries) nu[c] = e.normalized;
        CHECK(total_variation(nu, w) < 1e-12);
    }
}

TEST_CASE("alternative two-type matrices") {
    auto report = alt_matrices_check(5, {mpq_class(1, 3), mpq_class(1, 2), mpq_class(0)});
    CHECK(report.relations);
    CHECK(report.mismatches == 0);
    CHECK(report.systems == 20);
    for (const auto& line : report.lines) MESSAGE(line);
    // q = 0 against the oracle
    ParticleCounts pc{{1, 1}, 3};
    Distribution<mpq_class> alt;
    mpq_class z = 0;
    for (const auto& c : enumerate_configs(pc)) z += alt[c] = two_type_trace_exact(c, true, RationalField{mpq_class(0)});
    for (auto& [c, v] : alt) v /= z;
    CHECK(total_variation(alt, solve_stationary_exact(build_generator(pc), mpq_class(0))) == 0);
}

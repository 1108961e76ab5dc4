#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "asep/ctmc.hpp"
#include "asep/sampler.hpp"
#include "asep/stats.hpp"

using namespace asep;

namespace {

RingConfig cfg(const char* s, Type N) { return parse_config(s, N); }

// Exact law of D given (A,S), from the weights.
Distribution<double> conditional_law(const RingConfig& A, const RingConfig& S, const mpq_class& q) {
    Distribution<mpq_class> raw;
    mpq_class total = 0;
    for (const auto& cls : departure_classes(A, S)) {
        const mpq_class v = sum_expansion(class_weight_expansion(A, S, cls), RationalField{q});
        raw[cls.D] += v;
        total += v;
    }
    Distribution<double> out;
    for (const auto& [D, v] : raw) out[D] = mpq_class(v / total).get_d();
    return out;
}

// Types above n merged into n+1.
RingConfig merge_above(const RingConfig& c, Type n) {
    std::vector<Type> v = c.sites();
    for (auto& t : v)
        if (!is_hole(t) && t > n) t = n + 1;
    return RingConfig(v, n + 1);
}

QueueProcess shift_all(const QueueProcess& Q, long m) {
    QueueProcess out = Q;
    for (auto& row : out.q)
        for (long& v : row) v += m;
    return out;
}

}  // namespace

TEST_CASE("offer law") {
    CHECK_THROWS_AS(OfferLaw(1.0), std::invalid_argument);
    CHECK_THROWS_AS(OfferLaw(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(OfferLaw(3, 3), std::invalid_argument);
    CHECK(OfferLaw::from_rational(mpq_class(1, 3)).exact());
    Rng rng(1);
    CHECK(OfferLaw(0.0).rejections(rng) == 0);
    CHECK(OfferLaw(0, 1).rejections(rng) == 0);
}

TEST_CASE("assignment: coincident service and two-way choice") {
    Rng rng(2);
    const RingConfig A = cfg("1 inf inf inf", 1);
    for (int t = 0; t < 50; ++t) {
        auto r = assign_departures(A, cfg("1 inf 1 inf", 1), OfferLaw(0.5), rng);
        CHECK(r.D == cfg("1 inf 2 inf", 2));
        REQUIRE(r.edges.size() == 1);
        CHECK(r.edges[0].to == 0);
    }
    const RingConfig S = cfg("inf 1 inf 1", 1);
    for (int t = 0; t < 20; ++t) CHECK(assign_departures(A, S, OfferLaw(0.0), rng).D == cfg("inf 1 inf 2", 2));
    for (const OfferLaw& law : {OfferLaw(0.5), OfferLaw(1, 2)}) {
        const int n = 100000;
        int first = 0;
        for (int t = 0; t < n; ++t) {
            const auto D = assign_departures(A, S, law, rng).D;
            if (D == cfg("inf 1 inf 2", 2)) ++first;
            else CHECK(D == cfg("inf 2 inf 1", 2));
        }
        // 1/(1+q) with q = 1/2
        const double p = 2.0 / 3.0, se = std::sqrt(p * (1 - p) / n);
        CHECK(std::fabs(first / static_cast<double>(n) - p) < 4 * se);
    }
    CHECK_THROWS_AS(assign_departures(cfg("1 1 inf", 1), cfg("1 inf inf", 1), OfferLaw(0.5), rng),
                    std::invalid_argument);
}

TEST_CASE("multi-line diagram shape") {
    Rng rng(3);
    auto d = sample_multitype(ParticleCounts{{1, 3, 3, 1}, 10}, OfferLaw(0.3), rng);
    REQUIRE(d.lines.size() == 4);
    const std::size_t sizes[] = {1, 4, 7, 8};
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(particle_counts(d.lines[n]).total() == sizes[n]);
        CHECK(d.lines[n].num_types() == n + 1);
    }
    CHECK(particle_counts(d.bottom()).k == std::vector<std::size_t>{1, 3, 3, 1});
    for (std::size_t n = 1; n < 4; ++n) {
        // edges biject line n particles onto distinct line n+1 sites
        CHECK(d.edges[n - 1].size() == sizes[n - 1]);
        std::vector<char> hit(10, 0);
        for (const auto& e : d.edges[n - 1]) {
            CHECK(d.lines[n - 1][e.from] == e.type);
            CHECK(d.lines[n][e.to] == e.type);
            CHECK(!hit[e.to]);
            hit[e.to] = 1;
        }
    }
    const std::string text = dump(d);
    CHECK(text.find("assign 2: ") != std::string::npos);
    auto one = sample_multitype(ParticleCounts{{3}, 7}, OfferLaw(0.5), rng);
    CHECK(one.lines.size() == 1);
    CHECK(one.edges.empty());
    CHECK_THROWS_AS(sample_multitype(ParticleCounts{{1, 0}, 4}, OfferLaw(0.5), rng), std::invalid_argument);
}

TEST_CASE("marks") {
    Rng rng(4);
    const RingConfig S = uniform_subset(1000, 1000, rng);
    for (long b : sample_marks(S, OfferLaw(0.0), rng)) CHECK(b == 0);
    const RingConfig half = cfg("1 inf 1", 1);
    auto b = sample_marks(half, OfferLaw(0.5), rng);
    CHECK(b[1] == kNoMark);
    double sum = 0;
    const int n = 100000;
    for (int t = 0; t < n / 1000; ++t)
        for (long x : sample_marks(S, OfferLaw(0.5), rng)) sum += static_cast<double>(x);
    // mean q/(1-q) = 1, variance q/(1-q)^2 = 2
    CHECK(std::fabs(sum / n - 1.0) < 4 * std::sqrt(2.0 / n));
    int tail = 0;
    for (int t = 0; t < n / 1000; ++t)
        for (long x : sample_marks(S, OfferLaw(9, 10), rng)) tail += x >= 10;
    const double p = std::pow(0.9, 10);
    CHECK(std::fabs(tail / static_cast<double>(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("minimal compatible process, hand cases") {
    const RingConfig A = cfg("1 inf inf inf", 1);
    for (long b0 : {0L, 3L}) {
        auto m = qmin_from_marks(A, cfg("1 inf 1 inf", 1), Marks{b0, kNoMark, 5, kNoMark});
        CHECK(m.Q == QueueProcess::single({0, 0, 0, 0}));
        CHECK(m.D == cfg("1 inf 2 inf", 2));
    }
    const RingConfig S = cfg("inf 1 inf 1", 1);
    auto rej = qmin_from_marks(A, S, Marks{kNoMark, 1, kNoMark, 0});
    CHECK(rej.Q == QueueProcess::single({0, 1, 1, 1}));
    CHECK(rej.D == cfg("inf 2 inf 1", 2));
    auto acc = qmin_from_marks(A, S, Marks{kNoMark, 0, kNoMark, 4});
    CHECK(acc.Q == QueueProcess::single({0, 1, 0, 0}));
    CHECK(acc.D == cfg("inf 1 inf 2", 2));
    // both services reject once: one full tour, accepted at 1 on the second pass
    auto tour = qmin_from_marks(A, S, Marks{kNoMark, 1, kNoMark, 1});
    CHECK(tour.D == cfg("inf 1 inf 2", 2));
    CHECK(compatible(A, S, tour.Q, Marks{kNoMark, 1, kNoMark, 1}));
    CHECK_THROWS_AS(qmin_from_marks(cfg("1 inf 1 inf", 1), cfg("inf 1 inf 1", 1), Marks{kNoMark, 0, kNoMark, 0}),
                    std::invalid_argument);
}

TEST_CASE("property: shifts of the minimal process are compatible exactly when the marks allow") {
    Rng rng(5);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t L = 3 + rng() % 5;
        const std::size_t K = 2 + rng() % (L - 1);
        const std::size_t k1 = 1 + rng() % (K - 1);
        const RingConfig A = uniform_subset(L, k1, rng);
        const RingConfig S = uniform_subset(L, K, rng);
        const Marks b = sample_marks(S, OfferLaw(0.6), rng);
        const auto m = qmin_from_marks(A, S, b);
        REQUIRE(compatible(A, S, m.Q, b));
        CHECK(assign_with_marks(A, S, b).D == m.D);
        CHECK(!compatible(A, S, shift_all(m.Q, -1), b));
        for (long s = 1; s <= 2; ++s) {
            bool allowed = true;
            for (std::size_t i = 0; i < L; ++i)
                if (S[i] == 1 && is_hole(A[i]) && m.D[i] == 2 && b[i] < m.Q.at(1, i) + s) allowed = false;
            const QueueProcess up = shift_all(m.Q, s);
            CHECK(compatible(A, S, up, b) == allowed);
            auto r = departure_process(A, S, up);
            REQUIRE(std::holds_alternative<RingConfig>(r));
            CHECK(std::get<RingConfig>(r) == m.D);
        }
    }
}

TEST_CASE("property: conditional shift law q^{m k_2}") {
    Rng rng(6);
    const RingConfig A = cfg("1 inf 1 inf inf inf", 1);
    const RingConfig S = cfg("inf 1 1 inf 1 1", 1);  // k_2 = 2
    const double q = 0.6;
    const int n = 40000;
    int hits1 = 0, hits2 = 0;
    for (int t = 0; t < n; ++t) {
        const Marks b = sample_marks(S, OfferLaw(q), rng);
        const auto m = qmin_from_marks(A, S, b);
        hits1 += compatible(A, S, shift_all(m.Q, 1), b);
        hits2 += compatible(A, S, shift_all(m.Q, 2), b);
    }
    for (auto [hits, p] : {std::pair{hits1, std::pow(q, 2)}, std::pair{hits2, std::pow(q, 4)}})
        CHECK(std::fabs(hits / static_cast<double>(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("property: marks-driven and offer-driven assignments share the weight law of D") {
    Rng rng(7);
    const mpq_class q(1, 2);
    const std::pair<const char*, const char*> cases[] = {
        {"1 inf 2 inf inf 1", "1 1 inf 1 1 1"},
        {"inf 2 1 inf inf inf", "inf 1 inf 1 1 inf"},
        {"2 inf 1 1 inf inf", "1 1 1 inf 1 1"},
    };
    for (const auto& [a, s] : cases) {
        const RingConfig A = parse_config(a, 2);
        const RingConfig S = parse_config(s, 1);
        const auto law = conditional_law(A, S, q);
        std::map<RingConfig, std::size_t> offers, marks;
        const int n = 100000;
        for (int t = 0; t < n; ++t) {
            ++offers[assign_departures(A, S, OfferLaw(1, 2), rng).D];
            ++marks[qmin_from_marks(A, S, sample_marks(S, OfferLaw(1, 2), rng)).D];
        }
        CHECK(chi_square_gof(offers, law).p_value > 1e-4);
        CHECK(chi_square_gof(marks, law).p_value > 1e-4);
    }
}

TEST_CASE("two-type bottom line matches the oracle") {
    Rng rng(8);
    ParticleCounts pc{{1, 1}, 4};
    const auto oracle = to_double(solve_stationary_exact(build_generator(pc), mpq_class(1, 2)));
    std::map<RingConfig, std::size_t> seen;
    for (int t = 0; t < 100000; ++t) ++seen[sample_bottom(pc, OfferLaw(0.5), rng)];
    CHECK(chi_square_gof(seen, oracle).p_value > 1e-4);
}

TEST_CASE("property: every line is a uniform subset, merged types give the smaller system") {
    Rng rng(9);
    ParticleCounts pc{{1, 1, 1}, 5};
    const double q = 0.4;
    const auto merged_oracle =
        to_double(solve_stationary_exact(build_generator(ParticleCounts{{1, 2}, 5}), mpq_class(2, 5)));
    std::map<RingConfig, std::size_t> line2, merged, proj;
    const int n = 60000;
    for (int t = 0; t < n; ++t) {
        auto d = sample_multitype(pc, OfferLaw(q), rng);
        ++line2[project(d.lines[1], 2)];
        ++merged[merge_above(d.bottom(), 1)];
        ++proj[project(d.bottom(), 2)];
    }
    Distribution<double> uniform;
    for (const auto& c : enumerate_configs(ParticleCounts{{2}, 5})) uniform[c] = 0.1;
    CHECK(chi_square_gof(line2, uniform).p_value > 1e-4);
    CHECK(chi_square_gof(proj, uniform).p_value > 1e-4);
    CHECK(chi_square_gof(merged, merged_oracle).p_value > 1e-4);
}

TEST_CASE("chi-square helper") {
    auto r = chi_square_gof(std::vector<double>{50, 50}, std::vector<double>{0.5, 0.5});
    CHECK(r.statistic == 0);
    CHECK(r.dof == 1);
    CHECK(r.p_value == doctest::Approx(1.0));
    auto bad = chi_square_gof(std::vector<double>{1, 5}, std::vector<double>{0, 1});
    CHECK(bad.p_value == 0);
    auto far = chi_square_gof(std::vector<double>{90, 10}, std::vector<double>{0.5, 0.5});
    CHECK(far.p_value < 1e-10);
    auto ms = mean_se({1, 2, 3, 4});
    CHECK(ms.mean == 2.5);
    CHECK(ms.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

// One line per acceptance criterion. Exit status 1 only for failures that
// are not listed as known.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "asep/ctmc.hpp"
#include "asep/line.hpp"
#include "asep/matrix_product.hpp"
#include "asep/sampler.hpp"
#include "asep/stats.hpp"
#include "asep/weights.hpp"

using namespace asep;

namespace {

enum class Status { Pass, Fail, KnownFail };

int unexpected = 0;

void report(const std::string& id, Status s, const std::string& detail, double seconds) {
    const char* tag = s == Status::Pass ? "PASS" : s == Status::Fail ? "FAIL" : "FAIL (known, see ledger)";
    if (s == Status::Fail) ++unexpected;
    std::printf("[%s] %s: %s (%.1fs)\n", id.c_str(), tag, detail.c_str(), seconds);
    std::fflush(stdout);
}

void run(const std::string& id, const std::function<std::pair<Status, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::pair<Status, std::string> r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, r.first, r.second, dt);
}

Status pass_if(bool ok) { return ok ? Status::Pass : Status::Fail; }

std::vector<ParticleCounts> all_counts(std::size_t L_max) {
    std::vector<ParticleCounts> out;
    for (std::size_t L = 1; L <= L_max; ++L)
        for (std::size_t s = 1; s <= L; ++s)
            for (unsigned mask = 0; mask < (1u << (s - 1)); ++mask) {
                std::vector<std::size_t> k{1};
                for (std::size_t b = 0; b + 1 < s; ++b) {
                    if (mask & (1u << b)) k.push_back(1);
                    else ++k.back();
                }
                out.push_back({k, L});
            }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string name(const ParticleCounts& pc) {
    std::string s = "L=" + std::to_string(pc.L) + " k=";
    for (std::size_t i = 0; i < pc.k.size(); ++i) s += (i ? "," : "") + std::to_string(pc.k[i]);
    return s;
}

bool nonneg_integer(const Distribution<QPoly>& d) {
    for (const auto& [c, p] : d)
        if (!p.has_integer_coeffs() || !p.has_nonnegative_coeffs()) return false;
    return true;
}

}  // namespace

int main() {
    const std::vector<mpq_class> c1_qs{mpq_class(0), mpq_class(1, 3), mpq_class(1, 2), mpq_class(9, 10)};

    run("1 exact cross-method", [&] {
        std::size_t systems = 0, exact_bad = 0, float_bad = 0;
        double worst = 0;
        std::string first;
        for (const auto& pc : all_counts(5)) {
            const auto g = build_generator(pc);
            ++systems;
            for (const auto& q : c1_qs) {
                const auto oracle = solve_stationary_exact(g, q);
                const auto w = exact_departure_distribution(pc, RationalField{q});
                if (total_variation(w, oracle) != 0) {
                    ++exact_bad;
                    if (first.empty()) first = name(pc) + " q=" + q.get_str();
                }
                const TraceTable t = trace_distribution(pc, q.get_d(), 1e-13);
                Distribution<double> m;
                for (const auto& [c, e] : t.entries) m[c] = e.normalized;
                const double tv = total_variation(m, oracle);
                worst = std::max(worst, tv);
                if (!(tv < 1e-10)) ++float_bad;
            }
        }
        std::string d = std::to_string(systems) + " systems x 4 q: weights vs oracle TV=0 in all but " +
                        std::to_string(exact_bad) + ", matrix product max TV " + fmt(worst) + " (tol 1e-10)";
        if (!first.empty()) d += ", first mismatch " + first;
        return std::make_pair(pass_if(exact_bad == 0 && float_bad == 0), d);
    });

    run("2 four-site table", [] {
        const auto d = solve_stationary_symbolic(build_generator(ParticleCounts{{1, 1, 1, 1}, 4}));
        const QPoly denom = QPoly(96) * qint(2) * qint(3);
        const auto values = rotation_class_values(clear_denominator(d, denom));
        std::vector<std::string> expected;
        for (auto c : std::vector<std::vector<long>>{{9, 7, 7, 1}, {3, 9, 9, 3}, {3, 9, 9, 3}, {3, 11, 5, 5}, {5, 5, 11, 3}, {1, 7, 7, 9}})
            expected.push_back(to_string(QPoly(std::vector<mpq_class>(c.begin(), c.end()))));
        std::sort(expected.begin(), expected.end());
        std::vector<std::string> got;
        std::string shown;
        for (const auto& v : values) {
            got.push_back(to_string(v));
            shown += (shown.empty() ? "" : "; ") + pretty(v);
        }
        std::sort(got.begin(), got.end());
        return std::make_pair(pass_if(got == expected), "numerators over 96(1+q)(1+q+q^2): " + shown);
    });

    run("3 denominator divisibility", [] {
        std::size_t sym = 0, interp = 0, bad = 0;
        std::string first;
        for (const auto& pc : all_counts(5)) {
            const auto g = build_generator(pc);
            const QPoly D = common_denominator(pc);
            bool ok = false;
            try {
                if (pc.L <= 4 && pc.num_types() <= 4) {
                    ok = nonneg_integer(clear_denominator(solve_stationary_symbolic(g), D));
                    ++sym;
                } else {
                    ok = nonneg_integer(clear_denominator_interpolated(g, D));
                    ++interp;
                }
            } catch (const std::domain_error&) {
                ok = false;
            }
            if (!ok && !bad++) first = name(pc);
        }
        std::string d = std::to_string(sym) + " systems symbolic, " + std::to_string(interp) +
                        " by interpolation from exact solves, " + std::to_string(bad) + " failing";
        if (bad) d += " (first " + first + ")";
        return std::make_pair(pass_if(bad == 0), d);
    });

    run("4 sampler chi-square", [] {
        const ParticleCounts pc{{1, 1, 1, 1, 1, 1}, 6};
        const auto g = build_generator(pc);
        bool ok = true;
        std::string d;
        std::uint64_t seed = 20240601;
        for (const auto& q : {mpq_class(0), mpq_class(1, 2)}) {
            const auto law = to_double(solve_stationary_exact(g, q));
            const OfferLaw offers = OfferLaw::from_rational(q);
            Rng rng(seed++);
            std::map<RingConfig, std::size_t> counts;
            for (int i = 0; i < 1000000; ++i) ++counts[sample_bottom(pc, offers, rng)];
            const ChiSquare c = chi_square_gof(counts, law);
            ok = ok && c.p_value > 1e-3;
            d += (d.empty() ? "" : ", ") + std::string("q=") + q.get_str() + " chi2=" + fmt(c.statistic) +
                 " dof=" + std::to_string(c.dof) + " p=" + fmt(c.p_value);
        }
        return std::make_pair(pass_if(ok), "1e6 samples each, " + d + " (need p > 1e-3)");
    });

    // Stated product and the corrected one are both scored. The first is
    // expected to fail for three or more types.
    std::size_t pairs = 0, stated_ok = 0, stated_ok2 = 0, pairs2 = 0, corrected_ok = 0;
    double worst_tail = 0;
    run("5 weight sums (stated product)", [&] {
        for (const auto& pc : all_counts(5)) {
            if (pc.num_types() < 2) continue;
            const ParticleCounts upper{std::vector<std::size_t>(pc.k.begin(), pc.k.end() - 1), pc.L};
            const ParticleCounts services{{pc.total()}, pc.L};
            for (const auto& A : enumerate_configs(upper))
                for (const auto& S : enumerate_configs(services)) {
                    const TruncatedSum t = weight_sum_truncated(A, S, 0.5, 40);
                    const double slack = t.tail_bound + 1e-12;
                    ++pairs;
                    worst_tail = std::max(worst_tail, t.tail_bound);
                    const bool stated = std::fabs(t.sum - t.target) <= slack;
                    stated_ok += stated;
                    if (pc.num_types() == 2) {
                        ++pairs2;
                        stated_ok2 += stated;
                    }
                    corrected_ok += std::fabs(t.sum - t.normalizer) <= slack;
                }
        }
        const bool ok = stated_ok == pairs;
        std::string d = std::to_string(stated_ok) + "/" + std::to_string(pairs) + " (A,S) pairs at q=1/2 match prod(1-q^k_n)^-1; two types " +
                        std::to_string(stated_ok2) + "/" + std::to_string(pairs2) + "; three or more types " +
                        std::to_string(stated_ok - stated_ok2) + "/" + std::to_string(pairs - pairs2);
        return std::make_pair(ok ? Status::Pass : Status::KnownFail, d);
    });
    run("5 weight sums (corrected product)", [&] {
        const auto exact = weight_sum_exact(parse_config("1 inf inf inf", 1), parse_config("inf 1 inf 1", 1), SymbolicField{});
        const bool sym = exact == QRational(QPoly(1), QPoly::one_minus_q_power(1));
        return std::make_pair(pass_if(corrected_ok == pairs && pairs > 0 && sym),
                              std::to_string(corrected_ok) + "/" + std::to_string(pairs) +
                                  " pairs match prod_n (1-q^(k_n+...+k_N))^-1 within the tail bound (max " + fmt(worst_tail) +
                                  "); A={0}, S={1,3} sums to 1/(1-q) symbolically: " + (sym ? "yes" : "no"));
    });

    run("6 matrix relations and alternatives", [] {
        const auto st = check_fundamental_relations(standard_operators(12));
        const auto alt = check_fundamental_relations(alternative_operators(12));
        const auto chk = alt_matrices_check(6, {mpq_class(1, 3), mpq_class(1, 2)});
        const bool ok = st.pass && alt.pass && chk.relations && chk.mismatches == 0;
        std::string d = std::string("relations standard ") + (st.pass ? "hold" : "fail at " + st.relation) + ", alternative " +
                        (alt.pass ? "hold" : "fail at " + alt.relation) + "; " + std::to_string(chk.systems) +
                        " two-type systems (L<=6) x 2 q, " + std::to_string(chk.configs) + " configurations, " +
                        std::to_string(chk.mismatches) + " mismatches";
        return std::make_pair(pass_if(ok), d);
    });

    run("7 clustering closed forms", [] {
        double worst = 0;
        for (double q : {0.0, 0.1, 0.3, 0.5, 0.8, 0.95}) {
            const auto a = cluster_quadrature(q);
            const auto b = cluster_limits(q);
            worst = std::max({worst, std::fabs(a.less - b.less), std::fabs(a.equal - b.equal), std::fabs(a.greater - b.greater)});
            worst = std::max(worst, std::fabs(b.less - 0.5) + std::fabs(b.equal - (1 - q) / 6) + std::fabs(b.greater - (2 + q) / 6));
        }
        return std::make_pair(pass_if(worst < 1e-8), "quadrature vs (1/2, (1-q)/6, (2+q)/6), max error " + fmt(worst) + " (tol 1e-8)");
    });
    run("7 ring clustering", [] {
        bool ok = true;
        std::string d;
        std::uint64_t seed = 777;
        for (double q : {0.0, 0.1, 0.8}) {
            Rng rng(seed++);
            const auto sweep = ring_cluster_sweep(1000, OfferLaw::from_rational(parse_rational(std::to_string(q))), 200,
                                                  {default_cluster_window(1000), 20, 100}, rng);
            ok = ok && std::fabs(sweep[0].stat.z()) <= 4;
            d += (d.empty() ? "" : "; ") + std::string("q=") + fmt(q) + " est " + fmt(sweep[0].stat.estimate) + " se " +
                 fmt(sweep[0].stat.se) + " target " + fmt(sweep[0].stat.closed_form) + " z " + fmt(sweep[0].stat.z()) +
                 " (window 20: z " + fmt(sweep[1].stat.z()) + ", window 100: z " + fmt(sweep[2].stat.z()) + ")";
        }
        return std::make_pair(pass_if(ok), "L=1000, 200 rings, window 50: " + d);
    });

    run("8 line pair marginals", [] {
        bool ok = true;
        std::string d;
        std::uint64_t seed = 4242;
        for (double q : {0.0, 0.4, 0.85}) {
            Rng rng(seed++);
            double zmax = 0;
            for (const auto& s : pair_statistics(0.3, 0.6, q, 1000000, rng))
                if (s.name.rfind("nu", 0) == 0) zmax = std::max(zmax, std::fabs(s.z()));
            ok = ok && zmax <= 4;
            d += (d.empty() ? "" : ", ") + std::string("q=") + fmt(q) + " max|z| " + fmt(zmax);
        }
        return std::make_pair(pass_if(ok), "lambda=0.3 mu=0.6, 1e6 sites: " + d);
    });

    run("9 q-series identity, 60 terms", [] {
        std::size_t bad = 0;
        double worst = 0;
        for (int a = 1; a <= 9; ++a)
            for (int b = 1; b <= 9; ++b) {
                const auto c = q_series_identity_check(a / 10.0, b / 10.0, 60);
                worst = std::max(worst, c.residual);
                bad += !(c.residual < 1e-12);
            }
        return std::make_pair(bad ? Status::KnownFail : Status::Pass,
                              std::to_string(81 - bad) + "/81 grid points below 1e-12, max residual " + fmt(worst) +
                                  " (truncation term (aq)^60/(q;q)_59 dominates near a=q=0.9)");
    });
    run("9 q-series identity, adaptive terms", [] {
        std::size_t bad = 0;
        unsigned most = 0;
        double worst = 0;
        for (int a = 1; a <= 9; ++a)
            for (int b = 1; b <= 9; ++b) {
                const unsigned K = std::max(60u, q_series_terms_for(a / 10.0, b / 10.0, 1e-14));
                most = std::max(most, K);
                const auto c = q_series_identity_check(a / 10.0, b / 10.0, K);
                worst = std::max(worst, c.residual);
                bad += !(c.residual < 1e-12);
            }
        return std::make_pair(pass_if(bad == 0), std::to_string(81 - bad) + "/81 below 1e-12 with up to " +
                                                     std::to_string(most) + " terms, max residual " + fmt(worst));
    });

    std::printf("unexpected failures: %d\n", unexpected);
    return unexpected ? 1 : 0;
}

#include "asep/matrix_product.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace asep {

std::optional<Word> a_word(Type N, Type m, Type n) {
    if (N < 2) throw std::invalid_argument("a_word needs N >= 2");
    const bool m_hole = is_hole(m), n_hole = is_hole(n);
    if ((!m_hole && (m < 1 || m > N - 1)) || (!n_hole && (n < 1 || n > N)))
        throw std::invalid_argument("a_word: type out of range");
    Word w(N - 1, Op::I);
    if (m_hole && n_hole) return w;
    if (n_hole) {
        w[m - 1] = Op::Epsilon;
        return w;
    }
    if (!m_hole && m < n) return std::nullopt;
    if (n == N) {
        // only m = inf reaches here
        std::fill(w.begin(), w.end(), Op::Alpha);
        return w;
    }
    for (Type r = 1; r < n; ++r) w[r - 1] = Op::Alpha;
    if (m == n) return w;
    w[n - 1] = Op::Delta;
    if (!m_hole) w[m - 1] = Op::Epsilon;
    return w;
}

std::vector<Word> build_X(Type N, Type n) {
    if (N == 0) throw std::invalid_argument("build_X needs N >= 1");
    if (N == 1) {
        if (n == 1 || is_hole(n)) return {Word{}};
        return {};
    }
    std::vector<Word> out;
    std::vector<Type> ms;
    for (Type m = 1; m < N; ++m) ms.push_back(m);
    ms.push_back(kHole);
    for (Type m : ms) {
        auto a = a_word(N, m, n);
        if (!a) continue;
        for (Word chain : build_X(N - 1, m)) {
            chain.insert(chain.end(), a->begin(), a->end());
            out.push_back(std::move(chain));
        }
    }
    return out;
}

Step step_of(Op op) {
    switch (op) {
        case Op::I: return {0, StepWeight::One, 0};
        case Op::Alpha: return {0, StepWeight::QPow, 0};
        case Op::Delta: return {-1, StepWeight::OneMinus, 0};
        case Op::Epsilon: return {1, StepWeight::One, 0};
    }
    return {};
}

namespace {

// Heights before each step when the path starts at its lowest admissible level.
std::vector<int> base_heights(const std::vector<Step>& word, int& net) {
    std::vector<int> h(word.size());
    int cur = 0, lo = 0;
    for (std::size_t t = 0; t < word.size(); ++t) {
        h[t] = cur;
        cur += word[t].dh;
        lo = std::min(lo, cur);
    }
    net = cur;
    for (int& x : h) x -= lo;
    return h;
}

}  // namespace

Bounded path_trace(const std::vector<Step>& word, double q, unsigned M) {
    int net = 0;
    const auto h = base_heights(word, net);
    Bounded r;
    if (net != 0) return r;
    unsigned a = 0;
    for (const auto& s : word) a += s.w == StepWeight::QPow;
    if (a == 0) throw std::domain_error("path trace diverges: no alpha factor");
    for (unsigned s = 0; s <= M; ++s) {
        double term = 1;
        for (std::size_t t = 0; t < word.size() && term != 0; ++t) {
            const double e = static_cast<double>(h[t] + word[t].shift + static_cast<int>(s));
            switch (word[t].w) {
                case StepWeight::One: break;
                case StepWeight::QPow: term *= std::pow(q, e); break;
                case StepWeight::OneMinus: term *= 1.0 - std::pow(q, e); break;
            }
        }
        r.value += term;
    }
    // every omitted term is at most q^{a s}
    if (q > 0) r.tail = std::pow(q, static_cast<double>(a) * (M + 1)) / (1.0 - std::pow(q, static_cast<double>(a)));
    return r;
}

std::map<std::pair<unsigned, unsigned>, long> path_trace_expansion(const std::vector<Step>& word) {
    int net = 0;
    const auto h = base_heights(word, net);
    std::map<std::pair<unsigned, unsigned>, long> terms;
    if (net != 0) return terms;
    terms[{0, 0}] = 1;
    for (std::size_t t = 0; t < word.size(); ++t) {
        if (word[t].w == StepWeight::One) continue;
        const unsigned e = static_cast<unsigned>(h[t] + word[t].shift);
        std::map<std::pair<unsigned, unsigned>, long> next;
        for (const auto& [key, c] : terms) {
            const std::pair<unsigned, unsigned> up{key.first + e, key.second + 1};
            if (word[t].w == StepWeight::QPow) {
                next[up] += c;
            } else {
                next[key] += c;
                next[up] -= c;
            }
        }
        terms.clear();
        for (const auto& [k, v] : next)
            if (v != 0) terms.emplace(k, v);
    }
    for (const auto& [key, c] : terms)
        if (key.second == 0) throw std::domain_error("path trace diverges: no alpha factor");
    return terms;
}

std::optional<std::vector<std::vector<Step>>> factor_words(const RingConfig& l, const RingConfig& eta, Type N) {
    const std::size_t L = eta.size();
    std::vector<std::vector<Step>> words(N - 1, std::vector<Step>(L));
    for (std::size_t i = 0; i < L; ++i) {
        auto a = a_word(N, l[i], eta[i]);
        if (!a) return std::nullopt;
        for (Type r = 0; r + 1 < N; ++r) words[r][i] = step_of((*a)[r]);
    }
    return words;
}

namespace {

struct Interval {
    double lo = 0, hi = 0;
};

RingConfig relabel_holes(const RingConfig& c, Type top) {
    std::vector<Type> s = c.sites();
    for (auto& t : s)
        if (is_hole(t)) t = top;
    return RingConfig(std::move(s), top);
}

}  // namespace

TraceTable trace_weights(const ParticleCounts& counts, double q, unsigned M) {
    if (!(q >= 0 && q < 1)) throw std::invalid_argument("q must lie in [0,1)");
    counts.validate();
    for (std::size_t kn : counts.k)
        if (kn == 0) throw std::invalid_argument("every k_n must be >= 1");
    const ParticleCounts reduced = reduce_full_ring(counts);
    const Type N = static_cast<Type>(reduced.num_types());

    std::map<RingConfig, Interval> prev;
    if (N == 0) {
        prev.emplace(RingConfig(std::vector<Type>(counts.L, kHole), 0), Interval{1, 1});
    } else {
        for (const auto& c : enumerate_configs(ParticleCounts{{reduced.k[0]}, reduced.L})) prev.emplace(c, Interval{1, 1});
        for (Type n = 2; n <= N; ++n) {
            ParticleCounts level{std::vector<std::size_t>(reduced.k.begin(), reduced.k.begin() + n), reduced.L};
            std::map<RingConfig, Interval> cur;
            for (const auto& eta : enumerate_configs(level)) {
                Interval w;
                for (const auto& [l, wl] : prev) {
                    auto words = factor_words(l, eta, n);
                    if (!words) continue;
                    double lo = wl.lo, hi = wl.hi;
                    for (const auto& word : *words) {
                        const Bounded b = path_trace(word, q, M);
                        lo *= b.value;
                        hi *= b.value + b.tail;
                        if (hi == 0) break;
                    }
                    w.lo += lo;
                    w.hi += hi;
                }
                cur.emplace(eta, w);
            }
            prev = std::move(cur);
        }
    }

    double z_lo = 0, z_hi = 0;
    for (const auto& [c, w] : prev) {
        z_lo += w.lo;
        z_hi += w.hi;
    }
    TraceTable table;
    table.M = M;
    const Type top = static_cast<Type>(counts.num_types());
    for (const auto& [c, w] : prev) {
        TraceEntry e;
        e.unnormalized = w.lo;
        const double lo = w.lo / z_hi, hi = w.hi / z_lo;
        e.normalized = w.lo / z_lo;
        e.tail_bound = std::max(hi - e.normalized, e.normalized - lo);
        table.entries.emplace(reduced == counts ? c : relabel_holes(c, top), e);
    }
    return table;
}

TraceTable trace_distribution(const ParticleCounts& counts, double q, double tol, unsigned max_M) {
    for (unsigned M = static_cast<unsigned>(counts.total()) + 10; M <= max_M; M *= 2) {
        TraceTable t = trace_weights(counts, q, M);
        double worst = 0;
        for (const auto& [c, e] : t.entries) worst = std::max(worst, e.tail_bound);
        if (worst < tol) return t;
    }
    throw std::runtime_error("trace did not converge within the truncation limit");
}

TraceEntry stationary_weight_trace(const RingConfig& config, double q, double tol) {
    return trace_distribution(particle_counts(config), q, tol).entries.at(config);
}

Bounded trace_by_chains(const RingConfig& config, double q, unsigned M) {
    const Type N = config.num_types();
    const std::size_t L = config.size();
    std::vector<std::vector<Word>> chains(L);
    for (std::size_t i = 0; i < L; ++i) chains[i] = build_X(N, config[i]);
    const std::size_t F = static_cast<std::size_t>(N) * (N - 1) / 2;
    Bounded total;
    double hi_total = 0;
    std::vector<std::size_t> pick(L, 0);
    for (const auto& c : chains)
        if (c.empty()) return total;
    while (true) {
        std::vector<std::vector<Step>> words(F, std::vector<Step>(L));
        bool closed = true;
        for (std::size_t r = 0; r < F; ++r) {
            int net = 0;
            for (std::size_t i = 0; i < L; ++i) {
                words[r][i] = step_of(chains[i][pick[i]][r]);
                net += words[r][i].dh;
            }
            closed = closed && net == 0;
        }
        double lo = closed ? 1 : 0, hi = lo;
        for (std::size_t r = 0; r < F && hi != 0; ++r) {
            const Bounded b = path_trace(words[r], q, M);
            lo *= b.value;
            hi *= b.value + b.tail;
        }
        total.value += lo;
        hi_total += hi;
        std::size_t i = 0;
        while (i < L && ++pick[i] == chains[i].size()) pick[i++] = 0;
        if (i == L) break;
    }
    total.tail = hi_total - total.value;
    return total;
}

std::string report(const TraceTable& t) {
    std::ostringstream os;
    os.precision(17);
    os << "config\tunnormalized\tnormalized\ttail_bound\n";
    for (const auto& [c, e] : t.entries)
        os << to_string(c) << '\t' << e.unnormalized << '\t' << e.normalized << '\t' << e.tail_bound << '\n';
    return os.str();
}

namespace {

PolyMatrix zeros(std::size_t M) { return PolyMatrix(M, std::vector<QPoly>(M)); }

PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b) {
    const std::size_t M = a.size();
    PolyMatrix c = zeros(M);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t k = 0; k < M; ++k) {
            if (a[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < M; ++j)
                if (!b[k][j].is_zero()) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

PolyMatrix scaled(const PolyMatrix& a, const QPoly& s) {
    PolyMatrix c = a;
    for (auto& row : c)
        for (auto& x : row) x *= s;
    return c;
}

PolyMatrix minus(const PolyMatrix& a, const PolyMatrix& b) {
    PolyMatrix c = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) c[i][j] -= b[i][j];
    return c;
}

// Compares lhs with rhs on [0, M-2]^2, either symbolically or at a rational q.
template <class Eq>
RelationReport compare_relations(const OperatorSet& ops, Eq&& equal) {
    const std::size_t M = ops.alpha.size();
    if (M < 3) throw std::invalid_argument("relations need M >= 3");
    const QPoly q = QPoly::q_power(1);
    PolyMatrix id = zeros(M);
    for (std::size_t i = 0; i < M; ++i) id[i][i] = QPoly(1) - q;
    const std::pair<const char*, std::pair<PolyMatrix, PolyMatrix>> rels[] = {
        {"eps delta - q delta eps = (1-q) I",
         {minus(multiply(ops.epsilon, ops.delta), scaled(multiply(ops.delta, ops.epsilon), q)), id}},
        {"alpha delta = q delta alpha", {multiply(ops.alpha, ops.delta), scaled(multiply(ops.delta, ops.alpha), q)}},
        {"eps alpha = q alpha eps", {multiply(ops.epsilon, ops.alpha), scaled(multiply(ops.alpha, ops.epsilon), q)}},
    };
    for (const auto& [name, sides] : rels)
        for (std::size_t i = 0; i + 1 < M; ++i)
            for (std::size_t j = 0; j + 1 < M; ++j)
                if (!equal(sides.first[i][j], sides.second[i][j])) return {false, name, i, j};
    return {};
}

}  // namespace

OperatorSet standard_operators(std::size_t M) {
    OperatorSet ops{zeros(M), zeros(M), zeros(M)};
    for (std::size_t k = 0; k < M; ++k) {
        ops.alpha[k][k] = QPoly::q_power(static_cast<unsigned>(k));
        if (k + 1 < M) ops.epsilon[k][k + 1] = QPoly(1);
        if (k >= 1) ops.delta[k][k - 1] = QPoly::one_minus_q_power(static_cast<unsigned>(k));
    }
    return ops;
}

OperatorSet alternative_operators(std::size_t M) {
    OperatorSet ops{zeros(M), zeros(M), zeros(M)};
    for (std::size_t k = 0; k < M; ++k) {
        const auto K = static_cast<unsigned>(k);
        ops.alpha[k][k] = QPoly::q_power(K);
        if (k + 1 < M) {
            ops.alpha[k][k + 1] = QPoly::q_power(K + 1);
            ops.epsilon[k][k + 1] = QPoly(1);
        }
        // X1 - I: diagonal -q^{k+1}, below it 1 - q^k
        ops.delta[k][k] = QPoly::one_minus_q_power(K + 1) - QPoly(1);
        if (k >= 1) ops.delta[k][k - 1] = QPoly::one_minus_q_power(K);
    }
    return ops;
}

RelationReport check_fundamental_relations(const OperatorSet& ops) {
    return compare_relations(ops, [](const QPoly& a, const QPoly& b) { return a == b; });
}

RelationReport check_fundamental_relations(const OperatorSet& ops, const mpq_class& q) {
    return compare_relations(ops, [&q](const QPoly& a, const QPoly& b) { return a.evaluate_at(q) == b.evaluate_at(q); });
}

bool rows_stochastic(const OperatorSet& ops, double q, double tol) {
    const std::size_t M = ops.alpha.size();
    for (std::size_t i = 0; i + 1 < M; ++i) {
        double e = 0, da = 0;
        for (std::size_t j = 0; j < M; ++j) {
            e += ops.epsilon[i][j].evaluate_at(q);
            da += ops.delta[i][j].evaluate_at(q) + ops.alpha[i][j].evaluate_at(q);
        }
        if (std::fabs(e - 1) > tol || std::fabs(da - 1) > tol) return false;
    }
    return true;
}

std::vector<Step> standard_steps(Type t) {
    if (t == 1) return {{0, StepWeight::One, 0}, {-1, StepWeight::OneMinus, 0}};
    if (t == 2) return {{0, StepWeight::QPow, 0}};
    if (is_hole(t)) return {{0, StepWeight::One, 0}, {1, StepWeight::One, 0}};
    throw std::invalid_argument("two-type steps: type out of range");
}

std::vector<Step> alternative_steps(Type t) {
    if (t == 1) return {{0, StepWeight::OneMinus, 1}, {-1, StepWeight::OneMinus, 0}};
    if (t == 2) return {{0, StepWeight::QPow, 0}, {1, StepWeight::QPow, 1}};
    if (is_hole(t)) return {{0, StepWeight::One, 0}, {1, StepWeight::One, 0}};
    throw std::invalid_argument("two-type steps: type out of range");
}

AltCheck alt_matrices_check(std::size_t L_max, const std::vector<mpq_class>& qs) {
    AltCheck out;
    out.relations = check_fundamental_relations(alternative_operators(10)).pass;
    for (std::size_t L = 2; L <= L_max; ++L) {
        for (std::size_t k1 = 1; k1 < L; ++k1) {
            for (std::size_t k2 = 1; k1 + k2 <= L; ++k2) {
                const ParticleCounts pc{{k1, k2}, L};
                const auto states = enumerate_configs(pc);
                ++out.systems;
                for (const mpq_class& q : qs) {
                    const RationalField field{q};
                    const auto standard = trace_distribution_exact(pc, field);
                    Distribution<mpq_class> alt;
                    mpq_class z = 0;
                    for (const auto& c : states) {
                        // on a full ring the hole factor never appears, the traces are still finite
                        const mpq_class v = two_type_trace_exact(c, true, field);
                        alt.emplace(c, v);
                        z += v;
                    }
                    for (const auto& c : states) {
                        ++out.configs;
                        const mpq_class a = alt.at(c) / z;
                        if (a != standard.at(c)) {
                            ++out.mismatches;
                            out.lines.push_back(to_string(c) + " q=" + q.get_str() + " alt=" + a.get_str() +
                                                " standard=" + standard.at(c).get_str());
                        }
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace asep

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asep/distribution.hpp"
#include "asep/qpoly.hpp"
#include "asep/ring.hpp"

namespace asep {

enum class Op { I, Alpha, Delta, Epsilon };

/// Tensor product of single-queue operators, one per factor.
using Word = std::vector<Op>;

/// a^{(N)}_{m,n}: arrival type m, departure type n (kHole for none).
/// nullopt for the zero entries (m < n < inf).
std::optional<Word> a_word(Type N, Type m, Type n);

/// X^{(N)}_n as a list of chains, each of N(N-1)/2 factors, lower levels first.
std::vector<Word> build_X(Type N, Type n);

// ---------------------------------------------------------------------------
// Single-queue path sums. A matrix entry moves the queue index h to h + dh
// with weight 1, q^{h+shift} or 1 - q^{h+shift}.

enum class StepWeight { One, QPow, OneMinus };

struct Step {
    int dh = 0;
    StepWeight w = StepWeight::One;
    int shift = 0;
};

Step step_of(Op op);

/// Numeric trace of the product of the steps, summed over starting index up to
/// M levels above the lowest admissible one. tail bounds the omitted part.
struct Bounded {
    double value = 0;
    double tail = 0;
};
Bounded path_trace(const std::vector<Step>& word, double q, unsigned M);

/// Trace expanded as sum coeff * q^e / (1 - q^j) over (e, j), j >= 1.
/// Throws std::domain_error when the trace diverges. Zero map when the path
/// does not close.
std::map<std::pair<unsigned, unsigned>, long> path_trace_expansion(const std::vector<Step>& word);

template <class Field>
typename Field::Value path_trace_exact(const std::vector<Step>& word, const Field& field) {
    typename Field::Value total = field.from_int(0);
    for (const auto& [key, coeff] : path_trace_expansion(word))
        total += field.from_int(coeff) * field.q_pow(key.first) * field.geometric(key.second);
    return total;
}

// ---------------------------------------------------------------------------
// Stationary weights by the matrix product. tr(X_{eta_1} ... X_{eta_L}) is
// expanded over the arrival line l of the top queue; the trace of a tensor
// product is the product of the factor traces, so
//   W_N(eta) = sum_l prod_r tr_r(l, eta) W_{N-1}(l).

/// Factor words of a^{(N)}_{l_i, eta_i}, one step sequence per factor; nullopt if some a vanishes.
std::optional<std::vector<std::vector<Step>>> factor_words(const RingConfig& l, const RingConfig& eta, Type N);

struct TraceEntry {
    double unnormalized = 0;
    double normalized = 0;
    double tail_bound = 0;  // bound on |normalized - true value|
};

struct TraceTable {
    std::map<RingConfig, TraceEntry> entries;
    unsigned M = 0;
};

/// All stationary weights for the counts, each factor truncated at M levels.
/// A ring filled by particles is handled by treating the last type as holes.
TraceTable trace_weights(const ParticleCounts& counts, double q, unsigned M);

/// Doubles M from K + 10 until every normalized value is pinned to within tol.
/// Throws std::runtime_error if M would exceed max_M.
TraceTable trace_distribution(const ParticleCounts& counts, double q, double tol = 1e-13, unsigned max_M = 1u << 16);

TraceEntry stationary_weight_trace(const RingConfig& config, double q, double tol = 1e-13);

/// Same recursion with each factor trace in closed form. Returns unnormalized weights.
template <class Field>
Distribution<typename Field::Value> trace_weights_exact(const ParticleCounts& counts, const Field& field);

template <class Field>
Distribution<typename Field::Value> trace_distribution_exact(const ParticleCounts& counts, const Field& field) {
    auto w = trace_weights_exact(counts, field);
    typename Field::Value z = field.from_int(0);
    for (const auto& [c, v] : w) z += v;
    for (auto& [c, v] : w) v /= z;
    return w;
}

/// Trace by summing over every chain of build_X at every site (no recursion
/// over lines). Exponential in L; used as a cross-check.
Bounded trace_by_chains(const RingConfig& config, double q, unsigned M);

/// TSV: config, unnormalized, normalized, tail_bound.
std::string report(const TraceTable& t);

// ---------------------------------------------------------------------------
// Relations on truncated symbolic matrices.

using PolyMatrix = std::vector<std::vector<QPoly>>;

struct OperatorSet {
    PolyMatrix alpha, delta, epsilon;
};

/// The matrices of the standard realisation, M x M.
OperatorSet standard_operators(std::size_t M);
/// Alternative two-type realisation: X1 = I + delta (lower bidiagonal),
/// X2 = alpha (upper bidiagonal), Xinf = I + epsilon (ones above the diagonal).
OperatorSet alternative_operators(std::size_t M);

struct RelationReport {
    bool pass = true;
    std::string relation;  // first failing relation, empty on pass
    std::size_t row = 0, col = 0;
};

/// eps delta - q delta eps = (1-q) I, alpha delta = q delta alpha, eps alpha = q alpha eps
/// on the index square [0, M-2]^2.
RelationReport check_fundamental_relations(const OperatorSet& ops);
/// Same at a numeric q, exactly in rationals.
RelationReport check_fundamental_relations(const OperatorSet& ops, const mpq_class& q);

/// Row sums of epsilon and delta + alpha at numeric q, rows 0..M-2.
bool rows_stochastic(const OperatorSet& ops, double q, double tol = 1e-14);

// ---------------------------------------------------------------------------
// Two-type traces from the alternative matrices.

/// Alternatives per site: each X is a sum of single-step matrices.
std::vector<Step> alternative_steps(Type t);
std::vector<Step> standard_steps(Type t);

template <class Field>
typename Field::Value two_type_trace_exact(const RingConfig& c, bool alternative, const Field& field);

struct AltCheck {
    bool relations = false;
    std::size_t systems = 0;
    std::size_t configs = 0;
    std::size_t mismatches = 0;
    std::vector<std::string> lines;  // one per mismatch
};

/// Relations of the alternative matrices, then for every two-type count vector
/// with L <= L_max and each q, normalized alternative and standard distributions.
AltCheck alt_matrices_check(std::size_t L_max, const std::vector<mpq_class>& qs);

// ---------------------------------------------------------------------------

template <class Field>
typename Field::Value two_type_trace_exact(const RingConfig& c, bool alternative, const Field& field) {
    using V = typename Field::Value;
    std::vector<std::vector<Step>> choices;
    for (std::size_t i = 0; i < c.size(); ++i) choices.push_back(alternative ? alternative_steps(c[i]) : standard_steps(c[i]));
    V total = field.from_int(0);
    std::vector<std::size_t> pick(c.size(), 0);
    std::vector<Step> word(c.size());
    while (true) {
        int net = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            word[i] = choices[i][pick[i]];
            net += word[i].dh;
        }
        if (net == 0) total += path_trace_exact(word, field);
        std::size_t i = 0;
        while (i < c.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
        if (i == c.size()) break;
    }
    return total;
}

template <class Field>
Distribution<typename Field::Value> trace_weights_exact(const ParticleCounts& counts, const Field& field) {
    using V = typename Field::Value;
    counts.validate();
    const ParticleCounts reduced = reduce_full_ring(counts);
    const Type N = static_cast<Type>(reduced.num_types());

    Distribution<V> prev;
    if (N == 0) {
        prev.emplace(RingConfig(std::vector<Type>(counts.L, kHole), 0), field.from_int(1));
    } else {
        for (const auto& c : enumerate_configs(ParticleCounts{{reduced.k[0]}, reduced.L})) prev.emplace(c, field.from_int(1));
        for (Type n = 2; n <= N; ++n) {
            ParticleCounts level{std::vector<std::size_t>(reduced.k.begin(), reduced.k.begin() + n), reduced.L};
            Distribution<V> cur;
            for (const auto& eta : enumerate_configs(level)) {
                V w = field.from_int(0);
                for (const auto& [l, wl] : prev) {
                    auto words = factor_words(l, eta, n);
                    if (!words) continue;
                    V t = wl;
                    for (const auto& word : *words) {
                        t *= path_trace_exact(word, field);
                        if (t == field.from_int(0)) break;
                    }
                    w += t;
                }
                cur.emplace(eta, w);
            }
            prev = std::move(cur);
        }
    }
    if (reduced == counts) return prev;
    Distribution<V> out;
    const Type top = static_cast<Type>(counts.num_types());
    for (auto& [c, v] : prev) {
        std::vector<Type> s = c.sites();
        for (auto& t : s)
            if (is_hole(t)) t = top;
        out.emplace(RingConfig(std::move(s), top), std::move(v));
    }
    return out;
}

}  // namespace asep

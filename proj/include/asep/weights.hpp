#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "asep/distribution.hpp"
#include "asep/qpoly.hpp"
#include "asep/ring.hpp"

namespace asep {

/// Queue lengths per type. q[n-1][t] is the number of type-n customers
/// present at time t. On the ring t runs over 0..L-1 (cyclically); on a
/// window it runs over 0..L, the last column being the value after the final step.
struct QueueProcess {
    std::vector<std::vector<long>> q;
    bool cyclic = true;

    std::size_t types() const { return q.size(); }
    long at(std::size_t n, std::size_t t) const { return q[n - 1][t]; }
    /// Q^{(<=n)}(t); zero for n = 0.
    long prefix(std::size_t n, std::size_t t) const;
    /// Column after step t (wraps on the ring).
    std::size_t next(std::size_t t) const { return cyclic && t + 1 == q[0].size() ? 0 : t + 1; }

    /// Two-type convenience: a single queue.
    static QueueProcess single(std::vector<long> values, bool cyclic = true);
    /// Adds m to every entry of type n.
    QueueProcess shifted(std::size_t n, long m) const;
    bool operator==(const QueueProcess&) const = default;
};

enum class Violation {
    Shape,                    // lengths or type ranges disagree
    Negative,                 // some Q < 0
    Balance,                  // queue change not explained by one arrival/departure
    DepartureWithoutService,  // S_i = inf but a customer leaves
    DepartureAboveArrival,    // D_i > A_i
};

struct InvalidTriple {
    Violation what;
    std::size_t site;
    std::string message() const;
};

using DepartureResult = std::variant<RingConfig, InvalidTriple>;

/// Reconstructs D from (A, S, Q). A has types 1..N-1 (N-1 = Q.types()),
/// S has entries in {1, inf}. The result has N types, type N marking unused services.
DepartureResult departure_process(const std::vector<Type>& A, const std::vector<Type>& S, const QueueProcess& Q);
DepartureResult departure_process(const RingConfig& A, const RingConfig& S, const QueueProcess& Q);

/// Site weight q^a (1 - q^b); has_b false means the factor is just q^a.
struct SiteFactor {
    long a = 0;
    bool has_b = false;
    long b = 0;

    QPoly poly() const;
    double value(double q) const;
};

SiteFactor site_factor(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, const RingConfig& D,
                       std::size_t i);
QPoly site_weight(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, std::size_t i);
QPoly total_weight(const RingConfig& A, const RingConfig& S, const QueueProcess& Q);
double total_weight(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, double q);

/// One departure pattern D together with its pointwise-minimal queue process.
/// Every valid Q with this D is base shifted by a constant c_n >= 0 per type.
struct DepartureClass {
    RingConfig D;
    QueueProcess base;
};

std::vector<DepartureClass> departure_classes(const RingConfig& A, const RingConfig& S);

/// Number of services whose departure type exceeds r, r = 1..N-1. A shift of
/// c_r in type r multiplies the weight by at most q^{c_r T_r}.
std::vector<std::size_t> shift_exponents(const RingConfig& S, const RingConfig& D);

struct TruncatedSum {
    double sum = 0;
    double tail_bound = 0;
    double target = 0;      // prod_{n>=2} (1 - q^{k_n})^{-1}, the value claimed for the full sum
    double normalizer = 0;  // prod_{r>=1} (1 - q^{T_r})^{-1}, the full sum over the shift orthant
    std::size_t classes = 0;
    std::size_t processes = 0;
};

/// Sums w(Q|A,S) over every valid Q whose per-type shift c_r above the class
/// minimum is at most ceil(M / T_r). tail_bound bounds the omitted mass.
TruncatedSum weight_sum_truncated(const RingConfig& A, const RingConfig& S, double q, unsigned M);

/// Expansion of sum_c w(base + c) as sum over terms coeff * q^e * prod x_r^{j_r},
/// x_r = q^{c_r}. key = (e, j_1, ..., j_{N-1}).
std::map<std::vector<unsigned>, long> class_weight_expansion(const RingConfig& A, const RingConfig& S,
                                                             const DepartureClass& cls);

/// Closed-form geometric sum of the expansion over all shifts.
template <class Field>
typename Field::Value sum_expansion(const std::map<std::vector<unsigned>, long>& terms, const Field& field) {
    std::map<std::vector<unsigned>, std::vector<mpq_class>> by_shift;
    for (const auto& [key, coeff] : terms) {
        if (coeff == 0) continue;
        std::vector<unsigned> j(key.begin() + 1, key.end());
        auto& poly = by_shift[j];
        if (poly.size() <= key[0]) poly.resize(key[0] + 1, mpq_class(0));
        poly[key[0]] += coeff;
    }
    typename Field::Value total = field.from_int(0);
    for (const auto& [j, coeffs] : by_shift) {
        typename Field::Value term = field.from_qpoly(QPoly(coeffs));
        for (unsigned e : j) term *= field.geometric(e);
        total += term;
    }
    return total;
}

/// sum over all valid Q of w(Q|A,S), exactly.
template <class Field>
typename Field::Value weight_sum_exact(const RingConfig& A, const RingConfig& S, const Field& field) {
    typename Field::Value total = field.from_int(0);
    for (const auto& cls : departure_classes(A, S)) total += sum_expansion(class_weight_expansion(A, S, cls), field);
    return total;
}

/// Exact stationary law of the bottom line: A drawn from the (N-1)-type law,
/// S uniform, Q weighted by w(Q|A,S) / sum_Q w(Q|A,S). The sum depends on
/// (A,S) only through the counts and equals prod_{n=2..N} (1-q^{k_n+...+k_N})^{-1};
/// for two types this is (1-q^{k_2})^{-1}.
template <class Field>
Distribution<typename Field::Value> exact_departure_distribution(const ParticleCounts& counts, const Field& field,
                                                                 std::size_t max_L = 6) {
    using V = typename Field::Value;
    counts.validate();
    if (counts.L > max_L) throw std::length_error("exact_departure_distribution: ring too large");
    if (counts.k.empty()) throw std::invalid_argument("exact_departure_distribution: no particle types");
    for (std::size_t kn : counts.k)
        if (kn == 0) throw std::invalid_argument("exact_departure_distribution: every k_n must be >= 1");

    ParticleCounts c1{{counts.k[0]}, counts.L};
    Distribution<V> current;
    const auto lines1 = enumerate_configs(c1);
    const V uniform = field.from_rational(mpq_class(1, static_cast<unsigned long>(lines1.size())));
    for (const auto& c : lines1) current.emplace(c, uniform);

    for (std::size_t N = 2; N <= counts.k.size(); ++N) {
        const std::size_t K = counts.prefix(N);
        const auto services = enumerate_configs(ParticleCounts{{K}, counts.L});
        // prod_{n=2..N} (1 - q^{k_n + ... + k_N}) / C(L, K)
        V factor = field.from_rational(mpq_class(1, static_cast<unsigned long>(services.size())));
        for (std::size_t n = 2; n <= N; ++n)
            factor *= field.from_int(1) - field.q_pow(static_cast<unsigned>(K - counts.prefix(n - 1)));
        Distribution<V> next;
        for (const auto& [A, pA] : current) {
            std::map<RingConfig, std::map<std::vector<unsigned>, long>> per_state;
            for (const auto& S : services) {
                for (const auto& cls : departure_classes(A, S)) {
                    auto& acc = per_state[cls.D];
                    for (const auto& [key, coeff] : class_weight_expansion(A, S, cls)) acc[key] += coeff;
                }
            }
            const V weight = pA * factor;
            for (const auto& [D, terms] : per_state) {
                V v = weight * sum_expansion(terms, field);
                auto [it, inserted] = next.emplace(D, v);
                if (!inserted) it->second += v;
            }
        }
        current = std::move(next);
    }
    return current;
}

}  // namespace asep

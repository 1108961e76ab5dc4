#include "asep/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asep {

long QueueProcess::prefix(std::size_t n, std::size_t t) const {
    long s = 0;
    for (std::size_t r = 0; r < n; ++r) s += q[r][t];
    return s;
}

QueueProcess QueueProcess::single(std::vector<long> values, bool cyclic) {
    QueueProcess Q;
    Q.q.push_back(std::move(values));
    Q.cyclic = cyclic;
    return Q;
}

QueueProcess QueueProcess::shifted(std::size_t n, long m) const {
    QueueProcess Q = *this;
    for (long& v : Q.q[n - 1]) v += m;
    return Q;
}

std::string InvalidTriple::message() const {
    const char* what_str = "";
    switch (what) {
        case Violation::Shape: what_str = "shape mismatch"; break;
        case Violation::Negative: what_str = "negative queue length"; break;
        case Violation::Balance: what_str = "queue change not matched by arrival/departure"; break;
        case Violation::DepartureWithoutService: what_str = "departure without service"; break;
        case Violation::DepartureAboveArrival: what_str = "departure type exceeds arrival type"; break;
    }
    return std::string(what_str) + " at site " + std::to_string(site);
}

DepartureResult departure_process(const std::vector<Type>& A, const std::vector<Type>& S, const QueueProcess& Q) {
    const std::size_t L = A.size();
    const std::size_t types = Q.types();
    if (types == 0 || S.size() != L || L == 0) return InvalidTriple{Violation::Shape, 0};
    const std::size_t cols = Q.cyclic ? L : L + 1;
    for (const auto& row : Q.q)
        if (row.size() != cols) return InvalidTriple{Violation::Shape, 0};
    const Type N = static_cast<Type>(types + 1);

    std::vector<Type> D(L, kHole);
    for (std::size_t i = 0; i < L; ++i) {
        if ((!is_hole(A[i]) && A[i] >= N) || (S[i] != 1 && !is_hole(S[i])))
            return InvalidTriple{Violation::Shape, i};
        for (std::size_t n = 1; n <= types; ++n)
            if (Q.at(n, i) < 0) return InvalidTriple{Violation::Negative, i};
        const std::size_t t = Q.next(i);
        Type departed = kHole;
        for (std::size_t n = 1; n <= types; ++n) {
            const long d = (A[i] == n ? 1 : 0) - (Q.at(n, t) - Q.at(n, i));
            if (d == 0) continue;
            if (d != 1 || !is_hole(departed)) return InvalidTriple{Violation::Balance, i};
            departed = static_cast<Type>(n);
        }
        if (is_hole(S[i])) {
            if (!is_hole(departed)) return InvalidTriple{Violation::DepartureWithoutService, i};
            continue;
        }
        if (is_hole(departed)) departed = N;  // unused service
        if (departed > A[i]) return InvalidTriple{Violation::DepartureAboveArrival, i};
        D[i] = departed;
    }
    if (!Q.cyclic)
        for (std::size_t n = 1; n <= types; ++n)
            if (Q.at(n, L) < 0) return InvalidTriple{Violation::Negative, L};
    return RingConfig(std::move(D), N);
}

DepartureResult departure_process(const RingConfig& A, const RingConfig& S, const QueueProcess& Q) {
    return departure_process(A.sites(), S.sites(), Q);
}

QPoly SiteFactor::poly() const {
    QPoly p = QPoly::q_power(static_cast<unsigned>(a));
    if (has_b) p *= QPoly::one_minus_q_power(static_cast<unsigned>(b));
    return p;
}

double SiteFactor::value(double q) const {
    double v = std::pow(q, static_cast<double>(a));
    if (has_b) v *= 1.0 - std::pow(q, static_cast<double>(b));
    return v;
}

SiteFactor site_factor(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, const RingConfig& D,
                       std::size_t i) {
    SiteFactor f;
    if (is_hole(S[i])) return f;
    const Type n = D[i];
    f.a = Q.prefix(n - 1, i);
    if (n != A[i] && n != D.num_types()) {
        f.has_b = true;
        f.b = Q.at(n, i);
    }
    return f;
}

namespace {

RingConfig require_valid(const RingConfig& A, const RingConfig& S, const QueueProcess& Q) {
    auto r = departure_process(A, S, Q);
    if (auto* bad = std::get_if<InvalidTriple>(&r)) throw std::invalid_argument("invalid triple: " + bad->message());
    return std::get<RingConfig>(r);
}

}  // namespace

QPoly site_weight(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, std::size_t i) {
    return site_factor(A, S, Q, require_valid(A, S, Q), i).poly();
}

QPoly total_weight(const RingConfig& A, const RingConfig& S, const QueueProcess& Q) {
    const RingConfig D = require_valid(A, S, Q);
    QPoly w(1);
    for (std::size_t i = 0; i < A.size(); ++i) w *= site_factor(A, S, Q, D, i).poly();
    return w;
}

double total_weight(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, double q) {
    const RingConfig D = require_valid(A, S, Q);
    double w = 1;
    for (std::size_t i = 0; i < A.size(); ++i) w *= site_factor(A, S, Q, D, i).value(q);
    return w;
}

std::vector<DepartureClass> departure_classes(const RingConfig& A, const RingConfig& S) {
    const std::size_t L = A.size();
    if (S.size() != L) throw std::invalid_argument("A and S have different lengths");
    const Type N = A.num_types() + 1;
    std::vector<std::size_t> remaining(N + 1, 0);
    std::vector<std::size_t> service_sites;
    for (std::size_t i = 0; i < L; ++i) {
        if (!is_hole(A[i])) ++remaining[A[i]];
        if (S[i] == 1) service_sites.push_back(i);
    }
    std::size_t arrivals = 0;
    for (Type n = 1; n < N; ++n) arrivals += remaining[n];
    if (arrivals > service_sites.size()) throw std::invalid_argument("more arrivals than services");
    remaining[N] = service_sites.size() - arrivals;

    std::vector<DepartureClass> out;
    std::vector<Type> D(L, kHole);
    auto emit = [&]() {
        QueueProcess Q;
        Q.q.assign(N - 1, std::vector<long>(L, 0));
        for (Type n = 1; n < N; ++n) {
            auto& row = Q.q[n - 1];
            long p = 0;
            for (std::size_t t = 0; t < L; ++t) {
                row[t] = p;
                p += (A[t] == n ? 1 : 0) - (D[t] == n ? 1 : 0);
            }
            const long lo = *std::min_element(row.begin(), row.end());
            for (long& v : row) v -= lo;
        }
        out.push_back({RingConfig(D, N), std::move(Q)});
    };
    auto rec = [&](auto&& self, std::size_t idx) -> void {
        if (idx == service_sites.size()) {
            emit();
            return;
        }
        const std::size_t i = service_sites[idx];
        for (Type n = 1; n <= N; ++n) {
            if (remaining[n] == 0 || n > A[i]) continue;
            --remaining[n];
            D[i] = n;
            self(self, idx + 1);
            ++remaining[n];
        }
        D[i] = kHole;
    };
    rec(rec, 0);
    return out;
}

std::vector<std::size_t> shift_exponents(const RingConfig& S, const RingConfig& D) {
    std::vector<std::size_t> T(D.num_types() - 1, 0);
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S[i] != 1) continue;
        for (Type r = 1; r < D[i]; ++r) ++T[r - 1];
    }
    return T;
}

TruncatedSum weight_sum_truncated(const RingConfig& A, const RingConfig& S, double q, unsigned M) {
    if (q < 0 || q >= 1) throw std::invalid_argument("q must lie in [0,1)");
    TruncatedSum result;
    const auto classes = departure_classes(A, S);
    if (classes.empty()) throw std::logic_error("no valid queue process");
    result.classes = classes.size();
    const std::size_t L = A.size();
    const std::size_t types = A.num_types();

    // Target from the counts of the bottom line.
    const ParticleCounts out_counts = particle_counts(classes.front().D);
    result.target = 1;
    for (std::size_t n = 2; n <= out_counts.k.size(); ++n)
        result.target /= 1.0 - std::pow(q, static_cast<double>(out_counts.k[n - 1]));

    const auto T = shift_exponents(S, classes.front().D);
    std::vector<long> bound(types);
    double full = 1, kept = 1;
    result.normalizer = 1;
    for (std::size_t r = 0; r < types; ++r) {
        if (T[r] == 0) throw std::invalid_argument("weight sum diverges: no unused service");
        bound[r] = static_cast<long>((M + T[r] - 1) / T[r]);
        const double g = 1.0 / (1.0 - std::pow(q, static_cast<double>(T[r])));
        full *= g;
        result.normalizer *= g;
        kept *= g * (1.0 - std::pow(q, static_cast<double>(T[r] * (bound[r] + 1))));
    }
    result.tail_bound = static_cast<double>(classes.size()) * (full - kept);

    for (const auto& cls : classes) {
        std::vector<long> c(types, 0);
        QueueProcess Q = cls.base;
        while (true) {
            for (std::size_t r = 0; r < types; ++r)
                for (std::size_t t = 0; t < L; ++t) Q.q[r][t] = cls.base.q[r][t] + c[r];
            double w = 1;
            for (std::size_t i = 0; i < L && w != 0; ++i) w *= site_factor(A, S, Q, cls.D, i).value(q);
            result.sum += w;
            ++result.processes;
            std::size_t r = 0;
            while (r < types && c[r] == bound[r]) c[r++] = 0;
            if (r == types) break;
            ++c[r];
        }
    }
    return result;
}

std::map<std::vector<unsigned>, long> class_weight_expansion(const RingConfig& A, const RingConfig& S,
                                                             const DepartureClass& cls) {
    const std::size_t types = cls.base.types();
    using Key = std::vector<unsigned>;
    std::map<Key, long> terms{{Key(types + 1, 0), 1}};
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (S[i] != 1) continue;
        const SiteFactor f = site_factor(A, S, cls.base, cls.D, i);
        const Type n = cls.D[i];
        // q^a prod_{r<n} x_r
        std::map<Key, long> next;
        for (const auto& [key, coeff] : terms) {
            Key k = key;
            k[0] += static_cast<unsigned>(f.a);
            for (Type r = 1; r < n; ++r) ++k[r];
            if (!f.has_b) {
                next[k] += coeff;
                continue;
            }
            // (1 - q^b x_n)
            next[k] += coeff;
            k[0] += static_cast<unsigned>(f.b);
            ++k[n];
            next[k] -= coeff;
        }
        terms.clear();
        for (auto& [k, v] : next)
            if (v != 0) terms.emplace(k, v);
    }
    return terms;
}

}  // namespace asep

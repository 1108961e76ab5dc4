#include "asep/ctmc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace asep {

std::size_t GeneratorMatrix::index_of(const RingConfig& c) const {
    auto it = std::lower_bound(states.begin(), states.end(), c);
    if (it == states.end() || !(*it == c)) throw std::out_of_range("configuration not in state space");
    return static_cast<std::size_t>(it - states.begin());
}

GeneratorMatrix build_generator(const ParticleCounts& counts, std::size_t cap) {
    counts.validate();
    if (config_count(counts) > cap) throw std::length_error("state count exceeds cap");
    GeneratorMatrix g;
    g.counts = counts;
    g.states = enumerate_configs(counts);
    g.out.resize(g.states.size());
    const std::size_t L = counts.L;
    for (std::size_t s = 0; s < g.states.size(); ++s) {
        std::map<std::size_t, Transition> acc;
        const RingConfig& c = g.states[s];
        for (std::size_t i = 0; i < L; ++i) {
            const std::size_t j = (i + 1) % L;
            if (c[i] == c[j]) continue;
            std::vector<Type> v = c.sites();
            std::swap(v[i], v[j]);
            const std::size_t t = g.index_of(RingConfig(std::move(v), c.num_types()));
            auto& tr = acc.try_emplace(t, Transition{t, 0, 0}).first->second;
            if (c[i] > c[j]) ++tr.ones;
            else ++tr.qs;
        }
        for (auto& [t, tr] : acc) g.out[s].push_back(tr);
    }
    return g;
}

namespace {

// Bareiss elimination on an n x (n+1) augmented matrix, in place. Pivot is
// the lowest-index row with a nonzero entry. Leaves an upper triangular system.
template <class T, class IsZero, class ExactDiv>
void bareiss(std::vector<std::vector<T>>& M, IsZero is_zero, ExactDiv exact_div) {
    const std::size_t n = M.size();
    T prev(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && is_zero(M[p][k])) ++p;
        if (p == n) throw std::runtime_error("singular balance system: generator bug");
        if (p != k) std::swap(M[p], M[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const T mik = M[i][k];
            const bool zero_mik = is_zero(mik);
            for (std::size_t j = k + 1; j <= n; ++j) {
                T v = M[k][k] * M[i][j];
                if (!zero_mik) v -= mik * M[k][j];
                M[i][j] = exact_div(v, prev);
            }
            M[i][k] = T(0);
        }
        prev = M[k][k];
    }
}

}  // namespace

Distribution<mpq_class> solve_stationary_exact(const GeneratorMatrix& g, const mpq_class& q) {
    if (q < 0) throw std::invalid_argument("q must be non-negative");
    const std::size_t n = g.size();
    const mpz_class a = q.get_num(), b = q.get_den();
    // Transposed generator scaled by b, last balance row replaced by normalization.
    std::vector<std::vector<mpz_class>> M(n, std::vector<mpz_class>(n + 1, 0));
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& tr : g.out[s]) {
            const mpz_class r = b * tr.ones + a * tr.qs;
            M[tr.to][s] += r;
            M[s][s] -= r;
        }
    }
    for (std::size_t j = 0; j < n; ++j) M[n - 1][j] = 1;
    M[n - 1][n] = 1;
    bareiss(
        M, [](const mpz_class& x) { return x == 0; },
        [](const mpz_class& x, const mpz_class& d) {
            mpz_class r;
            mpz_divexact(r.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t());
            return r;
        });
    std::vector<mpq_class> x(n);
    for (std::size_t i = n; i-- > 0;) {
        mpq_class acc = M[i][n];
        for (std::size_t j = i + 1; j < n; ++j)
            if (M[i][j] != 0) acc -= M[i][j] * x[j];
        x[i] = acc / M[i][i];
    }
    Distribution<mpq_class> d;
    for (std::size_t s = 0; s < n; ++s) d.emplace_hint(d.end(), g.states[s], x[s]);
    return d;
}

Distribution<QRational> solve_stationary_symbolic(const GeneratorMatrix& g, std::size_t cap) {
    const std::size_t n = g.size();
    if (n > cap) throw std::length_error("symbolic solve: state count exceeds cap");
    const QPoly qv = QPoly::q_power(1);
    std::vector<std::vector<QPoly>> M(n, std::vector<QPoly>(n + 1));
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& tr : g.out[s]) {
            QPoly r = QPoly(static_cast<long>(tr.ones)) + QPoly(static_cast<long>(tr.qs)) * qv;
            M[tr.to][s] += r;
            M[s][s] -= r;
        }
    }
    for (std::size_t j = 0; j < n; ++j) M[n - 1][j] = QPoly(1);
    M[n - 1][n] = QPoly(1);
    bareiss(
        M, [](const QPoly& x) { return x.is_zero(); },
        [](const QPoly& x, const QPoly& d) { return exact_divide(x, d); });
    std::vector<QRational> x(n);
    for (std::size_t i = n; i-- > 0;) {
        QRational acc(M[i][n]);
        for (std::size_t j = i + 1; j < n; ++j)
            if (!M[i][j].is_zero()) acc -= QRational(M[i][j]) * x[j];
        x[i] = acc / QRational(M[i][i]);
    }
    Distribution<QRational> d;
    for (std::size_t s = 0; s < n; ++s) d.emplace_hint(d.end(), g.states[s], x[s]);
    return d;
}

Distribution<double> solve_stationary_float(const GeneratorMatrix& g, double q) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index s = 0; s < n; ++s) {
        for (const auto& tr : g.out[static_cast<std::size_t>(s)]) {
            const double r = tr.ones + tr.qs * q;
            A(static_cast<Eigen::Index>(tr.to), s) += r;
            A(s, s) -= r;
        }
    }
    A.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd x = A.partialPivLu().solve(rhs);
    Distribution<double> d;
    for (Eigen::Index s = 0; s < n; ++s) d.emplace_hint(d.end(), g.states[static_cast<std::size_t>(s)], x(s));
    return d;
}

mpq_class balance_residual(const GeneratorMatrix& g, const Distribution<mpq_class>& pi, const mpq_class& q) {
    const std::size_t n = g.size();
    std::vector<mpq_class> flow(n, mpq_class(0));
    std::vector<mpq_class> p(n);
    for (std::size_t s = 0; s < n; ++s) p[s] = pi.at(g.states[s]);
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& tr : g.out[s]) {
            const mpq_class r = p[s] * (mpq_class(tr.ones) + q * tr.qs);
            flow[tr.to] += r;
            flow[s] -= r;
        }
    }
    mpq_class worst = 0;
    for (const auto& f : flow) worst = std::max(worst, mpq_class(abs(f)));
    return worst;
}

Distribution<QPoly> clear_denominator(const Distribution<QRational>& d, const QPoly& denom) {
    Distribution<QPoly> out;
    for (const auto& [c, p] : d) {
        const QRational r = p * QRational(denom);
        if (r.den().degree() != 0) throw std::domain_error("not a polynomial after clearing: " + to_string(c));
        QPoly v = r.num();
        v *= mpq_class(1) / r.den().leading();
        out.emplace(c, std::move(v));
    }
    return out;
}

Distribution<QPoly> clear_denominator_interpolated(const GeneratorMatrix& g, const QPoly& denom) {
    const std::size_t n = static_cast<std::size_t>(std::max(denom.degree(), 0)) + 1;
    std::vector<mpq_class> xs;
    std::vector<Distribution<mpq_class>> ys;
    for (std::size_t j = 0; j < n + 2; ++j) {
        xs.emplace_back(1, static_cast<unsigned long>(j + 2));
        auto pi = solve_stationary_exact(g, xs.back());
        const mpq_class dv = denom.evaluate_at(xs.back());
        for (auto& [c, v] : pi) v *= dv;
        ys.push_back(std::move(pi));
    }
    Distribution<QPoly> out;
    for (const auto& state : g.states) {
        // Newton divided differences on the first n points
        std::vector<mpq_class> dd(n);
        for (std::size_t j = 0; j < n; ++j) dd[j] = ys[j].at(state);
        for (std::size_t k = 1; k < n; ++k)
            for (std::size_t j = n - 1; j >= k; --j) dd[j] = (dd[j] - dd[j - 1]) / (xs[j] - xs[j - k]);
        QPoly p(dd[n - 1]);
        for (std::size_t j = n - 1; j-- > 0;) p = p * QPoly(std::vector<mpq_class>{-xs[j], 1}) + QPoly(dd[j]);
        for (std::size_t j = n; j < n + 2; ++j)
            if (p.evaluate_at(xs[j]) != ys[j].at(state))
                throw std::domain_error("interpolated numerator does not fit: " + to_string(state));
        out.emplace(state, std::move(p));
    }
    return out;
}

std::vector<QPoly> rotation_class_values(const Distribution<QPoly>& d) {
    std::map<RingConfig, QPoly> classes;
    for (const auto& [c, p] : d) {
        auto [it, inserted] = classes.emplace(canonical_rotation(c), p);
        if (!inserted && !(it->second == p)) throw std::domain_error("rotation class not constant: " + to_string(c));
    }
    std::vector<QPoly> out;
    for (auto& [c, p] : classes) out.push_back(p);
    std::sort(out.begin(), out.end(), [](const QPoly& a, const QPoly& b) { return to_string(a) < to_string(b); });
    return out;
}

}  // namespace asep

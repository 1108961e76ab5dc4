#include "asep/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace asep {

namespace {

// Counts of available services per site, with k-th-element search.
class Fenwick {
public:
    explicit Fenwick(std::size_t n) : t_(n + 1, 0), n_(n) {
        for (step_ = 1; step_ * 2 <= n_; step_ *= 2) {
        }
    }
    void add(std::size_t i, int d) {
        total_ += d;
        for (++i; i <= n_; i += i & (~i + 1)) t_[i] += d;
    }
    // sum over [0, i)
    int prefix(std::size_t i) const {
        int s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += t_[i];
        return s;
    }
    // smallest index whose inclusive prefix reaches k (k >= 1)
    std::size_t find(int k) const {
        std::size_t pos = 0;
        for (std::size_t s = step_; s > 0; s /= 2) {
            if (pos + s <= n_ && t_[pos + s] < k) {
                pos += s;
                k -= t_[pos];
            }
        }
        return pos;
    }
    int total() const { return total_; }

private:
    std::vector<int> t_;
    std::size_t n_;
    std::size_t step_ = 1;
    int total_ = 0;
};

void check_shapes(const RingConfig& A, const RingConfig& S) {
    if (A.size() != S.size()) throw std::invalid_argument("arrival and service processes differ in length");
    if (S.num_types() > 1) throw std::invalid_argument("service process must be one-type");
}

// Generic driver: pick(i, rank_after_i, m) returns (j, tours) for an arrival at i
// that finds no coincident service; j is 1-based in cyclic order after i.
template <class Pick>
AssignResult run_assignment(const RingConfig& A, const RingConfig& S, Pick&& pick) {
    check_shapes(A, S);
    const std::size_t L = A.size();
    const Type N = A.num_types() + 1;
    std::vector<std::vector<std::size_t>> by_type(N);
    std::size_t arrivals = 0;
    Fenwick avail(L);
    for (std::size_t i = 0; i < L; ++i) {
        if (!is_hole(A[i])) {
            by_type[A[i]].push_back(i);
            ++arrivals;
        }
        if (S[i] == 1) avail.add(i, 1);
    }
    if (static_cast<std::size_t>(avail.total()) < arrivals)
        throw std::invalid_argument("fewer services than arrivals");

    AssignResult out;
    out.edges.reserve(arrivals);
    std::vector<Type> D(L, kHole);
    std::vector<char> open(L, 0);
    for (std::size_t i = 0; i < L; ++i) open[i] = S[i] == 1;
    for (Type n = 1; n < N; ++n) {
        for (std::size_t i : by_type[n]) {
            Assignment e{i, i, n, 0};
            if (!open[i]) {
                const int m = avail.total();
                const int before = avail.prefix(i + 1);
                const auto [j, tours] = pick(i, before, m, avail);
                e.to = avail.find((before + j - 1) % m + 1);
                e.tours = tours;
            }
            open[e.to] = 0;
            avail.add(e.to, -1);
            D[e.to] = n;
            out.edges.push_back(e);
        }
    }
    for (std::size_t i = 0; i < L; ++i)
        if (open[i]) D[i] = N;
    out.D = RingConfig(std::move(D), N);
    return out;
}

}  // namespace

OfferLaw::OfferLaw(double q) : q_(q) {
    if (!(q >= 0 && q < 1)) throw std::invalid_argument("q must lie in [0,1)");
}

OfferLaw::OfferLaw(unsigned long num, unsigned long den) : q_(static_cast<double>(num) / static_cast<double>(den)),
                                                           num_(num), den_(den) {
    if (den == 0 || num >= den) throw std::invalid_argument("q must lie in [0,1)");
}

OfferLaw OfferLaw::from_rational(const mpq_class& q) {
    if (q < 0 || q >= 1) throw std::invalid_argument("q must lie in [0,1)");
    if (!q.get_num().fits_ulong_p() || !q.get_den().fits_ulong_p())
        throw std::invalid_argument("q has too large a numerator or denominator");
    return OfferLaw(q.get_num().get_ui(), q.get_den().get_ui());
}

unsigned long OfferLaw::rejections(Rng& rng) const {
    if (q_ == 0) return 0;
    if (!exact()) return std::geometric_distribution<unsigned long>(1.0 - q_)(rng);
    std::uniform_int_distribution<unsigned long> u(0, den_ - 1);
    unsigned long r = 0;
    while (u(rng) < num_) ++r;
    return r;
}

AssignResult assign_departures(const RingConfig& A, const RingConfig& S, const OfferLaw& law, Rng& rng) {
    return run_assignment(A, S, [&](std::size_t, int, int m, const Fenwick&) {
        const unsigned long J = law.rejections(rng);
        return std::pair<int, unsigned long>(static_cast<int>(J % m) + 1, J / m);
    });
}

Marks sample_marks(const RingConfig& S, const OfferLaw& law, Rng& rng) {
    Marks b(S.size(), kNoMark);
    for (std::size_t i = 0; i < S.size(); ++i)
        if (S[i] == 1) b[i] = static_cast<long>(law.rejections(rng));
    return b;
}

AssignResult assign_with_marks(const RingConfig& A, const RingConfig& S, const Marks& b) {
    if (b.size() != S.size()) throw std::invalid_argument("marks and services differ in length");
    for (std::size_t i = 0; i < S.size(); ++i)
        if (S[i] == 1 && b[i] < 0) throw std::invalid_argument("missing mark at a service site");
    std::vector<long> rejected(S.size(), 0);
    return run_assignment(A, S, [&](std::size_t, int before, int m, const Fenwick& avail) {
        for (unsigned long t = 0;; ++t) {
            const std::size_t s = avail.find(static_cast<int>((before + t) % m) + 1);
            if (rejected[s] < b[s]) {
                ++rejected[s];
                continue;
            }
            return std::pair<int, unsigned long>(static_cast<int>(t % m) + 1, t / m);
        }
    });
}

bool compatible(const RingConfig& A, const RingConfig& S, const QueueProcess& Q, const Marks& b) {
    auto r = departure_process(A, S, Q);
    if (!std::holds_alternative<RingConfig>(r)) return false;
    const RingConfig& D = std::get<RingConfig>(r);
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S[i] != 1) continue;
        for (std::size_t n = 1; n <= Q.types(); ++n) {
            if (!is_hole(A[i]) && A[i] <= n) continue;
            const long level = Q.prefix(n, i);
            const bool departs = D[i] <= n;
            if (departs ? !(b[i] < level) : !(b[i] >= level)) return false;
        }
    }
    return true;
}

MinimalProcess qmin_from_marks(const RingConfig& A, const RingConfig& S, const Marks& b) {
    check_shapes(A, S);
    const std::size_t L = A.size();
    std::size_t arrivals = 0, services = 0;
    for (std::size_t i = 0; i < L; ++i) {
        arrivals += !is_hole(A[i]);
        services += S[i] == 1;
    }
    if (arrivals >= services) throw std::invalid_argument("need more services than arrivals");
    const AssignResult run = assign_with_marks(A, S, b);

    QueueProcess Q;
    Q.q.assign(A.num_types(), std::vector<long>(L, 0));
    for (const auto& e : run.edges) {
        auto& row = Q.q[e.type - 1];
        for (long& v : row) v += static_cast<long>(e.tours);
        for (std::size_t t = e.from; t != e.to;) {
            t = (t + 1) % L;
            ++row[t];
        }
    }
    if (!compatible(A, S, Q, b)) throw std::logic_error("constructed queue process is not compatible with the marks");

    // lower each prefix level while compatibility survives
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t n = 1; n <= Q.types(); ++n) {
            QueueProcess lower = Q;
            for (long& v : lower.q[n - 1]) --v;
            if (n < Q.types())
                for (long& v : lower.q[n]) ++v;
            if (compatible(A, S, lower, b)) {
                Q = std::move(lower);
                changed = true;
            }
        }
    }
    return {std::move(Q), run.D};
}

RingConfig uniform_subset(std::size_t L, std::size_t K, Rng& rng) {
    if (K > L) throw std::invalid_argument("subset larger than the ring");
    std::vector<std::size_t> idx(L);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Type> sites(L, kHole);
    for (std::size_t r = 0; r < K; ++r) {
        std::uniform_int_distribution<std::size_t> pick(r, L - 1);
        std::swap(idx[r], idx[pick(rng)]);
        sites[idx[r]] = 1;
    }
    return RingConfig(std::move(sites), 1);
}

namespace {

void check_counts(const ParticleCounts& counts) {
    counts.validate();
    if (counts.k.empty()) throw std::invalid_argument("no particle types");
    for (std::size_t kn : counts.k)
        if (kn == 0) throw std::invalid_argument("every k_n must be >= 1");
}

}  // namespace

MultiLineDiagram sample_multitype(const ParticleCounts& counts, const OfferLaw& law, Rng& rng) {
    check_counts(counts);
    MultiLineDiagram d;
    d.lines.push_back(uniform_subset(counts.L, counts.k[0], rng));
    for (std::size_t n = 2; n <= counts.k.size(); ++n) {
        const RingConfig S = uniform_subset(counts.L, counts.prefix(n), rng);
        AssignResult r = assign_departures(d.lines.back(), S, law, rng);
        d.lines.push_back(std::move(r.D));
        d.edges.push_back(std::move(r.edges));
    }
    return d;
}

RingConfig sample_bottom(const ParticleCounts& counts, const OfferLaw& law, Rng& rng) {
    check_counts(counts);
    RingConfig line = uniform_subset(counts.L, counts.k[0], rng);
    for (std::size_t n = 2; n <= counts.k.size(); ++n) {
        const RingConfig S = uniform_subset(counts.L, counts.prefix(n), rng);
        line = assign_departures(line, S, law, rng).D;
    }
    return line;
}

std::string dump(const MultiLineDiagram& d) {
    std::ostringstream os;
    for (const auto& line : d.lines) os << to_string(line) << '\n';
    for (std::size_t k = 0; k < d.edges.size(); ++k)
        for (const auto& e : d.edges[k]) os << "assign " << k + 2 << ": " << e.from << "->" << e.to << '\n';
    return os.str();
}

}  // namespace asep

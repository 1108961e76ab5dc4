#include "asep/line.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "asep/stats.hpp"

namespace asep {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

bool unit_open(double x) { return x > 0 && x < 1; }

}  // namespace

void LineQueueParams::validate() const {
    require(unit_open(lambda) && unit_open(mu), "rates must lie in (0,1)");
    require(lambda < mu, "need lambda < mu");
    require(q >= 0 && q < 1, "q must lie in [0,1)");
}

Eigen::MatrixXd queue_transition_matrix(const LineQueueParams& p, std::size_t T) {
    p.validate();
    require(T >= 2, "truncation must be at least 2");
    const double l = p.lambda, m = p.mu;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(T + 1, T + 1);
    for (std::size_t k = 0; k <= T; ++k) {
        const double qk = std::pow(p.q, static_cast<double>(k));
        P(k, k) += (1 - l) * (1 - m) + l * m + (1 - l) * m * qk;  // I terms and alpha
        if (k + 1 <= T) P(k, k + 1) += l * (1 - m);                // epsilon
        if (k >= 1) P(k, k - 1) += (1 - l) * m * (1 - qk);         // delta
    }
    return P;
}

EquilibriumPi geometric_ratio_pi(double c, double q, double tail_tol) {
    require(c >= 0 && q >= 0 && q < 1, "bad ratio parameters");
    require(c < 1, "recursion diverges");
    std::vector<double> t{1.0};
    double sum = 1, rest = 0;
    for (std::size_t k = 1;; ++k) {
        const double r = c / (1 - std::pow(q, static_cast<double>(k)));
        // ratios decrease in k, so everything past k - 1 is at most t_{k-1} r / (1 - r)
        if (r < 1) {
            rest = t.back() * r / (1 - r);
            if (rest <= tail_tol * sum) break;
        }
        if (k > 50'000'000) throw std::runtime_error("equilibrium law did not converge");
        t.push_back(t.back() * r);
        sum += t.back();
    }
    EquilibriumPi out;
    const double z = sum + rest;
    out.p.reserve(t.size());
    for (double v : t) out.p.push_back(v / z);
    out.tail = rest / z;
    return out;
}

namespace {
double traffic(const LineQueueParams& p) { return p.lambda * (1 - p.mu) / ((1 - p.lambda) * p.mu); }
}  // namespace

EquilibriumPi equilibrium_pi(const LineQueueParams& p, double tail_tol) {
    p.validate();
    return geometric_ratio_pi(traffic(p), p.q, tail_tol);
}

EquilibriumPi tilted_pi(const LineQueueParams& p, double tail_tol) {
    p.validate();
    return geometric_ratio_pi(traffic(p) * p.q, p.q, tail_tol);
}

EquilibriumPi convoy_initial_pi(double q, double tail_tol) {
    require(q >= 0 && q < 1, "q must lie in [0,1)");
    return geometric_ratio_pi(q, q, tail_tol);
}

PairCorrelations pair_correlations(double lambda, double mu, double q) {
    require(lambda >= 0 && lambda < mu && mu <= 1, "need 0 <= lambda < mu <= 1");
    require(q >= 0 && q <= 1, "q must lie in [0,1]");
    const double d = mu - lambda;
    return {d * (1 - mu), d * ((1 - lambda) * mu - q * lambda * (1 - mu)), d * (lambda * mu + q * lambda * (1 - mu))};
}

double cluster_density(double x, double y, double q) {
    require(x >= 0 && x <= 1 && y >= 0 && y <= 1, "arguments must lie in [0,1]");
    return x < y ? 1.0 : 2 * (1 - q) * (x - y) + q;
}

double cluster_density_diagonal(double x, double q) {
    require(x >= 0 && x <= 1, "argument must lie in [0,1]");
    return (1 - q) * x * (1 - x);
}

ClusterLimits cluster_limits(double q) { return {0.5, (1 - q) / 6, (2 + q) / 6}; }

ClusterLimits cluster_quadrature(double q) {
    using boost::math::quadrature::gauss_kronrod;
    auto inner = [q](double x, double lo, double hi) {
        return gauss_kronrod<double, 31>::integrate([&](double y) { return cluster_density(x, y, q); }, lo, hi);
    };
    ClusterLimits c;
    c.less = gauss_kronrod<double, 31>::integrate([&](double x) { return inner(x, x, 1); }, 0, 1);
    c.greater = gauss_kronrod<double, 31>::integrate([&](double x) { return inner(x, 0, x); }, 0, 1);
    c.equal = gauss_kronrod<double, 31>::integrate([&](double x) { return cluster_density_diagonal(x, q); }, 0, 1);
    return c;
}

QSeriesCheck q_series_identity_check(double alpha, double q, unsigned terms) {
    require(std::fabs(alpha) < 1 && q >= 0 && q < 1, "need |alpha| < 1 and q in [0,1)");
    constexpr unsigned kBits = 256;
    const mpf_class a(alpha, kBits), qq(q, kBits);
    mpf_class lhs(0, kBits), rhs(0, kBits), poch(1, kBits), ak(1, kBits), qk(1, kBits);
    for (unsigned k = 0; k < terms; ++k) {
        if (k > 0) {
            qk *= qq;
            ak *= a;
            poch *= 1 - qk;
        }
        const mpf_class base = ak * qk / poch;
        rhs += base;
        lhs += base * qk;
    }
    rhs *= 1 - a * qq;
    mpf_class boundary(1, kBits);
    for (unsigned k = 0; k < terms; ++k) boundary *= a * qq;
    boundary /= poch;
    const mpf_class diff = rhs - lhs;
    return {lhs.get_d(), rhs.get_d(), std::fabs(diff.get_d()), std::fabs(boundary.get_d())};
}

unsigned q_series_terms_for(double alpha, double q, double tol) {
    require(std::fabs(alpha) < 1 && q >= 0 && q < 1, "need |alpha| < 1 and q in [0,1)");
    // boundary(K) = (a q)^K / (q;q)_{K-1}; ratio between consecutive K is a q / (1 - q^{K-1})
    double b = 1;
    for (unsigned K = 1; K < 100000; ++K) {
        b *= std::fabs(alpha) * q;
        if (K >= 2) b /= 1 - std::pow(q, K - 1.0);
        if (b < tol) return K;
    }
    throw std::runtime_error("q-series does not converge fast enough");
}

// ---------------------------------------------------------------------------

void TandemParams::validate() const {
    require(!lambda.empty(), "need at least one type");
    double s = 0;
    for (double l : lambda) {
        require(unit_open(l), "densities must lie in (0,1)");
        s += l;
    }
    require(s < 1, "densities must sum to less than 1");
    require(q >= 0 && q < 1, "q must lie in [0,1)");
}

double TandemParams::mu(std::size_t r) const { return std::accumulate(lambda.begin(), lambda.begin() + r + 1, 0.0); }
double TandemParams::arrival(std::size_t r) const { return std::accumulate(lambda.begin(), lambda.begin() + r, 0.0); }

std::size_t default_burn_in(const TandemParams& p) {
    if (p.num_types() < 2) return 0;
    const double gap = *std::min_element(p.lambda.begin() + 1, p.lambda.end());
    return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(10 / gap)));
}

TandemLine::TandemLine(TandemParams p, Rng& rng, std::optional<std::size_t> burn_in)
    : p_(std::move(p)), arrival_(0.5), rejections_(1.0) {
    p_.validate();
    arrival_ = std::bernoulli_distribution(p_.lambda[0]);
    rejections_ = std::geometric_distribution<long>(1 - p_.q);
    const std::size_t queues = p_.num_types() - 1;
    for (std::size_t r = 1; r <= queues; ++r) {
        service_.emplace_back(p_.mu(r));
        const EquilibriumPi pi = equilibrium_pi({p_.arrival(r), p_.mu(r), p_.q});
        std::discrete_distribution<long> len(pi.p.begin(), pi.p.end());
        counts_.emplace_back(r, 0);
        counts_.back()[r - 1] = len(rng);
    }
    const std::size_t b = burn_in ? *burn_in : default_burn_in(p_);
    for (std::size_t i = 0; i < b; ++i) next(rng);
}

Type TandemLine::step_queue(std::size_t r, Type a, Rng& rng) {
    std::vector<long>& c = counts_[r - 1];
    if (!service_[r - 1](rng)) {
        if (!is_hole(a)) ++c[a - 1];
        return kHole;
    }
    // offers go to customers in priority order; a new arrival never rejects
    const std::size_t classes = is_hole(a) ? r : a - 1;
    long ahead = 0;
    for (std::size_t n = 0; n < classes; ++n) ahead += c[n];
    if (ahead > 0) {
        long b = rejections_(rng);
        if (b < ahead) {
            std::size_t n = 0;
            while (b >= c[n]) b -= c[n++];
            --c[n];
            if (!is_hole(a)) ++c[a - 1];
            return static_cast<Type>(n + 1);
        }
    }
    return is_hole(a) ? static_cast<Type>(r + 1) : a;
}

Type TandemLine::next(Rng& rng) {
    Type t = arrival_(rng) ? 1 : kHole;
    for (std::size_t r = 1; r <= counts_.size(); ++r) t = step_queue(r, t, rng);
    return t;
}

WindowConfig sample_line_config(const TandemParams& p, long a, long b, Rng& rng, std::optional<std::size_t> burn_in) {
    require(a <= b, "empty window");
    TandemLine line(p, rng, burn_in);
    WindowConfig w;
    w.offset = a;
    w.sites.reserve(static_cast<std::size_t>(b - a + 1));
    for (long i = a; i <= b; ++i) w.sites.push_back(line.next(rng));
    return w;
}

// ---------------------------------------------------------------------------

std::string csv(const std::vector<Statistic>& stats) {
    std::ostringstream os;
    os.precision(10);
    os << "statistic,estimate,stderr,closed_form,z_score\n";
    for (const auto& s : stats) os << s.name << ',' << s.estimate << ',' << s.se << ',' << s.closed_form << ',' << s.z() << '\n';
    return os.str();
}

std::vector<Statistic> pair_statistics(double lambda, double mu, double q, std::size_t sites, Rng& rng,
                                       std::size_t batches) {
    require(batches >= 2 && sites >= 2 * batches, "need at least two sites per batch and two batches");
    TandemLine line(TandemParams{{lambda, mu - lambda}, q}, rng);
    const std::size_t per = sites / batches;
    // counts per batch: D=1, D=2, (2,inf), (2,2), (2,1)
    std::vector<std::array<double, 5>> acc(batches, std::array<double, 5>{});
    Type prev = line.next(rng);
    for (std::size_t b = 0; b < batches; ++b) {
        auto& s = acc[b];
        for (std::size_t i = 0; i < per; ++i) {
            const Type cur = line.next(rng);
            s[0] += prev == 1;
            s[1] += prev == 2;
            if (prev == 2) {
                s[2] += is_hole(cur);
                s[3] += cur == 2;
                s[4] += cur == 1;
            }
            prev = cur;
        }
        for (double& v : s) v /= static_cast<double>(per);
    }
    const PairCorrelations pc = pair_correlations(lambda, mu, q);
    const std::array<const char*, 5> names{"P(D=1)", "P(D=2)", "nu(2,inf)", "nu(2,2)", "nu(2,1)"};
    const std::array<double, 5> exact{lambda, mu - lambda, pc.two_hole, pc.two_two, pc.two_one};
    std::vector<Statistic> out;
    for (std::size_t j = 0; j < 5; ++j) {
        std::vector<double> xs;
        for (const auto& s : acc) xs.push_back(s[j]);
        const MeanSe m = mean_se(xs);
        out.push_back({names[j], m.mean, m.se, exact[j]});
    }
    return out;
}

double band_offdiagonal(double h, double q) {
    require(h >= 0 && h <= 1, "band width must lie in [0,1]");
    // above the diagonal the density is 1; below it is 2(1-q)t + q at distance t
    return (1 + q) * (h - h * h / 2) + (1 - q) * (h * h - 2 * h * h * h / 3);
}

std::size_t default_cluster_window(std::size_t L) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.05 * static_cast<double>(L))));
}

std::vector<ClusterEstimate> ring_cluster_sweep(std::size_t L, const OfferLaw& law, std::size_t n,
                                                const std::vector<std::size_t>& windows, Rng& rng) {
    require(L >= 2 && n >= 2, "bad cluster estimate parameters");
    for (std::size_t w : windows) require(w >= 1 && w < L, "window must lie in [1, L)");
    const ParticleCounts counts{std::vector<std::size_t>(L, 1), L};
    std::vector<std::vector<double>> fractions(windows.size());
    for (std::size_t s = 0; s < n; ++s) {
        const RingConfig y = sample_bottom(counts, law, rng);
        for (std::size_t j = 0; j < windows.size(); ++j) {
            std::size_t close = 0;
            for (std::size_t i = 0; i < L; ++i) {
                const Type a = y[i], b = y[(i + 1) % L];
                close += (a > b ? a - b : b - a) <= windows[j];
            }
            fractions[j].push_back(static_cast<double>(close) / static_cast<double>(L));
        }
    }
    std::vector<ClusterEstimate> out;
    for (std::size_t j = 0; j < windows.size(); ++j) {
        ClusterEstimate e;
        const MeanSe m = mean_se(fractions[j]);
        e.window = windows[j];
        e.raw = m.mean;
        e.correction = band_offdiagonal(static_cast<double>(windows[j]) / static_cast<double>(L), law.q());
        e.stat = {"P(W_i=W_i+1)", m.mean - e.correction, m.se, cluster_limits(law.q()).equal};
        out.push_back(e);
    }
    return out;
}

ClusterEstimate ring_cluster_estimate(std::size_t L, const OfferLaw& law, std::size_t n, std::size_t window, Rng& rng) {
    return ring_cluster_sweep(L, law, n, {window}, rng).front();
}

std::array<double, 4> convoy_branches(double x, double q, long k) {
    require(unit_open(x) && q >= 0 && q < 1 && k >= 0, "bad convoy walk parameters");
    const double s = x * (1 - x), qk = std::pow(q, static_cast<double>(k));
    return {s, x * x + (1 - x) * (1 - x), s * qk, s * (1 - qk)};
}

std::vector<std::size_t> convoy_walk(double x, double q, std::size_t steps, Rng& rng) {
    require(unit_open(x) && q >= 0 && q < 1, "bad convoy walk parameters");
    const EquilibriumPi pi0 = convoy_initial_pi(q);
    std::discrete_distribution<long> start(pi0.p.begin(), pi0.p.end());
    std::uniform_real_distribution<double> u(0, 1);
    long k = start(rng);
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i <= steps; ++i) {
        const auto b = convoy_branches(x, q, k);
        const double v = u(rng);
        if (v < b[0])
            ++k;
        else if (v < b[0] + b[1])
            ;
        else if (v < b[0] + b[1] + b[2])
            out.push_back(i);
        else if (k > 0)
            --k;
    }
    return out;
}

}  // namespace asep

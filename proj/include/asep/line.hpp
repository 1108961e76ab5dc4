#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "asep/ring.hpp"
#include "asep/sampler.hpp"

namespace asep {

// ---------------------------------------------------------------------------
// Single queue on Z with rejected services.

struct LineQueueParams {
    double lambda = 0;  // arrival probability per step
    double mu = 0;      // service probability per step
    double q = 0;
    /// Throws std::invalid_argument unless 0 < lambda < mu < 1 and 0 <= q < 1.
    void validate() const;
};

/// Transition matrix of the queue length on 0..T. Row T is cut off at the
/// truncation, every other row sums to 1.
Eigen::MatrixXd queue_transition_matrix(const LineQueueParams& p, std::size_t T);

/// p[0..T] plus the mass assigned to everything above T; sum(p) + tail == 1.
/// tail is an upper bound on the true mass above T.
struct EquilibriumPi {
    std::vector<double> p;
    double tail = 0;
};

/// Law with pi_k / pi_{k-1} = c / (1 - q^k). Requires c < 1 or q > 0.
EquilibriumPi geometric_ratio_pi(double c, double q, double tail_tol = 1e-15);

/// Equilibrium queue length.
EquilibriumPi equilibrium_pi(const LineQueueParams& p, double tail_tol = 1e-15);
/// Queue length given that the previous step had an unused service (pi_k q^k, normalized).
EquilibriumPi tilted_pi(const LineQueueParams& p, double tail_tol = 1e-15);
/// Starting law of the convoy walk: ratio q / (1 - q^k).
EquilibriumPi convoy_initial_pi(double q, double tail_tol = 1e-15);

// ---------------------------------------------------------------------------
// Closed forms.

/// nu(2, inf), nu(2, 2), nu(2, 1) for the two-type line measure with first-class
/// density lambda and second-class density mu - lambda.
struct PairCorrelations {
    double two_hole = 0;
    double two_two = 0;
    double two_one = 0;
};
PairCorrelations pair_correlations(double lambda, double mu, double q);

/// Density of (W_0, W_1) off the diagonal, and on it.
double cluster_density(double x, double y, double q);
double cluster_density_diagonal(double x, double q);

struct ClusterLimits {
    double less = 0;     // P(W_0 < W_1)
    double equal = 0;    // P(W_0 = W_1)
    double greater = 0;  // P(W_0 > W_1)
};
ClusterLimits cluster_limits(double q);
/// Same three numbers by Gauss-Kronrod quadrature of the densities.
ClusterLimits cluster_quadrature(double q);

/// Both sides of sum_k a^k q^{2k}/(q;q)_k = (1 - a q) sum_k a^k q^k/(q;q)_k over
/// k < terms, evaluated with 256-bit floats. boundary is (a q)^terms / (q;q)_{terms-1},
/// the exact value of rhs - lhs for the truncated sums.
struct QSeriesCheck {
    double lhs = 0;
    double rhs = 0;
    double residual = 0;
    double boundary = 0;
};
QSeriesCheck q_series_identity_check(double alpha, double q, unsigned terms);
/// Smallest number of terms whose boundary term is below tol.
unsigned q_series_terms_for(double alpha, double q, double tol);

// ---------------------------------------------------------------------------
// Tandem queues on Z.

struct TandemParams {
    std::vector<double> lambda;  // densities of types 1..N
    double q = 0;
    void validate() const;
    std::size_t num_types() const { return lambda.size(); }
    /// Service rate of queue r (1-based): lambda_1 + ... + lambda_{r+1}.
    double mu(std::size_t r) const;
    /// Arrival rate of queue r: lambda_1 + ... + lambda_r.
    double arrival(std::size_t r) const;
};

/// max(10 / min_r (mu_r - arrival_r), 1000); zero with a single type.
std::size_t default_burn_in(const TandemParams& p);

/// N - 1 priority queues in series. Queue r sees the output of queue r - 1
/// (Bernoulli(lambda_1) arrivals for r = 1) and emits types 1..r, r + 1 for an
/// unused service, or a hole. Each queue's total length starts from its
/// marginal equilibrium with every customer in the lowest class; the class
/// split then settles during the burn-in. With two types the start is exact.
class TandemLine {
public:
    TandemLine(TandemParams p, Rng& rng, std::optional<std::size_t> burn_in = std::nullopt);
    Type next(Rng& rng);
    const std::vector<std::vector<long>>& queues() const { return counts_; }

private:
    Type step_queue(std::size_t r, Type arrival, Rng& rng);

    TandemParams p_;
    std::vector<std::vector<long>> counts_;  // counts_[r - 1][n - 1]
    std::vector<std::bernoulli_distribution> service_;
    std::bernoulli_distribution arrival_;
    std::geometric_distribution<long> rejections_;
};

/// Sites a..b of a line configuration, after the burn-in.
WindowConfig sample_line_config(const TandemParams& p, long a, long b, Rng& rng,
                                std::optional<std::size_t> burn_in = std::nullopt);

// ---------------------------------------------------------------------------
// Monte Carlo statistics. CSV: statistic,estimate,stderr,closed_form,z_score.

struct Statistic {
    std::string name;
    double estimate = 0;
    double se = 0;
    double closed_form = 0;
    double z() const { return se > 0 ? (estimate - closed_form) / se : (estimate == closed_form ? 0 : 1e300); }
};
std::string csv(const std::vector<Statistic>& stats);

/// Marginals and the three pair probabilities from one two-type line run of
/// `sites` sites. Standard errors by batch means.
std::vector<Statistic> pair_statistics(double lambda, double mu, double q, std::size_t sites, Rng& rng,
                                       std::size_t batches = 100);

/// Fraction of adjacent pairs (cyclic) whose labels differ by at most `window`,
/// over n rings with L distinct types. Under the limit measure the event
/// |W_0 - W_1| <= h has the diagonal mass plus band_offdiagonal(h, q);
/// subtracting the latter (h = window / L) leaves an estimate of P(W_0 = W_1).
/// At finite L a convoy is spread over several labels, so the window must be
/// wide compared with that spread and narrow compared with L.
struct ClusterEstimate {
    Statistic stat;
    double raw = 0;
    double correction = 0;
    std::size_t window = 0;
};
double band_offdiagonal(double h, double q);
/// window = round(0.05 L).
std::size_t default_cluster_window(std::size_t L);
ClusterEstimate ring_cluster_estimate(std::size_t L, const OfferLaw& law, std::size_t n, std::size_t window, Rng& rng);
/// Several windows from the same samples.
std::vector<ClusterEstimate> ring_cluster_sweep(std::size_t L, const OfferLaw& law, std::size_t n,
                                                const std::vector<std::size_t>& windows, Rng& rng);

/// Branch probabilities of the convoy walk at height k: up, hold, record, down.
std::array<double, 4> convoy_branches(double x, double q, long k);
/// Indices i in 1..steps recorded by the walk.
std::vector<std::size_t> convoy_walk(double x, double q, std::size_t steps, Rng& rng);

}  // namespace asep

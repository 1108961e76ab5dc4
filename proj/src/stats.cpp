#include "asep/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace asep {

ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected_prob,
                         double min_expected) {
    if (observed.size() != expected_prob.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
    const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
    ChiSquare r;
    double pooled_obs = 0, pooled_exp = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * expected_prob[i];
        if (e <= 0) {
            if (observed[i] > 0) {
                r.statistic = std::numeric_limits<double>::infinity();
                r.p_value = 0;
                return r;
            }
            continue;
        }
        if (e < min_expected) {
            pooled_obs += observed[i];
            pooled_exp += e;
            continue;
        }
        r.statistic += (observed[i] - e) * (observed[i] - e) / e;
        ++r.bins;
    }
    if (pooled_exp > 0) {
        r.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++r.bins;
    }
    if (r.bins < 2) return r;
    r.dof = r.bins - 1;
    r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * r.statistic);
    return r;
}

ChiSquare chi_square_gof(const std::map<RingConfig, std::size_t>& observed, const Distribution<double>& law,
                         double min_expected) {
    std::vector<double> obs, prob;
    obs.reserve(law.size());
    prob.reserve(law.size());
    std::size_t matched = 0;
    for (const auto& [c, p] : law) {
        auto it = observed.find(c);
        const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        if (it != observed.end()) ++matched;
        obs.push_back(o);
        prob.push_back(p);
    }
    if (matched != observed.size()) {
        ChiSquare r;
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0;
        return r;
    }
    return chi_square_gof(obs, prob, min_expected);
}

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.n = xs.size();
    if (xs.empty()) return r;
    r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(r.n - 1) / static_cast<double>(r.n));
    return r;
}

}  // namespace asep

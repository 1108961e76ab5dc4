#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "asep/distribution.hpp"

namespace asep {

struct ChiSquare {
    double statistic = 0;
    std::size_t dof = 0;
    double p_value = 1;
    std::size_t bins = 0;
};

/// Goodness of fit of observed counts against probabilities. Cells with
/// expected count below min_expected are pooled into one cell. Observations
/// outside the support of `expected` make the statistic infinite.
ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected_prob,
                         double min_expected = 5.0);

ChiSquare chi_square_gof(const std::map<RingConfig, std::size_t>& observed, const Distribution<double>& law,
                         double min_expected = 5.0);

/// Mean and standard error of a sample.
struct MeanSe {
    double mean = 0;
    double se = 0;
    std::size_t n = 0;
};
MeanSe mean_se(const std::vector<double>& xs);

}  // namespace asep

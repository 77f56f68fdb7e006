#pragma once

#include <cstdint>
#include <vector>

namespace poolsim {

// Regularized upper incomplete gamma Q(a, x); series for x < a+1, continued
// fraction otherwise.
double gamma_q(double a, double x);

// Chi-square goodness-of-fit p-value for observed counts against a uniform
// expectation. df = bins - 1.
struct ChiSquareResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
ChiSquareResult chi_square_uniform(const std::vector<uint64_t>& counts);

} // namespace poolsim

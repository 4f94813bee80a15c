#include "nonlocal/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>

namespace nonlocal {

Estimate bernoulli_estimate(std::size_t successes, std::size_t n) {
    Estimate e;
    e.n = n;
    if (n == 0) return e;
    const double k = static_cast<double>(successes), nn = static_cast<double>(n);
    e.mean = k / nn;
    if (k < 10 || nn - k < 10) {
        e.exact = true;
        e.lower = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, nn - k + 1, 0.025);
        e.upper = successes == n ? 1.0 : boost::math::ibeta_inv(k + 1, nn - k, 0.975);
        e.half_width_95 = std::max(e.mean - e.lower, e.upper - e.mean);
        return e;
    }
    e.half_width_95 = 1.96 * std::sqrt(e.mean * (1 - e.mean) / nn);
    e.lower = std::max(0.0, e.mean - e.half_width_95);
    e.upper = std::min(1.0, e.mean + e.half_width_95);
    return e;
}

Estimate mean_estimate(double sum, double sum_sq, std::size_t n) {
    Estimate e;
    e.n = n;
    if (n == 0) return e;
    const double nn = static_cast<double>(n);
    e.mean = sum / nn;
    const double var = n > 1 ? std::max(0.0, (sum_sq - nn * e.mean * e.mean) / (nn - 1)) : 0.0;
    e.half_width_95 = 1.96 * std::sqrt(var / nn);
    e.lower = e.mean - e.half_width_95;
    e.upper = e.mean + e.half_width_95;
    return e;
}

double diff_half_width(const Estimate& a, const Estimate& b) {
    return std::sqrt(a.half_width_95 * a.half_width_95 + b.half_width_95 * b.half_width_95);
}

}  // namespace nonlocal

#pragma once

#include <cstddef>

namespace nonlocal {

struct Estimate {
    double mean = 0.0;
    double half_width_95 = 0.0;
    std::size_t n = 0;
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;  // Clopper-Pearson interval
};

// Binomial estimate; switches to the exact interval when fewer than ten
// successes or failures were observed.
Estimate bernoulli_estimate(std::size_t successes, std::size_t n);
// Normal-approximation estimate of a mean from running sums.
Estimate mean_estimate(double sum, double sum_sq, std::size_t n);

// Standard error of a difference of two independent estimates.
double diff_half_width(const Estimate& a, const Estimate& b);

}  // namespace nonlocal

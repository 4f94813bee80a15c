#pragma once

#include <functional>

namespace nonlocal {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

// Globally adaptive 15-point Gauss-Kronrod on [a,b]: the subinterval with the
// largest error estimate is bisected until the summed estimate drops below
// max(abs_tol, rel_tol*|value|) or max_intervals is reached.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                              double rel_tol = 1e-12, int max_intervals = 4000);

// As above but throws QuadratureError when not converged.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10,
                     double rel_tol = 1e-12, int max_intervals = 4000);

}  // namespace nonlocal

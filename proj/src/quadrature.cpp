#include "nonlocal/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "nonlocal/errors.hpp"

namespace nonlocal {

namespace {

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
    // the non-adaptive error estimate is reported on the reference interval
    return {a, b, v, err * 0.5 * (b - a)};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                              double rel_tol, int max_intervals) {
    QuadResult r;
    if (!(b > a)) return r;
    std::priority_queue<Piece> heap;
    Piece first = gk15(f, a, b);
    heap.push(first);
    double total = first.value;
    double total_err = first.error;
    int count = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        Piece left = gk15(f, worst.a, mid);
        Piece right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // resum to drop accumulated cancellation in the running totals
    total = 0.0;
    total_err = 0.0;
    std::vector<Piece> pieces;
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    for (const auto& p : pieces) {
        total += p.value;
        total_err += p.error;
    }
    r.value = total;
    r.error = total_err;
    r.converged = std::isfinite(total) && total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return r;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                     int max_intervals) {
    QuadResult r = integrate_adaptive(f, a, b, abs_tol, rel_tol, max_intervals);
    if (!r.converged) {
        std::ostringstream os;
        os << "error estimate " << r.error << " on [" << a << "," << b << "] exceeds tolerance " << abs_tol;
        throw QuadratureError(os.str());
    }
    return r;
}

}  // namespace nonlocal

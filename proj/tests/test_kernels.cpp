#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nonlocal/errors.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/rng.hpp"

using namespace nonlocal;
using namespace nonlocal::kernels;

namespace {

// Boost's adaptive Gauss-Kronrod, independent of the library's own driver.
template <class F>
double gk(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

KernelParams iso(int d, double gamma) {
    KernelParams p;
    p.d = d;
    p.alpha = p.beta = gamma;
    return p;
}

}  // namespace

TEST_CASE("m at a sample point") {
    const auto p = make_ce_params(0.5, 1.0);
    CHECK(eval_m(0.5, 0.5, p) == doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-15));
    CHECK(eval_m(0.0, 0.5, p) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(eval_m(1.5, 0.1, p) == 0.0);
    CHECK_THROWS_AS(eval_m(0.0, 0.0, p), DomainError);
}

TEST_CASE("marginals agree with quadrature of m") {
    const auto p = make_ce_params(0.5, 1.0);
    // high-precision reference value for n1(1/2) at (a,b) = (1/2,1)
    CHECK(marginal_n1(0.5, p) == doctest::Approx(8.524406311809197).epsilon(1e-13));
    for (double z : {0.07, 0.3, 0.5, 0.9}) {
        const double k1 = std::pow(z, p.p()), k2 = std::pow(z, 1.0 / p.p());
        auto f1 = [&](double s) { return eval_m(z, s, p); };
        auto f2 = [&](double s) { return eval_m(s, z, p); };
        const double q1 = 2 * (gk(f1, 0.0, k1) + gk(f1, k1, 1.0));
        const double q2 = 2 * (gk(f2, 0.0, k2) + gk(f2, k2, 1.0));
        CHECK(marginal_n1(z, p) == doctest::Approx(q1).epsilon(1e-10));
        CHECK(marginal_n1(-z, p) == doctest::Approx(q1).epsilon(1e-10));
        CHECK(marginal_n2(z, p) == doctest::Approx(q2).epsilon(1e-10));
    }
    CHECK_THROWS_AS(marginal_n1(0.0, p), DomainError);
}

TEST_CASE("derived orders") {
    const auto o = derived_orders(0.5, 1.0);
    CHECK(o.alpha == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(o.beta == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(derived_orders(1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(derived_orders(0.5, 2.0), ParameterError);
}

TEST_CASE("J1 inside, outside and across the cone") {
    const auto p = make_ce_params(1.0, 1.5);
    // both in V: m(h1,h2)
    CHECK(eval_J1({0.0, 0.5}, {0.1, 0.7}, p) == doctest::Approx(eval_m(0.1, 0.2, p)).epsilon(1e-13));
    // both outside V: swapped m
    CHECK(eval_J1({0.5, 0.0}, {0.7, 0.1}, p) == doctest::Approx(eval_m(0.1, 0.2, p)).epsilon(1e-13));
    // across: max(|h1|,|h2|)^{-2-a}
    CHECK(eval_J1({0.0, 0.05}, {0.1, 0.05}, p) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(eval_J1({0.0, 0.0}, {0.8, 0.8}, p) == 0.0);
    const auto J = make_ce_J1(p);
    CHECK(J({0.1, 0.3}, {0.4, 0.2}) == J({0.2, 0.4}, {0.3, 0.1}));
}

TEST_CASE("stable-like kernel values") {
    const auto J = make_stable_like(iso(1, 1.5));
    CHECK(J({0.0, 0.0}, {0.5, 0.0}) == doctest::Approx(std::pow(0.5, -2.5)).epsilon(1e-14));
    CHECK(J({0.3, 0.0}, {-0.2, 0.0}) == J({-0.2, 0.0}, {0.3, 0.0}));
    CHECK(J({0.0, 0.0}, {1.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(J({0.1, 0.0}, {0.1, 0.0}), DomainError);
    KernelParams bad = iso(1, 1.5);
    bad.alpha = 2.0;
    CHECK_THROWS_AS(make_stable_like(bad), ParameterError);
}

TEST_CASE("regularization replaces the short range") {
    KernelParams p = iso(1, 0.8);
    p.beta = 1.2;
    p.kappa2 = 2.0;
    const auto J = make_stable_like(p);
    const auto Jx = regularize(J, 0.25);
    CHECK(Jx({0, 0}, {0.1, 0}) == doctest::Approx(2.0 * std::pow(0.1, -2.2)).epsilon(1e-14));
    CHECK(Jx({0, 0}, {0.5, 0}) == J({0, 0}, {0.5, 0}));
}

TEST_CASE("killing rate in d=1 against the closed form") {
    const double g = 0.7;
    const auto J = make_stable_like(iso(1, g));
    const Ball B{{0.0, 0.0}, 1.0};
    // only the near side is within reach
    for (double x : {0.0, 0.3, -0.6}) {
        const double exact = 2.0 * (std::pow(1 - std::abs(x), -g) - 1) / g;
        CHECK(killing_rate(J, B, {x, 0.0}, 1e-10).value == doctest::Approx(exact).epsilon(1e-8));
    }
    CHECK_THROWS_AS(killing_rate(J, B, {1.2, 0.0}), DomainError);
}

TEST_CASE("killing rate in d=2 against quadrature at the centre") {
    const double g = 0.5;
    const auto J = make_stable_like(iso(2, g));
    // centre of B(0,1/2): 2 * 2 pi int_{1/2}^1 r^{-2-g} r dr
    const double exact = 2 * 2 * M_PI * (std::pow(0.5, -g) - 1) / g;
    CHECK(killing_rate(J, {{0, 0}, 0.5}, {0, 0}, 1e-9).value == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("validation accepts good kernels and flags asymmetric ones") {
    KernelParams p = iso(2, 0.8);
    p.beta = 1.3;
    p.kappa1 = 0.5;
    p.kappa2 = 2.0;
    CHECK(validate(make_random_sandwich(p, 11), 5000, 3).passed);
    CHECK(validate(make_ce_J1(make_ce_params(0.5, 1.0)), 5000, 3).passed);
    JumpKernel skew(iso(1, 1.0),
                    [](const Point& x, const Point& y) {
                        const double r = std::abs(x[0] - y[0]);
                        return r < 1 ? std::pow(r, -2.0) * (1.0 + 0.1 * (y[0] > x[0])) : 0.0;
                    },
                    "skew", "skew", false);
    const auto rep = validate(skew, 2000, 3);
    CHECK_FALSE(rep.passed);
    bool saw_symmetry = false;
    for (const auto& v : rep.violations) saw_symmetry = saw_symmetry || v.kind == "symmetry";
    CHECK(saw_symmetry);
}

TEST_CASE("counterexample sandwich constants bracket J1") {
    const auto p = make_ce_params(0.5, 1.0);
    const auto k = ce_sandwich_constants(p);
    RandomStream r(5, 0);
    for (int i = 0; i < 20000; ++i) {
        const Point x{r.uniform(-1, 1), r.uniform(-1, 1)};
        const Point y{x[0] + r.uniform(-0.7, 0.7), x[1] + r.uniform(-0.7, 0.7)};
        const double d = std::hypot(y[0] - x[0], y[1] - x[1]);
        if (d >= 1.0 || d == 0.0) continue;
        const double j = eval_J1(x, y, p);
        REQUIRE(j >= k.kappa1 * std::pow(d, -2 - p.a));
        REQUIRE(j <= k.kappa2 * std::pow(d, -2 - p.b));
    }
}

TEST_CASE("tabulated kernel interpolates linearly") {
    KernelParams p = iso(1, 1.0);
    p.kappa1 = 0.1;
    p.kappa2 = 100.0;
    const auto J = make_tabulated(p, {{-0.5, 4.0}, {0.0, 8.0}, {0.5, 4.0}});
    CHECK(J({0, 0}, {0.25, 0}) == doctest::Approx(6.0));
    CHECK(J({0, 0}, {-0.25, 0}) == doctest::Approx(6.0));
    CHECK(J({0, 0}, {0.75, 0}) == 0.0);
}

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>

#include "nonlocal/errors.hpp"
#include "nonlocal/jump_laws.hpp"
#include "nonlocal/processes.hpp"

using namespace nonlocal;
using namespace nonlocal::mc;

namespace {

template <class F>
double gk(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-11);
}

// 4 * int over [0,1]^2 minus [0,eps]^2 of m, nested quadrature split at the kink.
double m_mass(const kernels::CEKernelParams& p, double eps, double z1_lo = 0.0) {
    auto inner = [&](double z1) {
        auto f = [&](double z2) { return kernels::eval_m(z1, z2, p); };
        const double lo = z1 < eps ? eps : 0.0;
        const double k = std::pow(z1, p.p());
        if (k <= lo) return gk(f, lo, 1.0);
        return gk(f, lo, k) + gk(f, k, 1.0);
    };
    // inner() has kinks where z1^p crosses eps and at z1 = eps
    std::vector<double> cuts{z1_lo, std::pow(eps, 1.0 / p.p()), eps, 1.0};
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i] >= z1_lo && cuts[i + 1] > cuts[i]) s += gk(inner, cuts[i], cuts[i + 1]);
    return 4 * s;
}

}  // namespace

TEST_CASE("radial law rate and samples") {
    const RadialLaw law(1, {{2.0, 0.5, 0.01, 0.2}, {1.0, 1.5, 0.2, 1.0}});
    const double exact = 2 * 2.0 * (std::pow(0.01, -0.5) - std::pow(0.2, -0.5)) / 0.5 +
                         2 * 1.0 * (std::pow(0.2, -1.5) - 1.0) / 1.5;
    CHECK(law.total_rate() == doctest::Approx(exact).epsilon(1e-13));
    RandomStream r(1, 2);
    const int n = 100000;
    int beyond = 0, right = 0;
    for (int i = 0; i < n; ++i) {
        const Point h = law.sample(r);
        REQUIRE(std::abs(h[0]) > 0.01);
        REQUIRE(std::abs(h[0]) <= 1.0);
        beyond += std::abs(h[0]) > 0.2;
        right += h[0] > 0;
    }
    const double p_beyond = 2 * 1.0 * (std::pow(0.2, -1.5) - 1.0) / 1.5 / exact;
    CHECK(std::abs(double(beyond) / n - p_beyond) < 4 * std::sqrt(p_beyond * (1 - p_beyond) / n));
    CHECK(std::abs(double(right) / n - 0.5) < 4 * std::sqrt(0.25 / n));
    CHECK(law.density({0.1, 0}) == doctest::Approx(2.0 * std::pow(0.1, -1.5)));
}

TEST_CASE("inverse power cdf") {
    // P(r <= m) for density r^{-1-g} on (lo, hi]
    const double g = 0.8, lo = 0.1, hi = 1.0, m = 0.3;
    const double exact = (std::pow(lo, -g) - std::pow(m, -g)) / (std::pow(lo, -g) - std::pow(hi, -g));
    CHECK(inverse_power_cdf(exact, g, lo, hi) == doctest::Approx(m).epsilon(1e-12));
    CHECK(inverse_power_cdf(0.5, 0.0, 1.0, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("m jump law mass and samples") {
    const auto p = kernels::make_ce_params(0.5, 1.0);
    const double eps = 1e-2;
    const MJumpLaw law(p, eps);
    CHECK(law.total_rate() == doctest::Approx(m_mass(p, eps)).epsilon(1e-8));
    RandomStream r(4, 4);
    const int n = 200000;
    int far = 0;
    for (int i = 0; i < n; ++i) {
        const Point h = law.sample(r);
        REQUIRE(std::max(std::abs(h[0]), std::abs(h[1])) > eps);
        far += std::abs(h[0]) > 0.5;
    }
    const double pf = m_mass(p, eps, 0.5) / law.total_rate();
    CHECK(std::abs(double(far) / n - pf) < 4 * std::sqrt(pf * (1 - pf) / n));
    const MJumpLaw swapped(p, eps, true);
    CHECK(swapped.density({0.3, 0.1}) == law.density({0.1, 0.3}));
}

TEST_CASE("thinned J1 process stays consistent") {
    const auto proc = make_j1_process(kernels::make_ce_params(0.5, 1.0), 1e-2);
    const PathConfig cfg{0.05, 1e-2, 3, 1000000};
    const auto a = simulate_path(*proc, cfg, {0.01, 0.02}, 7);
    const auto b = simulate_path(*proc, cfg, {0.01, 0.02}, 7);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) CHECK(a.events[i].position == b.events[i].position);
    for (std::size_t i = 1; i < a.events.size(); ++i) CHECK(a.events[i].time > a.events[i - 1].time);
    CHECK_THROWS_AS(simulate_path(*proc, PathConfig{10.0, 1e-2, 3, 5}, {0.01, 0.02}, 7), EventCapError);
}

TEST_CASE("Meyer process with zero rate reproduces the base path") {
    auto base = std::make_shared<LevyProcess>(std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{1, 1.2, 0.01, 1}}));
    auto env = std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{1, -1, 0.5, 1}});
    const MeyerAddProcess meyer(base, [](const Point&) { return 0.0; }, [](const Point&, const Point&) { return 0.0; },
                                env);
    const PathConfig cfg{1.0, 0.01, 11, 1000000};
    const auto m = simulate_path(meyer, cfg, {0, 0}, 5);
    const auto b = simulate_path(*base, cfg, {0, 0}, MeyerAddProcess::base_stream(5, 0));
    REQUIRE(m.events.size() == b.events.size());
    for (std::size_t i = 0; i < m.events.size(); ++i) {
        CHECK(m.events[i].time == b.events[i].time);
        CHECK(m.events[i].position == b.events[i].position);
    }
}

TEST_CASE("Meyer construction adds a Poisson number of jumps") {
    auto base = std::make_shared<LevyProcess>(std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{1, 1.2, 0.01, 1}}));
    const double c = 2.0;
    // constant density c/|shell| on the shell (1/2, 1]
    auto env = std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{c, -1, 0.5, 1}});
    const MeyerAddProcess meyer(
        base, [c](const Point&) { return c; },
        [c](const Point& x, const Point& y) {
            const double r = std::abs(y[0] - x[0]);
            return r > 0.5 && r <= 1.0 ? c : 0.0;
        },
        env);
    const PathConfig cfg{1.5, 0.01, 13, 1000000};
    const int n = 4000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const auto p = simulate_path(meyer, cfg, {0, 0}, stream_id(99, i));
        double k = 0;
        for (const auto& e : p.events) k += e.tag == Tag::meyer_added;
        s += k;
        s2 += k * k;
    }
    // rate c on the shell of length 1 gives Poisson(c * |shell| * T)
    const double lambda = c * 1.0 * cfg.horizon;
    CHECK(std::abs(s / n - lambda) < 4 * std::sqrt(lambda / n));
    CHECK(std::abs(s2 / n - s * s / n / n - lambda) < 0.15 * lambda);
}

TEST_CASE("envelope violations are reported") {
    auto base = std::make_shared<LevyProcess>(std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{1, 1.2, 0.01, 1}}));
    auto env = std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{1, -1, 0.5, 1}});
    const MeyerAddProcess meyer(base, [](const Point&) { return 5.0; },
                                [](const Point&, const Point&) { return 3.0; }, env);
    CHECK_THROWS_AS(simulate_path(meyer, PathConfig{5.0, 0.01, 1, 1000000}, {0, 0}, 1), EnvelopeError);
}

TEST_CASE("grid rate interpolation and difference rate") {
    const GridRate lin(1, 2.0, 5, [](const Point& x) { return 3 + x[0]; });
    CHECK(lin({0.3, 0}) == doctest::Approx(3.3));
    CHECK(lin({5.0, 0}) == doctest::Approx(5.0));
    CHECK(lin.sup() == doctest::Approx(5.0));
    const GridRate bil(2, 1.0, 3, [](const Point& x) { return x[0] * x[1]; });
    CHECK(bil({0.5, 0.5}) == doctest::Approx(0.25));

    kernels::KernelParams p;
    p.alpha = p.beta = 1.2;
    const auto J = kernels::make_stable_like(p);
    const PairFn zero = [](const Point&, const Point&) { return 0.0; };
    const double inner = 0.25;
    CHECK(difference_rate(J, zero, {0.4, 0}, inner) ==
          doctest::Approx(2 * (std::pow(inner, -1.2) - 1) / 1.2).epsilon(1e-8));
}

TEST_CASE("parallel map is independent of the worker count") {
    const std::function<double(std::size_t)> f = [](std::size_t i) {
        RandomStream r(1, stream_id(5, i));
        return r.uniform();
    };
    CHECK(parallel_map<double>(100, 1, f) == parallel_map<double>(100, 7, f));
}

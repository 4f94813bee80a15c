#include <doctest.h>

#include <cmath>

#include "nonlocal/errors.hpp"
#include "nonlocal/experiments.hpp"

using namespace nonlocal;
using namespace nonlocal::mc;

TEST_CASE("bernoulli estimates") {
    const auto e = bernoulli_estimate(0, 100);
    CHECK(e.exact);
    CHECK(e.lower == 0.0);
    // Clopper-Pearson upper bound for 0/100: 1 - 0.025^{1/100}
    CHECK(e.upper == doctest::Approx(1 - std::pow(0.025, 0.01)).epsilon(1e-9));
    const auto w = bernoulli_estimate(500, 1000);
    CHECK(w.half_width_95 == doctest::Approx(1.96 * std::sqrt(0.25 / 1000)).epsilon(1e-12));
}

TEST_CASE("antisymmetric test function") {
    for (const Point x : {Point{0.001, 0.003}, Point{-0.02, 0.005}, Point{0.3, -0.1}}) {
        CHECK(antisymmetric_h(theta(x), 0.01) == doctest::Approx(-antisymmetric_h(x, 0.01)));
        CHECK(std::abs(antisymmetric_h(x, 0.01)) <= 1.0);
    }
    CHECK(antisymmetric_h({0.0, 0.02}, 0.01) == doctest::Approx(1.0));
    // damped linearly inside the radius
    CHECK(antisymmetric_h({0.0, 0.001}, 0.01) == doctest::Approx(0.1));
}

TEST_CASE("symmetric exit splits evenly") {
    auto proc = std::make_shared<LevyProcess>(
        std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{1, 0.8, 0.01, 1}}));
    const PathConfig cfg{50.0, 0.01, 21, 1000000};
    const Region D = [](const Point& x) { return std::abs(x[0]) < 0.5; };
    const Region A = [](const Point& x) { return x[0] > 0; };
    const auto e1 = estimate_exit_event(*proc, D, A, {0, 0}, 4000, cfg, 1, 1);
    const auto e4 = estimate_exit_event(*proc, D, A, {0, 0}, 4000, cfg, 4, 1);
    CHECK(e1.estimate.mean == e4.estimate.mean);
    CHECK(std::abs(e1.estimate.mean - 0.5) < 2 * e1.estimate.half_width_95);
    CHECK(e1.exhausted == 0);
    CHECK_THROWS_AS(estimate_exit_event(*proc, D, A, {0.7, 0}, 10, cfg, 1, 1), DomainError);
}

TEST_CASE("expectation of an odd function vanishes") {
    auto proc = std::make_shared<LevyProcess>(
        std::make_shared<RadialLaw>(1, std::vector<RadialPiece>{{1, 0.8, 0.01, 1}}));
    const PathConfig cfg{1.0, 0.01, 5, 1000000};
    const auto e = estimate_expectation(*proc, [](const Point& x) { return std::tanh(x[0]); }, 0.5, {0, 0}, 4000,
                                        cfg, 2, 3);
    CHECK(std::abs(e.mean) < 2.5 * e.half_width_95);
}

TEST_CASE("meyer rate check with few paths") {
    const auto rep = meyer_constant_rate_check(1.0, 1.0, 2000, PathConfig{1.0, 1e-2, 17, 1000000}, 2, 1);
    CHECK(rep.poisson_ok);
    CHECK(rep.bound_ok);
    CHECK(rep.lemma_bound == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("reduced counterexample run is worker independent") {
    CounterexampleConfig c;
    c.n_paths = 1000;
    c.n_search_paths = 1000;
    c.n_points = 3;
    c.t0_grid = {0.002};
    c.r_grid = {1e-3, 2e-3};
    c.sensitivity = false;
    c.seed = 3;
    c.workers = 1;
    const auto p = kernels::make_ce_params(0.5, 1.0);
    const auto a = counterexample_experiment(p, c);
    c.workers = 3;
    const auto b = counterexample_experiment(p, c);
    REQUIRE(a.points.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.points[i].h.estimate.mean == b.points[i].h.estimate.mean);
        CHECK(a.points[i].h_theta.estimate.mean == b.points[i].h_theta.estimate.mean);
        CHECK(a.points[i].h.estimate.mean > a.points[i].h_theta.estimate.mean);
    }
}

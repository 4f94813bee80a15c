#include <doctest.h>

#include <cmath>

#include "nonlocal/errors.hpp"
#include "nonlocal/lattice.hpp"

using namespace nonlocal;
using namespace nonlocal::lattice;

namespace {

kernels::JumpKernel stable(int d, double a, double b) {
    kernels::KernelParams p;
    p.d = d;
    p.alpha = a;
    p.beta = b;
    return kernels::make_stable_like(p);
}

Eigen::VectorXd wave(const Generator& G) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(G.size()));
    for (std::size_t i = 0; i < G.size(); ++i)
        f[static_cast<Eigen::Index>(i)] = std::sin(3 * G.positions[i][0]) + 0.5 * std::cos(G.positions[i][1]);
    return f;
}

}  // namespace

TEST_CASE("site counts and wrapping") {
    const Lattice t({1, 0.25, 2.0, true, 4096});
    CHECK(t.size() == 16);
    CHECK(t.site(0)[0] == -2.0);
    CHECK(t.index(-1) == t.index(15));
    const Lattice b({1, 0.25, 2.0, false, 4096});
    CHECK(b.size() == 17);
    CHECK_FALSE(b.index(-1).has_value());
    const Lattice t2({2, 0.5, 1.0, true, 4096});
    CHECK(t2.size() == 16);
    CHECK_THROWS_AS(Lattice({1, 1.0 / 1024, 4.0, true, 4096}), SizeError);
}

TEST_CASE("two-site chain") {
    // box with two nodes at -1/4 and 1/4: each jumps to the other at rate J(1/2) h
    const auto J = stable(1, 1.5, 1.5);
    const Lattice lat({1, 0.5, 0.25, false, 4096});
    REQUIRE(lat.size() == 2);
    const auto G = assemble(J, lat, Mode::conservative);
    const double q = std::pow(0.5, -2.5) * 0.5;
    const auto D = G.dense();
    CHECK(D(0, 1) == doctest::Approx(q).epsilon(1e-14));
    CHECK(D(0, 0) == doctest::Approx(-q).epsilon(1e-14));
}

TEST_CASE("generator structure") {
    const auto J = stable(1, 0.8, 1.2);
    const Lattice lat({1, 1.0 / 32, 2.0, true, 4096});
    const auto G = assemble(J, lat, Mode::conservative);
    const Eigen::MatrixXd D = G.dense();
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(G.apply(Eigen::VectorXd::Ones(D.rows())).cwiseAbs().maxCoeff() == 0.0);
    // translation invariance on the torus: every row is a shift of the first
    for (Eigen::Index i = 1; i < D.rows(); ++i)
        REQUIRE(D(i, (i + 3) % D.rows()) == doctest::Approx(D(0, 3)).epsilon(1e-14));
}

TEST_CASE("Dirichlet form identity") {
    for (bool torus : {false, true}) {
        const auto J = stable(1, 0.8, 1.2);
        const Lattice lat({1, 1.0 / 32, 2.0, torus, 4096});
        const auto G = assemble(J, lat, Mode::conservative);
        const Eigen::VectorXd f = wave(G);
        const double lhs = dirichlet_form(f, J, lat);
        const double rhs = -2.0 * G.cell_volume * f.dot(G.apply(f));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(G.pair_sum(f) == doctest::Approx(lhs).epsilon(1e-12));
    }
}

TEST_CASE("killed generator decomposition") {
    const auto J = stable(2, 0.8, 1.2);
    const Lattice lat({2, 1.0 / 8, 3.0, true, 4096});
    const Ball B{{0.0, 0.0}, 1.0};
    const auto G = assemble(J, lat, Mode::killed, B);
    for (const auto& x : G.positions) REQUIRE(B.contains(x, 2));
    const Eigen::VectorXd f = wave(G);
    const Eigen::VectorXd Lf = G.apply(f);
    const double quad = -G.cell_volume * f.dot(Lf);
    // pair_sum already carries the cell volume
    const double split = 0.5 * G.pair_sum(f) + (f.array().square() * G.leave.array()).sum() * G.cell_volume;
    CHECK(quad == doctest::Approx(split).epsilon(1e-12));
    CHECK(G.bilinear(f, f) == doctest::Approx(quad).epsilon(1e-12));
    // row sums of the killed generator equal minus the leaving rate
    const Eigen::VectorXd rows = G.apply(Eigen::VectorXd::Ones(f.size()));
    CHECK((rows + G.leave).cwiseAbs().maxCoeff() < 1e-9 * G.leave.maxCoeff());
    CHECK_THROWS_AS(assemble(J, lat, Mode::killed), ParameterError);
}

TEST_CASE("discrete killing rate approaches the continuum value") {
    const double g = 0.5;
    kernels::KernelParams p;
    p.alpha = p.beta = g;
    const auto J = kernels::make_stable_like(p);
    const Ball B{{0, 0}, 1.0};
    const Lattice lat({1, 1.0 / 512, 2.0, true, 4096});
    const auto G = assemble(J, lat, Mode::killed, B);
    const std::size_t mid = G.size() / 2;
    const double x = G.positions[mid + 200][0];
    const double cont = kernels::killing_rate(J, B, {x, 0.0}, 1e-10).value;
    CHECK(G.killing_rate()[static_cast<Eigen::Index>(mid + 200)] == doctest::Approx(cont).epsilon(0.02));
}

TEST_CASE("Poincare weight and ratio") {
    const auto J = stable(1, 0.8, 1.2);
    const Lattice lat({1, 1.0 / 32, 4.0, true, 4096});
    const Ball B{{0, 0}, 2.0};
    const auto G = assemble(J, lat, Mode::killed, B);
    const auto phi = poincare_weight(G, {0, 0}, 2.0, 1.2);
    CHECK(phi.sum() * G.cell_volume == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi.minCoeff() >= 0.0);
    // constants have zero variance
    CHECK(poincare_ratio(Eigen::VectorXd::Constant(phi.size(), 3.0), G, phi) == doctest::Approx(0.0));
    const auto rep = weighted_poincare_check(J, lat, B, 20, 1);
    CHECK(std::isfinite(rep.max_ratio));
    CHECK(rep.max_ratio > 0.0);
}

TEST_CASE("bump vectors do not depend on the spacing") {
    const Lattice coarse({1, 1.0 / 16, 2.0, true, 4096});
    const Lattice fine({1, 1.0 / 32, 2.0, true, 4096});
    const auto a = random_bump_vector(coarse, 9, 2);
    const auto b = random_bump_vector(fine, 9, 2);
    for (std::size_t i = 0; i < coarse.size(); ++i)
        REQUIRE(a[static_cast<Eigen::Index>(i)] == b[static_cast<Eigen::Index>(2 * i)]);
}

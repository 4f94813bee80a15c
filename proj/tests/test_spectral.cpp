#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "nonlocal/errors.hpp"
#include "nonlocal/spectral.hpp"

using namespace nonlocal;
using namespace nonlocal::spectral;

namespace {

kernels::JumpKernel stable(int d, double a, double b) {
    kernels::KernelParams p;
    p.d = d;
    p.alpha = a;
    p.beta = b;
    return kernels::make_stable_like(p);
}

}  // namespace

TEST_CASE("two-site heat kernel") {
    const lattice::Lattice lat({1, 0.5, 0.25, false, 4096});
    const auto G = lattice::assemble(stable(1, 1.5, 1.5), lat, lattice::Mode::conservative);
    const auto es = eigensolve(G);
    const double q = std::pow(0.5, -2.5) * 0.5;
    for (double t : {0.01, 0.1, 1.0}) {
        const auto p = heat_kernel(es, t);
        const double stay = 0.5 * (1 + std::exp(-2 * q * t)) / 0.5;
        const double move = 0.5 * (1 - std::exp(-2 * q * t)) / 0.5;
        CHECK(p.values(0, 0) == doctest::Approx(stay).epsilon(1e-12));
        CHECK(p.values(0, 1) == doctest::Approx(move).epsilon(1e-12));
    }
}

TEST_CASE("heat kernel matches the matrix exponential") {
    const lattice::Lattice lat({1, 1.0 / 16, 2.0, true, 4096});
    const auto G = lattice::assemble(stable(1, 0.8, 1.2), lat, lattice::Mode::conservative);
    const auto es = eigensolve(G);
    const Eigen::MatrixXd L = G.dense();
    for (double t : {0.05, 0.5}) {
        const Eigen::MatrixXd P = (t * L).exp() / lat.cell_volume();
        CHECK((heat_kernel(es, t).values - P).cwiseAbs().maxCoeff() < 1e-10 * P.cwiseAbs().maxCoeff());
    }
    CHECK(orthonormality_residual(es) < 1e-12);
    CHECK(es.eigenvalues[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("evolve and time derivative are consistent") {
    const lattice::Lattice lat({1, 1.0 / 16, 2.0, true, 4096});
    const auto G = lattice::assemble(stable(1, 0.8, 1.2), lat, lattice::Mode::conservative);
    const auto es = eigensolve(G);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(G.size()));
    u[5] = 1.0;
    u[9] = 2.0;
    const double t = 0.3;
    const Eigen::VectorXd direct = heat_kernel(es, t).values * u * lat.cell_volume();
    CHECK((evolve(es, u, t) - direct).cwiseAbs().maxCoeff() < 1e-12);
    const double dt = 1e-5;
    const Eigen::MatrixXd fd = (heat_kernel(es, t + dt).values - heat_kernel(es, t - dt).values) / (2 * dt);
    CHECK((time_derivative(es, t) - fd).cwiseAbs().maxCoeff() < 1e-5 * fd.cwiseAbs().maxCoeff());
    CHECK((heat_column(es, t, 7) - heat_kernel(es, t).values.col(7)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("killed heat kernel is dominated by the free one") {
    const auto J = stable(1, 0.8, 1.2);
    const lattice::Lattice lat({1, 1.0 / 16, 3.0, true, 4096});
    const auto free = eigensolve(lattice::assemble(J, lat, lattice::Mode::conservative));
    const Ball B{{0, 0}, 1.0};
    const auto Gk = lattice::assemble(J, lat, lattice::Mode::killed, B);
    const auto killed = eigensolve(Gk);
    for (double t : {0.1, 1.0}) {
        const auto pk = heat_kernel(killed, t).values;
        const auto pf = heat_kernel(free, t).values;
        for (std::size_t i = 0; i < Gk.size(); ++i)
            for (std::size_t j = 0; j < Gk.size(); ++j) {
                const auto I = static_cast<Eigen::Index>(lat.nearest(Gk.positions[i]));
                const auto K = static_cast<Eigen::Index>(lat.nearest(Gk.positions[j]));
                REQUIRE(pk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= pf(I, K) + 1e-12);
            }
        // mass is lost
        CHECK((pk.rowwise().sum() * lat.cell_volume()).maxCoeff() < 1.0);
    }
}

TEST_CASE("Chapman-Kolmogorov and row sums") {
    const lattice::Lattice lat({2, 0.25, 2.0, true, 4096});
    const auto es = eigensolve(lattice::assemble(stable(2, 0.8, 1.2), lat, lattice::Mode::conservative));
    CHECK(chapman_kolmogorov_error(es, 0.1, 0.3) < 1e-10);
    CHECK(max_row_sum_deviation(heat_kernel(es, 0.2), es.cell_volume) < 1e-10);
    CHECK(ondiag_max(es, 0.1) > ondiag_max(es, 0.2));
}

TEST_CASE("perturbation by a bounded kernel") {
    const lattice::Lattice lat({1, 1.0 / 16, 2.0, true, 4096});
    const auto rep =
        perturbation_bound_check(stable(1, 0.8, 1.2), kernels::make_shell(1, 2.0, 0.5, 1.0), lat, {0.1, 0.5, 1.0});
    CHECK(rep.pass);
    CHECK(rep.j1_sup == doctest::Approx(2.0));
    for (std::size_t i = 0; i < rep.times.size(); ++i) CHECK(rep.max_diff[i] <= rep.bound[i] + 1e-8);
}

TEST_CASE("log entropy derivative") {
    const auto J = stable(1, 0.8, 1.2);
    const lattice::Lattice lat({1, 1.0 / 32, 2.0, true, 4096});
    const auto G = lattice::assemble(J, lat, lattice::Mode::killed, Ball{{0, 0}, 1.0});
    const auto es = eigensolve(G);
    const auto phi = lattice::poincare_weight(G, {0, 0}, 1.0, 1.2);
    const auto rep = log_entropy_check(es, G, es.state_at({0, 0}), phi, {0.5, 1.0});
    CHECK(rep.max_rel_err < 1e-6);
    for (bool b : rep.positive) CHECK(b);
}

TEST_CASE("mosco errors shrink with xi") {
    const auto J = stable(1, 0.8, 1.2);
    const lattice::Lattice lat({1, 1.0 / 32, 2.0, true, 4096});
    const auto f = lattice::random_bump_vector(lat, 1, 0);
    const auto rep = mosco_check(J, {0.5, 0.25, 0.125}, lat, f, 0.5, 20, 1);
    CHECK(rep.strictly_decreasing);
    CHECK(rep.form_monotone);
    CHECK(rep.floor > 0.0);
    CHECK_THROWS_AS(mosco_check(J, {0.01}, lat, f, 0.5, 5, 1), ParameterError);
}

TEST_CASE("harnack ratios are finite") {
    const auto J = stable(1, 0.8, 1.2);
    const lattice::Lattice lat({1, 1.0 / 16, 4.0, true, 4096});
    const auto es = eigensolve(lattice::assemble(J, lat, lattice::Mode::killed, Ball{{0, 0}, 4.0}));
    const auto rep = harnack_ratio_check(es, {0, 0}, 1.0, 1.0, 5, 3);
    CHECK(rep.rho.size() + rep.degenerate == 5);
    for (double r : rep.rho) CHECK((std::isfinite(r) && r > 0.0));
}

#include "nonlocal/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nonlocal/errors.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal::spectral {

namespace {

struct LineFit {
    double slope, intercept;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::vector<double> geomspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1)));
    return out;
}

}  // namespace

std::size_t EigenSystem::state_at(const Point& x) const {
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (std::abs(positions[i][0] - x[0]) < 1e-12 && std::abs(positions[i][1] - x[1]) < 1e-12) return i;
    throw DomainError("no lattice state at the requested point");
}

EigenSystem eigensolve(const lattice::Generator& G, double residual_tol) {
    const Eigen::MatrixXd L = G.dense();
    const Eigen::MatrixXd A = -L;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigen-solve did not converge");
    EigenSystem es;
    es.eigenvalues = solver.eigenvalues();
    Eigen::MatrixXd V = solver.eigenvectors();
    for (Eigen::Index k = 0; k < V.cols(); ++k) {
        const double cut = 1e-12 * V.col(k).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < V.rows(); ++i)
            if (std::abs(V(i, k)) > cut) {
                if (V(i, k) < 0) V.col(k) *= -1.0;
                break;
            }
    }
    const Eigen::MatrixXd R = L * V + V * es.eigenvalues.asDiagonal();
    es.max_residual = R.cwiseAbs().maxCoeff();
    if (!(es.max_residual <= residual_tol)) {
        std::ostringstream os;
        os << "eigen residual " << es.max_residual << " exceeds " << residual_tol;
        throw ConvergenceError(os.str());
    }
    es.vectors = V / std::sqrt(G.cell_volume);
    es.cell_volume = G.cell_volume;
    es.d = G.d;
    es.mode = G.mode;
    es.positions = G.positions;
    es.fingerprint = G.fingerprint();
    if (G.mode == lattice::Mode::killed && !(es.eigenvalues[0] > 0.0))
        throw InvariantError("killed generator has a nonpositive bottom eigenvalue");
    return es;
}

double orthonormality_residual(const EigenSystem& es) {
    const Eigen::MatrixXd M = es.vectors.transpose() * es.vectors * es.cell_volume;
    return (M - Eigen::MatrixXd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff();
}

HeatKernel heat_kernel(const EigenSystem& es, double t) {
    if (!(t > 0.0)) throw ParameterError("heat kernel needs t > 0");
    const Eigen::VectorXd w = (-es.eigenvalues.array() * t).exp();
    HeatKernel hk;
    hk.t = t;
    hk.values = es.vectors * w.asDiagonal() * es.vectors.transpose();
    const double low = hk.values.minCoeff();
    if (low < -1e-10) {
        std::ostringstream os;
        os << "heat kernel entry " << low << " below -1e-10 at t=" << t;
        throw InvariantError(os.str());
    }
    return hk;
}

Eigen::MatrixXd time_derivative(const EigenSystem& es, double t) {
    const Eigen::VectorXd w = -(es.eigenvalues.array() * (-es.eigenvalues.array() * t).exp()).matrix();
    return es.vectors * w.asDiagonal() * es.vectors.transpose();
}

Eigen::VectorXd heat_column(const EigenSystem& es, double t, std::size_t j) {
    const Eigen::VectorXd w = (-es.eigenvalues.array() * t).exp();
    const Eigen::VectorXd c = w.cwiseProduct(es.vectors.row(static_cast<Eigen::Index>(j)).transpose());
    return es.vectors * c;
}

Eigen::VectorXd evolve(const EigenSystem& es, const Eigen::VectorXd& u0, double t) {
    const Eigen::VectorXd c = es.vectors.transpose() * u0 * es.cell_volume;
    const Eigen::VectorXd w = (-es.eigenvalues.array() * t).exp();
    return es.vectors * w.cwiseProduct(c);
}

double chapman_kolmogorov_error(const EigenSystem& es, double t, double s) {
    const HeatKernel a = heat_kernel(es, t), b = heat_kernel(es, s), c = heat_kernel(es, t + s);
    return (c.values - a.values * b.values * es.cell_volume).cwiseAbs().maxCoeff();
}

double max_row_sum_deviation(const HeatKernel& p, double cell_volume) {
    return ((p.values.rowwise().sum() * cell_volume).array() - 1.0).abs().maxCoeff();
}

double ondiag_max(const EigenSystem& es, double t) {
    const Eigen::VectorXd w = (-es.eigenvalues.array() * t).exp();
    double best = 0.0;
    for (Eigen::Index i = 0; i < es.vectors.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) s += w[k] * es.vectors(i, k) * es.vectors(i, k);
        best = std::max(best, s);
    }
    return best;
}

DecayReport ondiag_decay_check(const EigenSystem& es, const DecayOptions& opt) {
    DecayReport rep;
    rep.check = "ondiag_decay";
    const double lambda2 = es.size() > 1 ? es.eigenvalues[1] : es.eigenvalues[0];
    rep.window_lo = 10.0 * std::pow(opt.h, opt.beta);
    rep.window_hi = std::min(3.0 / lambda2, std::pow(opt.length, opt.beta) / opt.kappa2);
    if (!(rep.window_hi > rep.window_lo)) throw ParameterError("decay fit window is empty at this resolution");
    rep.times = geomspace(rep.window_lo, rep.window_hi, opt.n_points);
    for (double t : rep.times) rep.values.push_back(ondiag_max(es, t));
    rep.strictly_decreasing = true;
    for (std::size_t i = 1; i < rep.values.size(); ++i)
        if (!(rep.values[i] < rep.values[i - 1])) rep.strictly_decreasing = false;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        lx.push_back(std::log(rep.times[i]));
        ly.push_back(std::log(rep.values[i]));
    }
    const LineFit fit = least_squares(lx, ly);
    rep.slope = fit.slope;
    rep.target_slope = -es.d / opt.alpha;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        rep.residuals.push_back(ly[i] - (fit.intercept + fit.slope * lx[i]));
        rep.fitted_constant = std::max(rep.fitted_constant, rep.values[i] * std::pow(rep.times[i], es.d / opt.alpha));
    }
    rep.pass = rep.strictly_decreasing && std::isfinite(rep.fitted_constant) &&
               rep.slope >= rep.target_slope - opt.slope_tol;
    return rep;
}

LowerBoundReport killed_lower_bound_check(const EigenSystem& es, const Point& y0, double R, double delta, double T,
                                          int n_times, double t_profile, double profile_fraction) {
    LowerBoundReport rep;
    rep.check = "killed_lower_bound";
    rep.window_lo = delta;
    rep.window_hi = T;
    std::vector<Eigen::Index> inner;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const Point& x = es.positions[i];
        if (norm2({x[0] - y0[0], x[1] - y0[1]}, es.d) <= 0.5625 * R * R) inner.push_back(static_cast<Eigen::Index>(i));
    }
    rep.times = geomspace(delta, T, n_times);
    rep.positive = true;
    for (double t : rep.times) {
        const HeatKernel p = heat_kernel(es, t);
        double m = std::numeric_limits<double>::infinity();
        for (auto i : inner)
            for (auto j : inner) m = std::min(m, p.values(i, j));
        rep.minima.push_back(m);
        if (!(m > 0.0)) rep.positive = false;
    }
    const std::size_t j0 = es.state_at(y0);
    const Eigen::VectorXd col = heat_column(es, t_profile, j0);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const Point& x = es.positions[i];
        if (x[0] <= y0[0] || (es.d == 2 && x[1] != y0[1])) continue;
        const double dist = R - (x[0] - y0[0]);
        if (dist <= 0 || dist > profile_fraction * R) continue;
        rep.profile_dist.push_back(dist);
        rep.profile_values.push_back(col[static_cast<Eigen::Index>(i)]);
        lx.push_back(std::log(dist));
        ly.push_back(std::log(col[static_cast<Eigen::Index>(i)]));
    }
    const double scale = col.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < es.size(); ++i) {
        const Point& x = es.positions[i];
        const Point mirror{2 * y0[0] - x[0], x[1]};
        for (std::size_t k = 0; k < es.size(); ++k)
            if (std::abs(es.positions[k][0] - mirror[0]) < 1e-12 && std::abs(es.positions[k][1] - mirror[1]) < 1e-12) {
                rep.mirror_error = std::max(rep.mirror_error,
                                            std::abs(col[static_cast<Eigen::Index>(i)] - col[static_cast<Eigen::Index>(k)]) / scale);
                break;
            }
    }
    if (lx.size() >= 2) {
        const LineFit fit = least_squares(lx, ly);
        rep.slope = fit.slope;
        for (std::size_t i = 0; i < lx.size(); ++i) rep.residuals.push_back(ly[i] - (fit.intercept + fit.slope * lx[i]));
        rep.fitted_constant = std::exp(fit.intercept);
    }
    rep.values = rep.minima;
    rep.pass = rep.positive;
    return rep;
}

Eigen::VectorXd random_nonnegative_data(const EigenSystem& es, const Point& x0, double radius, std::uint64_t seed,
                                        std::uint64_t trial) {
    RandomStream rng(seed, stream_id(0x6861726eull, trial));
    const int pieces = 1 + static_cast<int>(rng.below(4));
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(es.size()));
    for (int p = 0; p < pieces; ++p) {
        Point c{x0[0] + rng.uniform(-0.9, 0.9) * radius, x0[1]};
        if (es.d == 2) {
            const double r = 0.9 * radius * std::sqrt(rng.uniform()), th = rng.uniform(0, 2 * M_PI);
            c = {x0[0] + r * std::cos(th), x0[1] + r * std::sin(th)};
        }
        const double w = rng.uniform(0.2, 2.0), a = rng.uniform(0.1, 1.0);
        for (std::size_t i = 0; i < es.size(); ++i) {
            const Point& x = es.positions[i];
            if (norm2({x[0] - c[0], x[1] - c[1]}, es.d) < w * w) u[static_cast<Eigen::Index>(i)] += a;
        }
    }
    return u;
}

double harnack_ratio(const EigenSystem& es, const Eigen::VectorXd& u0, const Point& x0, double R, double T,
                     bool swapped, int n_times) {
    std::vector<Eigen::Index> inner;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const Point& x = es.positions[i];
        if (norm2({x[0] - x0[0], x[1] - x0[1]}, es.d) < R * R) inner.push_back(static_cast<Eigen::Index>(i));
    }
    double sup_early = 0.0, inf_late = std::numeric_limits<double>::infinity();
    double sup_late = 0.0, inf_early = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_times; ++k) {
        const double s = double(k) / (n_times - 1);
        const Eigen::VectorXd a = evolve(es, u0, T * (1 + s));
        const Eigen::VectorXd b = evolve(es, u0, T * (3 + s));
        for (auto i : inner) {
            sup_early = std::max(sup_early, a[i]);
            inf_early = std::min(inf_early, a[i]);
            sup_late = std::max(sup_late, b[i]);
            inf_late = std::min(inf_late, b[i]);
        }
    }
    if (swapped) return inf_early > 1e-300 ? sup_late / inf_early : std::numeric_limits<double>::infinity();
    return inf_late > 1e-300 ? sup_early / inf_late : std::numeric_limits<double>::infinity();
}

HarnackReport harnack_ratio_check(const EigenSystem& es, const Point& x0, double R, double T, std::size_t trials,
                                  std::uint64_t rng_seed) {
    HarnackReport rep;
    for (std::size_t t = 0; t < trials; ++t) {
        const Eigen::VectorXd u0 = random_nonnegative_data(es, x0, 4 * R, rng_seed, t);
        const double rho = harnack_ratio(es, u0, x0, R, T, false);
        if (!std::isfinite(rho)) {
            ++rep.degenerate;
            continue;
        }
        rep.rho.push_back(rho);
        rep.max_rho = std::max(rep.max_rho, rho);
        const double sw = harnack_ratio(es, u0, x0, R, T, true);
        rep.rho_swapped.push_back(sw);
        rep.max_rho_swapped = std::max(rep.max_rho_swapped, sw);
    }
    return rep;
}

MoscoReport mosco_check(const kernels::JumpKernel& J, const std::vector<double>& xi_sequence,
                        const lattice::Lattice& lat, const Eigen::VectorXd& f, double t, std::size_t form_trials,
                        std::uint64_t rng_seed) {
    for (std::size_t k = 0; k < xi_sequence.size(); ++k) {
        if (!(xi_sequence[k] > lat.spacing())) throw ParameterError("xi must exceed the lattice spacing");
        if (k > 0 && !(xi_sequence[k] < xi_sequence[k - 1])) throw ParameterError("xi sequence must decrease");
    }
    MoscoReport rep;
    rep.xi = xi_sequence;
    rep.form_trials = form_trials;
    const lattice::Generator G = lattice::assemble(J, lat, lattice::Mode::conservative);
    const Eigen::VectorXd ref = evolve(eigensolve(G), f, t);
    std::vector<Eigen::VectorXd> tests;
    for (std::size_t k = 0; k < form_trials; ++k) tests.push_back(lattice::random_bump_vector(lat, rng_seed, k));
    std::vector<double> base_forms;
    for (const auto& u : tests) base_forms.push_back(G.pair_sum(u));
    auto error_at = [&](double xi, bool check_forms) {
        const lattice::Generator Gx = lattice::assemble(kernels::regularize(J, xi), lat, lattice::Mode::conservative);
        if (check_forms)
            for (std::size_t k = 0; k < tests.size(); ++k)
                if (!(Gx.pair_sum(tests[k]) >= base_forms[k])) rep.form_monotone = false;
        const Eigen::VectorXd v = evolve(eigensolve(Gx), f, t);
        return std::sqrt((v - ref).squaredNorm() * lat.cell_volume());
    };
    rep.form_monotone = true;
    for (double xi : xi_sequence) rep.errors.push_back(error_at(xi, true));
    rep.floor = error_at(lat.spacing() * (1 + 1e-12), false);
    rep.strictly_decreasing = true;
    for (std::size_t k = 1; k < rep.errors.size(); ++k)
        if (!(rep.errors[k] < rep.errors[k - 1])) rep.strictly_decreasing = false;
    rep.below_floor_multiple = !rep.errors.empty() && rep.errors.back() < 10.0 * rep.floor;
    return rep;
}

PerturbReport perturbation_bound_check(const kernels::JumpKernel& J0, const kernels::JumpKernel& J1,
                                       const lattice::Lattice& lat, const std::vector<double>& t_grid) {
    PerturbReport rep;
    const lattice::Generator G1 = lattice::assemble(J1, lat, lattice::Mode::conservative);
    for (int k = 0; k < G1.offdiag.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(G1.offdiag, k); it; ++it)
            rep.j1_sup = std::max(rep.j1_sup, it.value() / lat.cell_volume());
    const EigenSystem e0 = eigensolve(lattice::assemble(J0, lat, lattice::Mode::conservative));
    const EigenSystem e = eigensolve(lattice::assemble(kernels::sum_kernel(J0, J1), lat, lattice::Mode::conservative));
    rep.pass = true;
    for (double t : t_grid) {
        const double diff = (heat_kernel(e, t).values - heat_kernel(e0, t).values).maxCoeff();
        rep.times.push_back(t);
        rep.max_diff.push_back(diff);
        rep.bound.push_back(t * rep.j1_sup);
        if (!(diff <= t * rep.j1_sup + 1e-8)) rep.pass = false;
    }
    return rep;
}

double log_entropy(const EigenSystem& es, std::size_t y0, const Eigen::VectorXd& phi, double t) {
    const Eigen::VectorXd p = heat_column(es, t, y0);
    double g = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) g += phi[i] * std::log(p[i]);
    return g * es.cell_volume;
}

EntropyReport log_entropy_check(const EigenSystem& es, const lattice::Generator& killed, std::size_t y0,
                                const Eigen::VectorXd& phi, const std::vector<double>& t_grid) {
    EntropyReport rep;
    for (double t : t_grid) {
        const Eigen::VectorXd p = heat_column(es, t, y0);
        const bool pos = p.minCoeff() > 0.0;
        rep.times.push_back(t);
        rep.positive.push_back(pos);
        if (!pos) {
            rep.fd.push_back(std::nan(""));
            rep.form.push_back(std::nan(""));
            rep.rel_err.push_back(std::nan(""));
            continue;
        }
        const double eps = 1e-5 * t;
        const double fd = (log_entropy(es, y0, phi, t + eps) - log_entropy(es, y0, phi, t - eps)) / (2 * eps);
        const Eigen::VectorXd g = phi.cwiseQuotient(p);
        const double form = -killed.bilinear(p, g);
        const double rel = std::abs(fd - form) / std::abs(form);
        rep.fd.push_back(fd);
        rep.form.push_back(form);
        rep.rel_err.push_back(rel);
        rep.max_rel_err = std::max(rep.max_rel_err, rel);
    }
    return rep;
}

}  // namespace nonlocal::spectral

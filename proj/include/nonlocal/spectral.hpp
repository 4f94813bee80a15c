#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "nonlocal/kernels.hpp"
#include "nonlocal/lattice.hpp"

namespace nonlocal::spectral {

struct EigenSystem {
    Eigen::VectorXd eigenvalues;  // of -L, nondecreasing
    Eigen::MatrixXd vectors;      // columns psi_i with sum psi_i psi_j h^d = delta_ij
    double cell_volume = 1.0;
    int d = 1;
    lattice::Mode mode = lattice::Mode::conservative;
    std::vector<Point> positions;
    double max_residual = 0.0;
    std::string fingerprint;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
    // Index of the state at exactly this position, or throws.
    std::size_t state_at(const Point& x) const;
};

// Dense symmetric solve of -L. Eigenvectors are sign-normalised so that the
// first component above 1e-12 of the column maximum is positive.
EigenSystem eigensolve(const lattice::Generator& G, double residual_tol = 1e-8);

double orthonormality_residual(const EigenSystem& es);

struct HeatKernel {
    double t = 0.0;
    Eigen::MatrixXd values;  // density w.r.t. h^d counting measure
};

// Throws InvariantError for entries below -1e-10.
HeatKernel heat_kernel(const EigenSystem& es, double t);
Eigen::MatrixXd time_derivative(const EigenSystem& es, double t);
// p(t, ., x_j)
Eigen::VectorXd heat_column(const EigenSystem& es, double t, std::size_t j);
// (P_t u)(x) = sum_y p(t,x,y) u(y) h^d
Eigen::VectorXd evolve(const EigenSystem& es, const Eigen::VectorXd& u0, double t);

double chapman_kolmogorov_error(const EigenSystem& es, double t, double s);
double max_row_sum_deviation(const HeatKernel& p, double cell_volume);

struct DecayOptions {
    double alpha = 0.8;  // exponent of the bound C t^{-d/alpha}
    double beta = 1.2;   // small-scale index, sets t_min = 10 h^beta
    double kappa2 = 1.0;
    double h = 1.0 / 128;
    double length = 0.1;  // t_max = length^beta / kappa2, capped by 3/lambda_2
    int n_points = 12;
    double slope_tol = 0.15;
};

struct FitReport {
    std::string check;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<double> times;
    std::vector<double> values;
    double fitted_constant = 0.0;
    double slope = 0.0;
    std::vector<double> residuals;
    bool pass = false;
};

struct DecayReport : FitReport {
    bool strictly_decreasing = false;
    double target_slope = 0.0;  // -d/alpha
};

double ondiag_max(const EigenSystem& es, double t);
DecayReport ondiag_decay_check(const EigenSystem& es, const DecayOptions& opt);

struct LowerBoundReport : FitReport {
    std::vector<double> minima;  // m(t) over B(y0, 3R/4)^2
    bool positive = false;
    std::vector<double> profile_dist;
    std::vector<double> profile_values;
    double mirror_error = 0.0;
};

// Positivity over [delta, T] and boundary profile slope at t_profile over
// points with dist(x, dB) <= profile_fraction * R on the ray along axis 0.
LowerBoundReport killed_lower_bound_check(const EigenSystem& es, const Point& y0, double R, double delta, double T,
                                          int n_times = 8, double t_profile = 1.0, double profile_fraction = 0.25);

struct HarnackReport {
    std::vector<double> rho;          // per trial, Q- before Q+
    std::vector<double> rho_swapped;  // Q+ before Q-
    double max_rho = 0.0;
    double max_rho_swapped = 0.0;
    std::size_t degenerate = 0;
};

Eigen::VectorXd random_nonnegative_data(const EigenSystem& es, const Point& x0, double radius, std::uint64_t seed,
                                        std::uint64_t trial);
double harnack_ratio(const EigenSystem& es, const Eigen::VectorXd& u0, const Point& x0, double R, double T,
                     bool swapped = false, int n_times = 6);
HarnackReport harnack_ratio_check(const EigenSystem& es, const Point& x0, double R, double T, std::size_t trials,
                                  std::uint64_t rng_seed);

struct MoscoReport {
    std::vector<double> xi;
    std::vector<double> errors;
    double floor = 0.0;  // error at xi = h
    bool strictly_decreasing = false;
    bool below_floor_multiple = false;
    bool form_monotone = false;
    std::size_t form_trials = 0;
};

MoscoReport mosco_check(const kernels::JumpKernel& J, const std::vector<double>& xi_sequence,
                        const lattice::Lattice& lat, const Eigen::VectorXd& f, double t,
                        std::size_t form_trials = 100, std::uint64_t rng_seed = 1);

struct PerturbReport {
    std::vector<double> times;
    std::vector<double> max_diff;
    std::vector<double> bound;
    double j1_sup = 0.0;
    bool pass = false;
};

PerturbReport perturbation_bound_check(const kernels::JumpKernel& J0, const kernels::JumpKernel& J1,
                                       const lattice::Lattice& lat, const std::vector<double>& t_grid);

struct EntropyReport {
    std::vector<double> times;
    std::vector<double> fd;
    std::vector<double> form;
    std::vector<double> rel_err;
    std::vector<bool> positive;
    double max_rel_err = 0.0;
};

double log_entropy(const EigenSystem& es, std::size_t y0, const Eigen::VectorXd& phi, double t);
EntropyReport log_entropy_check(const EigenSystem& es, const lattice::Generator& killed, std::size_t y0,
                                const Eigen::VectorXd& phi, const std::vector<double>& t_grid);

}  // namespace nonlocal::spectral

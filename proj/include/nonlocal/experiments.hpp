#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonlocal/kernels.hpp"
#include "nonlocal/processes.hpp"
#include "nonlocal/stats.hpp"

namespace nonlocal::mc {

// Open square D(r) = (-r, r)^2.
inline bool in_square(const Point& x, double r) { return std::abs(x[0]) < r && std::abs(x[1]) < r; }

struct ExitEstimate {
    Estimate estimate;
    std::size_t exhausted = 0;
    double exhausted_fraction = 0.0;
};

// P^start(X_sigma in A), sigma the first event landing outside D. Paths that
// reach the horizon inside D are excluded from the estimate and counted.
ExitEstimate estimate_exit_event(const Process& proc, const Region& D, const Region& A, const Point& start,
                                 std::size_t n_paths, const PathConfig& cfg, unsigned workers, std::uint64_t tag);

// E^start[H(X_t)] over n_paths.
Estimate estimate_expectation(const Process& proc, const RateFn& H, double t, const Point& start,
                              std::size_t n_paths, const PathConfig& cfg, unsigned workers, std::uint64_t tag);

struct CounterexampleConfig {
    double eps = 1e-3;
    std::size_t n_paths = 20000;
    std::size_t n_search_paths = 20000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    int n_points = 8;
    std::vector<double> t0_grid;  // defaults to a log grid when empty
    std::vector<double> r_grid;   // defaults to eps * 2^k when empty
    double horizon = 10.0;
    std::size_t max_events = 1000000;
    bool sensitivity = true;  // rerun the last point at eps/2
};

struct SearchCandidate {
    double t0;
    double r;
    Estimate p_exit;    // P^0(tau_{V(1/3)} <= t0)
    Estimate p_inside;  // P^0(Y_{t0} in D(r))
};

struct PointResult {
    int n;
    Point x;
    ExitEstimate h;           // P^x(X_sigma in V(1/2))
    ExitEstimate h_theta;     // P^{Theta x}(X_sigma in V(1/2))
    ExitEstimate h_mirrored;  // P^{Theta x}(X_sigma in Theta V(1/2)), independent stream
    double gap;
    double gap_half_width;
    bool qualifies;
    bool equivariant;
};

struct CounterexampleReport {
    bool search_succeeded = false;
    SearchCandidate chosen;
    std::vector<SearchCandidate> candidates;
    std::vector<PointResult> points;
    std::size_t qualifying = 0;
    bool monotone_decay = false;
    bool equivariant = true;
    double max_exhausted_fraction = 0.0;
    bool pass = false;
    // eps/2 rerun at the deepest point
    double sensitivity_eps = 0.0;
    Estimate sensitivity_h;
    Estimate sensitivity_h_theta;
};

CounterexampleReport counterexample_experiment(const kernels::CEKernelParams& p, const CounterexampleConfig& cfg);

// Antisymmetric test function with H = 1 on V(1/3) outside D(r).
double antisymmetric_h(const Point& x, double r);

struct SemigroupPoint {
    Point x;
    Estimate at_x;
    Estimate at_theta;
    double gap;
    double gap_half_width;
    bool antisymmetric;
};

struct SemigroupReport {
    double t0 = 0.0;
    double r = 0.0;
    std::vector<SemigroupPoint> points;
    double min_gap_lower = 0.0;  // min over points of gap - half width
    double sweep_range = 0.0;
    bool pass = false;
};

SemigroupReport semigroup_discontinuity_check(const kernels::CEKernelParams& p, double t0, double r,
                                              const std::vector<Point>& points, const CounterexampleConfig& cfg,
                                              double gap_threshold = 0.4);

struct DeviationReport {
    std::vector<double> r_grid;
    std::vector<double> t_grid;
    std::vector<std::vector<Estimate>> sup_exceed;    // [r][t]: P(sup_{s<=t}|X_s-x| > r)
    std::vector<std::vector<Estimate>> point_exceed;  // [r][t]: P(|X_t - x| > r)
    bool t1_found = false;
    double t1 = 0.0;
    double doubling_lhs = 0.0;
    double doubling_rhs = 0.0;
    bool doubling_holds = false;
    std::vector<double> decay_slope;  // per t, slope of log P_sup in r
    bool monotone_in_r = true;
};

DeviationReport deviation_probability_checks(const Process& proc, const Point& x, const std::vector<double>& r_grid,
                                             const std::vector<double>& t_grid, std::size_t n_paths,
                                             const PathConfig& cfg, unsigned workers);

struct MeyerCountReport {
    double rate = 0.0;
    double horizon = 0.0;
    Estimate added_count;
    Estimate no_add_fraction;
    double poisson_z = 0.0;  // (mean - cT) / sqrt(cT/n)
    double lemma_bound = 0.0;  // exp(-T sup rate)
    bool poisson_ok = false;
    bool bound_ok = false;
};

// Meyer augmentation of an isotropic Levy base by a constant-rate shell
// kernel c 1(r_in < |h| <= r_out) / |shell|.
MeyerCountReport meyer_constant_rate_check(double c, double T, std::size_t n_paths, const PathConfig& cfg,
                                           unsigned workers, int d = 1);

}  // namespace nonlocal::mc

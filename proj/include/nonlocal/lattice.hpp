#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonlocal/kernels.hpp"

namespace nonlocal::lattice {

struct LatticeSpec {
    int d = 1;
    double h = 1.0 / 64.0;
    double half_width = 4.0;  // box [-L, L]^d
    bool torus = true;
    std::size_t site_cap = 4096;
};

// Node-centred grid x_k = -L + k h. A torus has 2L/h sites per axis (the
// point +L is identified with -L); a box has 2L/h + 1.
class Lattice {
public:
    explicit Lattice(const LatticeSpec& spec);

    int dim() const { return spec_.d; }
    double spacing() const { return spec_.h; }
    double cell_volume() const { return spec_.d == 1 ? spec_.h : spec_.h * spec_.h; }
    bool torus() const { return spec_.torus; }
    double half_width() const { return spec_.half_width; }
    long per_axis() const { return n_; }
    std::size_t size() const { return size_; }
    const LatticeSpec& spec() const { return spec_; }

    Point site(std::size_t i) const;
    std::array<long, 2> multi(std::size_t i) const;
    // Index of the grid point with the given multi-index; wraps on a torus.
    // Returns nullopt when the point lies outside a box.
    std::optional<std::size_t> index(long k0, long k1 = 0) const;
    // Nearest site to x (clamped to the box).
    std::size_t nearest(const Point& x) const;
    std::string fingerprint() const;

private:
    LatticeSpec spec_;
    long n_ = 0;
    std::size_t size_ = 0;
};

enum class Mode { conservative, killed };

struct Generator {
    Eigen::SparseMatrix<double, Eigen::RowMajor> offdiag;
    Eigen::VectorXd diag;
    // Rate of jumping from state i to a site outside B (killed mode only).
    Eigen::VectorXd leave;
    Mode mode = Mode::conservative;
    std::optional<Ball> ball;
    std::vector<std::size_t> sites;  // lattice index of each state
    std::vector<Point> positions;
    double cell_volume = 1.0;
    int d = 1;
    std::string kernel_fingerprint;
    std::string lattice_fingerprint;

    std::size_t size() const { return positions.size(); }
    // L f with the off-diagonal row sum formed before the diagonal term, so
    // constants are annihilated exactly in conservative mode.
    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::MatrixXd dense() const;
    // kappa_{B,h} = 2 * leave; the continuum analog is 2 int_{B^c} J.
    Eigen::VectorXd killing_rate() const { return 2.0 * leave; }
    // sum_{i != j} (f_i - f_j)^2 L_ij h^d, i.e. the ordered pair sum over states.
    double pair_sum(const Eigen::VectorXd& f) const;
    // -h^d <g, L f> written as pair sum plus leave term.
    double bilinear(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
    std::string fingerprint() const;
};

// Conservative mode uses every lattice site (torus wraps, a box censors jumps
// that leave it). Killed mode keeps the sites strictly inside B and counts
// jumps to infinite-lattice points outside B as killing.
Generator assemble(const kernels::JumpKernel& J, const Lattice& lat, Mode mode,
                   const std::optional<Ball>& ball = std::nullopt);

// Ordered double sum sum_{i != j} (f_i - f_j)^2 J(x_i, x_j) h^{2d} over
// in-range pairs, evaluated directly from the kernel.
double dirichlet_form(const Eigen::VectorXd& f, const kernels::JumpKernel& J, const Lattice& lat);

struct RefinementPoint {
    double h;
    double max_ratio;
};

struct InequalityReport {
    std::string check;
    double max_ratio = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double h = 0.0;
    std::vector<double> ratios;
    std::vector<RefinementPoint> refinement_series;
};

// Random test vectors are sampled from continuum-defined bump functions, so
// the same seed gives the same functions at every h.
Eigen::VectorXd random_bump_vector(const Lattice& lat, std::uint64_t seed, std::uint64_t trial);

double nash_ratio(const Eigen::VectorXd& u, const Generator& G, double kappa1, double alpha, double c = 1.0);
InequalityReport nash_check(const kernels::JumpKernel& J, const Lattice& lat, std::size_t trials,
                            std::uint64_t rng_seed, double c = 1.0);

// phi_R(x) = (R^2 - |x-y0|^2)^{12/(2-beta)} on B(y0,R), normalised to unit mass.
Eigen::VectorXd poincare_weight(const Generator& killed, const Point& y0, double R, double beta);
double poincare_ratio(const Eigen::VectorXd& f, const Generator& killed, const Eigen::VectorXd& phi);
Eigen::VectorXd random_smooth_vector(const Generator& G, const Point& y0, double R, std::uint64_t seed,
                                     std::uint64_t trial);
InequalityReport weighted_poincare_check(const kernels::JumpKernel& J, const Lattice& lat, const Ball& B,
                                         std::size_t trials, std::uint64_t rng_seed);

}  // namespace nonlocal::lattice

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nonlocal {

// Points live in R^d with d <= 2; unused coordinates are zero.
using Point = std::array<double, 2>;

inline double norm2(const Point& v, int d) { return d == 1 ? v[0] * v[0] : v[0] * v[0] + v[1] * v[1]; }
double distance(const Point& x, const Point& y, int d);
inline Point theta(const Point& x) { return {x[1], x[0]}; }
// Double cone V(lambda) = {|x1| < lambda |x2|}; the boundary belongs to the complement.
inline bool in_cone(const Point& x, double lambda = 1.0) {
    return (x[0] < 0 ? -x[0] : x[0]) < lambda * (x[1] < 0 ? -x[1] : x[1]);
}

struct Ball {
    Point center{0.0, 0.0};
    double radius = 1.0;
    bool contains(const Point& x, int d) const;
};

namespace kernels {

struct KernelParams {
    int d = 1;
    double alpha = 0.8;
    double beta = 1.2;
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    std::optional<double> xi;

    void validate() const;
};

class JumpKernel {
public:
    using Fn = std::function<double(const Point&, const Point&)>;

    JumpKernel(KernelParams params, Fn fn, std::string family, std::string fingerprint,
               bool translation_invariant);

    // Throws DomainError for x == y (every kernel is singular on the diagonal).
    double operator()(const Point& x, const Point& y) const;
    double evaluate(const Point& x, const Point& y) const { return (*this)(x, y); }

    const KernelParams& params() const { return params_; }
    int dim() const { return params_.d; }
    double support_radius() const { return 1.0; }
    const std::string& family() const { return family_; }
    const std::string& fingerprint() const { return fingerprint_; }
    bool translation_invariant() const { return translation_invariant_; }
    const Fn& function() const { return fn_; }

private:
    KernelParams params_;
    Fn fn_;
    std::string family_;
    std::string fingerprint_;
    bool translation_invariant_;
};

// (kappa1 r^{-d-alpha} + kappa2 r^{-d-beta}) / 2 on r < 1. With alpha == beta
// and kappa1 == kappa2 this is the truncated isotropic kappa r^{-d-gamma}.
JumpKernel make_stable_like(const KernelParams& p);

// (1-w) kappa1 r^{-d-alpha} + w kappa2 r^{-d-beta} with w in [0,1] a smooth
// symmetric random field fixed by the seed.
JumpKernel make_random_sandwich(const KernelParams& p, std::uint64_t seed);

// Translation-invariant kernel tabulated on a regular grid of displacements.
// d=1 rows are (dx, value); d=2 rows are (dx1, dx2, value) on a full tensor
// grid. Linear/bilinear interpolation, zero outside the table and for |dx| >= 1.
JumpKernel make_tabulated(const KernelParams& p, const std::vector<std::vector<double>>& rows);
JumpKernel load_tabulated(const KernelParams& p, const std::string& csv_path);

// J_xi: kappa2 r^{-d-beta} for r <= xi, J otherwise.
JumpKernel regularize(const JumpKernel& J, double xi);

// J0 + J1 with the metadata of J0.
JumpKernel sum_kernel(const JumpKernel& J0, const JumpKernel& J1);

// Largest jump length with nonzero intensity (sqrt 2 for the square-supported J0).
double jump_reach(const JumpKernel& J);

// Bounded annulus kernel c 1(r_in <= r < r_out).
JumpKernel make_shell(int d, double c, double r_in, double r_out);

struct CEKernelParams {
    double a = 0.5;
    double b = 1.0;
    double derived_alpha = 2.0 / 3.0;
    double derived_beta = 0.8;
    // exponent (a+2)/(b+2) of the region boundary |z2| = |z1|^p
    double p() const { return (a + 2.0) / (b + 2.0); }
};

CEKernelParams make_ce_params(double a, double b);

struct Orders {
    double alpha;
    double beta;
};
Orders derived_orders(double a, double b);
// The raw order formula without the 0<a<b<2 check.
Orders order_formula(double a, double b);

double eval_m(double z1, double z2, const CEKernelParams& p);
double marginal_n1(double z1, const CEKernelParams& p);
double marginal_n2(double z2, const CEKernelParams& p);
double eval_J0(const Point& x, const Point& y, const CEKernelParams& p);
double eval_J1(const Point& x, const Point& y, const CEKernelParams& p);

// Sandwich constants for J0/J1 with exponents (a, b) in d=2.
struct SandwichConstants {
    double kappa1;
    double kappa2;
};
SandwichConstants ce_sandwich_constants(const CEKernelParams& p);

JumpKernel make_ce_J0(const CEKernelParams& p);
JumpKernel make_ce_J1(const CEKernelParams& p);

struct KillingRate {
    double value;
    double error;
};
// 2 * integral over B^c of J(x,y) dy, by adaptive quadrature (polar in d=2).
KillingRate killing_rate(const JumpKernel& J, const Ball& B, const Point& x, double abs_tol = 1e-8);

struct Violation {
    std::string kind;  // symmetry | support | lower | upper
    Point x;
    Point y;
    double value;
    double bound;
};

struct ValidationReport {
    bool passed = true;
    std::size_t samples = 0;
    double symmetry_worst = 0.0;  // max relative asymmetry
    double support_worst = 0.0;   // max value at distance >= 1
    double lower_ratio_min = 0.0;  // min J / (kappa1 r^{-d-alpha})
    double upper_ratio_max = 0.0;  // max J / (kappa2 r^{-d-beta})
    std::vector<Violation> violations;
};

ValidationReport validate(const JumpKernel& J, std::size_t n_samples, std::uint64_t rng_seed,
                          const std::vector<std::pair<Point, Point>>& extra_pairs = {});

// Extremal ratios min J r^{d+alpha}, max J r^{d+beta} over a random sample.
SandwichConstants measure_sandwich(const JumpKernel& J, std::size_t n_samples, std::uint64_t rng_seed);

}  // namespace kernels
}  // namespace nonlocal

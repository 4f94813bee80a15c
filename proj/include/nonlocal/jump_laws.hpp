#pragma once

#include <memory>
#include <vector>

#include "nonlocal/kernels.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal::mc {

// A finite jump intensity n(h) dh: total_rate() = int n, sample() draws from
// n / total_rate, density(h) evaluates n.
class JumpLaw {
public:
    virtual ~JumpLaw() = default;
    virtual int dim() const = 0;
    virtual double total_rate() const = 0;
    virtual Point sample(RandomStream& rng) const = 0;
    virtual double density(const Point& h) const = 0;
};

// m(z1,z2) restricted to |z1| v |z2| > eps, sampled exactly. With swapped
// set the law is that of the coordinate-swapped jump m(z2,z1).
class MJumpLaw : public JumpLaw {
public:
    MJumpLaw(const kernels::CEKernelParams& p, double eps, bool swapped = false);
    int dim() const override { return 2; }
    double total_rate() const override { return rate_; }
    Point sample(RandomStream& rng) const override;
    double density(const Point& h) const override;

    // first-quadrant masses
    double mass_a_main() const { return a_main_; }
    double mass_a_sliver() const { return a_sliver_; }
    double mass_b() const { return b_; }

private:
    kernels::CEKernelParams p_;
    double eps_;
    bool swapped_;
    double a_main_, a_sliver_, b_, rate_;
    double sliver_proposal_;
};

Point sample_m_jump(const kernels::CEKernelParams& p, double eps, RandomStream& rng);

// Rotation-invariant intensity kappa r^{-d-gamma} on r_lo < r <= r_hi; gamma
// may be negative (gamma = -d gives a constant density on the shell).
struct RadialPiece {
    double kappa;
    double gamma;
    double r_lo;
    double r_hi;
};

class RadialLaw : public JumpLaw {
public:
    RadialLaw(int d, std::vector<RadialPiece> pieces);
    int dim() const override { return d_; }
    double total_rate() const override { return rate_; }
    Point sample(RandomStream& rng) const override;
    double density(const Point& h) const override;
    const std::vector<RadialPiece>& pieces() const { return pieces_; }

private:
    int d_;
    std::vector<RadialPiece> pieces_;
    std::vector<double> rates_;
    double rate_ = 0.0;
};

// kappa S_d (r_lo^{-gamma} - r_hi^{-gamma}) / gamma
double radial_piece_rate(int d, const RadialPiece& p);
// r with density proportional to r^{-1-gamma} on (lo, hi]
double inverse_power_cdf(double u, double gamma, double lo, double hi);

}  // namespace nonlocal::mc

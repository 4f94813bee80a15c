#include "nonlocal/jump_laws.hpp"

#include <cmath>

#include "nonlocal/errors.hpp"

namespace nonlocal::mc {

double inverse_power_cdf(double u, double gamma, double lo, double hi) {
    if (gamma == 0.0) return lo * std::pow(hi / lo, u);
    const double a = std::pow(lo, -gamma), b = std::pow(hi, -gamma);
    return std::pow(a - u * (a - b), -1.0 / gamma);
}

MJumpLaw::MJumpLaw(const kernels::CEKernelParams& p, double eps, bool swapped) : p_(p), eps_(eps), swapped_(swapped) {
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps_cut must lie in (0,1)");
    const double al = p.derived_alpha, be = p.derived_beta, a = p.a;
    const double lo = std::pow(eps, 1.0 / p.p());
    a_main_ = (std::pow(eps, -al) - 1.0) / al;
    sliver_proposal_ = (std::pow(lo, -al) - std::pow(eps, -al)) / al;
    a_sliver_ = sliver_proposal_ - eps * (std::pow(lo, -a - 1.0) - std::pow(eps, -a - 1.0)) / (a + 1.0);
    b_ = (std::pow(eps, -be) - 1.0) / be;
    rate_ = 4.0 * (a_main_ + a_sliver_ + b_);
}

Point MJumpLaw::sample(RandomStream& rng) const {
    const double al = p_.derived_alpha, be = p_.derived_beta, pe = p_.p();
    double u, v;
    const double pick = rng.uniform() * (a_main_ + a_sliver_ + b_);
    if (pick < a_main_) {
        u = inverse_power_cdf(rng.uniform(), al, eps_, 1.0);
        v = rng.uniform() * std::pow(u, pe);
    } else if (pick < a_main_ + a_sliver_) {
        const double lo = std::pow(eps_, 1.0 / pe);
        for (int it = 0;; ++it) {
            if (it > 1000000) throw RejectionError("sliver rejection loop exceeded 1e6 iterations");
            u = inverse_power_cdf(rng.uniform(), al, lo, eps_);
            v = rng.uniform() * std::pow(u, pe);
            if (v > eps_) break;
        }
    } else {
        v = inverse_power_cdf(rng.uniform(), be, eps_, 1.0);
        u = rng.uniform() * std::pow(v, 1.0 / pe);
    }
    Point z{rng.sign() * u, rng.sign() * v};
    return swapped_ ? theta(z) : z;
}

double MJumpLaw::density(const Point& h) const {
    const Point z = swapped_ ? theta(h) : h;
    const double u = std::abs(z[0]), v = std::abs(z[1]);
    if (std::max(u, v) <= eps_) return 0.0;
    return kernels::eval_m(u, v, p_);
}

Point sample_m_jump(const kernels::CEKernelParams& p, double eps, RandomStream& rng) {
    return MJumpLaw(p, eps).sample(rng);
}

namespace {

double sphere_area(int d) { return d == 1 ? 2.0 : 2.0 * M_PI; }

}  // namespace

double radial_piece_rate(int d, const RadialPiece& p) {
    const double s = p.kappa * sphere_area(d);
    if (p.gamma == 0.0) return s * std::log(p.r_hi / p.r_lo);
    return s * (std::pow(p.r_lo, -p.gamma) - std::pow(p.r_hi, -p.gamma)) / p.gamma;
}

RadialLaw::RadialLaw(int d, std::vector<RadialPiece> pieces) : d_(d), pieces_(std::move(pieces)) {
    if (d != 1 && d != 2) throw ParameterError("radial law dimension must be 1 or 2");
    for (const auto& p : pieces_) {
        if (!(p.r_lo > 0.0 && p.r_hi > p.r_lo && p.r_hi <= 1.0)) throw ParameterError("bad radial piece range");
        rates_.push_back(radial_piece_rate(d, p));
        rate_ += rates_.back();
    }
}

Point RadialLaw::sample(RandomStream& rng) const {
    double pick = rng.uniform() * rate_;
    std::size_t k = 0;
    while (k + 1 < pieces_.size() && pick >= rates_[k]) pick -= rates_[k++];
    const auto& p = pieces_[k];
    const double r = inverse_power_cdf(rng.uniform(), p.gamma, p.r_lo, p.r_hi);
    if (d_ == 1) return {rng.sign() * r, 0.0};
    const double th = rng.uniform(0.0, 2.0 * M_PI);
    return {r * std::cos(th), r * std::sin(th)};
}

double RadialLaw::density(const Point& h) const {
    const double r = std::sqrt(norm2(h, d_));
    double s = 0.0;
    for (const auto& p : pieces_)
        if (r > p.r_lo && r <= p.r_hi) s += p.kappa * std::pow(r, -d_ - p.gamma);
    return s;
}

}  // namespace nonlocal::mc

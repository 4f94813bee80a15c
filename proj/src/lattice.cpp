#include "nonlocal/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nonlocal/errors.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal::lattice {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Offset {
    long k0, k1;
};

std::vector<Offset> stencil(int d, double h, double reach) {
    std::vector<Offset> out;
    const long K = static_cast<long>(std::floor(reach / h)) + 1;
    for (long k0 = -K; k0 <= K; ++k0) {
        if (d == 1) {
            if (k0 != 0 && std::abs(k0) * h < reach) out.push_back({k0, 0});
            continue;
        }
        for (long k1 = -K; k1 <= K; ++k1) {
            if (k0 == 0 && k1 == 0) continue;
            if (std::sqrt(static_cast<double>(k0 * k0 + k1 * k1)) * h < reach) out.push_back({k0, k1});
        }
    }
    return out;
}

}  // namespace

Lattice::Lattice(const LatticeSpec& spec) : spec_(spec) {
    if (spec.d != 1 && spec.d != 2) throw LatticeError("lattice dimension must be 1 or 2");
    if (!(spec.h > 0.0) || !(spec.h < 1.0)) throw LatticeError("lattice spacing must lie in (0,1), got " + num(spec.h));
    if (!(spec.half_width > 0.0)) throw LatticeError("half_width must be positive");
    const double ratio = 2.0 * spec.half_width / spec.h;
    n_ = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(n_)) > 1e-9 * ratio)
        throw LatticeError("2*half_width must be an integer multiple of the spacing");
    if (spec.torus && 2.0 * spec.half_width < 2.0) throw LatticeError("torus side must be at least 2");
    const long per = spec.torus ? n_ : n_ + 1;
    size_ = static_cast<std::size_t>(spec.d == 1 ? per : per * per);
    if (size_ > spec.site_cap)
        throw SizeError("lattice has " + std::to_string(size_) + " sites, cap is " + std::to_string(spec.site_cap));
}

std::array<long, 2> Lattice::multi(std::size_t i) const {
    const long per = spec_.torus ? n_ : n_ + 1;
    if (spec_.d == 1) return {static_cast<long>(i), 0};
    return {static_cast<long>(i) / per, static_cast<long>(i) % per};
}

Point Lattice::site(std::size_t i) const {
    const auto m = multi(i);
    const double L = spec_.half_width, h = spec_.h;
    return {-L + m[0] * h, spec_.d == 2 ? -L + m[1] * h : 0.0};
}

std::optional<std::size_t> Lattice::index(long k0, long k1) const {
    const long per = spec_.torus ? n_ : n_ + 1;
    auto fix = [&](long k) -> std::optional<long> {
        if (spec_.torus) return ((k % per) + per) % per;
        if (k < 0 || k >= per) return std::nullopt;
        return k;
    };
    auto a = fix(k0);
    if (!a) return std::nullopt;
    if (spec_.d == 1) return static_cast<std::size_t>(*a);
    auto b = fix(k1);
    if (!b) return std::nullopt;
    return static_cast<std::size_t>(*a * per + *b);
}

std::size_t Lattice::nearest(const Point& x) const {
    const long per = spec_.torus ? n_ : n_ + 1;
    auto k = [&](double v) { return std::clamp(std::lround((v + spec_.half_width) / spec_.h), 0L, per - 1); };
    return *index(k(x[0]), spec_.d == 2 ? k(x[1]) : 0);
}

std::string Lattice::fingerprint() const {
    return "lattice(d=" + std::to_string(spec_.d) + ",h=" + num(spec_.h) + ",L=" + num(spec_.half_width) +
           (spec_.torus ? ",torus" : ",box") + ")";
}

Eigen::VectorXd Generator::apply(const Eigen::VectorXd& f) const {
    Eigen::VectorXd out(size());
    for (Eigen::Index i = 0; i < offdiag.outerSize(); ++i) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(offdiag, i); it; ++it)
            s += it.value() * f[it.col()];
        out[i] = s + diag[i] * f[i];
    }
    return out;
}

Eigen::MatrixXd Generator::dense() const {
    Eigen::MatrixXd M = Eigen::MatrixXd(offdiag);
    for (std::size_t i = 0; i < size(); ++i) M(i, i) = diag[i];
    return M;
}

double Generator::pair_sum(const Eigen::VectorXd& f) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < offdiag.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(offdiag, i); it; ++it) {
            const double df = f[i] - f[it.col()];
            s += df * df * it.value();
        }
    return s * cell_volume;
}

double Generator::bilinear(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < offdiag.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(offdiag, i); it; ++it)
            s += (f[i] - f[it.col()]) * (g[i] - g[it.col()]) * it.value();
    double k = 0.0;
    for (std::size_t i = 0; i < size(); ++i) k += f[i] * g[i] * leave[i];
    return (0.5 * s + k) * cell_volume;
}

std::string Generator::fingerprint() const {
    std::string s = kernel_fingerprint + "|" + lattice_fingerprint + "|";
    if (mode == Mode::conservative) return s + "conservative";
    return s + "killed(" + num(ball->center[0]) + "," + num(ball->center[1]) + "," + num(ball->radius) + ")";
}

Generator assemble(const kernels::JumpKernel& J, const Lattice& lat, Mode mode, const std::optional<Ball>& ball) {
    const int d = lat.dim();
    if (J.dim() != d) throw ParameterError("kernel and lattice dimensions differ");
    const double h = lat.spacing(), hd = lat.cell_volume();
    Generator G;
    G.mode = mode;
    G.d = d;
    G.cell_volume = hd;
    G.kernel_fingerprint = J.fingerprint();
    G.lattice_fingerprint = lat.fingerprint();
    std::vector<long> state_of(lat.size(), -1);
    if (mode == Mode::killed) {
        if (!ball) throw ParameterError("killed mode needs a ball");
        G.ball = ball;
        for (int a = 0; a < d; ++a)
            if (ball->center[a] - ball->radius < -lat.half_width() || ball->center[a] + ball->radius > lat.half_width())
                throw LatticeError("ball must lie within the lattice box");
    }
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const Point x = lat.site(i);
        if (mode == Mode::killed && !ball->contains(x, d)) continue;
        state_of[i] = static_cast<long>(G.sites.size());
        G.sites.push_back(i);
        G.positions.push_back(x);
    }
    const std::size_t n = G.sites.size();
    if (n == 0) throw LatticeError("no lattice sites in the domain");
    const auto offsets = stencil(d, h, kernels::jump_reach(J));
    std::vector<Eigen::Triplet<double>> trip;
    G.leave = Eigen::VectorXd::Zero(n);
    for (std::size_t s = 0; s < n; ++s) {
        const auto m = lat.multi(G.sites[s]);
        const Point x = G.positions[s];
        double out = 0.0;
        for (const auto& o : offsets) {
            const Point z{x[0] + o.k0 * h, d == 2 ? x[1] + o.k1 * h : 0.0};
            if (mode == Mode::killed && !ball->contains(z, d)) {
                out += J(x, z) * hd;
                continue;
            }
            const auto j = lat.index(m[0] + o.k0, m[1] + o.k1);
            if (!j) continue;
            const long t = state_of[*j];
            if (t < 0) throw InvariantError("in-ball neighbour missing from state set");
            if (static_cast<std::size_t>(t) <= s) continue;
            const double v = J(x, z) * hd;
            trip.emplace_back(static_cast<int>(s), static_cast<int>(t), v);
            trip.emplace_back(static_cast<int>(t), static_cast<int>(s), v);
        }
        G.leave[s] = out;
    }
    G.offdiag.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    G.offdiag.setFromTriplets(trip.begin(), trip.end());
    G.offdiag.makeCompressed();
    G.diag.resize(n);
    for (Eigen::Index i = 0; i < G.offdiag.outerSize(); ++i) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(G.offdiag, i); it; ++it) s += it.value();
        G.diag[i] = -s - G.leave[i];
        if (mode == Mode::conservative) G.diag[i] = -s;
    }
    return G;
}

double dirichlet_form(const Eigen::VectorXd& f, const kernels::JumpKernel& J, const Lattice& lat) {
    const int d = lat.dim();
    const double h = lat.spacing(), hd = lat.cell_volume();
    const auto offsets = stencil(d, h, kernels::jump_reach(J));
    double s = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto m = lat.multi(i);
        const Point x = lat.site(i);
        for (const auto& o : offsets) {
            const auto j = lat.index(m[0] + o.k0, m[1] + o.k1);
            if (!j) continue;
            const Point z{x[0] + o.k0 * h, d == 2 ? x[1] + o.k1 * h : 0.0};
            const double df = f[static_cast<Eigen::Index>(i)] - f[static_cast<Eigen::Index>(*j)];
            s += df * df * J(x, z);
        }
    }
    return s * hd * hd;
}

Eigen::VectorXd random_bump_vector(const Lattice& lat, std::uint64_t seed, std::uint64_t trial) {
    RandomStream rng(seed, stream_id(0x6e617368ull, trial));
    const int d = lat.dim();
    const double L = lat.half_width();
    const int bumps = 1 + static_cast<int>(rng.below(3));
    struct Bump {
        Point c;
        double s, a;
    };
    std::vector<Bump> bs;
    for (int b = 0; b < bumps; ++b) {
        Bump bu;
        bu.c = {rng.uniform(-L / 2, L / 2), d == 2 ? rng.uniform(-L / 2, L / 2) : 0.0};
        bu.s = std::exp(rng.uniform(std::log(0.2), std::log(1.5)));
        bu.a = rng.uniform(0.2, 1.0);
        bs.push_back(bu);
    }
    Eigen::VectorXd u(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const Point x = lat.site(i);
        double v = 0.0;
        for (const auto& b : bs) {
            const double q = 1.0 - norm2({x[0] - b.c[0], x[1] - b.c[1]}, d) / (b.s * b.s);
            if (q > 0) v += b.a * q * q;
        }
        u[static_cast<Eigen::Index>(i)] = v;
    }
    return u;
}

double nash_ratio(const Eigen::VectorXd& u, const Generator& G, double kappa1, double alpha, double c) {
    const double hd = G.cell_volume;
    const double l2sq = u.squaredNorm() * hd;
    const double l1 = u.cwiseAbs().sum() * hd;
    const double E = G.pair_sum(u);
    const double q = 2.0 * alpha / G.d;
    return std::pow(l2sq, 1.0 + q / 2.0) / ((E / kappa1 + c * l2sq) * std::pow(l1, q));
}

InequalityReport nash_check(const kernels::JumpKernel& J, const Lattice& lat, std::size_t trials,
                            std::uint64_t rng_seed, double c) {
    const Generator G = assemble(J, lat, Mode::conservative);
    InequalityReport rep;
    rep.check = "nash";
    rep.trials = trials;
    rep.seed = rng_seed;
    rep.h = lat.spacing();
    for (std::size_t t = 0; t < trials; ++t) {
        const Eigen::VectorXd u = random_bump_vector(lat, rng_seed, t);
        if (u.cwiseAbs().maxCoeff() == 0.0) continue;
        const double r = nash_ratio(u, G, J.params().kappa1, J.params().alpha, c);
        rep.ratios.push_back(r);
        rep.max_ratio = std::max(rep.max_ratio, r);
    }
    return rep;
}

Eigen::VectorXd poincare_weight(const Generator& killed, const Point& y0, double R, double beta) {
    const double expo = 12.0 / (2.0 - beta);
    Eigen::VectorXd phi(killed.size());
    for (std::size_t i = 0; i < killed.size(); ++i) {
        const Point& x = killed.positions[i];
        const double q = R * R - norm2({x[0] - y0[0], x[1] - y0[1]}, killed.d);
        phi[static_cast<Eigen::Index>(i)] = q > 0 ? std::pow(q, expo) : 0.0;
    }
    return phi / (phi.sum() * killed.cell_volume);
}

double poincare_ratio(const Eigen::VectorXd& f, const Generator& killed, const Eigen::VectorXd& phi) {
    const double hd = killed.cell_volume;
    const double mean = f.dot(phi) * hd;
    const double lhs = (f.array() - mean).square().matrix().dot(phi) * hd;
    if (lhs == 0.0) return 0.0;
    double rhs = 0.0;
    const auto& M = killed.offdiag;
    for (Eigen::Index i = 0; i < M.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(M, i); it; ++it) {
            const double df = f[i] - f[it.col()];
            rhs += df * df * std::min(phi[i], phi[it.col()]) * it.value();
        }
    rhs *= hd;
    return lhs / rhs;
}

Eigen::VectorXd random_smooth_vector(const Generator& G, const Point& y0, double R, std::uint64_t seed,
                                     std::uint64_t trial) {
    RandomStream rng(seed, stream_id(0x706f696eull, trial));
    double amp[2][3], phase[2][3];
    for (int a = 0; a < 2; ++a)
        for (int k = 0; k < 3; ++k) {
            amp[a][k] = rng.normal() / (k + 1);
            phase[a][k] = rng.uniform(0.0, 2 * M_PI);
        }
    Eigen::VectorXd f(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) {
        double v = 0.0;
        for (int a = 0; a < G.d; ++a) {
            const double s = (G.positions[i][a] - y0[a]) / R;
            for (int k = 0; k < 3; ++k) v += amp[a][k] * std::cos((k + 1) * M_PI * s + phase[a][k]);
        }
        f[static_cast<Eigen::Index>(i)] = v;
    }
    return f;
}

InequalityReport weighted_poincare_check(const kernels::JumpKernel& J, const Lattice& lat, const Ball& B,
                                         std::size_t trials, std::uint64_t rng_seed) {
    if (B.radius < 1.0 || B.radius > 4.0) throw ParameterError("weighted Poincare check needs 1 <= R <= 4");
    const Generator G = assemble(J, lat, Mode::killed, B);
    const Eigen::VectorXd phi = poincare_weight(G, B.center, B.radius, J.params().beta);
    InequalityReport rep;
    rep.check = "weighted_poincare";
    rep.trials = trials;
    rep.seed = rng_seed;
    rep.h = lat.spacing();
    for (std::size_t t = 0; t < trials; ++t) {
        const double r = poincare_ratio(random_smooth_vector(G, B.center, B.radius, rng_seed, t), G, phi);
        rep.ratios.push_back(r);
        rep.max_ratio = std::max(rep.max_ratio, r);
    }
    return rep;
}

}  // namespace nonlocal::lattice

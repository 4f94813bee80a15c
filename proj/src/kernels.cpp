#include "nonlocal/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nonlocal/errors.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal {

double distance(const Point& x, const Point& y, int d) {
    const Point h{y[0] - x[0], d == 1 ? 0.0 : y[1] - x[1]};
    return std::sqrt(norm2(h, d));
}

bool Ball::contains(const Point& x, int d) const {
    return distance(center, x, d) < radius;
}

namespace kernels {

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string params_tag(const KernelParams& p) {
    std::string s = "d=" + std::to_string(p.d) + ",alpha=" + fmt_num(p.alpha) + ",beta=" + fmt_num(p.beta) +
                    ",k1=" + fmt_num(p.kappa1) + ",k2=" + fmt_num(p.kappa2);
    if (p.xi) s += ",xi=" + fmt_num(*p.xi);
    return s;
}

}  // namespace

void KernelParams::validate() const {
    if (d != 1 && d != 2) throw ParameterError("dimension must be 1 or 2, got " + std::to_string(d));
    if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (0,2), got " + fmt_num(alpha));
    if (!(beta > 0.0 && beta < 2.0)) throw ParameterError("beta must lie in (0,2), got " + fmt_num(beta));
    if (alpha > beta) throw ParameterError("alpha must not exceed beta");
    if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw ParameterError("kappa1 and kappa2 must be positive");
    if (xi && !(*xi > 0.0 && *xi < 1.0)) throw ParameterError("xi must lie in (0,1), got " + fmt_num(*xi));
}

JumpKernel::JumpKernel(KernelParams params, Fn fn, std::string family, std::string fingerprint,
                       bool translation_invariant)
    : params_(params),
      fn_(std::move(fn)),
      family_(std::move(family)),
      fingerprint_(std::move(fingerprint)),
      translation_invariant_(translation_invariant) {}

double JumpKernel::operator()(const Point& x, const Point& y) const {
    if (x[0] == y[0] && (params_.d == 1 || x[1] == y[1]))
        throw DomainError("kernel evaluated on the diagonal x == y");
    return fn_(x, y);
}

JumpKernel make_stable_like(const KernelParams& p) {
    p.validate();
    const double e1 = -(p.d + p.alpha), e2 = -(p.d + p.beta);
    const double k1 = p.kappa1, k2 = p.kappa2;
    const int d = p.d;
    auto fn = [=](const Point& x, const Point& y) {
        const double r = distance(x, y, d);
        if (r >= 1.0) return 0.0;
        return 0.5 * (k1 * std::pow(r, e1) + k2 * std::pow(r, e2));
    };
    JumpKernel J(p, fn, "stable_like", "stable_like(" + params_tag(p) + ")", true);
    return p.xi ? regularize(J, *p.xi) : J;
}

JumpKernel make_random_sandwich(const KernelParams& p, std::uint64_t seed) {
    p.validate();
    RandomStream rng(seed, stream_id(0x72616e64ull));
    const double w1 = rng.uniform(0.5, 3.0), w2 = rng.uniform(0.5, 3.0), w3 = rng.uniform(1.0, 6.0);
    const double ph1 = rng.uniform(0.0, 2 * M_PI), ph2 = rng.uniform(0.0, 2 * M_PI);
    const double e1 = -(p.d + p.alpha), e2 = -(p.d + p.beta);
    const double k1 = p.kappa1, k2 = p.kappa2;
    const int d = p.d;
    auto fn = [=](const Point& x, const Point& y) {
        const double r = distance(x, y, d);
        if (r >= 1.0) return 0.0;
        // x+y is evaluated symmetrically, so w(x,y) == w(y,x) bitwise
        const double s = w1 * (x[0] + y[0]) + (d == 2 ? w2 * (x[1] + y[1]) : 0.0);
        const double w = 0.5 + 0.5 * std::sin(s + ph1) * std::cos(w3 * r + ph2);
        return (1.0 - w) * k1 * std::pow(r, e1) + w * k2 * std::pow(r, e2);
    };
    JumpKernel J(p, fn, "random_sandwich", "random_sandwich(" + params_tag(p) + ",seed=" + std::to_string(seed) + ")",
                 false);
    return p.xi ? regularize(J, *p.xi) : J;
}

namespace {

struct Table1 {
    std::vector<double> dx, v;
    double operator()(double h) const {
        if (h < dx.front() || h > dx.back()) return 0.0;
        auto it = std::upper_bound(dx.begin(), dx.end(), h);
        if (it == dx.end()) return v.back();
        const std::size_t k = static_cast<std::size_t>(it - dx.begin());
        const double t = (h - dx[k - 1]) / (dx[k] - dx[k - 1]);
        return (1 - t) * v[k - 1] + t * v[k];
    }
};

struct Table2 {
    std::vector<double> g1, g2;
    std::vector<double> v;  // row-major over (g1, g2)
    double at(std::size_t i, std::size_t j) const { return v[i * g2.size() + j]; }
    double operator()(double h1, double h2) const {
        if (h1 < g1.front() || h1 > g1.back() || h2 < g2.front() || h2 > g2.back()) return 0.0;
        auto locate = [](const std::vector<double>& g, double h, std::size_t& k, double& t) {
            auto it = std::upper_bound(g.begin(), g.end(), h);
            if (it == g.end()) --it;
            k = std::max<std::size_t>(1, static_cast<std::size_t>(it - g.begin()));
            t = (h - g[k - 1]) / (g[k] - g[k - 1]);
        };
        std::size_t i, j;
        double s, t;
        locate(g1, h1, i, s);
        locate(g2, h2, j, t);
        return (1 - s) * (1 - t) * at(i - 1, j - 1) + s * (1 - t) * at(i, j - 1) + (1 - s) * t * at(i - 1, j) +
               s * t * at(i, j);
    }
};

std::uint64_t hash_doubles(const std::vector<std::vector<double>>& rows) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& r : rows)
        for (double v : r) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &v, sizeof v);
            for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ull;
        }
    return h;
}

}  // namespace

JumpKernel make_tabulated(const KernelParams& p, const std::vector<std::vector<double>>& rows) {
    p.validate();
    const std::size_t width = static_cast<std::size_t>(p.d) + 1;
    if (rows.size() < 2) throw ConfigError("tabulated kernel needs at least two rows");
    for (const auto& r : rows)
        if (r.size() != width) throw ConfigError("tabulated kernel row has wrong arity");
    const std::string fp = "tabulated(" + params_tag(p) + ",hash=" + std::to_string(hash_doubles(rows)) + ")";
    if (p.d == 1) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows) pts.emplace_back(r[0], r[1]);
        std::sort(pts.begin(), pts.end());
        Table1 t;
        for (auto& [a, b] : pts) {
            if (!t.dx.empty() && a == t.dx.back()) throw ConfigError("duplicate displacement in table");
            t.dx.push_back(a);
            t.v.push_back(b);
        }
        auto fn = [t](const Point& x, const Point& y) {
            const double h = y[0] - x[0];
            if (std::abs(h) >= 1.0) return 0.0;
            return t(h);
        };
        JumpKernel J(p, fn, "tabulated", fp, true);
        return p.xi ? regularize(J, *p.xi) : J;
    }
    Table2 t;
    for (const auto& r : rows) {
        t.g1.push_back(r[0]);
        t.g2.push_back(r[1]);
    }
    auto uniq = [](std::vector<double>& g) {
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
    };
    uniq(t.g1);
    uniq(t.g2);
    if (t.g1.size() < 2 || t.g2.size() < 2 || t.g1.size() * t.g2.size() != rows.size())
        throw ConfigError("2-d table must be a full tensor grid");
    t.v.assign(rows.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : rows) {
        const auto i = static_cast<std::size_t>(std::lower_bound(t.g1.begin(), t.g1.end(), r[0]) - t.g1.begin());
        const auto j = static_cast<std::size_t>(std::lower_bound(t.g2.begin(), t.g2.end(), r[1]) - t.g2.begin());
        t.v[i * t.g2.size() + j] = r[2];
    }
    for (double v : t.v)
        if (std::isnan(v)) throw ConfigError("2-d table has duplicate grid points");
    auto fn = [t](const Point& x, const Point& y) {
        const double h1 = y[0] - x[0], h2 = y[1] - x[1];
        if (h1 * h1 + h2 * h2 >= 1.0) return 0.0;
        return t(h1, h2);
    };
    JumpKernel J(p, fn, "tabulated", fp, true);
    return p.xi ? regularize(J, *p.xi) : J;
}

JumpKernel load_tabulated(const KernelParams& p, const std::string& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw IoError("cannot open kernel table " + csv_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.empty() || text.back() != '\n') throw ConfigError("kernel table must end with a newline: " + csv_path);
    std::vector<std::vector<double>> rows;
    std::istringstream ls(text);
    std::string line;
    bool first = true;
    while (std::getline(ls, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream cs(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(cs, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw ConfigError("non-numeric row in kernel table: " + line);
        }
        first = false;
        rows.push_back(std::move(row));
    }
    return make_tabulated(p, rows);
}

JumpKernel regularize(const JumpKernel& J, double xi) {
    if (!(xi > 0.0 && xi < 1.0)) throw ParameterError("xi must lie in (0,1)");
    KernelParams p = J.params();
    p.xi = xi;
    const double e2 = -(p.d + p.beta), k2 = p.kappa2;
    const int d = p.d;
    auto inner = J.function();
    auto fn = [=](const Point& x, const Point& y) {
        const double r = distance(x, y, d);
        if (r <= xi) return k2 * std::pow(r, e2);
        return inner(x, y);
    };
    return JumpKernel(p, fn, J.family(), "reg(" + J.fingerprint() + ",xi=" + fmt_num(xi) + ")",
                      J.translation_invariant());
}

JumpKernel sum_kernel(const JumpKernel& J0, const JumpKernel& J1) {
    auto f0 = J0.function();
    auto f1 = J1.function();
    auto fn = [=](const Point& x, const Point& y) { return f0(x, y) + f1(x, y); };
    return JumpKernel(J0.params(), fn, J0.family() + "+" + J1.family(),
                      "sum(" + J0.fingerprint() + "," + J1.fingerprint() + ")",
                      J0.translation_invariant() && J1.translation_invariant());
}

JumpKernel make_shell(int d, double c, double r_in, double r_out) {
    KernelParams p;
    p.d = d;
    auto fn = [=](const Point& x, const Point& y) {
        const double r = distance(x, y, d);
        return (r >= r_in && r < r_out && r < 1.0) ? c : 0.0;
    };
    return JumpKernel(p, fn, "shell",
                      "shell(d=" + std::to_string(d) + ",c=" + fmt_num(c) + ",r=" + fmt_num(r_in) + ":" +
                          fmt_num(r_out) + ")",
                      true);
}

double jump_reach(const JumpKernel& J) { return J.family() == "counterexample_J0" ? std::sqrt(2.0) : 1.0; }

Orders order_formula(double a, double b) {
    const double num = (a + 1.0) * (b + 1.0) - 1.0;
    return {num / (b + 2.0), num / (a + 2.0)};
}

Orders derived_orders(double a, double b) {
    if (!(a > 0.0 && a < b && b < 2.0))
        throw ParameterError("counterexample parameters need 0 < a < b < 2, got a=" + fmt_num(a) + " b=" + fmt_num(b));
    const Orders o = order_formula(a, b);
    if (!(o.alpha < o.beta)) throw InvariantError("derived alpha >= beta");
    return o;
}

CEKernelParams make_ce_params(double a, double b) {
    const Orders o = derived_orders(a, b);
    return {a, b, o.alpha, o.beta};
}

double eval_m(double z1, double z2, const CEKernelParams& p) {
    if (z1 == 0.0 && z2 == 0.0) throw DomainError("m is singular at the origin");
    const double u = std::abs(z1), v = std::abs(z2);
    if (std::max(u, v) > 1.0) return 0.0;
    return std::min(std::pow(u, -p.a - 2.0), std::pow(v, -p.b - 2.0));
}

double marginal_n1(double z1, const CEKernelParams& p) {
    const double u = std::abs(z1);
    if (u == 0.0 || u > 1.0) throw DomainError("marginal_n1 needs 0 < |z1| <= 1");
    return (2.0 * (p.b + 2.0) / (p.b + 1.0)) * std::pow(u, -p.derived_alpha - 1.0) - 2.0 / (p.b + 1.0);
}

double marginal_n2(double z2, const CEKernelParams& p) {
    const double v = std::abs(z2);
    if (v == 0.0 || v > 1.0) throw DomainError("marginal_n2 needs 0 < |z2| <= 1");
    return (2.0 * (p.a + 2.0) / (p.a + 1.0)) * std::pow(v, -p.derived_beta - 1.0) - 2.0 / (p.a + 1.0);
}

double eval_J0(const Point& x, const Point& y, const CEKernelParams& p) {
    return eval_m(y[0] - x[0], y[1] - x[1], p);
}

double eval_J1(const Point& x, const Point& y, const CEKernelParams& p) {
    if (x == y) throw DomainError("J1 evaluated on the diagonal");
    const double h1 = std::abs(y[0] - x[0]), h2 = std::abs(y[1] - x[1]);
    if (h1 * h1 + h2 * h2 >= 1.0) return 0.0;
    const bool vx = in_cone(x), vy = in_cone(y);
    if (vx && vy) return eval_m(h1, h2, p);
    if (!vx && !vy) return eval_m(h2, h1, p);
    return std::pow(std::max(h1, h2), -2.0 - p.a);
}

SandwichConstants ce_sandwich_constants(const CEKernelParams& p) {
    // On r<1, J r^{2+a} >= 1 with equality on the axes. J r^{2+b} is maximised
    // as r -> 1 where cos^{-a-2} and sin^{-b-2} cross, or on the cross-cone
    // diagonal where (r/max|h_i|)^{2+a} -> 2^{(2+a)/2}.
    double lo = 1e-12, hi = M_PI / 2 - 1e-12;
    auto f = [&](double t) { return (p.a + 2.0) * std::log(std::cos(t)) - (p.b + 2.0) * std::log(std::sin(t)); };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    const double peak = std::pow(std::cos(0.5 * (lo + hi)), -p.a - 2.0);
    const double k2 = std::max(peak, std::pow(2.0, 0.5 * (p.a + 2.0)));
    return {1.0 - 1e-12, k2 * (1.0 + 1e-12)};
}

namespace {

KernelParams ce_kernel_params(const CEKernelParams& p) {
    const SandwichConstants k = ce_sandwich_constants(p);
    KernelParams kp;
    kp.d = 2;
    kp.alpha = p.a;
    kp.beta = p.b;
    kp.kappa1 = k.kappa1;
    kp.kappa2 = k.kappa2;
    return kp;
}

std::string ce_tag(const CEKernelParams& p) { return "a=" + fmt_num(p.a) + ",b=" + fmt_num(p.b); }

}  // namespace

JumpKernel make_ce_J0(const CEKernelParams& p) {
    auto fn = [p](const Point& x, const Point& y) { return eval_J0(x, y, p); };
    return JumpKernel(ce_kernel_params(p), fn, "counterexample_J0", "J0(" + ce_tag(p) + ")", true);
}

JumpKernel make_ce_J1(const CEKernelParams& p) {
    auto fn = [p](const Point& x, const Point& y) { return eval_J1(x, y, p); };
    return JumpKernel(ce_kernel_params(p), fn, "counterexample_J1", "J1(" + ce_tag(p) + ")", false);
}

KillingRate killing_rate(const JumpKernel& J, const Ball& B, const Point& x, double abs_tol) {
    const int d = J.dim();
    if (!B.contains(x, d)) throw DomainError("killing_rate needs x strictly inside B");
    const double reach = jump_reach(J);
    if (d == 1) {
        const double c = B.center[0], R = B.radius;
        auto g = [&](double y) { return J(x, Point{y, 0.0}); };
        QuadResult right{}, left{};
        if (x[0] + reach > c + R) right = integrate(g, c + R, x[0] + reach, abs_tol / 4);
        if (x[0] - reach < c - R) left = integrate(g, x[0] - reach, c - R, abs_tol / 4);
        return {2.0 * (right.value + left.value), 2.0 * (right.error + left.error)};
    }
    const double dx = x[0] - B.center[0], dy = x[1] - B.center[1];
    const double q = dx * dx + dy * dy - B.radius * B.radius;
    double inner_err = 0.0;
    auto ray = [&](double th) {
        const double e0 = std::cos(th), e1 = std::sin(th);
        const double b = dx * e0 + dy * e1;
        const double rho_exit = -b + std::sqrt(b * b - q);
        if (rho_exit >= reach) return 0.0;
        auto g = [&](double rho) { return J(x, Point{x[0] + rho * e0, x[1] + rho * e1}) * rho; };
        QuadResult r = integrate_adaptive(g, rho_exit, reach, abs_tol / (16 * M_PI), 1e-11);
        inner_err = std::max(inner_err, r.error);
        return r.value;
    };
    QuadResult outer = integrate(ray, 0.0, 2.0 * M_PI, abs_tol / 4);
    return {2.0 * outer.value, 2.0 * (outer.error + 2.0 * M_PI * inner_err)};
}

namespace {

struct PairSampler {
    RandomStream rng;
    int d;
    std::pair<Point, Point> next(double far_fraction) {
        Point x{rng.uniform(-1.0, 1.0), d == 2 ? rng.uniform(-1.0, 1.0) : 0.0};
        double r;
        if (rng.uniform() < far_fraction)
            r = rng.uniform(1.0, 1.6);
        else
            r = std::exp(rng.uniform(std::log(1e-3), 0.0));
        Point y = x;
        if (d == 1) {
            y[0] += rng.sign() * r;
        } else {
            const double th = rng.uniform(0.0, 2 * M_PI);
            y[0] += r * std::cos(th);
            y[1] += r * std::sin(th);
        }
        return {x, y};
    }
};

}  // namespace

ValidationReport validate(const JumpKernel& J, std::size_t n_samples, std::uint64_t rng_seed,
                          const std::vector<std::pair<Point, Point>>& extra_pairs) {
    const KernelParams& p = J.params();
    const int d = p.d;
    ValidationReport rep;
    rep.lower_ratio_min = std::numeric_limits<double>::infinity();
    PairSampler sampler{RandomStream(rng_seed, stream_id(0x76616c6964ull)), d};
    auto record = [&](Violation v) {
        rep.passed = false;
        if (rep.violations.size() < 32) rep.violations.push_back(v);
    };
    auto check = [&](const Point& x, const Point& y) {
        const double r = distance(x, y, d);
        if (r == 0.0) return;
        ++rep.samples;
        const double a = J(x, y), b = J(y, x);
        const double scale = std::max(std::abs(a), std::abs(b));
        const double asym = scale > 0.0 ? std::abs(a - b) / scale : 0.0;
        rep.symmetry_worst = std::max(rep.symmetry_worst, asym);
        if (asym > 1e-12) record({"symmetry", x, y, a, b});
        if (r >= 1.0) {
            rep.support_worst = std::max(rep.support_worst, a);
            if (a > 1e-12 * p.kappa2) record({"support", x, y, a, 0.0});
            return;
        }
        const double lower = p.kappa1 * std::pow(r, -(d + p.alpha));
        const double upper = p.kappa2 * std::pow(r, -(d + p.beta));
        rep.lower_ratio_min = std::min(rep.lower_ratio_min, a / lower);
        rep.upper_ratio_max = std::max(rep.upper_ratio_max, a / upper);
        if (a < lower) record({"lower", x, y, a, lower});
        if (a > upper) record({"upper", x, y, a, upper});
    };
    for (const auto& [x, y] : extra_pairs) check(x, y);
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto [x, y] = sampler.next(0.2);
        check(x, y);
    }
    return rep;
}

SandwichConstants measure_sandwich(const JumpKernel& J, std::size_t n_samples, std::uint64_t rng_seed) {
    const KernelParams& p = J.params();
    PairSampler sampler{RandomStream(rng_seed, stream_id(0x73616e64ull)), p.d};
    SandwichConstants s{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto [x, y] = sampler.next(0.0);
        const double r = distance(x, y, p.d);
        if (r == 0.0 || r >= 1.0) continue;
        const double v = J(x, y);
        s.kappa1 = std::min(s.kappa1, v * std::pow(r, p.d + p.alpha));
        s.kappa2 = std::max(s.kappa2, v * std::pow(r, p.d + p.beta));
    }
    return s;
}

}  // namespace kernels
}  // namespace nonlocal

#include "nonlocal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "nonlocal/errors.hpp"
#include "nonlocal/experiments.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal::analysis {

using io::Json;
using io::format_double;

const std::vector<ClaimBinding>& bindings() {
    static const std::vector<ClaimBinding> b = {
        {"marginal-closed-form", "n1(z) = int_{-1}^{1} m(z,z2) dz2 and n2(z) = int_{-1}^{1} m(z1,z) dz1 in closed form",
         "kernels", ClaimClass::pass},
        {"order-formulas", "alpha = ((a+1)(b+1)-1)/(b+2) < beta = ((a+1)(b+1)-1)/(a+2); beta < 1 iff a < (2-b)/b",
         "kernels", ClaimClass::pass},
        {"spectral-structure", "L = L^T; sum psi_i psi_j h^d = delta_ij; p(t+s) = p(t) h^d p(s); sum_y p(t,x,y) h^d = 1",
         "spectral", ClaimClass::pass},
        {"ondiag-decay", "sup_x p(t,x,x) <= C t^{-d/alpha}", "spectral", ClaimClass::pass},
        {"killed-lower-bound", "p^B(t,x,y) >= C > 0 on B(y0,3R/4)^2 for t in [delta,T]; p^B(t,x,y0) ~ (R-|x|)^beta",
         "spectral", ClaimClass::pass},
        {"perturbation-bound", "p(t,x,y) <= p0(t,x,y) + t ||J1||_inf", "spectral", ClaimClass::pass},
        {"log-entropy-derivative", "G(t) = sum phi log p^B(t,.,y0) h^d has G'(t) = -E(p^B(t,.,y0), phi / p^B(t,.,y0))",
         "spectral", ClaimClass::pass},
        {"weighted-poincare",
         "sum (f - f_phi)^2 phi <= C sum (f(x)-f(y))^2 min(phi(x),phi(y)) J(x,y), phi = (R^2-|x-y0|^2)^{12/(2-beta)}",
         "spectral", ClaimClass::pass},
        {"mosco-convergence", "||P^xi_t f - P_t f||_2 -> 0 as xi -> 0 with E^xi(u,u) >= E(u,u)", "spectral",
         ClaimClass::pass},
        {"parabolic-harnack", "sup_{[T,2T] x B(x0,R)} u <= C inf_{[3T,4T] x B(x0,R)} u for caloric u >= 0",
         "spectral", ClaimClass::pass},
        {"meyer-construction", "added jumps counted by int calJ(Z_s) ds; P(no added jump before t) >= exp(-t sup calJ)",
         "montecarlo", ClaimClass::pass},
        {"exit-deviation",
         "P(sup_{s<=t1} |X_s-x| > 1/4) < 1/4; P(sup_{s<=t} |X_s-x| > 2r) <= 2 sup_{s<=t} P(|X_s-x| > r)",
         "montecarlo", ClaimClass::pass},
        {"counterexample-gap", "h(x) = P^x(X_sigma in V(1/2)) has h(x_n) - h(Theta x_n) bounded below as x_n -> 0",
         "counterexample", ClaimClass::pass},
        {"semigroup-discontinuity", "E^x H(X_t0) - E^{Theta x} H(X_t0) bounded below as x -> 0, H(Theta x) = -H(x)",
         "counterexample", ClaimClass::pass},
        {"determinism", "identical config and seed give byte-identical CSV/JSON for 1 and 8 workers", "all",
         ClaimClass::pass},
        {"kernel-validation", "J(x,y) = J(y,x); J = 0 for |x-y| >= 1; kappa1 r^{-d-alpha} <= J <= kappa2 r^{-d-beta}",
         "kernels", ClaimClass::pass},
        {"counterexample-kernel-audit", "J1 symmetric, Theta-invariant, r^{-2-a} <= J1 <= kappa2 r^{-2-b} on r < 1",
         "kernels", ClaimClass::pass},
        {"nash-inequality", "||u||_2^{2+2alpha/d} <= C (E(u,u)/kappa1 + ||u||_2^2) ||u||_1^{2alpha/d}", "spectral",
         ClaimClass::reported_only},
    };
    return b;
}

const ClaimBinding& binding(const std::string& id) {
    for (const auto& b : bindings())
        if (b.id == id) return b;
    throw ParameterError("unknown claim " + id);
}

std::vector<std::string> acceptance_ids() {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < 15; ++i) out.push_back(bindings()[i].id);
    return out;
}

bool ConformanceReport::any_failed() const {
    return std::any_of(claims.begin(), claims.end(), [](const ClaimRecord& c) { return c.status == "fail"; });
}

const ClaimRecord* ConformanceReport::find(const std::string& id) const {
    for (const auto& c : claims)
        if (c.id == id) return &c;
    return nullptr;
}

Json ConformanceReport::to_json() const {
    Json cl = Json::array();
    for (const auto& c : claims) {
        const auto& b = binding(c.id);
        cl.push_back(Json{{"id", c.id},
                          {"anchor", b.anchor},
                          {"class", b.cls == ClaimClass::pass ? "pass" : "reported-only"},
                          {"status", c.status},
                          {"tolerance", c.tolerance},
                          {"measured", c.measured}});
    }
    Json arts = Json::array();
    for (const auto& a : artifacts) arts.push_back(a.name);
    return Json{{"schema_version", "1.0"}, {"suite", suite},         {"environment", environment},
                {"passed", !any_failed()},  {"claims", cl},          {"artifacts", arts}};
}

std::string ConformanceReport::json_text() const { return to_json().dump(2) + "\n"; }

std::string ConformanceReport::canonical_bytes() const {
    std::string s = json_text();
    for (const auto& a : artifacts) s += "\n--- " + a.name + "\n" + a.content;
    return s;
}

// ---------------------------------------------------------------- cache

namespace {

std::string fnv_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

template <class T>
void put(std::string& out, const T& v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool take(const std::string& in, std::size_t& pos, T& v) {
    if (pos + sizeof(T) > in.size()) return false;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return true;
}

std::string serialize(const spectral::EigenSystem& es) {
    std::string out = "NLEIG1";
    const std::uint64_t n = es.size(), fl = es.fingerprint.size();
    put(out, n);
    put(out, fl);
    out += es.fingerprint;
    put(out, es.cell_volume);
    put(out, static_cast<std::int32_t>(es.d));
    put(out, static_cast<std::int32_t>(es.mode == lattice::Mode::killed));
    put(out, es.max_residual);
    for (std::uint64_t i = 0; i < n; ++i) put(out, es.eigenvalues[i]);
    for (std::uint64_t j = 0; j < n; ++j)
        for (std::uint64_t i = 0; i < n; ++i) put(out, es.vectors(i, j));
    for (const auto& p : es.positions) {
        put(out, p[0]);
        put(out, p[1]);
    }
    return out;
}

bool deserialize(const std::string& in, const std::string& fingerprint, spectral::EigenSystem& es) {
    if (in.compare(0, 6, "NLEIG1") != 0) return false;
    std::size_t pos = 6;
    std::uint64_t n = 0, fl = 0;
    if (!take(in, pos, n) || !take(in, pos, fl) || pos + fl > in.size()) return false;
    es.fingerprint = in.substr(pos, fl);
    pos += fl;
    if (es.fingerprint != fingerprint) return false;
    std::int32_t d = 0, killed = 0;
    if (!take(in, pos, es.cell_volume) || !take(in, pos, d) || !take(in, pos, killed) ||
        !take(in, pos, es.max_residual))
        return false;
    es.d = d;
    es.mode = killed ? lattice::Mode::killed : lattice::Mode::conservative;
    es.eigenvalues.resize(static_cast<Eigen::Index>(n));
    es.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i)
        if (!take(in, pos, es.eigenvalues[i])) return false;
    for (std::uint64_t j = 0; j < n; ++j)
        for (std::uint64_t i = 0; i < n; ++i)
            if (!take(in, pos, es.vectors(i, j))) return false;
    es.positions.resize(n);
    for (auto& p : es.positions)
        if (!take(in, pos, p[0]) || !take(in, pos, p[1])) return false;
    return pos == in.size();
}

}  // namespace

EigenCache::EigenCache(std::string disk_dir) : dir_(std::move(disk_dir)) {}

const spectral::EigenSystem& EigenCache::get(const lattice::Generator& G) {
    const std::string key = G.fingerprint();
    if (auto it = mem_.find(key); it != mem_.end()) {
        ++hits_;
        return *it->second;
    }
    auto es = std::make_shared<spectral::EigenSystem>();
    const std::string path = dir_.empty() ? "" : dir_ + "/" + fnv_hex(key) + ".eig";
    bool loaded = false;
    if (!path.empty() && std::filesystem::exists(path)) {
        try {
            loaded = deserialize(io::read_file(path), key, *es);
        } catch (const IoError&) {
            loaded = false;
        }
    }
    if (loaded) {
        ++hits_;
    } else {
        *es = spectral::eigensolve(G);
        if (!path.empty()) io::write_atomic(path, serialize(*es));
    }
    return *mem_.emplace(key, es).first->second;
}

std::string cache_dir(const config::RunConfig& cfg) {
    if (const char* env = std::getenv("NONLOCAL_LAB_CACHE"); env && *env) return env;
    return cfg.out_dir + "/cache";
}

kernels::JumpKernel build_kernel(const config::KernelBlock& k) {
    kernels::KernelParams p;
    p.d = k.d;
    p.alpha = k.alpha;
    p.beta = k.beta;
    p.kappa1 = k.kappa1;
    p.kappa2 = k.kappa2;
    p.xi = k.xi;
    if (k.family == "stable_like") return kernels::make_stable_like(p);
    if (k.family == "tabulated") {
        auto J = kernels::load_tabulated(p, k.table);
        return k.xi ? kernels::regularize(J, *k.xi) : J;
    }
    const auto ce = kernels::make_ce_params(k.a, k.b);
    if (k.family == "counterexample_J0") return kernels::make_ce_J0(ce);
    if (k.family == "counterexample_J1") return kernels::make_ce_J1(ce);
    throw ConfigError("kernel.family: unknown family " + k.family);
}

// ---------------------------------------------------------------- claims

namespace {

Json vec(const std::vector<double>& v) { return io::numbers(v); }

std::string status_of(bool ok) { return ok ? "pass" : "fail"; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Context {
    const config::RunConfig& cfg;
    unsigned workers;
    EigenCache cache;
    std::vector<Artifact> artifacts;
    std::optional<mc::CounterexampleReport> ce;

    Context(const config::RunConfig& c, unsigned w) : cfg(c), workers(w), cache(cache_dir(c)) {}

    void emit(const std::string& name, const std::string& content) { artifacts.push_back({name, content}); }

    kernels::JumpKernel kernel() const { return build_kernel(cfg.kernel); }
    kernels::KernelParams params() const { return kernel().params(); }

    lattice::Lattice main_lattice() const {
        const auto& l = cfg.lattice;
        return lattice::Lattice({l.d, l.h, l.half_width, l.torus, l.site_cap});
    }
    lattice::Lattice lattice_with(double h, double half_width) const {
        return lattice::Lattice({cfg.lattice.d, h, half_width, true, cfg.lattice.site_cap});
    }
    kernels::JumpKernel isotropic(double gamma) const {
        kernels::KernelParams p;
        p.d = cfg.lattice.d;
        p.alpha = p.beta = gamma;
        p.kappa1 = p.kappa2 = 1.0;
        return kernels::make_stable_like(p);
    }
    mc::PathConfig path_config(double horizon, double eps) const {
        return {horizon, eps, cfg.seed, cfg.mc.max_events};
    }
};

// Adaptive quadrature with the kink of m as a breakpoint.
double quad_marginal(const std::function<double(double)>& f, double kink) {
    double s = 0.0;
    const double pts[] = {-1.0, -kink, 0.0, kink, 1.0};
    for (int i = 0; i < 4; ++i) s += integrate(f, pts[i], pts[i + 1], 1e-13, 1e-13).value;
    return s;
}

ClaimRecord claim_marginals(Context& c) {
    RandomStream rng(c.cfg.seed, stream_id(0x6d617267ull));
    io::CsvTable t({"a", "b", "marginal", "z", "closed_form", "quadrature", "rel_err"});
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double a = rng.uniform(0.05, 1.9);
        const double b = rng.uniform(a + 0.02, 1.98);
        const auto p = kernels::make_ce_params(a, b);
        for (int j = 0; j < 10; ++j) {
            const double z = rng.uniform(0.05, 1.0) * rng.sign();
            const double q1 = quad_marginal([&](double z2) { return kernels::eval_m(z, z2, p); },
                                            std::pow(std::abs(z), p.p()));
            const double q2 = quad_marginal([&](double z1) { return kernels::eval_m(z1, z, p); },
                                            std::pow(std::abs(z), 1.0 / p.p()));
            const double c1 = kernels::marginal_n1(z, p), c2 = kernels::marginal_n2(z, p);
            const double e1 = std::abs(q1 - c1) / std::abs(c1), e2 = std::abs(q2 - c2) / std::abs(c2);
            worst = std::max({worst, e1, e2});
            t.add_row({format_double(a), format_double(b), "n1", format_double(z), format_double(c1), format_double(q1),
                       format_double(e1)});
            t.add_row({format_double(a), format_double(b), "n2", format_double(z), format_double(c2), format_double(q2),
                       format_double(e2)});
        }
    }
    c.emit("marginals.csv", t.str());
    const double tol = c.cfg.tolerance.marginal_rel;
    ClaimRecord r{"marginal-closed-form", status_of(worst < tol), {{"max_rel_err", tol}}, {}, ""};
    r.measured = {{"pairs", 20},
                  {"z_per_pair", 10},
                  {"max_rel_err", worst},
                  {"n1_a0.5_b1_z0.5", kernels::marginal_n1(0.5, kernels::make_ce_params(0.5, 1.0))}};
    r.summary = "max rel err " + fmt(worst) + " (tol " + fmt(tol) + ")";
    return r;
}

ClaimRecord claim_orders(Context& c) {
    RandomStream rng(c.cfg.seed, stream_id(0x6f726465ull));
    std::size_t order_bad = 0, equiv_bad = 0, n = 0;
    while (n < 10000) {
        double a = rng.uniform(0.0, 2.0), b = rng.uniform(0.0, 2.0);
        if (a > b) std::swap(a, b);
        if (!(a < b)) continue;
        ++n;
        const auto o = kernels::derived_orders(a, b);
        order_bad += !(o.alpha < o.beta);
        equiv_bad += (o.beta < 1.0) != (a < (2.0 - b) / b);
    }
    const auto ex = kernels::derived_orders(0.5, 1.0);
    const bool ex_ok = std::abs(ex.alpha - 2.0 / 3.0) < 1e-15 && std::abs(ex.beta - 0.8) < 1e-15;
    ClaimRecord r{"order-formulas", status_of(order_bad == 0 && equiv_bad == 0 && ex_ok), {{"violations", 0}}, {}, ""};
    r.measured = {{"samples", n},
                  {"order_violations", order_bad},
                  {"equivalence_violations", equiv_bad},
                  {"alpha_a0.5_b1", ex.alpha},
                  {"beta_a0.5_b1", ex.beta}};
    r.summary = std::to_string(n) + " samples, " + std::to_string(order_bad + equiv_bad) + " violations";
    return r;
}

ClaimRecord claim_kernel_validation(Context& c) {
    const auto J = c.kernel();
    const auto rep = kernels::validate(J, c.cfg.kernel.validate_samples, c.cfg.seed);
    io::CsvTable t({"kind", "x0", "x1", "y0", "y1", "value", "bound"});
    for (const auto& v : rep.violations)
        t.add_row({v.kind, format_double(v.x[0]), format_double(v.x[1]), format_double(v.y[0]), format_double(v.y[1]),
                   format_double(v.value), format_double(v.bound)});
    c.emit("kernel_violations.csv", t.str());
    ClaimRecord r{"kernel-validation", status_of(rep.passed), {{"symmetry_rel", 1e-12}, {"sandwich", "exact"}}, {}, ""};
    r.measured = {{"family", J.family()},
                  {"fingerprint", J.fingerprint()},
                  {"samples", rep.samples},
                  {"symmetry_worst", rep.symmetry_worst},
                  {"support_worst", rep.support_worst},
                  {"lower_ratio_min", io::number(rep.lower_ratio_min)},
                  {"upper_ratio_max", io::number(rep.upper_ratio_max)},
                  {"violations", rep.violations.size()}};
    r.summary = J.family() + ": " + std::to_string(rep.violations.size()) + " violations in " +
                std::to_string(rep.samples) + " samples";
    return r;
}

ClaimRecord claim_ce_audit(Context& c) {
    const auto p = kernels::make_ce_params(c.cfg.counterexample.a, c.cfg.counterexample.b);
    const auto J = kernels::make_ce_J1(p);
    const auto rep = kernels::validate(J, 20000, c.cfg.seed);
    RandomStream rng(c.cfg.seed, stream_id(0x74686574ull));
    std::size_t theta_bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const Point x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const Point y{x[0] + rng.uniform(-0.7, 0.7), x[1] + rng.uniform(-0.7, 0.7)};
        if (x == y) continue;
        theta_bad += J(x, y) != J(theta(x), theta(y));
    }
    const auto measured = kernels::measure_sandwich(J, 20000, c.cfg.seed);
    ClaimRecord r{"counterexample-kernel-audit", status_of(rep.passed && theta_bad == 0), {{"theta_mismatches", 0}},
                  {}, ""};
    r.measured = {{"a", p.a},
                  {"b", p.b},
                  {"kappa1", J.params().kappa1},
                  {"kappa2", J.params().kappa2},
                  {"measured_kappa1", measured.kappa1},
                  {"measured_kappa2", measured.kappa2},
                  {"violations", rep.violations.size()},
                  {"theta_mismatches", theta_bad},
                  {"example_J1", kernels::eval_J1({0.1, 0.5}, {0.15, 0.6}, p)}};
    r.summary = "kappa2 " + fmt(J.params().kappa2) + ", " + std::to_string(rep.violations.size()) + " violations";
    return r;
}

ClaimRecord claim_structure(Context& c) {
    const auto lat = c.main_lattice();
    const auto G = lattice::assemble(c.kernel(), lat, lattice::Mode::conservative);
    std::size_t asym = 0;
    for (Eigen::Index i = 0; i < G.offdiag.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(G.offdiag, i); it; ++it)
            asym += it.value() != G.offdiag.coeff(it.col(), i);
    const double annihilate = G.apply(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(G.size()))).cwiseAbs().maxCoeff();
    const auto& es = c.cache.get(G);
    const double ortho = spectral::orthonormality_residual(es);
    double ck = 0.0, rows = 0.0;
    io::CsvTable t({"t", "s", "ck_error"});
    for (double a : c.cfg.spectral.ck_times) {
        rows = std::max(rows, spectral::max_row_sum_deviation(spectral::heat_kernel(es, a), es.cell_volume));
        for (double b : c.cfg.spectral.ck_times) {
            const double e = spectral::chapman_kolmogorov_error(es, a, b);
            ck = std::max(ck, e);
            t.add_row(std::vector<double>{a, b, e});
        }
    }
    c.emit("chapman_kolmogorov.csv", t.str());
    const auto& tol = c.cfg.tolerance;
    const bool ok = asym == 0 && annihilate == 0.0 && ortho < tol.orthonormality && ck < tol.ck && rows < tol.row_sum;
    ClaimRecord r{"spectral-structure", status_of(ok),
                  {{"asymmetric_entries", 0}, {"orthonormality", tol.orthonormality}, {"ck", tol.ck},
                   {"row_sum", tol.row_sum}},
                  {}, ""};
    r.measured = {{"sites", G.size()},         {"asymmetric_entries", asym}, {"max_abs_L1", annihilate},
                  {"orthonormality", ortho},   {"ck_max_error", ck},         {"row_sum_max_dev", rows},
                  {"eigen_residual", es.max_residual}};
    r.summary = std::to_string(G.size()) + " sites, orth " + fmt(ortho) + ", CK " + fmt(ck) + ", rows " + fmt(rows);
    return r;
}

Json fit_json(const spectral::FitReport& f) {
    return {{"window", {f.window_lo, f.window_hi}},
            {"times", vec(f.times)},
            {"values", vec(f.values)},
            {"fitted_constant", io::number(f.fitted_constant)},
            {"slope", io::number(f.slope)},
            {"residuals", vec(f.residuals)}};
}

ClaimRecord claim_decay(Context& c) {
    const auto lat = c.main_lattice();
    const double gamma = c.cfg.spectral.decay_gamma, tol = c.cfg.tolerance.slope;
    const auto& es_iso = c.cache.get(lattice::assemble(c.isotropic(gamma), lat, lattice::Mode::conservative));
    spectral::DecayOptions oi;
    oi.alpha = oi.beta = gamma;
    oi.kappa2 = 1.0;
    oi.h = lat.spacing();
    oi.slope_tol = tol;
    const auto iso = spectral::ondiag_decay_check(es_iso, oi);
    const bool iso_ok = iso.strictly_decreasing && std::abs(iso.slope - iso.target_slope) <= tol;

    const auto J = c.kernel();
    const auto& es_mix = c.cache.get(lattice::assemble(J, lat, lattice::Mode::conservative));
    spectral::DecayOptions om;
    om.alpha = J.params().alpha;
    om.beta = J.params().beta;
    om.kappa2 = J.params().kappa2;
    om.h = lat.spacing();
    const auto mix = spectral::ondiag_decay_check(es_mix, om);
    const bool mix_ok = mix.strictly_decreasing && std::isfinite(mix.fitted_constant) && mix.fitted_constant > 0;

    io::CsvTable t({"kernel", "t", "max_diag", "scaled"});
    for (std::size_t i = 0; i < iso.times.size(); ++i)
        t.add_row({"isotropic", format_double(iso.times[i]), format_double(iso.values[i]),
                   format_double(iso.values[i] * std::pow(iso.times[i], -iso.target_slope))});
    for (std::size_t i = 0; i < mix.times.size(); ++i)
        t.add_row({"mixed", format_double(mix.times[i]), format_double(mix.values[i]),
                   format_double(mix.values[i] * std::pow(mix.times[i], -mix.target_slope))});
    c.emit("ondiag_decay.csv", t.str());

    ClaimRecord r{"ondiag-decay", status_of(iso_ok && mix_ok), {{"slope_band", tol}}, {}, ""};
    Json ij = fit_json(iso);
    ij["gamma"] = gamma;
    ij["target_slope"] = iso.target_slope;
    ij["strictly_decreasing"] = iso.strictly_decreasing;
    Json mj = fit_json(mix);
    mj["target_slope"] = mix.target_slope;
    mj["strictly_decreasing"] = mix.strictly_decreasing;
    r.measured = {{"isotropic", ij}, {"mixed", mj}};
    r.summary = "iso slope " + fmt(iso.slope) + " vs " + fmt(iso.target_slope) + ", mixed C " + fmt(mix.fitted_constant);
    return r;
}

lattice::Generator killed_generator(Context& c, const kernels::JumpKernel& J, double h, double R) {
    const auto lat = c.lattice_with(h, std::max(2.0, std::ceil(R + 1.0)));
    return lattice::assemble(J, lat, lattice::Mode::killed, Ball{{0.0, 0.0}, R});
}

ClaimRecord claim_lower_bound(Context& c) {
    const auto& s = c.cfg.spectral;
    const double R = s.profile_radius;
    const auto& es_mix = c.cache.get(killed_generator(c, c.kernel(), s.profile_h, R));
    const auto mix = spectral::killed_lower_bound_check(es_mix, {0, 0}, R, s.delta, s.T);
    const auto& es_iso = c.cache.get(killed_generator(c, c.isotropic(s.profile_gamma), s.profile_h, R));
    const auto iso = spectral::killed_lower_bound_check(es_iso, {0, 0}, R, s.delta, s.T);
    const double tol = c.cfg.tolerance.profile;
    const bool slope_ok = std::abs(iso.slope - s.profile_gamma) <= tol;
    Json sweep = Json::array();
    for (double g : {0.5, 1.0, 1.5}) {
        const auto& es = c.cache.get(killed_generator(c, c.isotropic(g), s.profile_h, R));
        const auto rep = spectral::killed_lower_bound_check(es, {0, 0}, R, s.delta, s.T);
        sweep.push_back({{"gamma", g}, {"slope", rep.slope}, {"slope_over_gamma", rep.slope / g}});
    }
    io::CsvTable t({"dist", "p"});
    for (std::size_t i = 0; i < iso.profile_dist.size(); ++i)
        t.add_row(std::vector<double>{iso.profile_dist[i], iso.profile_values[i]});
    c.emit("boundary_profile.csv", t.str());
    io::CsvTable m({"kernel", "t", "min_p"});
    for (std::size_t i = 0; i < mix.times.size(); ++i)
        m.add_row({"mixed", format_double(mix.times[i]), format_double(mix.minima[i])});
    for (std::size_t i = 0; i < iso.times.size(); ++i)
        m.add_row({"isotropic", format_double(iso.times[i]), format_double(iso.minima[i])});
    c.emit("killed_minima.csv", m.str());

    ClaimRecord r{"killed-lower-bound", status_of(mix.positive && iso.positive && slope_ok),
                  {{"min_positive", true}, {"profile_slope_band", tol}, {"delta", s.delta}, {"T", s.T}}, {}, ""};
    r.measured = {{"mixed_minima", vec(mix.minima)},
                  {"isotropic_minima", vec(iso.minima)},
                  {"profile_gamma", s.profile_gamma},
                  {"profile_slope", iso.slope},
                  {"profile_fit", fit_json(iso)},
                  {"mirror_error", iso.mirror_error},
                  {"slope_sweep", sweep}};
    r.summary = "min p^B " + fmt(*std::min_element(mix.minima.begin(), mix.minima.end())) + ", profile slope " +
                fmt(iso.slope) + " vs beta " + fmt(s.profile_gamma);
    return r;
}

ClaimRecord claim_perturbation(Context& c) {
    const auto lat = c.main_lattice();
    const auto& s = c.cfg.spectral;
    std::vector<double> ts;
    for (int k = 1; k <= s.perturb_times; ++k) ts.push_back(s.perturb_t_max * k / s.perturb_times);
    const auto J1 = kernels::make_shell(lat.dim(), s.perturb_c, 0.5, 1.0);
    const auto rep = spectral::perturbation_bound_check(c.kernel(), J1, lat, ts);
    bool ok = true;
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        ok = ok && rep.max_diff[i] <= rep.bound[i] + c.cfg.tolerance.perturb;
    io::CsvTable t({"t", "max_diff", "bound"});
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        t.add_row(std::vector<double>{rep.times[i], rep.max_diff[i], rep.bound[i]});
    c.emit("perturbation.csv", t.str());
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.times.size(); ++i) slack = std::min(slack, rep.bound[i] - rep.max_diff[i]);
    ClaimRecord r{"perturbation-bound", status_of(ok), {{"additive", c.cfg.tolerance.perturb}}, {}, ""};
    r.measured = {{"j1_sup", rep.j1_sup}, {"times", vec(rep.times)}, {"max_diff", vec(rep.max_diff)},
                  {"bound", vec(rep.bound)}, {"min_slack", slack}};
    r.summary = "min slack " + fmt(slack) + " over " + std::to_string(ts.size()) + " times";
    return r;
}

ClaimRecord claim_entropy(Context& c) {
    const auto& s = c.cfg.spectral;
    const auto J = c.kernel();
    const auto G = killed_generator(c, J, s.profile_h, s.profile_radius);
    const auto& es = c.cache.get(G);
    const std::size_t y0 = es.state_at({0.0, 0.0});
    const auto phi = lattice::poincare_weight(G, {0.0, 0.0}, s.profile_radius, J.params().beta);
    const auto rep = spectral::log_entropy_check(es, G, y0, phi, s.entropy_times);
    bool ok = std::all_of(rep.positive.begin(), rep.positive.end(), [](bool b) { return b; });
    ok = ok && rep.max_rel_err <= c.cfg.tolerance.entropy_rel;
    io::CsvTable t({"t", "finite_difference", "form", "rel_err"});
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        t.add_row(std::vector<double>{rep.times[i], rep.fd[i], rep.form[i], rep.rel_err[i]});
    c.emit("log_entropy.csv", t.str());
    ClaimRecord r{"log-entropy-derivative", status_of(ok), {{"rel_err", c.cfg.tolerance.entropy_rel}}, {}, ""};
    r.measured = {{"times", vec(rep.times)}, {"finite_difference", vec(rep.fd)}, {"form", vec(rep.form)},
                  {"rel_err", vec(rep.rel_err)}, {"max_rel_err", rep.max_rel_err}};
    r.summary = "max rel err " + fmt(rep.max_rel_err);
    return r;
}

ClaimRecord claim_poincare(Context& c) {
    const auto& s = c.cfg.spectral;
    const auto J = c.kernel();
    const double R = s.poincare_radius;
    const double L = std::ceil(R + 2.0);
    const Ball B{{0.0, 0.0}, R};
    std::vector<double> by_seed;
    io::CsvTable t({"h", "seed_index", "max_ratio"});
    const auto lat = c.lattice_with(s.poincare_h, L);
    for (std::size_t k = 0; k < s.poincare_seeds; ++k) {
        const auto rep = lattice::weighted_poincare_check(J, lat, B, s.poincare_trials, stream_id(c.cfg.seed, 0x706f, k));
        by_seed.push_back(rep.max_ratio);
        t.add_row(std::vector<double>{s.poincare_h, double(k), rep.max_ratio});
    }
    const auto fine = lattice::weighted_poincare_check(J, c.lattice_with(s.poincare_h / 2, L), B, s.poincare_trials,
                                                       stream_id(c.cfg.seed, 0x706f, 0));
    t.add_row(std::vector<double>{s.poincare_h / 2, 0.0, fine.max_ratio});
    c.emit("weighted_poincare.csv", t.str());
    const double lo = *std::min_element(by_seed.begin(), by_seed.end());
    const double hi = *std::max_element(by_seed.begin(), by_seed.end());
    const double spread = (hi - lo) / lo;
    const double refine = std::abs(fine.max_ratio - by_seed[0]) / by_seed[0];
    const double tol = c.cfg.tolerance.poincare_variation;
    const bool finite = std::isfinite(hi) && lo > 0 && std::isfinite(fine.max_ratio);
    ClaimRecord r{"weighted-poincare", status_of(finite && spread < tol && refine < tol), {{"variation", tol}}, {}, ""};
    r.measured = {{"R", R},
                  {"trials", s.poincare_trials},
                  {"max_ratio_by_seed", vec(by_seed)},
                  {"max_ratio_refined", fine.max_ratio},
                  {"seed_spread", spread},
                  {"refinement_change", refine}};
    r.summary = "C ~ " + fmt(hi) + ", seed spread " + fmt(spread) + ", h/2 change " + fmt(refine);
    return r;
}

ClaimRecord claim_nash(Context& c) {
    const auto J = c.kernel();
    const auto lat = c.main_lattice();
    const auto a = lattice::nash_check(J, lat, 200, c.cfg.seed);
    const auto& l = c.cfg.lattice;
    Json measured = {{"h", lat.spacing()}, {"max_ratio", a.max_ratio}, {"c", 1.0}};
    std::string summary = "max ratio " + fmt(a.max_ratio);
    try {
        const lattice::Lattice fine({l.d, l.h / 2, l.half_width, l.torus, l.site_cap});
        const auto b = lattice::nash_check(J, fine, 200, c.cfg.seed);
        measured["refined_max_ratio"] = b.max_ratio;
        measured["refinement_change"] = std::abs(b.max_ratio - a.max_ratio) / a.max_ratio;
        summary += ", at h/2 " + fmt(b.max_ratio);
    } catch (const SizeError&) {
        measured["refined_max_ratio"] = "skipped: site cap";
    }
    return {"nash-inequality", "reported-only", Json::object(), measured, summary};
}

ClaimRecord claim_mosco(Context& c) {
    const auto lat = c.main_lattice();
    const auto& m = c.cfg.mosco;
    const auto f = lattice::random_bump_vector(lat, c.cfg.seed, 0);
    const auto rep = spectral::mosco_check(c.kernel(), m.xi, lat, f, m.t, m.form_trials, c.cfg.seed);
    const double mult = c.cfg.tolerance.mosco_floor_multiple;
    const bool floor_ok = rep.errors.back() < mult * rep.floor;
    io::CsvTable t({"xi", "error"});
    for (std::size_t k = 0; k < rep.xi.size(); ++k) t.add_row(std::vector<double>{rep.xi[k], rep.errors[k]});
    c.emit("mosco.csv", t.str());
    ClaimRecord r{"mosco-convergence", status_of(rep.strictly_decreasing && floor_ok && rep.form_monotone),
                  {{"floor_multiple", mult}, {"strictly_decreasing", true}, {"form_monotone", true}}, {}, ""};
    r.measured = {{"xi", vec(rep.xi)},
                  {"errors", vec(rep.errors)},
                  {"floor", rep.floor},
                  {"strictly_decreasing", rep.strictly_decreasing},
                  {"form_monotone", rep.form_monotone},
                  {"form_trials", rep.form_trials},
                  {"t", m.t}};
    r.summary = "e_k final " + fmt(rep.errors.back()) + ", floor " + fmt(rep.floor);
    return r;
}

ClaimRecord claim_harnack(Context& c) {
    const auto& hb = c.cfg.harnack;
    if (4 * hb.R > hb.half_width) throw ConfigError("harnack: 4R must not exceed harnack.half_width");
    const auto lat = c.lattice_with(hb.h, hb.half_width);
    auto p = c.params();
    p.xi.reset();
    std::vector<double> per_kernel, swapped;
    std::size_t degenerate = 0;
    io::CsvTable t({"kernel", "trial", "rho", "rho_swapped"});
    for (std::size_t k = 0; k < hb.kernels; ++k) {
        const auto J = kernels::make_random_sandwich(p, stream_id(c.cfg.seed, 0x6861, k));
        const auto& es = c.cache.get(lattice::assemble(J, lat, lattice::Mode::killed, Ball{{0.0, 0.0}, 4 * hb.R}));
        const auto rep = spectral::harnack_ratio_check(es, {0.0, 0.0}, hb.R, hb.T, hb.trials, c.cfg.seed);
        degenerate += rep.degenerate;
        per_kernel.push_back(rep.rho.empty() ? std::numeric_limits<double>::infinity() : rep.max_rho);
        swapped.push_back(rep.max_rho_swapped);
        for (std::size_t i = 0; i < rep.rho.size(); ++i)
            t.add_row(std::vector<double>{double(k), double(i), rep.rho[i], rep.rho_swapped[i]});
    }
    c.emit("harnack.csv", t.str());
    const double lo = *std::min_element(per_kernel.begin(), per_kernel.end());
    const double hi = *std::max_element(per_kernel.begin(), per_kernel.end());
    const double variation = hi / lo;
    const double tol = c.cfg.tolerance.harnack_variation;
    const bool ok = std::isfinite(hi) && lo >= 1.0 && variation < tol;
    ClaimRecord r{"parabolic-harnack", status_of(ok), {{"max_over_min_across_kernels", tol}}, {}, ""};
    r.measured = {{"max_rho_by_kernel", vec(per_kernel)},
                  {"max_rho_swapped_by_kernel", vec(swapped)},
                  {"reported_C", io::number(hi)},
                  {"variation", io::number(variation)},
                  {"degenerate_trials", degenerate},
                  {"sites", lat.size()}};
    r.summary = "C ~ " + fmt(hi) + ", variation x" + fmt(variation);
    return r;
}

ClaimRecord claim_meyer(Context& c) {
    const auto& m = c.cfg.meyer;
    const auto rep =
        mc::meyer_constant_rate_check(m.rate, m.horizon, m.n_paths, c.path_config(m.horizon, c.cfg.mc.eps), c.workers, m.d);
    io::CsvTable t({"point_x", "point_y", "estimate", "ci_half_width", "n", "horizon_exhausted_fraction", "quantity"});
    auto row = [&](const Estimate& e, const char* q) {
        t.add_row({"0", "0", format_double(e.mean), format_double(e.half_width_95), std::to_string(e.n), "0", q});
    };
    row(rep.added_count, "added_jump_count");
    row(rep.no_add_fraction, "no_added_jump_fraction");
    c.emit("meyer.csv", t.str());
    ClaimRecord r{"meyer-construction", status_of(rep.poisson_ok && rep.bound_ok), {{"sigma", 3}}, {}, ""};
    r.measured = {{"rate", rep.rate},
                  {"horizon", rep.horizon},
                  {"added_count", io::to_json(rep.added_count)},
                  {"poisson_z", rep.poisson_z},
                  {"no_add_fraction", io::to_json(rep.no_add_fraction)},
                  {"lower_bound", rep.lemma_bound}};
    const double sigma = std::sqrt(rep.lemma_bound * (1 - rep.lemma_bound) / double(rep.no_add_fraction.n));
    r.measured["lower_bound_minus_3sigma"] = rep.lemma_bound - 3 * sigma;
    r.summary = "mean added " + fmt(rep.added_count.mean) + " (cT " + fmt(m.rate * m.horizon) + ", z " +
                fmt(rep.poisson_z) + "), no-add " + fmt(rep.no_add_fraction.mean) + " >= " +
                fmt(rep.lemma_bound - 3 * sigma) + " (exp(-cT) - 3 sigma)";
    return r;
}

ClaimRecord claim_deviation(Context& c) {
    const auto& dv = c.cfg.deviation;
    const double eps = c.cfg.mc.eps, xi = dv.xi;
    const int d = 1;
    kernels::KernelParams p;
    p.d = d;
    p.alpha = dv.alpha;
    p.beta = dv.beta;
    p.kappa1 = dv.kappa1;
    p.kappa2 = dv.kappa2;
    const auto J = kernels::regularize(kernels::make_random_sandwich(p, stream_id(c.cfg.seed, 0x646576)), xi);
    const double k1 = p.kappa1, k2 = p.kappa2, a = p.alpha, b = p.beta;
    auto base_density = [=](double r) { return r <= xi ? k2 * std::pow(r, -d - b) : k1 * std::pow(r, -d - a); };
    auto base = std::make_shared<mc::LevyProcess>(std::make_shared<mc::RadialLaw>(
        d, std::vector<mc::RadialPiece>{{k2, b, eps, xi}, {k1, a, xi, 1.0}}));
    const mc::PairFn J0 = [=](const Point& x, const Point& y) {
        const double r = std::abs(y[0] - x[0]);
        return r < 1.0 ? base_density(r) : 0.0;
    };
    const mc::PairFn diff = [=](const Point& x, const Point& y) {
        const double r = std::abs(y[0] - x[0]);
        if (r <= xi || r >= 1.0) return 0.0;
        return J(x, y) - J0(x, y);
    };
    auto rate = std::make_shared<mc::GridRate>(
        d, 4.0, 321, [&](const Point& x) { return mc::difference_rate(J, J0, x, xi); });
    auto envelope = std::make_shared<mc::RadialLaw>(d, std::vector<mc::RadialPiece>{{k2, b, xi, 1.0}});
    mc::MeyerAddProcess proc(base, [rate](const Point& x) { return (*rate)(x); }, diff, envelope);
    const auto rep = mc::deviation_probability_checks(proc, {0.0, 0.0}, dv.r_grid, dv.t_grid, dv.n_paths,
                                                      c.path_config(dv.t_grid.back(), eps), c.workers);
    io::CsvTable t({"point_x", "point_y", "estimate", "ci_half_width", "n", "horizon_exhausted_fraction", "r", "t",
                    "event"});
    for (std::size_t i = 0; i < rep.r_grid.size(); ++i)
        for (std::size_t k = 0; k < rep.t_grid.size(); ++k)
            for (int e = 0; e < 2; ++e) {
                const Estimate& est = e == 0 ? rep.sup_exceed[i][k] : rep.point_exceed[i][k];
                t.add_row({"0", "0", format_double(est.mean), format_double(est.half_width_95), std::to_string(est.n),
                           "0", format_double(rep.r_grid[i]), format_double(rep.t_grid[k]),
                           e == 0 ? "sup_exceeds_r" : "endpoint_exceeds_r"});
            }
    c.emit("deviation.csv", t.str());
    ClaimRecord r{"exit-deviation", status_of(rep.t1_found && rep.doubling_holds && rep.monotone_in_r),
                  {{"t1_upper_confidence", 0.25}, {"doubling_sigma", 3}}, {}, ""};
    r.measured = {{"t1_found", rep.t1_found},
                  {"t1", rep.t1},
                  {"doubling_lhs", rep.doubling_lhs},
                  {"doubling_rhs", rep.doubling_rhs},
                  {"doubling_holds", rep.doubling_holds},
                  {"monotone_in_r", rep.monotone_in_r},
                  {"decay_slope_by_t", vec(rep.decay_slope)},
                  {"calJ_sup", rate->sup()}};
    r.summary = "t1 " + fmt(rep.t1) + ", doubling " + fmt(rep.doubling_lhs) + " <= " + fmt(rep.doubling_rhs) + " + 3 sigma";
    return r;
}

mc::CounterexampleConfig ce_config(const Context& c) {
    const auto& b = c.cfg.counterexample;
    mc::CounterexampleConfig k;
    k.eps = b.eps;
    k.n_paths = b.n_paths;
    k.n_search_paths = b.n_search_paths;
    k.seed = c.cfg.seed;
    k.workers = c.workers;
    k.n_points = b.n_points;
    k.t0_grid = b.t0_grid;
    k.r_grid = b.r_grid;
    k.horizon = b.horizon;
    k.max_events = c.cfg.mc.max_events;
    k.sensitivity = b.sensitivity;
    return k;
}

ClaimRecord claim_counterexample(Context& c) {
    const auto p = kernels::make_ce_params(c.cfg.counterexample.a, c.cfg.counterexample.b);
    c.ce = mc::counterexample_experiment(p, ce_config(c));
    const auto& rep = *c.ce;
    auto table = io::estimate_table();
    auto mirrored = io::estimate_table();
    Json pts = Json::array();
    for (const auto& pr : rep.points) {
        io::add_estimate_row(table, pr.x[0], pr.x[1], pr.h.estimate, pr.h.exhausted_fraction);
        const Point tx = theta(pr.x);
        io::add_estimate_row(table, tx[0], tx[1], pr.h_theta.estimate, pr.h_theta.exhausted_fraction);
        io::add_estimate_row(mirrored, tx[0], tx[1], pr.h_mirrored.estimate, pr.h_mirrored.exhausted_fraction);
        pts.push_back({{"n", pr.n},
                       {"x", {pr.x[0], pr.x[1]}},
                       {"h", io::to_json(pr.h.estimate)},
                       {"h_theta", io::to_json(pr.h_theta.estimate)},
                       {"h_mirrored", io::to_json(pr.h_mirrored.estimate)},
                       {"gap", pr.gap},
                       {"gap_half_width", pr.gap_half_width},
                       {"qualifies", pr.qualifies},
                       {"equivariant", pr.equivariant}});
    }
    c.emit("counterexample.csv", table.str());
    c.emit("counterexample_mirrored.csv", mirrored.str());
    io::CsvTable s({"t0", "r", "p_exit", "p_exit_upper", "p_inside", "p_inside_upper"});
    for (const auto& k : rep.candidates)
        s.add_row(std::vector<double>{k.t0, k.r, k.p_exit.mean, k.p_exit.upper, k.p_inside.mean, k.p_inside.upper});
    c.emit("counterexample_search.csv", s.str());
    ClaimRecord r{"counterexample-gap", status_of(rep.pass),
                  {{"h_lower_ci", 0.6}, {"h_theta_upper_ci", 0.4}, {"gap_lower_ci", 0.2}, {"min_points", 3},
                   {"max_exhausted_fraction", 0.01}},
                  {}, ""};
    r.measured = {{"search_succeeded", rep.search_succeeded},
                  {"t0", rep.chosen.t0},
                  {"r", rep.chosen.r},
                  {"p_exit", io::to_json(rep.chosen.p_exit)},
                  {"p_inside", io::to_json(rep.chosen.p_inside)},
                  {"points", pts},
                  {"qualifying", rep.qualifying},
                  {"monotone_decay", rep.monotone_decay},
                  {"equivariant", rep.equivariant},
                  {"max_exhausted_fraction", rep.max_exhausted_fraction}};
    if (rep.sensitivity_eps > 0)
        r.measured["sensitivity"] = {{"eps", rep.sensitivity_eps},
                                     {"h", io::to_json(rep.sensitivity_h)},
                                     {"h_theta", io::to_json(rep.sensitivity_h_theta)}};
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& pr : rep.points) min_gap = std::min(min_gap, pr.gap);
    r.summary = std::to_string(rep.qualifying) + "/" + std::to_string(rep.points.size()) +
                " points qualify, min gap " + fmt(min_gap) + ", t0 " + fmt(rep.chosen.t0) + ", r " + fmt(rep.chosen.r);
    return r;
}

ClaimRecord claim_semigroup(Context& c) {
    const auto p = kernels::make_ce_params(c.cfg.counterexample.a, c.cfg.counterexample.b);
    if (!c.ce) claim_counterexample(c);
    const auto& ce = *c.ce;
    std::vector<Point> pts;
    for (const auto& pr : ce.points)
        if (pts.size() < c.cfg.counterexample.semigroup_points) pts.push_back(pr.x);
    const auto rep = mc::semigroup_discontinuity_check(p, ce.chosen.t0, ce.chosen.r, pts, ce_config(c));
    auto table = io::estimate_table();
    Json js = Json::array();
    bool antisym = true;
    for (const auto& sp : rep.points) {
        io::add_estimate_row(table, sp.x[0], sp.x[1], sp.at_x, 0.0);
        const Point tx = theta(sp.x);
        io::add_estimate_row(table, tx[0], tx[1], sp.at_theta, 0.0);
        antisym = antisym && sp.antisymmetric;
        js.push_back({{"x", {sp.x[0], sp.x[1]}},
                      {"at_x", io::to_json(sp.at_x)},
                      {"at_theta", io::to_json(sp.at_theta)},
                      {"gap", sp.gap},
                      {"gap_half_width", sp.gap_half_width},
                      {"antisymmetric", sp.antisymmetric}});
    }
    c.emit("semigroup.csv", table.str());
    ClaimRecord r{"semigroup-discontinuity", status_of(rep.pass), {{"gap_lower_ci", 0.4}}, {}, ""};
    r.measured = {{"t0", rep.t0},
                  {"r", rep.r},
                  {"points", js},
                  {"min_gap_lower", rep.min_gap_lower},
                  {"antisymmetric_within_ci", antisym},
                  {"sweep_range", rep.sweep_range}};
    r.summary = "min gap lower " + fmt(rep.min_gap_lower) + " at t0 " + fmt(rep.t0);
    return r;
}

using ClaimFn = ClaimRecord (*)(Context&);

const std::map<std::string, ClaimFn>& claim_table() {
    static const std::map<std::string, ClaimFn> t = {
        {"marginal-closed-form", claim_marginals},
        {"order-formulas", claim_orders},
        {"kernel-validation", claim_kernel_validation},
        {"counterexample-kernel-audit", claim_ce_audit},
        {"spectral-structure", claim_structure},
        {"ondiag-decay", claim_decay},
        {"killed-lower-bound", claim_lower_bound},
        {"perturbation-bound", claim_perturbation},
        {"log-entropy-derivative", claim_entropy},
        {"weighted-poincare", claim_poincare},
        {"nash-inequality", claim_nash},
        {"mosco-convergence", claim_mosco},
        {"parabolic-harnack", claim_harnack},
        {"meyer-construction", claim_meyer},
        {"exit-deviation", claim_deviation},
        {"counterexample-gap", claim_counterexample},
        {"semigroup-discontinuity", claim_semigroup},
    };
    return t;
}

Json environment(const config::RunConfig& cfg) {
    return {{"seed", cfg.seed},
            {"h", cfg.lattice.h},
            {"eps", cfg.mc.eps},
            {"n_paths", cfg.mc.n_paths},
            {"counterexample", {{"eps", cfg.counterexample.eps}, {"n_paths", cfg.counterexample.n_paths}}}};
}

void check_config(const config::RunConfig& cfg) {
    cfg.validate();
    const auto J = build_kernel(cfg.kernel);
    if (J.dim() != cfg.lattice.d)
        throw ConfigError("kernel dimension " + std::to_string(J.dim()) + " differs from lattice.d");
    lattice::Lattice({cfg.lattice.d, cfg.lattice.h, cfg.lattice.half_width, cfg.lattice.torus, cfg.lattice.site_cap});
}

ConformanceReport run_once(const std::string& suite, const config::RunConfig& cfg, unsigned workers) {
    Context ctx(cfg, workers);
    ConformanceReport rep;
    rep.suite = suite;
    rep.environment = environment(cfg);
    for (const auto& id : suite_claims(suite)) {
        if (id == "determinism") continue;
        rep.claims.push_back(claim_table().at(id)(ctx));
        if (binding(id).cls == ClaimClass::reported_only) rep.claims.back().status = "reported-only";
    }
    rep.artifacts = std::move(ctx.artifacts);
    return rep;
}

}  // namespace

std::vector<std::string> suite_claims(const std::string& suite) {
    if (suite == "validate-kernel") return {"kernel-validation"};
    if (suite == "mosco") return {"mosco-convergence"};
    if (suite == "harnack") return {"parabolic-harnack"};
    static const std::vector<std::string> named{"kernels", "spectral", "montecarlo", "counterexample"};
    if (suite != "all" && std::find(named.begin(), named.end(), suite) == named.end())
        throw ConfigError("unknown suite " + suite);
    std::vector<std::string> out;
    for (const auto& s : named) {
        if (suite != "all" && suite != s) continue;
        for (const auto& b : bindings())
            if (b.suite == s) out.push_back(b.id);
    }
    if (suite == "all") out.push_back("determinism");
    return out;
}

ConformanceReport run_suite(const std::string& suite, const config::RunConfig& cfg) {
    const auto ids = suite_claims(suite);
    check_config(cfg);
    const unsigned workers = cfg.workers ? cfg.workers : mc::default_workers();
    if (suite != "all") return run_once(suite, cfg, workers);

    // Every suite runs once per worker count; the claims come from the
    // single-worker pass and the byte streams of the two passes are compared.
    ConformanceReport rep;
    rep.suite = "all";
    rep.environment = environment(cfg);
    Json compared = Json::array();
    bool identical = true;
    for (const std::string s : {"kernels", "spectral", "montecarlo", "counterexample"}) {
        ConformanceReport one = run_once(s, cfg, 1);
        const ConformanceReport eight = run_once(s, cfg, 8);
        const bool same = one.canonical_bytes() == eight.canonical_bytes();
        identical = identical && same;
        compared.push_back({{"suite", s}, {"identical", same}, {"bytes", one.canonical_bytes().size()}});
        for (auto& c : one.claims) rep.claims.push_back(std::move(c));
        for (auto& a : one.artifacts) rep.artifacts.push_back({s + "/" + a.name, std::move(a.content)});
    }
    ClaimRecord det{"determinism", status_of(identical), {{"workers", {1, 8}}, {"byte_identical", true}},
                    {{"suites", compared}}, identical ? "byte-identical for 1 and 8 workers" : "outputs differ"};
    rep.claims.push_back(det);
    return rep;
}

void write_report(const ConformanceReport& rep, const std::string& out_dir) {
    const std::string dir = out_dir + "/" + rep.suite;
    for (const auto& a : rep.artifacts) io::write_atomic(dir + "/" + a.name, a.content);
    io::write_atomic(dir + "/report.json", rep.json_text());
}

std::string summary_lines(const ConformanceReport& rep) {
    std::string out;
    for (const auto& c : rep.claims) {
        const std::string tag = c.status == "pass" ? "PASS" : c.status == "fail" ? "FAIL" : "INFO";
        out += tag + "  " + c.id + "  " + c.summary + "\n";
    }
    return out;
}

}  // namespace nonlocal::analysis

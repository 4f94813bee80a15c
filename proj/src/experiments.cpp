#include "nonlocal/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nonlocal/errors.hpp"

namespace nonlocal::mc {

namespace {

enum Outcome : int { kMiss = 0, kHit = 1, kExhausted = 2 };

Estimate combine_hits(const std::vector<int>& out, std::size_t& exhausted) {
    std::size_t hits = 0, done = 0;
    exhausted = 0;
    for (int o : out) {
        if (o == kExhausted) {
            ++exhausted;
            continue;
        }
        ++done;
        hits += (o == kHit);
    }
    return bernoulli_estimate(hits, done);
}

bool intervals_overlap(const Estimate& a, const Estimate& b) { return a.lower <= b.upper && b.lower <= a.upper; }

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

ExitEstimate estimate_exit_event(const Process& proc, const Region& D, const Region& A, const Point& start,
                                 std::size_t n_paths, const PathConfig& cfg, unsigned workers, std::uint64_t tag) {
    cfg.validate();
    if (!D(start)) throw DomainError("exit estimate needs the start point inside D");
    std::function<int(std::size_t)> one = [&](std::size_t i) -> int {
        auto runner = proc.start(start, 0.0, cfg.horizon, cfg.seed, stream_id(tag, i));
        JumpEvent ev;
        std::size_t count = 0;
        while (runner->next(ev)) {
            if (++count > cfg.max_events) throw EventCapError("exit path exceeded the event cap");
            if (!D(ev.position)) return A(ev.position) ? kHit : kMiss;
        }
        return kExhausted;
    };
    const auto out = parallel_map<int>(n_paths, workers, one);
    ExitEstimate e;
    e.estimate = combine_hits(out, e.exhausted);
    e.exhausted_fraction = n_paths ? double(e.exhausted) / double(n_paths) : 0.0;
    return e;
}

Estimate estimate_expectation(const Process& proc, const RateFn& H, double t, const Point& start,
                              std::size_t n_paths, const PathConfig& cfg, unsigned workers, std::uint64_t tag) {
    cfg.validate();
    std::function<double(std::size_t)> one = [&](std::size_t i) {
        auto runner = proc.start(start, 0.0, t, cfg.seed, stream_id(tag, i));
        JumpEvent ev;
        Point x = start;
        std::size_t count = 0;
        while (runner->next(ev)) {
            if (++count > cfg.max_events) throw EventCapError("path exceeded the event cap");
            x = ev.position;
        }
        return H(x);
    };
    const auto vals = parallel_map<double>(n_paths, workers, one);
    double s = 0, s2 = 0;
    for (double v : vals) {
        s += v;
        s2 += v * v;
    }
    return mean_estimate(s, s2, n_paths);
}

CounterexampleReport counterexample_experiment(const kernels::CEKernelParams& p, const CounterexampleConfig& cfg) {
    if (!(p.derived_beta < 1.0)) throw ParameterError("counterexample needs derived beta < 1");
    CounterexampleReport rep;
    std::vector<double> t0_grid = cfg.t0_grid, r_grid = cfg.r_grid;
    if (t0_grid.empty())
        for (int k = 0; k < 9; ++k) t0_grid.push_back(2.5e-4 * std::pow(2.0, k));
    if (r_grid.empty())
        for (int k = 0; k < 9; ++k) r_grid.push_back(cfg.eps * std::pow(2.0, k));
    std::sort(t0_grid.begin(), t0_grid.end());
    std::sort(r_grid.begin(), r_grid.end());

    // Search for t0 and r from paths of the J0 (Levy) process started at 0.
    PathConfig pc{t0_grid.back(), cfg.eps, cfg.seed, cfg.max_events};
    const auto y = make_j0_process(p, cfg.eps);
    struct SearchPath {
        double tau = std::numeric_limits<double>::infinity();
        std::vector<Point> at;
    };
    std::function<SearchPath(std::size_t)> one = [&](std::size_t i) {
        SearchPath sp;
        auto runner = y->start({0.0, 0.0}, 0.0, pc.horizon, cfg.seed, stream_id(0x7365617263ull, i));
        Point x{0.0, 0.0};
        std::size_t k = 0;
        JumpEvent ev;
        while (runner->next(ev)) {
            while (k < t0_grid.size() && t0_grid[k] < ev.time) sp.at.push_back(x), ++k;
            x = ev.position;
            if (sp.tau == std::numeric_limits<double>::infinity() && !in_cone(x, 1.0 / 3.0)) sp.tau = ev.time;
        }
        while (k < t0_grid.size()) sp.at.push_back(x), ++k;
        return sp;
    };
    const auto paths = parallel_map<SearchPath>(cfg.n_search_paths, cfg.workers, one);
    for (std::size_t k = 0; k < t0_grid.size(); ++k) {
        std::size_t exits = 0;
        for (const auto& sp : paths) exits += sp.tau <= t0_grid[k];
        SearchCandidate c{t0_grid[k], r_grid.front(), bernoulli_estimate(exits, paths.size()), {}};
        bool found = false;
        for (double r : r_grid) {
            std::size_t inside = 0;
            for (const auto& sp : paths) inside += in_square(sp.at[k], r);
            const Estimate e = bernoulli_estimate(inside, paths.size());
            if (e.upper < 0.05) {
                c.r = r;
                c.p_inside = e;
                found = true;
            } else if (!found) {
                c.p_inside = e;
            }
            if (!found) break;
        }
        rep.candidates.push_back(c);
    }
    // Prefer the earliest t0 meeting both thresholds; otherwise the candidate
    // with the smallest exit probability among those meeting the D(r) one.
    const SearchCandidate* best = nullptr;
    for (const auto& c : rep.candidates)
        if (c.p_inside.upper < 0.05 && c.p_exit.upper < 0.05) {
            best = &c;
            rep.search_succeeded = true;
            break;
        }
    if (!best)
        for (const auto& c : rep.candidates)
            if (c.p_inside.upper < 0.05 && (!best || c.p_exit.mean < best->p_exit.mean)) best = &c;
    if (!best)
        for (const auto& c : rep.candidates)
            if (!best || c.p_inside.mean < best->p_inside.mean) best = &c;
    rep.chosen = *best;
    const double r = rep.chosen.r;

    const auto x1 = make_j1_process(p, cfg.eps);
    PathConfig ec{cfg.horizon, cfg.eps, cfg.seed, cfg.max_events};
    const Region D = [r](const Point& x) { return in_square(x, r); };
    const Region A = [](const Point& x) { return in_cone(x, 0.5); };
    const Region thetaA = [](const Point& x) { return in_cone(theta(x), 0.5); };
    for (int n = 1; n <= cfg.n_points; ++n) {
        PointResult pr;
        pr.n = n;
        const double s = std::ldexp(r, -n);
        pr.x = {s / 16.0, s / 2.0};
        pr.h = estimate_exit_event(*x1, D, A, pr.x, cfg.n_paths, ec, cfg.workers, stream_id(0x6365ull, 1, n));
        pr.h_theta = estimate_exit_event(*x1, D, A, theta(pr.x), cfg.n_paths, ec, cfg.workers, stream_id(0x6365ull, 2, n));
        pr.h_mirrored =
            estimate_exit_event(*x1, D, thetaA, theta(pr.x), cfg.n_paths, ec, cfg.workers, stream_id(0x6365ull, 3, n));
        pr.gap = pr.h.estimate.mean - pr.h_theta.estimate.mean;
        pr.gap_half_width = diff_half_width(pr.h.estimate, pr.h_theta.estimate);
        pr.qualifies = pr.h.estimate.lower >= 0.6 && pr.h_theta.estimate.upper <= 0.4 && pr.gap - pr.gap_half_width >= 0.2;
        pr.equivariant = intervals_overlap(pr.h.estimate, pr.h_mirrored.estimate);
        rep.equivariant = rep.equivariant && pr.equivariant;
        rep.max_exhausted_fraction = std::max({rep.max_exhausted_fraction, pr.h.exhausted_fraction,
                                               pr.h_theta.exhausted_fraction, pr.h_mirrored.exhausted_fraction});
        rep.qualifying += pr.qualifies;
        rep.points.push_back(pr);
    }
    std::vector<const PointResult*> q;
    for (const auto& pr : rep.points)
        if (pr.qualifies) q.push_back(&pr);
    if (q.size() >= 3) {
        const auto *a = q[q.size() - 3], *b = q[q.size() - 2], *c = q[q.size() - 1];
        const double hw = std::hypot(a->gap_half_width, c->gap_half_width);
        rep.monotone_decay = a->gap > b->gap && b->gap > c->gap && a->gap - c->gap > hw;
    }
    if (cfg.sensitivity && !rep.points.empty()) {
        const auto x2 = make_j1_process(p, cfg.eps / 2);
        PathConfig hc = ec;
        hc.eps_cut = cfg.eps / 2;
        const Point xl = rep.points.back().x;
        rep.sensitivity_eps = cfg.eps / 2;
        rep.sensitivity_h = estimate_exit_event(*x2, D, A, xl, cfg.n_paths, hc, cfg.workers, stream_id(0x6365ull, 4)).estimate;
        rep.sensitivity_h_theta =
            estimate_exit_event(*x2, D, A, theta(xl), cfg.n_paths, hc, cfg.workers, stream_id(0x6365ull, 5)).estimate;
    }
    rep.pass = rep.qualifying >= 3 && !rep.monotone_decay && rep.equivariant && rep.max_exhausted_fraction < 0.01;
    return rep;
}

double antisymmetric_h(const Point& x, double r) {
    const double u = std::abs(x[0]), v = std::abs(x[1]);
    const double m = std::max(u, v);
    if (m == 0.0) return 0.0;
    const double angular = std::clamp(((v - u) / (v + u)) / 0.5, -1.0, 1.0);
    return angular * std::min(1.0, m / r);
}

SemigroupReport semigroup_discontinuity_check(const kernels::CEKernelParams& p, double t0, double r,
                                              const std::vector<Point>& points, const CounterexampleConfig& cfg,
                                              double gap_threshold) {
    SemigroupReport rep;
    rep.t0 = t0;
    rep.r = r;
    const auto proc = make_j1_process(p, cfg.eps);
    PathConfig pc{t0, cfg.eps, cfg.seed, cfg.max_events};
    const RateFn H = [r](const Point& x) { return antisymmetric_h(x, r); };
    rep.min_gap_lower = std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < points.size(); ++k) {
        SemigroupPoint sp;
        sp.x = points[k];
        sp.at_x = estimate_expectation(*proc, H, t0, sp.x, cfg.n_paths, pc, cfg.workers, stream_id(0x73656dull, 1, k));
        sp.at_theta =
            estimate_expectation(*proc, H, t0, theta(sp.x), cfg.n_paths, pc, cfg.workers, stream_id(0x73656dull, 2, k));
        sp.gap = sp.at_x.mean - sp.at_theta.mean;
        sp.gap_half_width = diff_half_width(sp.at_x, sp.at_theta);
        sp.antisymmetric = std::abs(sp.at_x.mean + sp.at_theta.mean) <= sp.gap_half_width;
        rep.min_gap_lower = std::min(rep.min_gap_lower, sp.gap - sp.gap_half_width);
        if (std::hypot(sp.x[0], sp.x[1]) <= 0.01) {
            lo = std::min({lo, sp.at_x.mean, sp.at_theta.mean});
            hi = std::max({hi, sp.at_x.mean, sp.at_theta.mean});
        }
        rep.points.push_back(sp);
    }
    rep.sweep_range = hi > lo ? hi - lo : 0.0;
    rep.pass = !points.empty() && rep.min_gap_lower >= gap_threshold;
    return rep;
}

DeviationReport deviation_probability_checks(const Process& proc, const Point& x, const std::vector<double>& r_grid,
                                             const std::vector<double>& t_grid, std::size_t n_paths,
                                             const PathConfig& cfg, unsigned workers) {
    DeviationReport rep;
    rep.r_grid = r_grid;
    rep.t_grid = t_grid;
    for (double r : r_grid)
        if (r < 0.125) throw ParameterError("deviation radii must be at least 1/8");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) || !std::is_sorted(r_grid.begin(), r_grid.end()))
        throw ParameterError("deviation grids must be ascending");
    const int d = proc.dim();
    struct Track {
        std::vector<double> sup, at;
    };
    std::function<Track(std::size_t)> one = [&](std::size_t i) {
        Track tr;
        auto runner = proc.start(x, 0.0, t_grid.back(), cfg.seed, stream_id(0x646576ull, i));
        double sup = 0.0, cur = 0.0;
        std::size_t k = 0, count = 0;
        JumpEvent ev;
        while (runner->next(ev)) {
            if (++count > cfg.max_events) throw EventCapError("deviation path exceeded the event cap");
            while (k < t_grid.size() && t_grid[k] < ev.time) tr.sup.push_back(sup), tr.at.push_back(cur), ++k;
            cur = std::sqrt(norm2({ev.position[0] - x[0], ev.position[1] - x[1]}, d));
            sup = std::max(sup, cur);
        }
        while (k < t_grid.size()) tr.sup.push_back(sup), tr.at.push_back(cur), ++k;
        return tr;
    };
    const auto tracks = parallel_map<Track>(n_paths, workers, one);
    for (double r : r_grid) {
        std::vector<Estimate> srow, prow;
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            std::size_t a = 0, b = 0;
            for (const auto& tr : tracks) {
                a += tr.sup[k] > r;
                b += tr.at[k] > r;
            }
            srow.push_back(bernoulli_estimate(a, n_paths));
            prow.push_back(bernoulli_estimate(b, n_paths));
        }
        rep.sup_exceed.push_back(srow);
        rep.point_exceed.push_back(prow);
    }
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            if (rep.sup_exceed[i][k].mean > rep.sup_exceed[i - 1][k].mean) rep.monotone_in_r = false;
    auto find_r = [&](double r) -> std::size_t {
        for (std::size_t i = 0; i < r_grid.size(); ++i)
            if (std::abs(r_grid[i] - r) < 1e-12) return i;
        throw ParameterError("deviation radius grid must contain 1/4 and 1/2");
    };
    const std::size_t iq = find_r(0.25), ih = find_r(0.5);
    std::size_t k1 = 0;
    for (std::size_t k = 0; k < t_grid.size(); ++k)
        if (rep.sup_exceed[iq][k].upper < 0.25) {
            rep.t1_found = true;
            rep.t1 = t_grid[k];
            k1 = k;
        }
    if (rep.t1_found) {
        const Estimate& lhs = rep.sup_exceed[ih][k1];
        double rhs = 0.0, rhs_sigma = 0.0;
        for (std::size_t k = 0; k <= k1; ++k)
            if (rep.point_exceed[iq][k].mean >= rhs) {
                rhs = rep.point_exceed[iq][k].mean;
                rhs_sigma = rep.point_exceed[iq][k].half_width_95 / 1.96;
            }
        const double sigma = std::sqrt(std::pow(lhs.half_width_95 / 1.96, 2) + 4 * rhs_sigma * rhs_sigma);
        rep.doubling_lhs = lhs.mean;
        rep.doubling_rhs = 2 * rhs;
        rep.doubling_holds = lhs.mean <= 2 * rhs + 3 * sigma;
    }
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        std::vector<double> rs, ls;
        for (std::size_t i = 0; i < r_grid.size(); ++i)
            if (rep.sup_exceed[i][k].mean > 0) {
                rs.push_back(r_grid[i]);
                ls.push_back(std::log(rep.sup_exceed[i][k].mean));
            }
        rep.decay_slope.push_back(rs.size() >= 2 ? linear_slope(rs, ls) : std::nan(""));
    }
    return rep;
}

MeyerCountReport meyer_constant_rate_check(double c, double T, std::size_t n_paths, const PathConfig& cfg,
                                           unsigned workers, int d) {
    MeyerCountReport rep;
    rep.rate = c;
    rep.horizon = T;
    const double r_in = 0.5, r_out = 1.0;
    auto base = std::make_shared<LevyProcess>(
        std::make_shared<RadialLaw>(d, std::vector<RadialPiece>{{1.0, 1.2, cfg.eps_cut, 1.0}}));
    const double shell = d == 1 ? 2 * (r_out - r_in) : M_PI * (r_out * r_out - r_in * r_in);
    auto env = std::make_shared<RadialLaw>(d, std::vector<RadialPiece>{{c / shell, double(-d), r_in, r_out}});
    const PairFn diff = [env](const Point& x, const Point& y) { return env->density({y[0] - x[0], y[1] - x[1]}); };
    MeyerAddProcess proc(base, [c](const Point&) { return c; }, diff, env);
    std::function<double(std::size_t)> one = [&](std::size_t i) {
        auto runner = proc.start({0.0, 0.0}, 0.0, T, cfg.seed, stream_id(0x6d6579ull, i));
        JumpEvent ev;
        double added = 0;
        std::size_t count = 0;
        while (runner->next(ev)) {
            if (++count > cfg.max_events) throw EventCapError("Meyer path exceeded the event cap");
            added += ev.tag == Tag::meyer_added;
        }
        return added;
    };
    const auto counts = parallel_map<double>(n_paths, workers, one);
    double s = 0, s2 = 0;
    std::size_t none = 0;
    for (double v : counts) {
        s += v;
        s2 += v * v;
        none += v == 0.0;
    }
    rep.added_count = mean_estimate(s, s2, n_paths);
    rep.no_add_fraction = bernoulli_estimate(none, n_paths);
    const double lam = c * T, nn = static_cast<double>(n_paths);
    rep.poisson_z = (rep.added_count.mean - lam) / std::sqrt(lam / nn);
    rep.poisson_ok = std::abs(rep.poisson_z) <= 3.0;
    rep.lemma_bound = std::exp(-T * c);
    const double sigma = std::sqrt(rep.lemma_bound * (1 - rep.lemma_bound) / nn);
    rep.bound_ok = rep.no_add_fraction.mean >= rep.lemma_bound - 3 * sigma;
    return rep;
}

}  // namespace nonlocal::mc

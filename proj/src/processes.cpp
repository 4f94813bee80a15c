#include "nonlocal/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nonlocal/errors.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal::mc {

void PathConfig::validate() const {
    if (!(eps_cut > 0.0 && eps_cut < 1.0)) throw ParameterError("eps_cut must lie in (0,1)");
    if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
    if (max_events == 0) throw ParameterError("max_events must be positive");
}

unsigned default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

namespace {

class LevyRunner : public PathRunner {
public:
    LevyRunner(const JumpLaw& law, Point x, double t, double horizon, RandomStream rng)
        : law_(law), x_(x), t_(t), horizon_(horizon), rng_(rng) {}
    bool next(JumpEvent& ev) override {
        t_ += rng_.exponential() / law_.total_rate();
        if (t_ > horizon_) return false;
        const Point h = law_.sample(rng_);
        x_ = {x_[0] + h[0], x_[1] + h[1]};
        ev = {t_, x_, Tag::base};
        return true;
    }

private:
    const JumpLaw& law_;
    Point x_;
    double t_, horizon_;
    RandomStream rng_;
};

}  // namespace

std::unique_ptr<PathRunner> LevyProcess::start(const Point& x0, double t0, double horizon, std::uint64_t seed,
                                               std::uint64_t stream) const {
    return std::make_unique<LevyRunner>(*law_, x0, t0, horizon, RandomStream(seed, stream));
}

ThinnedProcess::ThinnedProcess(std::vector<std::shared_ptr<const JumpLaw>> laws,
                               std::function<std::size_t(const Point&)> select, PairFn target)
    : laws_(std::move(laws)), select_(std::move(select)), target_(std::move(target)) {
    if (laws_.empty()) throw ParameterError("thinning needs at least one proposal law");
    rate_ = laws_.front()->total_rate();
    for (const auto& l : laws_)
        if (std::abs(l->total_rate() - rate_) > 1e-12 * rate_)
            throw ParameterError("thinning proposals must share one total rate");
}

class ThinnedRunner : public PathRunner {
public:
    ThinnedRunner(const ThinnedProcess& p, Point x, double t, double horizon, RandomStream rng)
        : p_(p), x_(x), t_(t), horizon_(horizon), rng_(rng) {}
    bool next(JumpEvent& ev) override {
        for (;;) {
            t_ += rng_.exponential() / p_.rate_;
            if (t_ > horizon_) return false;
            const JumpLaw& law = *p_.laws_[p_.select_(x_)];
            const Point h = law.sample(rng_);
            const Point y{x_[0] + h[0], x_[1] + h[1]};
            const double q = law.density(h);
            const double j = p_.target_(x_, y);
            if (j > q * (1.0 + 1e-12)) {
                std::ostringstream os;
                os << "target intensity " << j << " exceeds proposal density " << q;
                throw EnvelopeError(os.str());
            }
            if (rng_.uniform() * q < j) {
                x_ = y;
                ev = {t_, x_, Tag::base};
                return true;
            }
        }
    }

private:
    const ThinnedProcess& p_;
    Point x_;
    double t_, horizon_;
    RandomStream rng_;
};

std::unique_ptr<PathRunner> ThinnedProcess::start(const Point& x0, double t0, double horizon, std::uint64_t seed,
                                                  std::uint64_t stream) const {
    return std::make_unique<ThinnedRunner>(*this, x0, t0, horizon, RandomStream(seed, stream));
}

std::shared_ptr<ThinnedProcess> make_j1_process(const kernels::CEKernelParams& p, double eps) {
    std::vector<std::shared_ptr<const JumpLaw>> laws{std::make_shared<MJumpLaw>(p, eps, false),
                                                     std::make_shared<MJumpLaw>(p, eps, true)};
    auto select = [](const Point& x) -> std::size_t { return in_cone(x) ? 0 : 1; };
    auto target = [p](const Point& x, const Point& y) { return kernels::eval_J1(x, y, p); };
    return std::make_shared<ThinnedProcess>(std::move(laws), select, target);
}

std::shared_ptr<LevyProcess> make_j0_process(const kernels::CEKernelParams& p, double eps) {
    return std::make_shared<LevyProcess>(std::make_shared<MJumpLaw>(p, eps, false));
}

MeyerAddProcess::MeyerAddProcess(std::shared_ptr<const Process> base, RateFn rate, PairFn difference,
                                 std::shared_ptr<const JumpLaw> envelope)
    : base_(std::move(base)), rate_(std::move(rate)), difference_(std::move(difference)), envelope_(std::move(envelope)) {}

class MeyerAddRunner : public PathRunner {
public:
    MeyerAddRunner(const MeyerAddProcess& p, Point x, double t, double horizon, std::uint64_t seed,
                   std::uint64_t stream)
        : p_(p), x_(x), t_(t), horizon_(horizon), seed_(seed), stream_(stream),
          rng_(seed, stream_id(stream, 2)) {
        base_ = p_.base_->start(x_, t_, horizon_, seed_, MeyerAddProcess::base_stream(stream_, 0));
        threshold_ = rng_.exponential();
    }

    bool next(JumpEvent& ev) override {
        if (!has_pending_) {
            has_pending_ = base_->next(pending_);
            if (!has_pending_) pending_.time = std::numeric_limits<double>::infinity();
            has_pending_ = true;
        }
        const double rate = p_.rate_(x_);
        const double stop = std::min(pending_.time, horizon_);
        if (rate > 0.0) {
            const double u = t_ + (threshold_ - accumulated_) / rate;
            if (u <= stop) {
                const Point y = draw_added();
                x_ = y;
                t_ = u;
                accumulated_ = 0.0;
                threshold_ = rng_.exponential();
                ++restarts_;
                base_ = p_.base_->start(x_, t_, horizon_, seed_, MeyerAddProcess::base_stream(stream_, restarts_));
                has_pending_ = false;
                ev = {t_, x_, Tag::meyer_added};
                return true;
            }
        }
        if (pending_.time > horizon_) return false;
        accumulated_ += rate * (pending_.time - t_);
        t_ = pending_.time;
        x_ = pending_.position;
        has_pending_ = false;
        ev = {t_, x_, Tag::base};
        return true;
    }

private:
    Point draw_added() {
        for (int it = 0; it < 1000000; ++it) {
            const Point h = p_.envelope_->sample(rng_);
            const Point y{x_[0] + h[0], x_[1] + h[1]};
            const double env = p_.envelope_->density(h);
            const double dj = p_.difference_(x_, y);
            if (dj > env * (1.0 + 1e-12)) {
                std::ostringstream os;
                os << "kernel difference " << dj << " exceeds envelope " << env;
                throw EnvelopeError(os.str());
            }
            if (rng_.uniform() * env < dj) return y;
        }
        throw RejectionError("added-jump rejection loop exceeded 1e6 iterations");
    }

    const MeyerAddProcess& p_;
    Point x_;
    double t_, horizon_;
    std::uint64_t seed_, stream_;
    RandomStream rng_;
    std::unique_ptr<PathRunner> base_;
    JumpEvent pending_;
    bool has_pending_ = false;
    double accumulated_ = 0.0;
    double threshold_ = 0.0;
    std::uint64_t restarts_ = 0;
};

std::unique_ptr<PathRunner> MeyerAddProcess::start(const Point& x0, double t0, double horizon, std::uint64_t seed,
                                                   std::uint64_t stream) const {
    return std::make_unique<MeyerAddRunner>(*this, x0, t0, horizon, seed, stream);
}

GridRate::GridRate(int d, double half_width, int nodes, const RateFn& exact) : d_(d), L_(half_width), n_(nodes) {
    if (nodes < 2) throw ParameterError("grid rate needs at least two nodes per axis");
    const double step = 2 * L_ / (n_ - 1);
    if (d == 1) {
        for (int i = 0; i < n_; ++i) v_.push_back(exact({-L_ + i * step, 0.0}));
    } else {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) v_.push_back(exact({-L_ + i * step, -L_ + j * step}));
    }
    for (double v : v_) sup_ = std::max(sup_, v);
}

double GridRate::operator()(const Point& x) const {
    const double step = 2 * L_ / (n_ - 1);
    auto locate = [&](double c, int& k, double& t) {
        const double s = std::clamp((c + L_) / step, 0.0, double(n_ - 1));
        k = std::min(static_cast<int>(s), n_ - 2);
        t = s - k;
    };
    int i, j;
    double s, t;
    locate(x[0], i, s);
    if (d_ == 1) return (1 - s) * v_[i] + s * v_[i + 1];
    locate(x[1], j, t);
    auto at = [&](int a, int b) { return v_[static_cast<std::size_t>(a * n_ + b)]; };
    return (1 - s) * (1 - t) * at(i, j) + s * (1 - t) * at(i + 1, j) + (1 - s) * t * at(i, j + 1) +
           s * t * at(i + 1, j + 1);
}

double difference_rate(const kernels::JumpKernel& J, const PairFn& J0, const Point& x, double inner) {
    const int d = J.dim();
    auto diff = [&](const Point& y) { return J(x, y) - J0(x, y); };
    if (d == 1) {
        auto g = [&](double r) { return diff({x[0] + r, 0.0}) + diff({x[0] - r, 0.0}); };
        return integrate(g, inner, 1.0, 1e-9).value;
    }
    auto ray = [&](double th) {
        const double c = std::cos(th), s = std::sin(th);
        auto g = [&](double r) { return diff({x[0] + r * c, x[1] + r * s}) * r; };
        return integrate_adaptive(g, inner, 1.0, 1e-10).value;
    };
    return integrate(ray, 0.0, 2 * M_PI, 1e-8).value;
}

namespace {

void check_event(const JumpPath& path, const Point& prev, const JumpEvent& ev, const PathConfig& cfg) {
    const double dx = std::abs(ev.position[0] - prev[0]), dy = std::abs(ev.position[1] - prev[1]);
    if (std::max(dx, dy) > 1.0) throw InvariantError("jump displacement exceeds the unit support");
    if (path.events.size() >= cfg.max_events)
        throw EventCapError("path exceeded " + std::to_string(cfg.max_events) + " events");
}

}  // namespace

JumpPath simulate_path(const Process& proc, const PathConfig& cfg, const Point& start, std::uint64_t stream) {
    cfg.validate();
    JumpPath path;
    path.start = start;
    path.lifetime = cfg.horizon;
    auto runner = proc.start(start, 0.0, cfg.horizon, cfg.seed, stream);
    Point prev = start;
    JumpEvent ev;
    while (runner->next(ev)) {
        check_event(path, prev, ev, cfg);
        path.events.push_back(ev);
        prev = ev.position;
    }
    return path;
}

JumpPath meyer_remove(const Process& proc, const std::function<bool(const Point&, const Point&)>& remove,
                      const PathConfig& cfg, const Point& start, std::uint64_t stream) {
    cfg.validate();
    JumpPath path;
    path.start = start;
    path.lifetime = cfg.horizon;
    std::uint64_t restarts = 0;
    auto runner = proc.start(start, 0.0, cfg.horizon, cfg.seed, stream);
    Point prev = start;
    JumpEvent ev;
    while (runner->next(ev)) {
        if (remove(prev, ev.position)) {
            ++path.removed;
            runner = proc.start(prev, ev.time, cfg.horizon, cfg.seed, stream_id(stream, 3, ++restarts));
            continue;
        }
        check_event(path, prev, ev, cfg);
        path.events.push_back(ev);
        prev = ev.position;
    }
    return path;
}

}  // namespace nonlocal::mc

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nonlocal/jump_laws.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal::mc {

struct PathConfig {
    double horizon = 1.0;
    double eps_cut = 1e-3;
    std::uint64_t seed = 1;
    std::size_t max_events = 10000000;

    void validate() const;
};

enum class Tag { base, meyer_added };

struct JumpEvent {
    double time = 0.0;
    Point position{0.0, 0.0};
    Tag tag = Tag::base;
};

struct JumpPath {
    Point start{0.0, 0.0};
    std::vector<JumpEvent> events;
    double lifetime = 0.0;
    std::size_t removed = 0;  // jumps discarded by meyer_remove
};

// Produces the events of one path in time order; next() returns false once
// the following event would fall after the horizon.
class PathRunner {
public:
    virtual ~PathRunner() = default;
    virtual bool next(JumpEvent& ev) = 0;
};

class Process {
public:
    virtual ~Process() = default;
    virtual int dim() const = 0;
    virtual std::unique_ptr<PathRunner> start(const Point& x0, double t0, double horizon, std::uint64_t seed,
                                              std::uint64_t stream) const = 0;
};

using Region = std::function<bool(const Point&)>;
using PairFn = std::function<double(const Point&, const Point&)>;
using RateFn = std::function<double(const Point&)>;

// Compound Poisson process with i.i.d. displacements from a jump law.
class LevyProcess : public Process {
public:
    explicit LevyProcess(std::shared_ptr<const JumpLaw> law) : law_(std::move(law)) {}
    int dim() const override { return law_->dim(); }
    std::unique_ptr<PathRunner> start(const Point& x0, double t0, double horizon, std::uint64_t seed,
                                      std::uint64_t stream) const override;
    const JumpLaw& law() const { return *law_; }

private:
    std::shared_ptr<const JumpLaw> law_;
};

// Exact simulation of a state-dependent kernel J by thinning: proposals come
// from laws[select(x)] (all with the same total rate) and are accepted with
// probability J(x, x+h) / density(h). Throws EnvelopeError if J exceeds the
// proposal density.
class ThinnedProcess : public Process {
public:
    ThinnedProcess(std::vector<std::shared_ptr<const JumpLaw>> laws, std::function<std::size_t(const Point&)> select,
                   PairFn target);
    int dim() const override { return laws_.front()->dim(); }
    std::unique_ptr<PathRunner> start(const Point& x0, double t0, double horizon, std::uint64_t seed,
                                      std::uint64_t stream) const override;

private:
    friend class ThinnedRunner;
    std::vector<std::shared_ptr<const JumpLaw>> laws_;
    std::function<std::size_t(const Point&)> select_;
    PairFn target_;
    double rate_;
};

// The J1 process of the counterexample: m-law proposals inside V, swapped
// outside, thinned to J1.
std::shared_ptr<ThinnedProcess> make_j1_process(const kernels::CEKernelParams& p, double eps);
std::shared_ptr<LevyProcess> make_j0_process(const kernels::CEKernelParams& p, double eps);

// Meyer's construction: adds jumps from q(x,.) = D(x,.)/rate(x) at the times
// where int rate(Z_s) ds crosses independent unit exponentials; the base path
// restarts from each added jump. D must be dominated by envelope->density.
class MeyerAddProcess : public Process {
public:
    MeyerAddProcess(std::shared_ptr<const Process> base, RateFn rate, PairFn difference,
                    std::shared_ptr<const JumpLaw> envelope);
    int dim() const override { return base_->dim(); }
    std::unique_ptr<PathRunner> start(const Point& x0, double t0, double horizon, std::uint64_t seed,
                                      std::uint64_t stream) const override;
    // Stream used by the k-th base restart; k = 0 is the initial base path.
    static std::uint64_t base_stream(std::uint64_t stream, std::uint64_t k) { return stream_id(stream, 1, k); }

private:
    friend class MeyerAddRunner;
    std::shared_ptr<const Process> base_;
    RateFn rate_;
    PairFn difference_;
    std::shared_ptr<const JumpLaw> envelope_;
};

// Bilinear (d=2) or linear (d=1) interpolation of a rate function tabulated
// on a regular grid over [-half_width, half_width]^d; clamps outside.
class GridRate {
public:
    GridRate(int d, double half_width, int nodes, const RateFn& exact);
    double operator()(const Point& x) const;
    double sup() const { return sup_; }

private:
    int d_;
    double L_;
    int n_;
    std::vector<double> v_;
    double sup_ = 0.0;
};

// int (J - J0)(x,y) 1(|x-y| > inner) dy by quadrature.
double difference_rate(const kernels::JumpKernel& J, const PairFn& J0, const Point& x, double inner);

// Runs the process from start to the horizon and records every event.
JumpPath simulate_path(const Process& proc, const PathConfig& cfg, const Point& start, std::uint64_t stream);

// Meyer jump removal: simulates the J-process; whenever a jump has
// remove(x_before, x_after) true, the path restarts at x_before from the
// jump time with a fresh stream.
JumpPath meyer_remove(const Process& proc, const std::function<bool(const Point&, const Point&)>& remove,
                      const PathConfig& cfg, const Point& start, std::uint64_t stream);

// Deterministic fan-out: fn(i) for i in [0,n) on up to `workers` threads;
// results are returned in index order.
template <class R>
std::vector<R> parallel_map(std::size_t n, unsigned workers, const std::function<R(std::size_t)>& fn);

unsigned default_workers();

}  // namespace nonlocal::mc

#include "nonlocal/parallel_impl.hpp"

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nonlocal::config {

// Raw `section.key = value` entries; '#' starts a comment.
using Entries = std::map<std::string, std::string>;
Entries parse(const std::string& text);

struct KernelBlock {
    std::string family = "stable_like";  // stable_like | counterexample_J0 | counterexample_J1 | tabulated
    int d = 1;
    double alpha = 0.8;
    double beta = 1.2;
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    std::optional<double> xi;
    double a = 0.5;
    double b = 1.0;
    std::string table;
    std::size_t validate_samples = 20000;
};

struct LatticeBlock {
    int d = 1;
    double h = 1.0 / 128;
    double half_width = 2.0;
    bool torus = true;
    std::size_t site_cap = 4096;
};

struct SpectralBlock {
    double decay_gamma = 1.5;
    double profile_gamma = 0.5;
    double profile_h = 1.0 / 128;
    double profile_radius = 1.0;
    double delta = 0.25;
    double T = 2.0;
    std::vector<double> ck_times{0.01, 0.05, 0.1, 0.5, 1.0};
    std::vector<double> entropy_times{0.5, 1.0, 2.0};
    std::size_t poincare_trials = 200;
    std::size_t poincare_seeds = 5;
    double poincare_h = 1.0 / 32;
    double poincare_radius = 2.0;
    double perturb_c = 1.0;
    int perturb_times = 10;
    double perturb_t_max = 1.0;
};

struct McBlock {
    std::size_t n_paths = 10000;
    double eps = 1e-3;
    std::size_t max_events = 1000000;
};

struct CounterexampleBlock {
    double a = 0.5;
    double b = 1.0;
    double eps = 1e-3;
    std::size_t n_paths = 20000;
    std::size_t n_search_paths = 20000;
    int n_points = 8;
    std::vector<double> t0_grid;
    std::vector<double> r_grid;
    double horizon = 10.0;
    bool sensitivity = true;
    std::size_t semigroup_points = 4;
};

struct MoscoBlock {
    std::vector<double> xi{0.5, 0.25, 0.125, 0.0625};
    double t = 0.5;
    std::size_t form_trials = 100;
};

struct HarnackBlock {
    double h = 1.0 / 32;
    double half_width = 4.0;
    double R = 1.0;
    double T = 1.0;
    std::size_t kernels = 5;
    std::size_t trials = 20;
};

struct MeyerBlock {
    double rate = 1.0;
    double horizon = 1.0;
    std::size_t n_paths = 10000;
    int d = 1;
};

struct DeviationBlock {
    std::vector<double> r_grid{0.125, 0.25, 0.5, 0.75};
    std::vector<double> t_grid{0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
    std::size_t n_paths = 10000;
    double alpha = 0.8;
    double beta = 1.2;
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    double xi = 0.25;
};

struct ToleranceBlock {
    double marginal_rel = 1e-6;
    double ck = 1e-8;
    double row_sum = 1e-10;
    double orthonormality = 1e-10;
    double slope = 0.15;
    double profile = 0.3;
    double perturb = 1e-8;
    double entropy_rel = 1e-6;
    double poincare_variation = 0.3;
    double harnack_variation = 2.0;
    double mosco_floor_multiple = 10.0;
    double exhausted_fraction = 0.01;
};

struct RunConfig {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = "out";
    unsigned workers = 0;  // 0: available parallelism
    KernelBlock kernel;
    LatticeBlock lattice;
    SpectralBlock spectral;
    McBlock mc;
    CounterexampleBlock counterexample;
    MoscoBlock mosco;
    HarnackBlock harnack;
    MeyerBlock meyer;
    DeviationBlock deviation;
    ToleranceBlock tolerance;

    // Throws ConfigError for unresolved or inconsistent settings.
    void validate() const;
};

// Unknown keys and malformed values are ConfigErrors.
RunConfig from_entries(const Entries& e);
RunConfig load(const std::string& path);
RunConfig from_text(const std::string& text);

// Full grammar with defaults, one `section.key = value  # description` line per key.
std::string schema();

}  // namespace nonlocal::config

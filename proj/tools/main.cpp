#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "nonlocal/analysis.hpp"
#include "nonlocal/config.hpp"
#include "nonlocal/errors.hpp"

using namespace nonlocal;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> n_paths;
    std::optional<std::size_t> lattice_sites;
    std::optional<unsigned> workers;
};

config::RunConfig resolve(const Overrides& o) {
    if (o.config.empty()) throw ConfigError("--config is required");
    auto cfg = config::load(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.seed_set = true;
    }
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.n_paths) {
        cfg.mc.n_paths = *o.n_paths;
        cfg.meyer.n_paths = *o.n_paths;
        cfg.deviation.n_paths = *o.n_paths;
        cfg.counterexample.n_paths = *o.n_paths;
        cfg.counterexample.n_search_paths = *o.n_paths;
    }
    if (o.lattice_sites) {
        if (*o.lattice_sites < 2) throw ConfigError("--lattice-sites must be at least 2");
        // Sites per axis on the torus: 2L/h.
        cfg.lattice.torus = true;
        cfg.lattice.h = 2.0 * cfg.lattice.half_width / static_cast<double>(*o.lattice_sites);
    }
    if (o.workers) cfg.workers = *o.workers;
    cfg.validate();
    return cfg;
}

int run(const std::string& suite, const Overrides& o) {
    const auto cfg = resolve(o);
    const auto rep = analysis::run_suite(suite, cfg);
    analysis::write_report(rep, cfg.out_dir);
    std::cout << analysis::summary_lines(rep);
    std::cout << "report: " << cfg.out_dir << "/" << rep.suite << "/report.json\n";
    return rep.any_failed() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for symmetric jump kernels"};
    app.require_subcommand(1);
    Overrides o;

    const std::vector<std::pair<std::string, std::string>> suites = {
        {"validate-kernel", "validate-kernel"}, {"spectral-suite", "spectral"}, {"mc-suite", "montecarlo"},
        {"counterexample", "counterexample"},   {"mosco", "mosco"},            {"harnack", "harnack"},
        {"report", "all"}};
    const std::map<std::string, std::string> descr = {
        {"validate-kernel", "Check symmetry, support and sandwich bounds of the configured kernel"},
        {"spectral-suite", "Lattice generator, heat kernel and functional inequality checks"},
        {"mc-suite", "Meyer construction and exit/deviation estimates"},
        {"counterexample", "Hitting-probability gap and semigroup discontinuity"},
        {"mosco", "Convergence of regularized semigroups"},
        {"harnack", "Parabolic Harnack ratios"},
        {"report", "Every suite plus the worker-count determinism check"}};
    std::string chosen;
    for (const auto& [name, suite] : suites) {
        auto* sc = app.add_subcommand(name, descr.at(name));
        sc->add_option("--config", o.config, "Config file path")->required();
        sc->add_option("--seed", o.seed, "Global seed");
        sc->add_option("--out-dir", o.out_dir, "Output directory");
        sc->add_option("--n-paths", o.n_paths, "Monte Carlo paths per estimate")->check(CLI::PositiveNumber);
        sc->add_option("--lattice-sites", o.lattice_sites, "Lattice sites per axis");
        sc->add_option("--workers", o.workers, "Worker threads (default: available parallelism)")
            ->check(CLI::PositiveNumber);
        sc->callback([&chosen, s = suite] { chosen = s; });
    }
    auto* schema = app.add_subcommand("dump-config-schema", "Print the config grammar with defaults");
    schema->callback([&chosen] { chosen = "schema"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: usage: %s\n", e.what());
        return 2;
    }

    try {
        if (chosen == "schema") {
            std::cout << config::schema();
            return 0;
        }
        return run(chosen, o);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.code().c_str(), e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 4;
    }
}

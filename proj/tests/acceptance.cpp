// Runs every acceptance criterion once and prints one PASS/FAIL line each.
#include <cstdio>
#include <string>

#include "nonlocal/analysis.hpp"
#include "nonlocal/config.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/io.hpp"

using namespace nonlocal;

int main(int argc, char** argv) {
    const std::string out = argc > 1 ? argv[1] : "acceptance_out";
    config::RunConfig cfg = config::from_text("run.seed = 20240611\n");
    cfg.out_dir = out;
    cfg.workers = 0;

    // pinned tolerances
    auto& t = cfg.tolerance;
    t.marginal_rel = 1e-6;
    t.ck = 1e-8;
    t.row_sum = 1e-10;
    t.orthonormality = 1e-10;
    t.slope = 0.15;
    t.profile = 0.3;
    t.perturb = 1e-8;
    t.entropy_rel = 1e-6;
    t.poincare_variation = 0.3;
    t.harnack_variation = 2.0;
    t.mosco_floor_multiple = 10.0;
    t.exhausted_fraction = 0.01;

    cfg.counterexample.a = 0.5;
    cfg.counterexample.b = 1.0;
    cfg.counterexample.eps = 1e-3;
    cfg.counterexample.n_paths = 20000;
    cfg.mc.n_paths = 10000;
    cfg.meyer.n_paths = 10000;
    cfg.deviation.n_paths = 10000;

    analysis::ConformanceReport rep;
    try {
        rep = analysis::run_suite("all", cfg);
        analysis::write_report(rep, out);
    } catch (const Error& e) {
        std::printf("error: %s: %s\n", e.code().c_str(), e.what());
        return 2;
    }

    int failed = 0, n = 0;
    std::string lines;
    char buf[512];
    for (const auto& id : analysis::acceptance_ids()) {
        const auto* c = rep.find(id);
        const bool ok = c && c->status == "pass";
        failed += !ok;
        std::snprintf(buf, sizeof buf, "%2d %s %-26s %s\n", ++n, ok ? "PASS" : "FAIL", id.c_str(),
                      c ? c->summary.c_str() : "missing");
        lines += buf;
    }
    std::snprintf(buf, sizeof buf, "%d/%d criteria passed\n", n - failed, n);
    lines += buf;
    std::fputs(lines.c_str(), stdout);
    io::write_atomic(out + "/acceptance.txt", lines);
    return failed == 0 ? 0 : 1;
}

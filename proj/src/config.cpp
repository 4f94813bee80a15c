#include "nonlocal/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "nonlocal/errors.hpp"
#include "nonlocal/io.hpp"

namespace nonlocal::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    // Fractions like 1/128 are accepted for spacings.
    const auto slash = v.find('/');
    if (slash != std::string::npos)
        return parse_double(key, v.substr(0, slash)) / parse_double(key, v.substr(slash + 1));
    double x = 0;
    const auto s = trim(v);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(x))
        throw ConfigError(key + ": not a number: '" + v + "'");
    return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const auto s = trim(v);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": not a nonnegative integer: '" + v + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::string show(double v) { return io::format_double(v); }
std::string show(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + show(v[i]);
    return s;
}

struct Field {
    std::string key;
    std::string kind;
    std::string desc;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Ref>
Field real(std::string key, std::string desc, Ref ref) {
    return {key, "real", desc, [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_double(key, v); },
            [ref](const RunConfig& c) { return show(ref(const_cast<RunConfig&>(c))); }};
}
template <class Ref>
Field optreal(std::string key, std::string desc, Ref ref) {
    return {key, "real", desc, [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_double(key, v); },
            [ref](const RunConfig& c) {
                const auto& o = ref(const_cast<RunConfig&>(c));
                return o ? show(*o) : std::string("(unset)");
            }};
}
template <class Ref>
Field integer(std::string key, std::string desc, Ref ref) {
    return {key, "integer", desc,
            [ref, key](RunConfig& c, const std::string& v) {
                using T = std::remove_reference_t<decltype(ref(c))>;
                ref(c) = static_cast<T>(parse_uint(key, v));
            },
            [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}
template <class Ref>
Field boolean(std::string key, std::string desc, Ref ref) {
    return {key, "bool", desc, [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_bool(key, v); },
            [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}
template <class Ref>
Field text(std::string key, std::string desc, Ref ref) {
    return {key, "string", desc, [ref](RunConfig& c, const std::string& v) { ref(c) = v; },
            [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}
template <class Ref>
Field reals(std::string key, std::string desc, Ref ref) {
    return {key, "real list", desc,
            [ref, key](RunConfig& c, const std::string& v) {
                auto& out = ref(c);
                out.clear();
                for (const auto& s : split(v)) out.push_back(parse_double(key, s));
            },
            [ref](const RunConfig& c) { return show(ref(const_cast<RunConfig&>(c))); }};
}

#define REF(member) [](RunConfig& c) -> auto& { return c.member; }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        integer("run.seed", "global seed (required)", REF(seed)),
        text("run.out_dir", "output directory", REF(out_dir)),
        integer("run.workers", "worker threads, 0 = available parallelism", REF(workers)),

        text("kernel.family", "stable_like | counterexample_J0 | counterexample_J1 | tabulated", REF(kernel.family)),
        integer("kernel.d", "dimension (1 or 2)", REF(kernel.d)),
        real("kernel.alpha", "lower sandwich order", REF(kernel.alpha)),
        real("kernel.beta", "upper sandwich order", REF(kernel.beta)),
        real("kernel.kappa1", "lower sandwich constant", REF(kernel.kappa1)),
        real("kernel.kappa2", "upper sandwich constant", REF(kernel.kappa2)),
        optreal("kernel.xi", "optional regularisation radius in (0,1)", REF(kernel.xi)),
        real("kernel.a", "counterexample parameter a", REF(kernel.a)),
        real("kernel.b", "counterexample parameter b", REF(kernel.b)),
        text("kernel.table", "CSV path for the tabulated family", REF(kernel.table)),
        integer("kernel.validate_samples", "random pairs audited by validate-kernel", REF(kernel.validate_samples)),

        integer("lattice.d", "dimension", REF(lattice.d)),
        real("lattice.h", "spacing", REF(lattice.h)),
        real("lattice.half_width", "box [-L,L]^d", REF(lattice.half_width)),
        boolean("lattice.torus", "periodic box", REF(lattice.torus)),
        integer("lattice.site_cap", "maximum number of sites", REF(lattice.site_cap)),

        real("spectral.decay_gamma", "order of the isotropic decay kernel", REF(spectral.decay_gamma)),
        real("spectral.profile_gamma", "order of the isotropic boundary-profile kernel", REF(spectral.profile_gamma)),
        real("spectral.profile_h", "spacing for the killed-ball checks", REF(spectral.profile_h)),
        real("spectral.profile_radius", "killed ball radius", REF(spectral.profile_radius)),
        real("spectral.delta", "start of the lower-bound time window", REF(spectral.delta)),
        real("spectral.T", "end of the lower-bound time window", REF(spectral.T)),
        reals("spectral.ck_times", "time grid for the semigroup property", REF(spectral.ck_times)),
        reals("spectral.entropy_times", "times of the log-entropy identity", REF(spectral.entropy_times)),
        integer("spectral.poincare_trials", "random functions per Poincare run", REF(spectral.poincare_trials)),
        integer("spectral.poincare_seeds", "seeds in the Poincare stability study", REF(spectral.poincare_seeds)),
        real("spectral.poincare_h", "coarse spacing of the Poincare study", REF(spectral.poincare_h)),
        real("spectral.poincare_radius", "ball radius R in [1,4]", REF(spectral.poincare_radius)),
        real("spectral.perturb_c", "height of the bounded shell perturbation", REF(spectral.perturb_c)),
        integer("spectral.perturb_times", "points in the perturbation time grid", REF(spectral.perturb_times)),
        real("spectral.perturb_t_max", "last perturbation time", REF(spectral.perturb_t_max)),

        integer("mc.n_paths", "default path count", REF(mc.n_paths)),
        real("mc.eps", "small-jump cutoff", REF(mc.eps)),
        integer("mc.max_events", "event cap per path", REF(mc.max_events)),

        real("counterexample.a", "kernel parameter a", REF(counterexample.a)),
        real("counterexample.b", "kernel parameter b", REF(counterexample.b)),
        real("counterexample.eps", "small-jump cutoff", REF(counterexample.eps)),
        integer("counterexample.n_paths", "paths per point", REF(counterexample.n_paths)),
        integer("counterexample.n_search_paths", "paths for the t0/r search", REF(counterexample.n_search_paths)),
        integer("counterexample.n_points", "points x_n scanned", REF(counterexample.n_points)),
        reals("counterexample.t0_grid", "t0 candidates (empty: 2.5e-4 * 2^k)", REF(counterexample.t0_grid)),
        reals("counterexample.r_grid", "r candidates (empty: eps * 2^k)", REF(counterexample.r_grid)),
        real("counterexample.horizon", "path horizon for exit events", REF(counterexample.horizon)),
        boolean("counterexample.sensitivity", "rerun the deepest point at eps/2", REF(counterexample.sensitivity)),
        integer("counterexample.semigroup_points", "points in the semigroup check", REF(counterexample.semigroup_points)),

        reals("mosco.xi", "strictly decreasing regularisation radii", REF(mosco.xi)),
        real("mosco.t", "semigroup time", REF(mosco.t)),
        integer("mosco.form_trials", "random vectors in the form comparison", REF(mosco.form_trials)),

        real("harnack.h", "spacing", REF(harnack.h)),
        real("harnack.half_width", "continuum box [-L,L]", REF(harnack.half_width)),
        real("harnack.R", "cylinder radius", REF(harnack.R)),
        real("harnack.T", "cylinder time scale", REF(harnack.T)),
        integer("harnack.kernels", "random kernels sharing the constants", REF(harnack.kernels)),
        integer("harnack.trials", "random initial data per kernel", REF(harnack.trials)),

        real("meyer.rate", "constant added-jump rate c", REF(meyer.rate)),
        real("meyer.horizon", "time horizon T", REF(meyer.horizon)),
        integer("meyer.n_paths", "paths", REF(meyer.n_paths)),
        integer("meyer.d", "dimension", REF(meyer.d)),

        reals("deviation.r_grid", "radii (>= 1/8, must contain 0.25 and 0.5)", REF(deviation.r_grid)),
        reals("deviation.t_grid", "ascending times", REF(deviation.t_grid)),
        integer("deviation.n_paths", "paths", REF(deviation.n_paths)),
        real("deviation.alpha", "kernel lower order", REF(deviation.alpha)),
        real("deviation.beta", "kernel upper order", REF(deviation.beta)),
        real("deviation.kappa1", "kernel lower constant", REF(deviation.kappa1)),
        real("deviation.kappa2", "kernel upper constant", REF(deviation.kappa2)),
        real("deviation.xi", "split radius between base and added jumps", REF(deviation.xi)),

        real("tolerance.marginal_rel", "marginal quadrature relative error", REF(tolerance.marginal_rel)),
        real("tolerance.ck", "semigroup property max error", REF(tolerance.ck)),
        real("tolerance.row_sum", "conservative row-sum deviation", REF(tolerance.row_sum)),
        real("tolerance.orthonormality", "eigenvector orthonormality residual", REF(tolerance.orthonormality)),
        real("tolerance.slope", "decay slope band", REF(tolerance.slope)),
        real("tolerance.profile", "boundary profile slope band", REF(tolerance.profile)),
        real("tolerance.perturb", "additive slack of the perturbation bound", REF(tolerance.perturb)),
        real("tolerance.entropy_rel", "log-entropy relative error", REF(tolerance.entropy_rel)),
        real("tolerance.poincare_variation", "relative spread of Poincare ratios", REF(tolerance.poincare_variation)),
        real("tolerance.harnack_variation", "max/min Harnack ratio across kernels", REF(tolerance.harnack_variation)),
        real("tolerance.mosco_floor_multiple", "final Mosco error over floor", REF(tolerance.mosco_floor_multiple)),
        real("tolerance.exhausted_fraction", "allowed horizon-exhausted path fraction", REF(tolerance.exhausted_fraction)),
    };
    return f;
}

#undef REF

}  // namespace

Entries parse(const std::string& text) {
    Entries out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected section.key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.')
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' is not of the form section.key");
        if (out.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
        out[key] = value;
    }
    return out;
}

RunConfig from_entries(const Entries& e) {
    RunConfig c;
    std::map<std::string, const Field*> index;
    for (const auto& f : fields()) index[f.key] = &f;
    for (const auto& [k, v] : e) {
        const auto it = index.find(k);
        if (it == index.end()) throw ConfigError("unknown key " + k);
        it->second->set(c, v);
        if (k == "run.seed") c.seed_set = true;
    }
    return c;
}

RunConfig from_text(const std::string& text) { return from_entries(parse(text)); }

RunConfig load(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const IoError&) {
        throw ConfigError("cannot read config file " + path);
    }
    return from_text(text);
}

void RunConfig::validate() const {
    if (!seed_set) throw ConfigError("run.seed is required");
    if (out_dir.empty()) throw ConfigError("run.out_dir must not be empty");
    static const std::set<std::string> families{"stable_like", "counterexample_J0", "counterexample_J1", "tabulated"};
    if (!families.count(kernel.family)) throw ConfigError("kernel.family: unknown family " + kernel.family);
    if (kernel.family == "tabulated" && kernel.table.empty()) throw ConfigError("kernel.table is required for tabulated");
    if (kernel.d < 1 || kernel.d > 2 || lattice.d < 1 || lattice.d > 2) throw ConfigError("dimension must be 1 or 2");
    if (!(lattice.h > 0 && lattice.h < 1)) throw ConfigError("lattice.h must lie in (0,1)");
    const double per_axis = 2 * lattice.half_width / lattice.h;
    if (std::pow(per_axis + 1, lattice.d) > double(lattice.site_cap))
        throw ConfigError("lattice too large for lattice.site_cap");
    if (mosco.xi.empty()) throw ConfigError("mosco.xi must not be empty");
    if (deviation.r_grid.empty() || deviation.t_grid.empty()) throw ConfigError("deviation grids must not be empty");
    if (!(counterexample.eps > 0 && counterexample.eps < 1) || !(mc.eps > 0 && mc.eps < 1))
        throw ConfigError("eps must lie in (0,1)");
    if (counterexample.n_points < 1) throw ConfigError("counterexample.n_points must be positive");
    if (meyer.d < 1 || meyer.d > 2) throw ConfigError("meyer.d must be 1 or 2");
    if (harnack.kernels < 1 || harnack.trials < 1) throw ConfigError("harnack counts must be positive");
}

std::string schema() {
    const RunConfig defaults;
    std::string out =
        "# nonlocal-lab configuration: one `section.key = value` per line, '#' comments,\n"
        "# lists are comma separated, reals accept fractions such as 1/128.\n";
    std::string section;
    for (const auto& f : fields()) {
        const std::string s = f.key.substr(0, f.key.find('.'));
        if (s != section) {
            out += "\n";
            section = s;
        }
        out += f.key + " = " + f.get(defaults) + "  # " + f.kind + ": " + f.desc + "\n";
    }
    return out;
}

}  // namespace nonlocal::config

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nonlocal/config.hpp"
#include "nonlocal/io.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/lattice.hpp"
#include "nonlocal/spectral.hpp"

namespace nonlocal::analysis {

enum class ClaimClass { pass, reported_only };

struct ClaimBinding {
    std::string id;
    std::string anchor;  // the checked property, as a formula
    std::string suite;
    ClaimClass cls;
};

// Every claim known to the tool; the first fifteen are the acceptance set.
const std::vector<ClaimBinding>& bindings();
const ClaimBinding& binding(const std::string& id);
std::vector<std::string> acceptance_ids();

struct ClaimRecord {
    std::string id;
    std::string status;  // pass | fail | reported-only
    io::Json tolerance = io::Json::object();
    io::Json measured = io::Json::object();
    std::string summary;  // one line for the console
};

struct Artifact {
    std::string name;  // relative path inside the suite directory
    std::string content;
};

struct ConformanceReport {
    std::string suite;
    std::vector<ClaimRecord> claims;
    io::Json environment;
    std::vector<Artifact> artifacts;

    bool any_failed() const;
    const ClaimRecord* find(const std::string& id) const;
    io::Json to_json() const;
    std::string json_text() const;
    // Report JSON plus every artifact, in a fixed order.
    std::string canonical_bytes() const;
};

// Eigen-systems keyed by generator fingerprint; optionally mirrored on disk.
class EigenCache {
public:
    explicit EigenCache(std::string disk_dir = "");
    const spectral::EigenSystem& get(const lattice::Generator& G);
    std::size_t hits() const { return hits_; }

private:
    std::string dir_;
    std::map<std::string, std::shared_ptr<spectral::EigenSystem>> mem_;
    std::size_t hits_ = 0;
};

// <out_dir>/cache unless NONLOCAL_LAB_CACHE is set.
std::string cache_dir(const config::RunConfig& cfg);

kernels::JumpKernel build_kernel(const config::KernelBlock& k);

// Suites: kernels, spectral, montecarlo, counterexample, all, plus the
// single-topic selections validate-kernel, mosco and harnack. Configuration
// errors are raised before any computation.
std::vector<std::string> suite_claims(const std::string& suite);
ConformanceReport run_suite(const std::string& suite, const config::RunConfig& cfg);

// Writes <out_dir>/<suite>/report.json and the artifacts atomically.
void write_report(const ConformanceReport& rep, const std::string& out_dir);
// One "PASS|FAIL|INFO  id  summary" line per claim.
std::string summary_lines(const ConformanceReport& rep);

}  // namespace nonlocal::analysis

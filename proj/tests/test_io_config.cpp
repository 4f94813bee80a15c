#include <doctest.h>

#include <filesystem>

#include "nonlocal/analysis.hpp"
#include "nonlocal/config.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/io.hpp"

using namespace nonlocal;

TEST_CASE("csv dialect") {
    io::CsvTable t({"a", "b"});
    t.add_row(std::vector<double>{0.1, 1e-300});
    t.add_row(std::vector<std::string>{"x", "y"});
    CHECK(t.str() == "a,b\n0.1,1e-300\nx,y\n");
    CHECK_THROWS(t.add_row(std::vector<std::string>{"only-one"}));
    CHECK(io::format_double(1.0 / 3) == "0.3333333333333333");
    CHECK(std::stod(io::format_double(2.0 / 7)) == 2.0 / 7);
    CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("atomic write") {
    const auto dir = std::filesystem::temp_directory_path() / "nonlocal_io_test";
    std::filesystem::remove_all(dir);
    const std::string path = (dir / "sub" / "f.txt").string();
    io::write_atomic(path, "one\n");
    io::write_atomic(path, "two\n");
    CHECK(io::read_file(path) == "two\n");
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "sub")) files += e.is_regular_file();
    CHECK(files == 1);
    CHECK_THROWS_AS(io::read_file((dir / "missing").string()), IoError);
}

TEST_CASE("config parsing") {
    const auto cfg = config::from_text(
        "# comment\n"
        "run.seed = 42\n"
        "lattice.h = 1/64   # trailing comment\n"
        "mosco.xi = 0.4, 0.2, 0.1\n"
        "counterexample.sensitivity = false\n"
        "\n");
    CHECK(cfg.seed == 42);
    CHECK(cfg.lattice.h == 1.0 / 64);
    CHECK(cfg.mosco.xi == std::vector<double>{0.4, 0.2, 0.1});
    CHECK_FALSE(cfg.counterexample.sensitivity);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(config::from_text("run.seed = 1\nrun.seed = 2\n"), ConfigError);
    CHECK_THROWS_AS(config::from_text("run.sed = 1\n"), ConfigError);
    CHECK_THROWS_AS(config::from_text("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(config::from_text("lattice.h = abc\n"), ConfigError);
    CHECK_THROWS_AS(config::from_text("lattice.h = 1/128\n").validate(), ConfigError);
    CHECK_THROWS_AS(config::from_text("run.seed = 1\nkernel.family = gaussian\n").validate(), ConfigError);
    CHECK_THROWS_AS(config::load("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("schema lists every key") {
    const std::string s = config::schema();
    for (const char* key : {"run.seed", "kernel.family", "lattice.h", "counterexample.eps", "mosco.xi",
                            "harnack.kernels", "tolerance.ck"})
        CHECK(s.find(key) != std::string::npos);
}

TEST_CASE("claim bindings") {
    CHECK(analysis::acceptance_ids().size() == 15);
    CHECK(analysis::acceptance_ids().back() == "determinism");
    CHECK(analysis::suite_claims("kernels").size() == 4);
    CHECK(analysis::suite_claims("mosco") == std::vector<std::string>{"mosco-convergence"});
    CHECK_THROWS_AS(analysis::suite_claims("bogus"), ConfigError);
}

TEST_CASE("kernels suite is identical across worker counts") {
    auto cfg = config::from_text("run.seed = 5\n");
    cfg.out_dir = (std::filesystem::temp_directory_path() / "nonlocal_det").string();
    cfg.workers = 1;
    const auto a = analysis::run_suite("kernels", cfg);
    cfg.workers = 5;
    const auto b = analysis::run_suite("kernels", cfg);
    CHECK(a.canonical_bytes() == b.canonical_bytes());
    CHECK_FALSE(a.any_failed());
    cfg.seed = 6;
    CHECK(analysis::run_suite("kernels", cfg).canonical_bytes() != a.canonical_bytes());
}

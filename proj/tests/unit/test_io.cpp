#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>

#include <unistd.h>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "sectorsym/error.hpp"
#include "sectorsym/io.hpp"
#include "sectorsym/sweep.hpp"

using namespace sectorsym;
using oracle::pi;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("sectorsym_unit_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d / name;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("atomic writes replace the file and leave no temporaries") {
    fs::path p = scratch("atomic.txt");
    write_atomic(p.string(), "first\n");
    write_atomic(p.string(), "second\n");
    CHECK(read_file(p.string()) == "second\n");
    int others = 0;
    for (const auto& e : fs::directory_iterator(p.parent_path()))
        if (e.path().filename().string().find("atomic.txt.tmp") != std::string::npos) ++others;
    CHECK(others == 0);
    CHECK(code_of([] { read_file("/nonexistent/dir/file"); }) == ErrorCode::io);
    CHECK(code_of([] { write_atomic("/nonexistent/dir/file", "x"); }) == ErrorCode::io);
}

TEST_CASE("mesh JSON round trip") {
    Mesh m = generate(SectorSpec{2 * pi / 3, 5 * pi / 12}, 0.1, true);
    std::string text = mesh_to_json(m);
    auto j = nlohmann::json::parse(text);
    for (const char* k : {"spec", "vertices", "triangles", "boundary_edges", "h", "symmetric"}) CHECK(j.contains(k));
    CHECK(j["boundary_edges"][0].contains("tag"));
    Mesh back = mesh_from_json(text);
    CHECK(back.vertices().size() == m.vertices().size());
    CHECK(back.triangles() == m.triangles());
    CHECK(back.domain() == m.domain());
    CHECK(back.symmetric());
    CHECK(mesh_to_json(back) == text);
    CHECK(code_of([] { mesh_from_json("{not json"); }) == ErrorCode::parse);
    CHECK(code_of([&] {
              auto bad = j;
              bad["triangles"][0][0] = 999999;
              mesh_from_json(bad.dump());
          }) == ErrorCode::parse);
}

TEST_CASE("field JSON round trip keeps values, nonlinearity and report") {
    auto m = std::make_shared<const Mesh>(generate(SectorSpec{2 * pi / 3, 5 * pi / 12}, 0.1));
    auto f = NonlinearitySpec::constant(1.0);
    SolveResult r = solve_semilinear(m, f);
    std::string text = field_to_json(r.field, r.report, f);
    auto j = nlohmann::json::parse(text);
    CHECK(j.contains("mesh"));
    CHECK(j.contains("values"));
    CHECK(j["fspec"] == "const:1");
    CHECK(j.contains("solve_report"));
    ScalarField u = field_from_json(text);
    CHECK(u.values == r.field.values);
    CHECK(field_fspec_from_json(text) == f);
    CHECK(field_to_json(u, r.report, f) == text);
    CHECK_FALSE(field_fspec_from_json(field_to_json(u)).has_value());
    auto bad = j;
    bad["values"].erase(0);
    CHECK(code_of([&] { field_from_json(bad.dump()); }) == ErrorCode::parse);
}

TEST_CASE("run config TOML round trip") {
    RunConfig c;
    c.alphas = {2 * pi / 3, pi};
    c.betas = {pi / 3, 5 * pi / 12};
    c.thetas = {0.5, 1.2};
    c.h = 0.04;
    c.symmetric = true;
    c.f = NonlinearitySpec::power(1.0, 2.0);
    c.tol = 1e-3;
    c.seed = 42;
    c.out = "report.csv";
    RunConfig back = config_from_toml(config_to_toml(c));
    CHECK(back == c);
    CHECK(config_from_toml(config_to_toml(RunConfig{})) == RunConfig{});
}

TEST_CASE("run config rejects degrees, unknown keys and bad types") {
    CHECK(code_of([] { config_from_toml("alphas = [120.0]\nbetas = [60.0]\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { config_from_toml("alpha = [2.0]\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { config_from_toml("alphas = \"2.0\"\n"); }) == ErrorCode::parse);
    CHECK(code_of([] { config_from_toml("h = [\n"); }) == ErrorCode::parse);
    RunConfig c = config_from_toml("alphas = [2.0]\nbetas = [1.0]\nh = 0.1\n");
    CHECK(c.alphas == std::vector<double>{2.0});
    CHECK(c.h == 0.1);
    CHECK(c.lambda_factors == RunConfig{}.lambda_factors);
}

TEST_CASE("sweep output is deterministic and independent of the thread count") {
    RunConfig c;
    c.alphas = {2 * pi / 3, 5 * pi / 6};
    c.betas = {pi / 3, 5 * pi / 12};
    c.h = 0.1;
    c.lambda_factors = {0.25, 0.75};
    SweepOutcome a = run_sweep(c, 1);
    SweepOutcome b = run_sweep(c, 3);
    SweepOutcome again = run_sweep(c, 1);
    CHECK(a.entries.size() == 4);
    CHECK(a.csv == b.csv);
    CHECK(a.csv == again.csv);
    CHECK(a.pass);
    CHECK(a.failed_rows == 0);
    CHECK(a.checked_rows > 0);
    CHECK(a.summary.find("all symmetry and monotonicity checks pass") != std::string::npos);
}

TEST_CASE("openings above two thirds of pi are exploratory") {
    RunConfig c;
    c.alphas = {pi};
    c.betas = {0.75 * pi};
    c.h = 0.1;
    c.lambda_factors = {0.5};
    SweepOutcome o = run_sweep(c, 1);
    REQUIRE(o.entries.size() == 1);
    CHECK(o.entries[0].exploratory);
    CHECK(o.checked_rows == 0);
    CHECK(o.csv.find("exploratory=true") != std::string::npos);
}

TEST_CASE("thread count from the environment") {
    ::setenv("SECTOR_SYMMETRY_THREADS", "3", 1);
    CHECK(threads_from_env() == 3);
    ::setenv("SECTOR_SYMMETRY_THREADS", "zero", 1);
    CHECK(threads_from_env() >= 1);
    ::unsetenv("SECTOR_SYMMETRY_THREADS");
    CHECK(threads_from_env() >= 1);
}

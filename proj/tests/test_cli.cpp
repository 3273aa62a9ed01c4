#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "swlqr/cli.hpp"
#include "swlqr/csv.hpp"
#include "swlqr/errors.hpp"
#include "swlqr/scenario.hpp"

using namespace swlqr;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "swlqr");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// A fresh directory per test case, removed on exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("swlqr_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string config(const std::string& json) const {
        const fs::path p = path / "scenario.json";
        std::ofstream(p) << json;
        return p.string();
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

csv::Table table(const std::string& text) {
    std::istringstream is(text);
    return csv::read(is);
}

}  // namespace

TEST_CASE("riccati prints the golden ratio at the defaults") {
    const Result r = run({"riccati"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("P = 1.618033989") != std::string::npos);
    CHECK(r.out.find("L = 0.6180339887") != std::string::npos);
    const auto t = table(r.out.substr(r.out.find(csv::kVersionLine)));
    CHECK(t.columns == std::vector<std::string>{"k", "P", "L"});
    CHECK(t.rows.size() == 101);
}

TEST_CASE("riccati with a = 0") {
    TempDir d("riccati_a0");
    const Result r = run({"riccati", "--config", d.config(R"({"params": {"a": 0.0}})"), "--out", d.path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("P = 1\n") != std::string::npos);
    CHECK(r.out.find("L = 0\n") != std::string::npos);
    CHECK(fs::exists(d.file("riccati.csv")));
}

TEST_CASE("scenario round trip") {
    Scenario s;
    CHECK(parse_scenario(serialize_scenario(s)) == s);
    s.params.a = 1.2;
    s.params.tau = 3;
    s.noises = {NoiseKind::Gaussian, NoiseKind::Laplace};
    s.policies = {"OPT", "periodic-imp"};
    s.sweep = parse_grid(SweepAxis::Rate, "0.1:0.9:0.1");
    s.dp.method = "bellman";
    s.divergence.mean_cost_limit_sigma2 = 0.0;
    s.oracle.values = {-2.0, 0.0, 2.0};
    s.oracle.probs = {0.25, 0.5, 0.25};
    s.seed = 0xfeedfacecafeULL;
    const std::string text = serialize_scenario(s);
    CHECK(parse_scenario(text) == s);
    CHECK(serialize_scenario(parse_scenario(text)) == text);
}

TEST_CASE("scenario parsing rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_scenario(R"({"params": {"alpha": 1}})"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"colour": "red"})"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"noise": "cauchy"})"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("{"), ValidationError);
    CHECK_THROWS_AS(parse_grid(SweepAxis::A, "1:2"), ValidationError);
    CHECK(parse_grid(SweepAxis::A, "0.5:1.4:0.05").values().size() == 19);
    CHECK(parse_scenario("{}") == Scenario{});
}

TEST_CASE("exit codes") {
    TempDir d("exit_codes");
    CHECK(run({}).code == 2);
    CHECK(run({"riccati", "--bogus"}).code == 2);
    CHECK(run({"riccati", "--config", d.file("missing.json")}).code == 2);
    CHECK(run({"riccati", "--config", d.config(R"({"params": {"rate": 1.5}})")}).code == 2);
    CHECK(run({"riccati", "--config", d.config(R"({"params": {"tau": 0}})")}).code == 2);
    CHECK(run({"simulate", "--noise", "cauchy"}).code == 2);
    // A zero-noise calibration has no rate to find.
    const Result r = run({"calibrate", "--config", d.config(R"({"params": {"sigma_w": 0.0}})")});
    CHECK(r.code == 3);
    CHECK(r.err.find("CalibrationFailure") != std::string::npos);
}

TEST_CASE("solve-dp writes the lattice and its thresholds, byte-stable") {
    TempDir d("solve_dp");
    const std::string cfg = d.config(R"({"params": {"horizon": 5, "rate": 0.2}})");
    REQUIRE(run({"solve-dp", "--config", cfg, "--out", d.file("a")}).code == 0);
    REQUIRE(run({"solve-dp", "--config", cfg, "--out", d.file("b")}).code == 0);
    const std::string tables = slurp(d.file("a/dp_tables.csv"));
    CHECK(tables == slurp(d.file("b/dp_tables.csv")));
    CHECK(slurp(d.file("a/thresholds.csv")) == slurp(d.file("b/thresholds.csv")));
    const auto t = table(tables);
    CHECK(t.columns == std::vector<std::string>{"k", "j", "s", "c0", "c1", "z0", "z1", "alpha"});
    CHECK(t.rows.size() == 8);  // K = 4 stages × budgets {0, 1}
    const auto th = table(slurp(d.file("a/thresholds.csv")));
    CHECK(th.columns == std::vector<std::string>{"k", "j", "alpha"});
}

TEST_CASE("simulate: schemas, determinism and seeds") {
    TempDir d("simulate");
    const std::string cfg = d.config(R"({"policies": ["random-opt", "periodic-imp", "sym-opt"], "runs": 20})");
    REQUIRE(run({"simulate", "--config", cfg, "--out", d.file("a"), "--seed", "5"}).code == 0);
    REQUIRE(run({"simulate", "--config", cfg, "--out", d.file("b"), "--seed", "5"}).code == 0);
    REQUIRE(run({"simulate", "--config", cfg, "--out", d.file("c"), "--seed", "6"}).code == 0);
    const std::string rs = slurp(d.file("a/runstats.csv"));
    CHECK(rs == slurp(d.file("b/runstats.csv")));
    CHECK(rs != slurp(d.file("c/runstats.csv")));
    CHECK(slurp(d.file("a/summary.csv")) == slurp(d.file("b/summary.csv")));

    const auto t = table(rs);
    CHECK(t.columns == std::vector<std::string>{"policy", "step", "mean_cost", "ci", "rate", "diverged_fraction"});
    CHECK(t.rows.size() == 300);
    std::set<std::string> labels;
    for (const auto& row : t.rows) labels.insert(row[t.index("policy")]);
    CHECK(labels == std::set<std::string>{"random-opt", "periodic-imp", "sym-opt"});

    const auto s = table(slurp(d.file("a/summary.csv")));
    CHECK(s.columns == std::vector<std::string>{"policy", "steady_cost", "ci", "switch_rate", "diverged_fraction", "runs"});
    for (const auto& row : s.rows) CHECK(row[s.index("runs")] == "20");
}

TEST_CASE("simulate with zero noise gives all-zero curves") {
    TempDir d("simulate_zero");
    const Result r = run({"simulate", "--config", d.config(R"({"params": {"sigma_w": 0.0}, "runs": 5})")});
    REQUIRE(r.code == 0);
    const auto t = table(r.out);
    CHECK(t.rows.size() == 11 * 100);
    for (const auto& row : t.rows) REQUIRE(csv::parse_double(row[t.index("mean_cost")]) == 0.0);
}

TEST_CASE("sweep over two noise kinds emits the normalized difference") {
    TempDir d("sweep");
    const Result r = run({"sweep", "--config", d.config(R"({"policies": ["periodic-imp", "random-opt"], "runs": 10})"),
                          "--axis", "a", "--grid", "0.8:1.0:0.1", "--noise", "gaussian,laplace"});
    REQUIRE(r.code == 0);
    const auto t = table(r.out);
    CHECK(t.columns == std::vector<std::string>{"axis_value", "policy", "noise", "steady_cost", "ci", "diverged_fraction",
                                                "normalized_diff", "normalized_diff_ci"});
    CHECK(t.rows.size() == 3 * 2 * 2);
    for (const auto& row : t.rows) {
        const double nd = csv::parse_double(row[t.index("normalized_diff")]);
        if (row[t.index("noise")] == "gaussian") CHECK(nd == 0.0);
        else CHECK(std::isfinite(nd));
    }
    CHECK(run({"sweep", "--grid", "1:0:0.1"}).code == 2);
}

TEST_CASE("oracle-check on the smallest instance") {
    TempDir d("oracle");
    const Result r = run({"oracle-check", "--config", d.config(R"({"params": {"horizon": 3, "rate": 0.34}})")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("gap = 0\n") != std::string::npos);
    CHECK(r.out.find("symmetric threshold minimizer = yes") != std::string::npos);
    CHECK(r.out.find("minimizer 0") != std::string::npos);
    CHECK(r.out.find("k1j1=1") != std::string::npos);

    const Result z = run({"oracle-check", "--config",
                          d.config(R"({"params": {"horizon": 3, "rate": 0.34}, "oracle": {"values": [0.0], "probs": [1.0]}})")});
    REQUIRE(z.code == 0);
    CHECK(z.out.find("enumerated optimum = 0\n") != std::string::npos);
    CHECK(z.out.find("DP value (exact Bellman) = 0\n") != std::string::npos);

    const Result big = run({"oracle-check", "--config",
                            d.config(R"({"params": {"horizon": 8, "rate": 0.5}, "oracle": {"max_policies": 1000}})")});
    CHECK(big.code == 2);
    CHECK(big.err.find("ExplosionGuard") != std::string::npos);
}

TEST_CASE("csv reader refuses unversioned input") {
    std::istringstream bad("k,j,alpha\n0,1,2\n");
    CHECK_THROWS_AS(csv::read(bad), ValidationError);
    CHECK(csv::fmt(INFINITY) == "inf");
    CHECK(std::isnan(csv::parse_double("nan")));
    CHECK(csv::parse_double(csv::fmt(0.1)) == 0.1);
    CHECK_THROWS_AS(csv::parse_double("1.0x"), ValidationError);
}

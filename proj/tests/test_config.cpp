#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "pidelab/experiments.hpp"

using namespace pidelab;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("expression grammar", "[config]") {
    auto e1 = parse_expression("1 + 0.1*sin(2*pi*x1)");
    CHECK(e1(Vec::of(0.25)) == Catch::Approx(1.1).margin(1e-14));
    auto e2 = parse_expression("2^3");
    CHECK(e2(Vec::of(0.0)) == Catch::Approx(8.0));
    auto e3 = parse_expression("pow(x1, 2) - min(x1, x2)");
    CHECK(e3(Vec::of(3.0, 1.0)) == Catch::Approx(8.0));
    auto e4 = parse_expression("-x1^2");  // unary minus binds outside the power
    CHECK(e4(Vec::of(2.0)) == Catch::Approx(-4.0));
    auto e5 = parse_expression("abs(sin(pi*x1))^0.5");
    CHECK(e5(Vec::of(0.5)) == Catch::Approx(1.0));
    CHECK_THROWS_AS(parse_expression("2 +"), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("foo(1)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("1 2"), std::invalid_argument);
}

TEST_CASE("unknown config keys are rejected", "[config]") {
    json cfg = {{"experiment", "lemmas"}, {"seed", 1}, {"bogus", 3}};
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    json cfg2 = {{"experiment", "not-a-kind"}};
    CHECK_THROWS_AS(validate_config(cfg2), ConfigError);
    json cfg3 = {{"experiment", "conditions"},
                 {"kernel", {{"kind", "isotropic-fractional"}, {"beta", 1.0}, {"oops", 1}}}};
    CHECK_THROWS_AS(validate_config(cfg3), ConfigError);
}

TEST_CASE("kernel and jump parsing", "[config]") {
    json jk = {{"kind", "x-modulated"},
               {"dim", 1},
               {"beta", 1.2},
               {"coefficient", "1 + 0.5*sin(2*pi*x1)"},
               {"gamma", 1.0}};
    auto k = cfg::kernel_from_config(jk);
    CHECK(k.kind == KernelKind::x_modulated);
    CHECK(k.density_at(Vec::of(0.25), Vec::of(0.5)) ==
          Catch::Approx(1.5 * std::pow(0.5, -2.2)).epsilon(1e-12));

    json jd = {{"kind", "directional-embedding"}, {"dim", 2}, {"beta", 1.0}, {"axes", {1}}};
    auto kd = cfg::kernel_from_config(jd);
    CHECK(kd.support_dim() == 1);

    json jj = {{"kind", "sinusoidal"}, {"amplitude", 0.1}};
    auto j = cfg::jump_from_config(jj, 1);
    CHECK(j.c0 == Catch::Approx(0.9));

    json bad = {{"kind", "isotropic-fractional"}, {"beta", 2.5}};
    CHECK_THROWS_AS(cfg::kernel_from_config(bad), ConfigError);
}

TEST_CASE("equation presets and explicit term lists", "[config]") {
    json toy = {{"preset", "toy-model"}, {"beta", 1.0}};
    auto spec = cfg::equation_from_config(toy, 32);
    CHECK(spec.geo.d1 == 1);
    CHECK(spec.geo.d2 == 1);
    CHECK(spec.base.nonlocal_terms.size() == 1);

    json terms = {{"d1", 1},
                  {"d2", 0},
                  {"terms",
                   {{{"type", "local-trace"}, {"block", 0}},
                    {{"type", "zeroth-order"}, {"c", 2.0}}}},
                  {"forcing", "cos(2*pi*x1)"}};
    auto spec2 = cfg::equation_from_config(terms, 16);
    CHECK(spec2.base.local_terms.size() == 1);
    CHECK(spec2.base.zeroth_order == 2.0);
    CHECK_FALSE(spec2.profile_checked);  // arbitrary terms carry the unchecked flag

    json bad = {{"preset", "toy-model"}, {"beta", 1.0}, {"mystery", 1}};
    CHECK_THROWS_AS(cfg::equation_from_config(bad, 32), ConfigError);
}

TEST_CASE("lemmas experiment runs deterministically", "[config]") {
    json cfg = {{"experiment", "lemmas"}, {"seed", 42}, {"trials", 30}};
    fs::path base = fs::temp_directory_path() / "pidelab_test_determinism";
    fs::remove_all(base);
    RunOptions a;
    a.out_dir = base / "a";
    RunOptions b;
    b.out_dir = base / "b";
    CHECK(run_experiment(cfg, a) == 0);
    CHECK(run_experiment(cfg, b) == 0);
    for (const char* name : {"results.csv", "manifest.json"})
        CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
    // a different master seed changes the artifacts
    RunOptions c;
    c.out_dir = base / "c";
    c.seed = 43;
    CHECK(run_experiment(cfg, c) == 0);
    CHECK(slurp(base / "a" / "results.csv") != slurp(base / "c" / "results.csv"));
}

TEST_CASE("solve experiment with the amplitude check", "[config]") {
    json cfg = {{"experiment", "solve"},
                {"seed", 7},
                {"n", 32},
                {"tol", 1e-6},
                {"equation", {{"preset", "toy-model"}, {"beta", 1.0}}},
                {"checks", {{"mode11_amplitude", 0.016887}, {"rel_tol", 0.02}}}};
    fs::path out = fs::temp_directory_path() / "pidelab_test_solve";
    fs::remove_all(out);
    RunOptions opt;
    opt.out_dir = out;
    CHECK(run_experiment(cfg, opt) == 0);
    CHECK(fs::exists(out / "results.csv"));
    CHECK(fs::exists(out / "convergence.csv"));
    CHECK(fs::exists(out / "field.pgf"));
    CHECK(fs::exists(out / "manifest.json"));
    std::string res = slurp(out / "results.csv");
    CHECK(res.find("mode11_amplitude") != std::string::npos);
    CHECK(res.find("FAIL") == std::string::npos);

    // a wrong reference value flips the exit code to 1
    cfg["checks"]["mode11_amplitude"] = 0.2;
    RunOptions opt2;
    opt2.out_dir = out / "bad";
    CHECK(run_experiment(cfg, opt2) == 1);
}

TEST_CASE("conditions experiment honors expectations", "[config]") {
    json cfg = {{"experiment", "conditions"},
                {"kernel",
                 {{"kind", "directional-embedding"}, {"dim", 2}, {"beta", 1.0}, {"axes", {1}}}},
                {"expect", {{"M2", false}}}};
    fs::path out = fs::temp_directory_path() / "pidelab_test_cond";
    fs::remove_all(out);
    RunOptions opt;
    opt.out_dir = out;
    CHECK(run_experiment(cfg, opt) == 0);  // the expected failure counts as PASS
    CHECK(fs::exists(out / "conditions.csv"));
}

TEST_CASE("config errors carry exit semantics", "[config]") {
    json cfg = {{"experiment", "solve"}};  // missing equation
    RunOptions opt;
    opt.out_dir = fs::temp_directory_path() / "pidelab_test_err";
    CHECK_THROWS_AS(run_experiment(cfg, opt), ConfigError);
}

TEST_CASE("csv cells use dot decimals and round-trip doubles", "[config]") {
    CsvWriter w({"a", "b"});
    w.row().cell(0.1).cell(1.0 / 3.0);
    std::string s = w.to_string();
    CHECK(s.find("0.1") != std::string::npos);
    CHECK(s.find(',') != std::string::npos);
    CHECK(s.find(';') == std::string::npos);
    double back = std::stod(s.substr(s.find('\n') + 1));
    CHECK(back == 0.1);
}

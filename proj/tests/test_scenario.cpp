#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bss/experiments.hpp"
#include "bss/scenario.hpp"

using namespace bss;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("bss_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const std::string cmd = std::string(BSS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scenario_file(const std::string& name) { return std::string(BSS_SCENARIO_DIR) + "/" + name; }

std::string write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p.string();
}

} // namespace

TEST_CASE("scenario parsing") {
    SECTION("full scenario") {
        const auto sc = parse_scenario_text(R"({
            "model": {"name": "polar", "d": 1},
            "H": "absvalue",
            "mixing": {"matrix": [[1, 0.5], [0.2, 1]]},
            "mu": 0.001, "n_steps": 500, "seeds": [4, 5], "thinning": 10, "tolerance": 0.2,
            "orientation": "anti-diagonal",
            "expectation": {"mode": "monte_carlo", "n": 20000, "seed": 9},
            "output_dir": "somewhere"})");
        CHECK(sc.mu == 0.001);
        CHECK(sc.n_steps == 500);
        CHECK(sc.seeds == std::vector<std::uint64_t>{4, 5});
        CHECK(sc.thinning == 10);
        CHECK(sc.orientation == Orientation::anti_diagonal);
        CHECK(sc.engine.mode == ExpectationEngine::Mode::monte_carlo);
        CHECK(sc.engine.samples == 20000);
        REQUIRE(sc.mixing_matrix.has_value());
        CHECK(max_abs_diff(*sc.mixing_matrix, Mat2{1.0, 0.5, 0.2, 1.0}) == 0.0);
        CHECK(sc.output_dir == "somewhere");
        CHECK(model_from_json(sc.model_spec).label == make_polar_dependent({1.0}).label);
    }
    SECTION("defaults") {
        const auto sc = parse_scenario_text(R"({"model": "laplace_pair", "H": "classical_cubic"})");
        CHECK(sc.mu == 0.005);
        CHECK(sc.n_steps == 200000);
        CHECK(sc.seeds == std::vector<std::uint64_t>{1});
        CHECK(sc.tolerance == 0.15);
        CHECK(sc.engine.mode == ExpectationEngine::Mode::quadrature);
        CHECK(sc.engine.nodes == 64);
        CHECK_FALSE(sc.mixing_matrix.has_value());
    }
    SECTION("errors") {
        CHECK_THROWS_AS(parse_scenario_text("{"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text("[1]"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"H": "absvalue"})"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"model": "laplace_pair", "H": "absvalue", "mu2": 1})"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"model": "nope", "H": "absvalue"})"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"model": "laplace_pair", "H": "nope"})"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"model": {"name": "polar", "e": 1}, "H": "absvalue"})"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"model": "laplace_pair", "H": "absvalue", "mu": "x"})"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"model": "laplace_pair", "H": "absvalue", "mu": -1})"), ParseError);
        CHECK_THROWS_AS(parse_scenario_text(R"({"model": "laplace_pair", "H": "absvalue", "seeds": []})"), ParseError);
        CHECK_THROWS_AS(
            parse_scenario_text(R"({"model": "laplace_pair", "H": "absvalue", "mixing": {"matrix": [1, 2]}})"),
            ParseError);
        CHECK_THROWS_AS(parse_scenario_text(
                            R"({"model": "laplace_pair", "H": "absvalue", "mixing": {"matrix": [[1,0],[0,1]], "seed": 2}})"),
                        ParseError);
        CHECK_THROWS_AS(
            parse_scenario_text(R"({"model": "laplace_pair", "H": "absvalue", "expectation": {"mode": "exact"}})"),
            ParseError);
        CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ParseError);
    }
    SECTION("H is optional until a command needs it") {
        const auto sc = parse_scenario_text(R"({"model": "laplace_pair"})");
        CHECK_THROWS_AS(scenario_h(sc, make_laplace_pair()), ParseError);
    }
    SECTION("contaminated model") {
        const auto sc = parse_scenario_text(R"({"model": {"name": "contaminated", "epsilon": 0.5,
            "f1": {"dist": "gaussian", "sigma": 1}, "f2": {"dist": "gaussian", "sigma": 2},
            "g1": {"dist": "gaussian", "sigma": 2}, "g2": {"dist": "gaussian", "sigma": 1}}, "H": "classical_cubic"})");
        const auto m = model_from_json(sc.model_spec);
        CHECK(m.pdf(0.3, -0.4) == make_gaussian_scale_mixture().pdf(0.3, -0.4));
    }
    SECTION("every shipped scenario parses") {
        for (const auto& e : fs::directory_iterator(BSS_SCENARIO_DIR)) {
            INFO(e.path());
            CHECK_NOTHROW(load_scenario(e.path().string()));
        }
    }
}

TEST_CASE("mixing matrix selection") {
    auto sc = parse_scenario_text(R"({"model": "laplace_pair", "H": "absvalue"})");
    Rng rng(7, 2);
    CHECK(max_abs_diff(scenario_mixing(sc, 7).matrix(), random_mixing(rng).matrix()) == 0.0);
    CHECK(max_abs_diff(scenario_mixing(sc, 7).matrix(), scenario_mixing(sc, 8).matrix()) > 0.0);
    sc.mixing_seed = 3;
    CHECK(max_abs_diff(scenario_mixing(sc, 7).matrix(), scenario_mixing(sc, 8).matrix()) == 0.0);
    sc.mixing_matrix = Mat2{2.0, 0.0, 0.0, 3.0};
    CHECK(max_abs_diff(scenario_mixing(sc, 7).matrix(), Mat2{2.0, 0.0, 0.0, 3.0}) == 0.0);
}

TEST_CASE("scenario output is identical across thread counts") {
    const auto sc = parse_scenario_text(
        R"({"model": "gaussian_scale_mixture", "H": "absvalue", "mu": 0.002, "n_steps": 3000,
            "seeds": [1, 2, 3, 4, 5], "thinning": 50})");
    const auto d1 = scratch("threads1");
    const auto d3 = scratch("threads3");
    const auto s1 = run_scenario(sc, {d1, true}, 1);
    const auto s3 = run_scenario(sc, {d3, true}, 3);
    std::ostringstream c1, c3;
    write_summary_csv(c1, s1);
    write_summary_csv(c3, s3);
    CHECK(c1.str() == c3.str());
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        for (const char* ext : {".csv", ".svg"}) {
            const auto name = "trajectory_seed" + std::to_string(seed) + ext;
            REQUIRE(fs::exists(d1 / name));
            CHECK(slurp(d1 / name) == slurp(d3 / name));
        }
    // Every trajectory CSV reads back.
    std::ifstream in(d1 / "trajectory_seed3.csv");
    const auto tr = read_trajectory_csv(in);
    CHECK(tr.points.back().t == 3000);
    CHECK(tr.points.back().index == s1.runs[2].final_index);
}

TEST_CASE("run summary aggregation") {
    RunSummary s;
    s.runs = {{1, {}, 1.0, 0.1, true, false, 0}, {2, {}, 1.0, 0.3, false, false, 0},
              {3, {}, 1.0, INFINITY, false, true, 17}};
    summarize(s);
    CHECK(s.converged_fraction == Catch::Approx(1.0 / 3.0));
    CHECK(s.diverged == 1);
    CHECK(s.mean_index == Catch::Approx(0.2));
    CHECK(s.min_index == 0.1);
    CHECK(s.max_index == 0.3);
    std::ostringstream os;
    write_summary_csv(os, s);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == summary_csv_header);
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
    }
    CHECK(rows == 3);
}

TEST_CASE("density grids") {
    const auto g = density_grid(make_gaussian_scale_mixture(), 1, 50);
    CHECK(g.values.size() == 50u * 50u);
    const auto h = density_grid(make_polar_dependent({1.0}), 1, 50);
    double mass = 0.0;
    for (double v : h.values) mass += v;
    CHECK(h.from_histogram);
    CHECK(mass * (2.0 * h.half1 / h.n) * (2.0 * h.half2 / h.n) == Catch::Approx(1.0).epsilon(1e-12));
    std::ostringstream os;
    write_density_csv(os, g);
    CHECK(os.str().rfind("s1,s2,density\n", 0) == 0);
    CHECK_THROWS_AS(reproduce_figure("fig9", 1, {}), ParseError);
}

TEST_CASE("command-line exit codes") {
    const auto out = scratch("cli");
    const std::string o = " --out-dir " + out.string() + " --no-plots ";
    SECTION("stability needs a density") {
        CHECK(cli("stability" + o + scenario_file("polar_d1_stability.json")) == 3);
    }
    SECTION("parse errors") {
        CHECK(cli("stability" + o + "/nonexistent.json") == 1);
        CHECK(cli("simulate" + o + write_text(out / "bad.json", "{\"model\": 3}")) == 1);
        CHECK(cli("frobnicate") == 1);
        CHECK(cli("reproduce fig9") == 1);
        CHECK(cli("separability" + o + write_text(out / "noh.json", "{\"model\": \"laplace_pair\"}")) == 0);
        CHECK(cli("stability" + o + write_text(out / "noh2.json", "{\"model\": \"laplace_pair\"}")) == 1);
    }
    SECTION("help") { CHECK(cli("--help") == 0); }
    SECTION("stability verdicts") {
        CHECK(cli("stability" + o + scenario_file("stability_gsm.json")) == 0);
        CHECK(slurp(out / "stability.txt").find("\nstable: true") != std::string::npos);
        CHECK(cli("stability" + o + scenario_file("stability_gauss.json")) == 0);
        CHECK(slurp(out / "stability.txt").find("\nstable: false") != std::string::npos);
    }
    SECTION("separability verdicts") {
        CHECK(cli("separability" + o + scenario_file("separability_elliptical.json")) == 0);
        CHECK(slurp(out / "separability.txt").find("verdict: non-separable") != std::string::npos);
        CHECK(cli("separability" + o + scenario_file("separability_gsm.json")) == 0);
        CHECK(slurp(out / "separability.txt").find("verdict: separable") != std::string::npos);
        CHECK(cli("separability" + o + scenario_file("separability_disk.json")) == 0);
        CHECK(slurp(out / "separability.txt").find("verdict: non-separable") != std::string::npos);
    }
    SECTION("zero step size keeps the initial index") {
        CHECK(cli("simulate" + o + scenario_file("mu_zero.json")) == 0);
        std::istringstream is(slurp(out / "summary.csv"));
        std::string line;
        std::getline(is, line);
        int rows = 0;
        while (std::getline(is, line)) {
            std::vector<std::string> cells;
            std::istringstream row(line);
            std::string c;
            while (std::getline(row, c, ',')) cells.push_back(c);
            REQUIRE(cells.size() == 6);
            CHECK(cells[1] == cells[2]);
            ++rows;
        }
        CHECK(rows == 2);
        CHECK_FALSE(fs::exists(out / "trajectory_seed1.svg"));
        CHECK(fs::exists(out / "trajectory_seed1.csv"));
    }
    SECTION("divergence") {
        const auto f = write_text(out / "diverge.json",
                                  R"({"model": "gaussian_scale_mixture", "H": "classical_cubic", "mu": 5,
                                      "n_steps": 1000})");
        CHECK(cli("simulate" + o + f) == 2);
    }
    SECTION("seed override") {
        const auto f = write_text(out / "seeds.json",
                                  R"({"model": "laplace_pair", "H": "absvalue", "mu": 0.001, "n_steps": 100,
                                      "seeds": [1, 2, 3]})");
        CHECK(cli("--seed 2 simulate" + o + f) == 0);
        CHECK(fs::exists(out / "trajectory_seed2.csv"));
        CHECK_FALSE(fs::exists(out / "trajectory_seed1.csv"));
    }
}

// bss: scenario-driven command-line front end.
//
// Exit codes: 0 success, 1 parse/usage error, 2 a run diverged,
// 3 the model lacks a capability the command needs, 4 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bss/experiments.hpp"
#include "bss/scenario.hpp"
#include "bss/stability.hpp"

namespace {

enum Exit { ok = 0, parse_error = 1, diverged = 2, capability = 3, numerical = 4 };

struct Common {
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool no_plots = false;
};

bss::Scenario load(const std::string& path, const Common& c) {
    auto sc = bss::load_scenario(path);
    if (c.seed) sc.seeds = {*c.seed};
    if (!c.out_dir.empty()) sc.output_dir = c.out_dir;
    return sc;
}

int cmd_simulate(const std::string& path, const Common& c) {
    const auto sc = load(path, c);
    bss::OutputOptions out{sc.output_dir, !c.no_plots};
    const auto summary = bss::run_scenario(sc, out);
    std::filesystem::create_directories(sc.output_dir);
    {
        std::ofstream f(std::filesystem::path(sc.output_dir) / "summary.csv");
        bss::write_summary_csv(f, summary);
    }
    {
        std::ofstream f(std::filesystem::path(sc.output_dir) / "summary.txt");
        bss::write_summary_text(f, summary);
    }
    bss::write_summary_text(std::cout, summary);
    return summary.any_diverged() ? diverged : ok;
}

int cmd_stability(const std::string& path, const Common& c) {
    const auto sc = load(path, c);
    const auto model = bss::model_from_json(sc.model_spec);
    const auto H = bss::scenario_h(sc, model);
    const auto rep = bss::stability_report(H, model, sc.engine, sc.orientation);
    bss::write_report(std::cout, rep);
    std::filesystem::create_directories(sc.output_dir);
    std::ofstream txt(std::filesystem::path(sc.output_dir) / "stability.txt");
    bss::write_report(txt, rep);
    std::ofstream csv(std::filesystem::path(sc.output_dir) / "stability.csv");
    csv << bss::stability_csv_header << '\n';
    bss::write_csv_row(csv, model.label, H.label, rep);
    return ok;
}

int cmd_separability(const std::string& path, const Common& c) {
    const auto sc = load(path, c);
    const auto model = bss::model_from_json(sc.model_spec);
    const auto v = bss::classify_separability(model, sc.engine);
    bss::write_report(std::cout, v);
    std::filesystem::create_directories(sc.output_dir);
    std::ofstream txt(std::filesystem::path(sc.output_dir) / "separability.txt");
    bss::write_report(txt, v);
    std::ofstream csv(std::filesystem::path(sc.output_dir) / "separability.csv");
    csv << bss::separability_csv_header << '\n';
    bss::write_csv_row(csv, model.label, v);
    return ok;
}

int cmd_reproduce(const std::string& figure, const Common& c) {
    bss::OutputOptions out{c.out_dir.empty() ? std::filesystem::path("out") : std::filesystem::path(c.out_dir),
                           !c.no_plots};
    const auto res = bss::reproduce_figure(figure, c.seed.value_or(1), out);
    std::cout << "figure: " << res.figure << '\n';
    if (!res.density_file.empty()) std::cout << "density: " << res.density_file << '\n';
    bool any_diverged = false;
    for (const auto& r : res.runs) {
        std::cout << r.file_stem << ": final_index " << r.final_index << (r.diverged ? " (diverged)" : "") << '\n';
        any_diverged = any_diverged || r.diverged;
    }
    return any_diverged ? diverged : ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive blind separation of two sources: simulation and stability analysis"};
    app.footer(std::string("\n") + bss::scenario_defaults_help +
               "\nEnvironment: BSS_THREADS caps the number of parallel runs.\n"
               "Exit codes: 0 ok, 1 parse error, 2 divergence, 3 missing capability, 4 numerical failure.\n");
    app.require_subcommand(1);

    Common common;
    app.add_option("--seed", common.seed, "Run only this seed (reproduce: seed of A and the source stream, default 1)");
    app.add_option("--out-dir", common.out_dir, "Output directory (overrides the scenario's output_dir)");
    app.add_flag("--no-plots", common.no_plots, "Do not write SVG plots");

    std::string scenario_path;
    std::string figure;
    auto* sim = app.add_subcommand("simulate", "Run the adaptive separator for every seed of a scenario");
    sim->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    auto* stab = app.add_subcommand("stability", "Scale equilibrium, F, G and the Routh-Hurwitz verdict");
    stab->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    auto* sep = app.add_subcommand("separability", "Classify the source model as separable or not");
    sep->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
    auto* rep = app.add_subcommand("reproduce", "Regenerate the data behind one figure study");
    rep->add_option("figure", figure, "fig2, fig3 or fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    for (auto* sub : {sim, stab, sep, rep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : parse_error;
    }

    try {
        if (*sim) return cmd_simulate(scenario_path, common);
        if (*stab) return cmd_stability(scenario_path, common);
        if (*sep) return cmd_separability(scenario_path, common);
        return cmd_reproduce(figure, common);
    } catch (const bss::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return parse_error;
    } catch (const bss::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return parse_error;
    } catch (const bss::CapabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return capability;
    } catch (const bss::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical;
    }
}

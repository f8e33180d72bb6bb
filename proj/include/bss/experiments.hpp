#pragma once

// Seed batches with their summaries, plus the figure reproductions.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "bss/adaptive.hpp"
#include "bss/plot.hpp"
#include "bss/scenario.hpp"
#include "bss/sources.hpp"

namespace bss {

/// Worker count: BSS_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
inline unsigned worker_count() {
    if (const char* env = std::getenv("BSS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled by exactly one call, so writing to slot i needs no locking. The
/// first exception is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = worker_count()) {
    threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct SeedResult {
    std::uint64_t seed = 0;
    Mat2 A;
    double initial_index = 0.0;
    double final_index = 0.0;
    bool converged = false;
    bool diverged = false;
    std::uint64_t diverged_at = 0;
};

struct RunSummary {
    std::vector<SeedResult> runs;
    double tolerance = 0.15;
    double converged_fraction = 0.0;
    double mean_index = 0.0;
    double min_index = 0.0;
    double max_index = 0.0;
    std::size_t diverged = 0;
    double wall_seconds = 0.0;

    bool any_diverged() const { return diverged > 0; }
};

/// Fills the aggregate fields from `runs` in seed order. Diverged runs count
/// as not converged and are excluded from the index statistics.
inline void summarize(RunSummary& s) {
    std::size_t conv = 0, finite = 0;
    double sum = 0.0;
    s.diverged = 0;
    s.min_index = INFINITY;
    s.max_index = -INFINITY;
    for (const auto& r : s.runs) {
        if (r.diverged) ++s.diverged;
        if (r.converged) ++conv;
        if (!r.diverged && std::isfinite(r.final_index)) {
            ++finite;
            sum += r.final_index;
            s.min_index = std::min(s.min_index, r.final_index);
            s.max_index = std::max(s.max_index, r.final_index);
        }
    }
    s.converged_fraction = s.runs.empty() ? 0.0 : static_cast<double>(conv) / static_cast<double>(s.runs.size());
    s.mean_index = finite ? sum / static_cast<double>(finite) : NAN;
    if (!finite) s.min_index = s.max_index = NAN;
}

inline constexpr const char* summary_csv_header = "seed,initial_index,final_index,converged,diverged,diverged_at";

inline void write_summary_csv(std::ostream& os, const RunSummary& s) {
    os << summary_csv_header << '\n' << std::setprecision(17);
    for (const auto& r : s.runs)
        os << r.seed << ',' << r.initial_index << ',' << r.final_index << ',' << (r.converged ? 1 : 0) << ','
           << (r.diverged ? 1 : 0) << ',' << r.diverged_at << '\n';
}

inline void write_summary_text(std::ostream& os, const RunSummary& s) {
    os << std::setprecision(6);
    os << "runs: " << s.runs.size() << '\n';
    os << "tolerance: " << s.tolerance << '\n';
    os << "converged_fraction: " << s.converged_fraction << '\n';
    os << "diverged: " << s.diverged << '\n';
    os << "mean_index: " << s.mean_index << '\n';
    os << "min_index: " << s.min_index << '\n';
    os << "max_index: " << s.max_index << '\n';
    os << "wall_seconds: " << s.wall_seconds << '\n';
    for (const auto& r : s.runs)
        os << "seed " << r.seed << ": final_index " << r.final_index << (r.diverged ? " (diverged)" : "")
           << (r.converged ? " converged" : "") << '\n';
}

struct OutputOptions {
    /// Empty: no files are written.
    std::filesystem::path dir;
    bool plots = true;
    std::string prefix = "trajectory";
};

inline void write_trajectory_files(const Trajectory& traj, const OutputOptions& out, const std::string& stem,
                                   const std::string& title) {
    if (out.dir.empty()) return;
    std::filesystem::create_directories(out.dir);
    {
        std::ofstream f(out.dir / (stem + ".csv"));
        write_trajectory_csv(f, traj);
    }
    if (out.plots) {
        std::ofstream f(out.dir / (stem + ".svg"));
        write_trajectory_svg(f, traj, title);
    }
}

/// Runs every seed of a resolved scenario. Each run is independent and
/// writes only its own files, and results are gathered by seed position, so
/// the output does not depend on the number of workers.
inline RunSummary run_seeds(const SourceModel& model, const HMatrix& H, const Scenario& sc, const OutputOptions& out,
                            unsigned threads = worker_count()) {
    const auto t0 = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.tolerance = sc.tolerance;
    summary.runs.resize(sc.seeds.size());
    parallel_for(
        sc.seeds.size(),
        [&](std::size_t i) {
            const auto seed = sc.seeds[i];
            const auto A = scenario_mixing(sc, seed);
            const auto traj = run(model, A, H, sc.mu, sc.n_steps, seed, sc.thinning);
            SeedResult r;
            r.seed = seed;
            r.A = A.matrix();
            r.initial_index = traj.points.front().index;
            r.diverged = traj.diverged;
            r.diverged_at = traj.diverged_at;
            r.final_index = traj.diverged ? INFINITY : traj.last().index;
            r.converged = !traj.diverged && r.final_index < sc.tolerance;
            summary.runs[i] = r;
            write_trajectory_files(traj, out, out.prefix + "_seed" + std::to_string(seed),
                                   model.label + ", " + H.label + ", seed " + std::to_string(seed));
        },
        threads);
    summarize(summary);
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return summary;
}

inline RunSummary run_scenario(const Scenario& sc, const OutputOptions& out, unsigned threads = worker_count()) {
    const auto model = model_from_json(sc.model_spec);
    const auto H = scenario_h(sc, model);
    return run_seeds(model, H, sc, out, threads);
}

// ---------------------------------------------------------------------------
// Contour grids
// ---------------------------------------------------------------------------

inline constexpr int contour_grid_size = 200;
inline constexpr std::size_t contour_histogram_samples = 1000000;

/// Cell-centred density grid over [-h1, h1] x [-h2, h2]: the analytic pdf when
/// available, otherwise a normalized 2-D histogram of 1e6 draws.
struct DensityGrid {
    int n = contour_grid_size;
    double half1 = 1.0;
    double half2 = 1.0;
    std::vector<double> values;  // row-major over (s1 index, s2 index)
    bool from_histogram = false;

    double s1(int i) const { return -half1 + (i + 0.5) * 2.0 * half1 / n; }
    double s2(int j) const { return -half2 + (j + 0.5) * 2.0 * half2 / n; }
};

inline DensityGrid density_grid(const SourceModel& model, std::uint64_t seed, int n = contour_grid_size) {
    DensityGrid g;
    g.n = n;
    g.values.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    if (model.pdf) {
        g.half1 = 4.0 * model.spread[0];
        g.half2 = 4.0 * model.spread[1];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g.values[static_cast<std::size_t>(i * n + j)] = model.pdf(g.s1(i), g.s2(j));
        return g;
    }
    g.from_histogram = true;
    const auto draws = sample(model, contour_histogram_samples, seed);
    for (const auto& p : draws) {
        g.half1 = std::max(g.half1, std::abs(p.s1));
        g.half2 = std::max(g.half2, std::abs(p.s2));
    }
    g.half1 *= 1.02;
    g.half2 *= 1.02;
    const double cell = (2.0 * g.half1 / n) * (2.0 * g.half2 / n);
    for (const auto& p : draws) {
        const int i = std::clamp(static_cast<int>((p.s1 + g.half1) / (2.0 * g.half1) * n), 0, n - 1);
        const int j = std::clamp(static_cast<int>((p.s2 + g.half2) / (2.0 * g.half2) * n), 0, n - 1);
        g.values[static_cast<std::size_t>(i * n + j)] += 1.0;
    }
    for (auto& v : g.values) v /= static_cast<double>(draws.size()) * cell;
    return g;
}

inline void write_density_csv(std::ostream& os, const DensityGrid& g) {
    os << "s1,s2,density\n" << std::setprecision(17);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) os << g.s1(i) << ',' << g.s2(j) << ',' << g.values[static_cast<std::size_t>(i * g.n + j)] << '\n';
}

// ---------------------------------------------------------------------------
// Figure reproductions
// ---------------------------------------------------------------------------

/// Step size and length shared by the reproductions. At this step size the
/// steady-state index of the separable cases is well below 0.2 after 2e5
/// iterations.
inline constexpr double reproduce_mu = 2e-4;
inline constexpr std::uint64_t reproduce_steps = 200000;

struct FigureRun {
    std::string file_stem;
    std::string model;
    std::string H;
    double final_index = 0.0;
    bool diverged = false;
};

struct FigureResult {
    std::string figure;
    std::vector<FigureRun> runs;
    std::string density_file;
};

inline FigureResult reproduce_figure(const std::string& figure, std::uint64_t seed, const OutputOptions& out,
                                     unsigned threads = worker_count()) {
    SourceModel model;
    std::vector<HMatrix> hs;
    if (figure == "fig2") {
        model = make_gaussian_scale_mixture();
        hs = {make_classical_cubic(), make_absvalue()};
    } else if (figure == "fig3") {
        model = make_polar_dependent({1.0});
        hs = {make_classical_cubic()};
    } else if (figure == "fig4") {
        model = make_polar_dependent({0.0});
        hs = {make_classical_cubic()};
    } else {
        throw ParseError("unknown figure '" + figure + "' (expected fig2, fig3 or fig4)");
    }
    FigureResult res;
    res.figure = figure;
    const auto dir = out.dir.empty() ? out.dir : out.dir / figure;
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        const auto grid = density_grid(model, seed);
        res.density_file = (dir / "density_grid.csv").string();
        std::ofstream f(res.density_file);
        write_density_csv(f, grid);
    }
    Rng rng(seed, 2);
    const auto A = random_mixing(rng);
    res.runs.resize(hs.size());
    OutputOptions sub = out;
    sub.dir = dir;
    parallel_for(
        hs.size(),
        [&](std::size_t k) {
            const auto traj = run(model, A, hs[k], reproduce_mu, reproduce_steps, seed, 1000);
            FigureRun fr{"trajectory_" + hs[k].label, model.label, hs[k].label,
                         traj.diverged ? INFINITY : traj.last().index, traj.diverged};
            write_trajectory_files(traj, sub, fr.file_stem, figure + ": " + model.label + ", " + hs[k].label);
            res.runs[k] = fr;
        },
        threads);
    return res;
}

} // namespace bss

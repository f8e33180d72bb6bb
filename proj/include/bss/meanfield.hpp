#pragma once

// Deterministic mean-field recursion
//   Cbar_t = Cbar_{t-1} - mu E[H(Cbar_{t-1} S)] Cbar_{t-1}
// and the scale-equilibrium system that fixes the amplitudes of a
// non-mixing limit.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bss/error.hpp"
#include "bss/expectation.hpp"
#include "bss/linalg.hpp"
#include "bss/nonlinearity.hpp"
#include "bss/sources.hpp"

namespace bss {

/// E[H(C S)] with per-entry error estimates.
struct MeanH {
    Mat2 value;
    Mat2 error;
};

inline MeanH mean_h(const Expectation& ex, const HMatrix& H, const Mat2& C) {
    const auto est = ex.mean([&](double s1, double s2) {
        const double z1 = C(0, 0) * s1 + C(0, 1) * s2;
        const double z2 = C(1, 0) * s1 + C(1, 1) * s2;
        return std::array<double, 4>{H.h11(z1, z2), H.h12(z1, z2), H.h21(z1, z2), H.h22(z1, z2)};
    });
    MeanH out;
    for (std::size_t k = 0; k < 4; ++k) {
        out.value.a[k] = est[k].value;
        out.error.a[k] = est[k].error;
    }
    return out;
}

inline Mat2 meanfield_step(const Mat2& Cbar, const HMatrix& H, const Expectation& ex, double mu) {
    return Cbar - mu * (mean_h(ex, H, Cbar).value * Cbar);
}

inline Mat2 meanfield_step(const Mat2& Cbar, const HMatrix& H, const SourceModel& model, double mu,
                           const ExpectationEngine& engine) {
    return meanfield_step(Cbar, H, Expectation(engine, model), mu);
}

/// Iterates the mean-field map n times and returns every iterate (including the start).
inline std::vector<Mat2> meanfield_trajectory(const Mat2& C0, const HMatrix& H, const Expectation& ex, double mu,
                                              std::size_t n) {
    std::vector<Mat2> out{C0};
    out.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) out.push_back(meanfield_step(out.back(), H, ex, mu));
    return out;
}

enum class Orientation { diagonal, anti_diagonal };

inline const char* to_string(Orientation o) { return o == Orientation::diagonal ? "diagonal" : "anti-diagonal"; }

/// Positive scales (c1, c2) making the diagonal entries of E[H(C S)] vanish.
/// Diagonal: C = diag(c1, c2), so C S = (c1 s1, c2 s2).
/// Anti-diagonal: C = [[0, c2], [c1, 0]], so C S = (c2 s2, c1 s1).
struct ScaleEquilibrium {
    double c1 = 1.0;
    double c2 = 1.0;
    std::array<double, 2> residuals{};
    Orientation orientation = Orientation::diagonal;
    int iterations = 0;
    /// "newton" or "bisection".
    std::string method;
    /// Sign-change brackets found by the fallback scan, as (lo, hi) per search.
    std::vector<std::array<double, 2>> brackets;

    Mat2 matrix() const {
        return orientation == Orientation::diagonal ? Mat2::diag(c1, c2) : Mat2::anti_diag(c2, c1);
    }
};

inline Mat2 equilibrium_matrix(double c1, double c2, Orientation o) {
    return o == Orientation::diagonal ? Mat2::diag(c1, c2) : Mat2::anti_diag(c2, c1);
}

/// The four expectations E[h_ij(C S)] at the non-mixing matrix with scales
/// (c1, c2), in the order h11, h12, h21, h22.
inline std::array<Estimate, 4> equilibrium_residuals(const HMatrix& H, const Expectation& ex, double c1, double c2,
                                                     Orientation o = Orientation::diagonal) {
    const Mat2 C = equilibrium_matrix(c1, c2, o);
    return ex.mean([&](double s1, double s2) {
        const double z1 = C(0, 0) * s1 + C(0, 1) * s2;
        const double z2 = C(1, 0) * s1 + C(1, 1) * s2;
        return std::array<double, 4>{H.h11(z1, z2), H.h12(z1, z2), H.h21(z1, z2), H.h22(z1, z2)};
    });
}

inline std::array<Estimate, 4> equilibrium_residuals(const HMatrix& H, const SourceModel& model, double c1, double c2,
                                                     const ExpectationEngine& engine,
                                                     Orientation o = Orientation::diagonal) {
    return equilibrium_residuals(H, Expectation(engine, model), c1, c2, o);
}

namespace detail {

inline std::array<double, 2> diag_residual(const HMatrix& H, const Expectation& ex, double c1, double c2,
                                           Orientation o) {
    const Mat2 C = equilibrium_matrix(c1, c2, o);
    const auto est = ex.mean([&](double s1, double s2) {
        const double z1 = C(0, 0) * s1 + C(0, 1) * s2;
        const double z2 = C(1, 0) * s1 + C(1, 1) * s2;
        return std::array<double, 2>{H.h11(z1, z2), H.h22(z1, z2)};
    });
    return {est[0].value, est[1].value};
}

inline double max_abs(const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); }

} // namespace detail

inline constexpr double scale_bracket_lo = 0.05;
inline constexpr double scale_bracket_hi = 20.0;

/// Damped Newton on (log c1, log c2) with a finite-difference Jacobian; falls
/// back to alternating bracketed bisection over [0.05, 20] per scale. When a
/// scan finds several sign changes the root nearest 1 is taken.
inline ScaleEquilibrium solve_scale_equilibrium(const HMatrix& H, const Expectation& ex,
                                                Orientation o = Orientation::diagonal, double tol = 1e-10,
                                                std::array<double, 2> start = {1.0, 1.0}) {
    auto residual = [&](double c1, double c2) { return detail::diag_residual(H, ex, c1, c2, o); };
    ScaleEquilibrium eq;
    eq.orientation = o;

    // Newton in log-scale coordinates keeps the iterate positive.
    double u1 = std::log(start[0]);
    double u2 = std::log(start[1]);
    auto r = residual(start[0], start[1]);
    constexpr int max_newton = 60;
    for (int it = 0; it < max_newton && std::isfinite(detail::max_abs(r)); ++it) {
        eq.iterations = it;
        if (detail::max_abs(r) <= tol) {
            eq.c1 = std::exp(u1);
            eq.c2 = std::exp(u2);
            eq.residuals = r;
            eq.method = "newton";
            return eq;
        }
        constexpr double h = 1e-6;
        const auto r1p = residual(std::exp(u1 + h), std::exp(u2));
        const auto r1m = residual(std::exp(u1 - h), std::exp(u2));
        const auto r2p = residual(std::exp(u1), std::exp(u2 + h));
        const auto r2m = residual(std::exp(u1), std::exp(u2 - h));
        const Mat2 J{(r1p[0] - r1m[0]) / (2 * h), (r2p[0] - r2m[0]) / (2 * h), (r1p[1] - r1m[1]) / (2 * h),
                     (r2p[1] - r2m[1]) / (2 * h)};
        if (!J.all_finite() || std::abs(J.det()) < 1e-14) break;
        const Vec2 step = J.inverse() * Vec2{r[0], r[1]};
        double lambda = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            const double n1 = u1 - lambda * std::clamp(step.x, -2.0, 2.0);
            const double n2 = u2 - lambda * std::clamp(step.y, -2.0, 2.0);
            const auto rn = residual(std::exp(n1), std::exp(n2));
            if (std::isfinite(detail::max_abs(rn)) && detail::max_abs(rn) < detail::max_abs(r)) {
                u1 = n1;
                u2 = n2;
                r = rn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (std::isfinite(detail::max_abs(r)) && detail::max_abs(r) <= tol) {
        eq.c1 = std::exp(u1);
        eq.c2 = std::exp(u2);
        eq.residuals = r;
        eq.method = "newton";
        return eq;
    }

    // Fallback: Gauss-Seidel sweeps, each solving one scalar equation by
    // scanning a log grid for sign changes and bisecting the bracket nearest 1.
    double c[2] = {1.0, 1.0};
    auto solve_one = [&](int which) {
        auto f = [&](double x) {
            const double a = which == 0 ? x : c[0];
            const double b = which == 0 ? c[1] : x;
            return residual(a, b)[static_cast<std::size_t>(which)];
        };
        constexpr int n_scan = 120;
        const double llo = std::log(scale_bracket_lo);
        const double lhi = std::log(scale_bracket_hi);
        double best_lo = 0.0;
        double best_hi = 0.0;
        double best_dist = std::numeric_limits<double>::infinity();
        double x_prev = scale_bracket_lo;
        double f_prev = f(x_prev);
        for (int k = 1; k <= n_scan; ++k) {
            const double x = std::exp(llo + (lhi - llo) * k / n_scan);
            const double fx = f(x);
            if (std::isfinite(f_prev) && std::isfinite(fx) && (f_prev == 0.0 || f_prev * fx < 0.0)) {
                eq.brackets.push_back({x_prev, x});
                const double dist = std::abs(std::log(0.5 * (x_prev + x)));
                if (dist < best_dist) {
                    best_dist = dist;
                    best_lo = x_prev;
                    best_hi = x;
                }
            }
            x_prev = x;
            f_prev = fx;
        }
        if (!std::isfinite(best_dist))
            throw NumericalError("solve_scale_equilibrium: no root of the scale equation in [" +
                                 std::to_string(scale_bracket_lo) + ", " + std::to_string(scale_bracket_hi) + "]");
        double lo = best_lo;
        double hi = best_hi;
        double flo = f(lo);
        for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        c[which] = 0.5 * (lo + hi);
    };
    constexpr int max_sweeps = 200;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        eq.brackets.clear();
        solve_one(0);
        solve_one(1);
        r = residual(c[0], c[1]);
        eq.iterations = sweep + 1;
        if (detail::max_abs(r) <= tol) {
            eq.c1 = c[0];
            eq.c2 = c[1];
            eq.residuals = r;
            eq.method = "bisection";
            return eq;
        }
    }
    throw NumericalError("solve_scale_equilibrium: iteration did not converge (residual " +
                         std::to_string(detail::max_abs(r)) + ")");
}

inline ScaleEquilibrium solve_scale_equilibrium(const HMatrix& H, const SourceModel& model,
                                                const ExpectationEngine& engine,
                                                Orientation o = Orientation::diagonal, double tol = 1e-10) {
    const auto parity = validate_parities(H);
    if (!parity.valid) throw DomainError("solve_scale_equilibrium: H(" + H.label + ") violates the parity contract");
    const auto sym = check_quadrantal_symmetry(model, 1e-12);
    if (!sym.symmetric)
        throw DomainError("solve_scale_equilibrium: model '" + model.label + "' is not quadrantally symmetric");
    const Expectation ex(engine, model);
    // c_i always multiplies s_i, so the whitening scales are the natural start
    // for both orientations (and exact for the classical family).
    return solve_scale_equilibrium(H, ex, o, tol, {1.0 / model.spread[0], 1.0 / model.spread[1]});
}

} // namespace bss

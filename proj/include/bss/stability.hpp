#pragma once

// Local stability of non-mixing equilibria and the separability classifier.
//
// Around C = diag(c1, c2) the diagonal perturbations (alpha, beta) and the
// off-diagonal ones (gamma, delta) decouple; their linear maps are governed by
//   F = E[ [h11; h22](c1 s1, c2 s2) [s1 f_1/f, s2 f_2/f] ]
//   G = E[ [h12; h21](c1 s1, c2 s2) [s2 f_1/f, s1 f_2/f] ]
// where f_i is the partial derivative of the joint density.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "bss/error.hpp"
#include "bss/expectation.hpp"
#include "bss/linalg.hpp"
#include "bss/meanfield.hpp"
#include "bss/nonlinearity.hpp"
#include "bss/sources.hpp"

namespace bss {

namespace detail {

/// Score-weight pairs for the F and G expectations. For the anti-diagonal
/// orientation the sources are relabeled (s1 <-> s2), which swaps the roles
/// of the two score components.
struct LocalFrame {
    double z1, z2;   // C S at the equilibrium
    double u1, u2;   // F weights
    double v1, v2;   // G weights
};

inline LocalFrame local_frame(const ScaleEquilibrium& eq, const Vec2& score, double s1, double s2) {
    if (eq.orientation == Orientation::diagonal)
        return {eq.c1 * s1, eq.c2 * s2, s1 * score.x, s2 * score.y, s2 * score.x, s1 * score.y};
    // Relabeled sources s' = (s2, s1) with scales (c2, c1).
    return {eq.c2 * s2, eq.c1 * s1, s2 * score.y, s1 * score.x, s1 * score.y, s2 * score.x};
}

} // namespace detail

/// Diagonal scales of the equilibrium in the relabeled frame where it is diagonal.
inline std::array<double, 2> frame_scales(const ScaleEquilibrium& eq) {
    return eq.orientation == Orientation::diagonal ? std::array<double, 2>{eq.c1, eq.c2}
                                                   : std::array<double, 2>{eq.c2, eq.c1};
}

inline Mat2 compute_F(const HMatrix& H, const SourceModel& model, const ScaleEquilibrium& eq, const Expectation& ex) {
    model.require_gradient("compute_F");
    const auto e = ex.mean([&](double s1, double s2) {
        const auto fr = detail::local_frame(eq, model.score(s1, s2), s1, s2);
        const double a = H.h11(fr.z1, fr.z2);
        const double b = H.h22(fr.z1, fr.z2);
        return std::array<double, 4>{a * fr.u1, a * fr.u2, b * fr.u1, b * fr.u2};
    });
    return {e[0].value, e[1].value, e[2].value, e[3].value};
}

inline Mat2 compute_G(const HMatrix& H, const SourceModel& model, const ScaleEquilibrium& eq, const Expectation& ex) {
    model.require_gradient("compute_G");
    const auto e = ex.mean([&](double s1, double s2) {
        const auto fr = detail::local_frame(eq, model.score(s1, s2), s1, s2);
        const double a = H.h12(fr.z1, fr.z2);
        const double b = H.h21(fr.z1, fr.z2);
        return std::array<double, 4>{a * fr.v1, a * fr.v2, b * fr.v1, b * fr.v2};
    });
    return {e[0].value, e[1].value, e[2].value, e[3].value};
}

inline Mat2 compute_F(const HMatrix& H, const SourceModel& model, const ScaleEquilibrium& eq,
                      const ExpectationEngine& engine) {
    model.require_gradient("compute_F");
    return compute_F(H, model, eq, Expectation(engine, model));
}

inline Mat2 compute_G(const HMatrix& H, const SourceModel& model, const ScaleEquilibrium& eq,
                      const ExpectationEngine& engine) {
    model.require_gradient("compute_G");
    return compute_G(H, model, eq, Expectation(engine, model));
}

/// tr M < 0 and det M > 0. A positive margin demands tr M < -margin*s and
/// det M > margin*s^2 with s = max |m_ij|, so that numerically-zero
/// determinants are not mistaken for stable ones.
inline bool routh_hurwitz(const Mat2& M, double margin = 0.0) {
    const double s = M.max_abs();
    return M.trace() < -margin * s && M.det() > margin * s * s;
}

inline constexpr double default_stability_margin = 1e-9;

/// Worst ratio of tail mass density at the truncation boundary (weighted by
/// (1 + |s|^2)^3 to cover polynomial nonlinearities) to the peak density.
inline double boundary_decay_ratio(const SourceModel& model) {
    model.require_pdf("boundary_decay_ratio");
    const auto& dom = *model.domain;
    if (const auto* box = std::get_if<BoxDomain>(&dom)) {
        const double lo1 = box->breaks1.front(), hi1 = box->breaks1.back();
        const double lo2 = box->breaks2.front(), hi2 = box->breaks2.back();
        constexpr int n = 41;
        double peak = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = model.pdf(lo1 + (hi1 - lo1) * i / (n - 1), lo2 + (hi2 - lo2) * j / (n - 1));
                if (std::isfinite(v)) peak = std::max(peak, v);
            }
        double edge = 0.0;
        auto probe = [&](double a, double b) {
            const double r2 = a * a + b * b;
            edge = std::max(edge, model.pdf(a, b) * std::pow(1.0 + r2, 3));
        };
        for (int i = 0; i < n; ++i) {
            const double a = lo1 + (hi1 - lo1) * i / (n - 1);
            const double b = lo2 + (hi2 - lo2) * i / (n - 1);
            probe(a, lo2);
            probe(a, hi2);
            probe(lo1, b);
            probe(hi1, b);
        }
        return peak > 0.0 ? edge / peak : INFINITY;
    }
    const auto& polar = std::get<PolarDomain>(dom);
    const double R = polar.radius_breaks.back();
    const auto rule = quad::composite(polar.radius_breaks, 16);
    double peak = 0.0;
    for (const auto& nd : rule) peak = std::max(peak, polar.radial_weight(nd.x));
    const double smax = R * std::max(polar.scale1, polar.scale2);
    const double edge = polar.radial_weight(R) * std::pow(1.0 + smax * smax, 3);
    return peak > 0.0 ? edge / peak : INFINITY;
}

inline constexpr double boundary_decay_threshold = 1e-8;

struct StabilityReport {
    ScaleEquilibrium equilibrium;
    Mat2 F;
    Mat2 G;
    double trace_F = 0.0;
    double det_F = 0.0;
    double trace_G = 0.0;
    double det_G = 0.0;
    std::array<std::complex<double>, 2> eigen_F{};
    std::array<std::complex<double>, 2> eigen_G{};
    bool stable_F = false;
    bool stable_G = false;
    /// Routh-Hurwitz on both F and G.
    bool stable = false;
    /// Linear map of (gamma, delta) per unit step, derived directly by
    /// differentiating the mean field: [[c2/c1 G11, G12], [G21, c1/c2 G22]].
    Mat2 G_effective;
    bool stable_G_effective = false;
    double boundary_decay = 0.0;
    bool boundary_decay_ok = false;
    double margin = default_stability_margin;
};

inline Mat2 effective_G(const Mat2& G, const ScaleEquilibrium& eq) {
    const auto c = frame_scales(eq);
    return {c[1] / c[0] * G(0, 0), G(0, 1), G(1, 0), c[0] / c[1] * G(1, 1)};
}

inline StabilityReport stability_report(const HMatrix& H, const SourceModel& model, const ExpectationEngine& engine,
                                        Orientation o = Orientation::diagonal,
                                        double margin = default_stability_margin) {
    model.require_gradient("stability_report");
    StabilityReport rep;
    rep.margin = margin;
    rep.equilibrium = solve_scale_equilibrium(H, model, engine, o);
    const Expectation ex(engine, model);
    rep.F = compute_F(H, model, rep.equilibrium, ex);
    rep.G = compute_G(H, model, rep.equilibrium, ex);
    rep.trace_F = rep.F.trace();
    rep.det_F = rep.F.det();
    rep.trace_G = rep.G.trace();
    rep.det_G = rep.G.det();
    rep.eigen_F = eigenvalues(rep.F);
    rep.eigen_G = eigenvalues(rep.G);
    rep.stable_F = routh_hurwitz(rep.F, margin);
    rep.stable_G = routh_hurwitz(rep.G, margin);
    rep.stable = rep.stable_F && rep.stable_G;
    rep.G_effective = effective_G(rep.G, rep.equilibrium);
    rep.stable_G_effective = routh_hurwitz(rep.G_effective, margin);
    rep.boundary_decay = boundary_decay_ratio(model);
    rep.boundary_decay_ok = rep.boundary_decay <= boundary_decay_threshold;
    return rep;
}

// ---------------------------------------------------------------------------
// Conditions for the classical family with independent sources
// ---------------------------------------------------------------------------

struct KappaReport {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    bool conditions_hold = false;

    double product() const { return (1.0 + kappa1) * (1.0 + kappa2); }
};

/// kappa_i = E[g_i'(s_i)] E[s_i^2] - E[s_i g_i(s_i)], with g' by central
/// differences and the expectations by quadrature over each marginal.
inline KappaReport kappa_conditions(const OddFunctionPair& g, const SourceModel& model,
                                    const ExpectationEngine& engine = ExpectationEngine::quadrature()) {
    if (!model.marginals) throw CapabilityError("kappa_conditions: model '" + model.label + "' has no marginals");
    const int n = std::max(engine.nodes, 32);
    auto kappa = [&](const Univariate& m, const Univariate1& gi) {
        const auto rule = quad::composite(m.breaks, n);
        auto dg = [&](double z) {
            const double h = 1e-5 * std::max(1.0, std::abs(z));
            return (gi(z + h) - gi(z - h)) / (2.0 * h);
        };
        const double e_dg = quad::integrate(rule, [&](double s) { return dg(s) * m.pdf(s); });
        const double e_s2 = quad::integrate(rule, [&](double s) { return s * s * m.pdf(s); });
        const double e_sg = quad::integrate(rule, [&](double s) { return s * gi(s) * m.pdf(s); });
        return e_dg * e_s2 - e_sg;
    };
    KappaReport rep;
    rep.kappa1 = kappa((*model.marginals)[0], g.g1);
    rep.kappa2 = kappa((*model.marginals)[1], g.g2);
    // Same round-off margin as the Routh-Hurwitz test: the derivative is a
    // central difference, so an exact boundary value shows up as 1 +- 1e-10.
    const double m = default_stability_margin;
    rep.conditions_hold = 1.0 + rep.kappa1 > m && 1.0 + rep.kappa2 > m && rep.product() > 1.0 + m;
    return rep;
}

// ---------------------------------------------------------------------------
// Finite-difference check of the linearization
// ---------------------------------------------------------------------------

struct JacobianCheckReport {
    /// Rows/columns ordered (alpha, beta, gamma, delta) where, in the frame in
    /// which the equilibrium is diag(c1, c2), the perturbation is
    /// [[alpha, gamma], [delta, beta]].
    std::array<std::array<double, 4>, 4> jacobian{};
    Mat2 F_block;         // C (I + mu F) C^-1
    Mat2 G_block;         // C (I + mu G) C^-1
    Mat2 G_block_direct;  // I + mu * G_effective
    double leakage = 0.0;
    double discrepancy_F = 0.0;
    double discrepancy_G = 0.0;
    double discrepancy_G_direct = 0.0;

    double max_discrepancy() const { return std::max(discrepancy_F, discrepancy_G); }
};

inline JacobianCheckReport verify_linearization(const HMatrix& H, const SourceModel& model,
                                                  const ScaleEquilibrium& eq, double mu, const Expectation& ex,
                                                  double fd_step = 1e-5) {
    const Mat2 C = eq.matrix();
    // Matrix position of each perturbation coordinate (alpha, beta, gamma, delta).
    const bool diag = eq.orientation == Orientation::diagonal;
    const std::array<int, 4> pos = diag ? std::array<int, 4>{0, 3, 1, 2} : std::array<int, 4>{1, 2, 0, 3};

    JacobianCheckReport rep;
    for (int l = 0; l < 4; ++l) {
        Mat2 plus = C;
        Mat2 minus = C;
        plus.a[static_cast<std::size_t>(pos[l])] += fd_step;
        minus.a[static_cast<std::size_t>(pos[l])] -= fd_step;
        const Mat2 d = meanfield_step(plus, H, ex, mu) - meanfield_step(minus, H, ex, mu);
        for (int k = 0; k < 4; ++k)
            rep.jacobian[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
                d.a[static_cast<std::size_t>(pos[k])] / (2.0 * fd_step);
    }

    const Mat2 F = compute_F(H, model, eq, ex);
    const Mat2 G = compute_G(H, model, eq, ex);
    const auto c = frame_scales(eq);
    const Mat2 D = Mat2::diag(c[0], c[1]);
    const Mat2 Dinv = Mat2::diag(1.0 / c[0], 1.0 / c[1]);
    rep.F_block = D * (Mat2::identity() + mu * F) * Dinv;
    rep.G_block = D * (Mat2::identity() + mu * G) * Dinv;
    rep.G_block_direct = Mat2::identity() + mu * effective_G(G, eq);

    const auto& J = rep.jacobian;
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 0; l < 4; ++l)
            if ((k < 2) != (l < 2)) rep.leakage = std::max(rep.leakage, std::abs(J[k][l]));
    const Mat2 JF{J[0][0], J[0][1], J[1][0], J[1][1]};
    const Mat2 JG{J[2][2], J[2][3], J[3][2], J[3][3]};
    rep.discrepancy_F = max_abs_diff(JF, rep.F_block);
    rep.discrepancy_G = max_abs_diff(JG, rep.G_block);
    rep.discrepancy_G_direct = max_abs_diff(JG, rep.G_block_direct);
    return rep;
}

inline JacobianCheckReport verify_linearization(const HMatrix& H, const SourceModel& model,
                                                  const ScaleEquilibrium& eq, double mu,
                                                  const ExpectationEngine& engine, double fd_step = 1e-5) {
    model.require_gradient("verify_linearization");
    return verify_linearization(H, model, eq, mu, Expectation(engine, model), fd_step);
}

// ---------------------------------------------------------------------------
// Separability classifier
// ---------------------------------------------------------------------------

enum class Separability { separable, non_separable, inconclusive };

inline const char* to_string(Separability s) {
    switch (s) {
    case Separability::separable: return "separable";
    case Separability::non_separable: return "non-separable";
    default: return "inconclusive";
    }
}

struct SeparabilityVerdict {
    Separability verdict = Separability::inconclusive;
    bool separable = false;
    /// Score-construction matrices F* = -E[u u^T], G* = -E[v v^T] with
    /// u = (s1 f_1/f, s2 f_2/f) and v = (s2 f_1/f, s1 f_2/f).
    Mat2 F_star;
    Mat2 G_star;
    std::array<double, 2> eigen_F_star{};
    std::array<double, 2> eigen_G_star{};
    /// min / max eigenvalue magnitude of the unit-diagonal forms of F* and G*.
    double rel_min_eigen_F = 0.0;
    double rel_min_eigen_G = 0.0;
    /// Largest eigenvalue relative to the spectral radius; <= 0 up to
    /// numerical error since both matrices are negative semidefinite.
    double max_rel_eigen = 0.0;
    /// "G*", "F*" or "" depending on which matrix supplied the null vector.
    std::string null_source;
    Vec2 null_vector{};
    double K1 = 0.0;
    double K2 = 0.0;
    /// Max relative violation of K1 s2 f_1 - K2 s1 f_2 = 0 (or of
    /// K1 s1 f_1 - K2 s2 f_2 = 0 for an F* null vector) over the probe grid.
    double fit_residual = INFINITY;
    double boundary_decay = 0.0;
    bool boundary_decay_ok = false;
    std::string note;
};

namespace detail {
struct UnitDiagonal {
    Mat2 normalized;
    Mat2 scale;
};

inline UnitDiagonal unit_diagonal(const Mat2& m) {
    const double d1 = std::abs(m(0, 0)), d2 = std::abs(m(1, 1));
    if (!(d1 > 0.0) || !(d2 > 0.0)) return {m, Mat2::identity()};
    const Mat2 S = Mat2::diag(1.0 / std::sqrt(d1), 1.0 / std::sqrt(d2));
    return {S * m * S, S};
}
} // namespace detail

inline constexpr double default_tol_eig = 1e-3;
inline constexpr double default_tol_fit = 1e-3;

inline SeparabilityVerdict classify_separability(const SourceModel& model, const ExpectationEngine& engine,
                                                 double tol_eig = default_tol_eig, double tol_fit = default_tol_fit) {
    model.require_gradient("classify_separability");
    const Expectation ex(engine, model);
    const auto e = ex.mean([&](double s1, double s2) {
        const Vec2 sc = model.score(s1, s2);
        const double u1 = s1 * sc.x, u2 = s2 * sc.y;
        const double v1 = s2 * sc.x, v2 = s1 * sc.y;
        return std::array<double, 6>{u1 * u1, u1 * u2, u2 * u2, v1 * v1, v1 * v2, v2 * v2};
    });
    SeparabilityVerdict out;
    out.F_star = Mat2{-e[0].value, -e[1].value, -e[1].value, -e[2].value};
    out.G_star = Mat2{-e[3].value, -e[4].value, -e[4].value, -e[5].value};
    const auto eF = symmetric_eigen(out.F_star);
    const auto eG = symmetric_eigen(out.G_star);
    out.eigen_F_star = eF.values;
    out.eigen_G_star = eG.values;
    auto rel_max = [](const SymmetricEigen& se) {
        const double rho = std::max(std::abs(se.values[0]), std::abs(se.values[1]));
        return rho > 0.0 ? se.values[1] / rho : 0.0;
    };
    out.max_rel_eigen = std::max(rel_max(eF), rel_max(eG));
    // Axis scaling acts on F*, G* by congruence with a diagonal matrix, which
    // keeps singularity but not the eigenvalue ratio. The zero test therefore
    // runs on the unit-diagonal form S M S, S = diag(|m11|, |m22|)^-1/2.
    const auto nF = detail::unit_diagonal(out.F_star);
    const auto nG = detail::unit_diagonal(out.G_star);
    const auto enF = symmetric_eigen(nF.normalized);
    const auto enG = symmetric_eigen(nG.normalized);
    auto rel_min = [](const SymmetricEigen& se) {
        const double rho = std::max(std::abs(se.values[0]), std::abs(se.values[1]));
        return rho > 0.0 ? std::min(std::abs(se.values[0]), std::abs(se.values[1])) / rho : 0.0;
    };
    out.rel_min_eigen_F = rel_min(enF);
    out.rel_min_eigen_G = rel_min(enG);
    out.boundary_decay = boundary_decay_ratio(model);
    out.boundary_decay_ok = out.boundary_decay <= boundary_decay_threshold;

    const bool zero_G = out.rel_min_eigen_G <= tol_eig;
    const bool zero_F = out.rel_min_eigen_F <= tol_eig;
    const bool gray = (!zero_G && out.rel_min_eigen_G <= 10.0 * tol_eig) ||
                      (!zero_F && out.rel_min_eigen_F <= 10.0 * tol_eig);

    if (!zero_G && !zero_F) {
        out.verdict = gray ? Separability::inconclusive : Separability::separable;
        if (gray) out.note = "smallest eigenvalue in the gray zone [tol_eig, 10 tol_eig]";
        out.separable = out.verdict == Separability::separable;
        return out;
    }

    // Null vector of the singular matrix, written as [K1, -K2]. The null
    // vector of M is S times the null vector of S M S.
    const bool use_G = zero_G;
    const auto& se = use_G ? enG : enF;
    const auto& S = use_G ? nG.scale : nF.scale;
    const std::size_t null_idx = std::abs(se.values[0]) <= std::abs(se.values[1]) ? 0 : 1;
    Vec2 nv = S * se.vectors[null_idx];
    const double big = std::max(std::abs(nv.x), std::abs(nv.y));
    nv = {nv.x / big, nv.y / big};
    if (nv.x < 0.0 || (nv.x == 0.0 && nv.y > 0.0)) nv = {-nv.x, -nv.y};
    out.null_source = use_G ? "G*" : "F*";
    out.null_vector = nv;
    out.K1 = nv.x;
    out.K2 = -nv.y;
    if (!(out.K1 > 0.0) || !(out.K2 > 0.0)) {
        out.verdict = Separability::inconclusive;
        out.note = "null vector components have mixed signs";
        return out;
    }

    // Probe the defining identity on a grid inside the bulk of the law.
    constexpr int n = 21;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s1 = 3.0 * model.spread[0] * (2.0 * i / (n - 1) - 1.0);
        for (int j = 0; j < n; ++j) {
            const double s2 = 3.0 * model.spread[1] * (2.0 * j / (n - 1) - 1.0);
            const double f = model.pdf(s1, s2);
            if (!(f > 0.0) || !std::isfinite(f)) continue;
            const Vec2 sc = model.score(s1, s2);
            const double a = use_G ? out.K1 * s2 * sc.x : out.K1 * s1 * sc.x;
            const double b = use_G ? out.K2 * s1 * sc.y : out.K2 * s2 * sc.y;
            const double denom = std::abs(a) + std::abs(b);
            if (denom > 0.0) worst = std::max(worst, std::abs(a - b) / denom);
        }
    }
    out.fit_residual = worst;
    if (worst <= tol_fit) {
        out.verdict = Separability::non_separable;
    } else {
        out.verdict = Separability::inconclusive;
        out.note = "zero eigenvalue but the elliptical identity is violated on the probe grid";
    }
    out.separable = false;
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt_complex(const std::complex<double>& z) {
    std::ostringstream os;
    os << std::setprecision(17) << z.real();
    if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
    return os.str();
}
inline void mat_kv(std::ostream& os, const std::string& name, const Mat2& m) {
    os << name << "11: " << m(0, 0) << '\n'
       << name << "12: " << m(0, 1) << '\n'
       << name << "21: " << m(1, 0) << '\n'
       << name << "22: " << m(1, 1) << '\n';
}
} // namespace detail

inline void write_report(std::ostream& os, const StabilityReport& r) {
    os << std::setprecision(17);
    os << "orientation: " << to_string(r.equilibrium.orientation) << '\n';
    os << "c1: " << r.equilibrium.c1 << '\n' << "c2: " << r.equilibrium.c2 << '\n';
    os << "residual_h11: " << r.equilibrium.residuals[0] << '\n'
       << "residual_h22: " << r.equilibrium.residuals[1] << '\n';
    detail::mat_kv(os, "F", r.F);
    detail::mat_kv(os, "G", r.G);
    os << "trace_F: " << r.trace_F << '\n' << "det_F: " << r.det_F << '\n';
    os << "trace_G: " << r.trace_G << '\n' << "det_G: " << r.det_G << '\n';
    os << "eig_F: " << detail::fmt_complex(r.eigen_F[0]) << ", " << detail::fmt_complex(r.eigen_F[1]) << '\n';
    os << "eig_G: " << detail::fmt_complex(r.eigen_G[0]) << ", " << detail::fmt_complex(r.eigen_G[1]) << '\n';
    os << "stable_F: " << (r.stable_F ? "true" : "false") << '\n';
    os << "stable_G: " << (r.stable_G ? "true" : "false") << '\n';
    os << "stable: " << (r.stable ? "true" : "false") << '\n';
    detail::mat_kv(os, "G_effective", r.G_effective);
    os << "stable_G_effective: " << (r.stable_G_effective ? "true" : "false") << '\n';
    os << "boundary_decay: " << r.boundary_decay << '\n';
    os << "boundary_decay_ok: " << (r.boundary_decay_ok ? "true" : "false") << '\n';
}

inline constexpr const char* stability_csv_header =
    "model,H,orientation,c1,c2,F11,F12,F21,F22,G11,G12,G21,G22,trace_F,det_F,trace_G,det_G,stable";

inline void write_csv_row(std::ostream& os, const std::string& model, const std::string& H, const StabilityReport& r) {
    os << std::setprecision(17) << model << ',' << H << ',' << to_string(r.equilibrium.orientation) << ','
       << r.equilibrium.c1 << ',' << r.equilibrium.c2;
    for (double v : r.F.a) os << ',' << v;
    for (double v : r.G.a) os << ',' << v;
    os << ',' << r.trace_F << ',' << r.det_F << ',' << r.trace_G << ',' << r.det_G << ','
       << (r.stable ? "true" : "false") << '\n';
}

inline void write_report(std::ostream& os, const SeparabilityVerdict& v) {
    os << std::setprecision(17);
    os << "verdict: " << to_string(v.verdict) << '\n';
    os << "separable: " << (v.separable ? "true" : "false") << '\n';
    detail::mat_kv(os, "F_star", v.F_star);
    detail::mat_kv(os, "G_star", v.G_star);
    os << "eig_F_star: " << v.eigen_F_star[0] << ", " << v.eigen_F_star[1] << '\n';
    os << "eig_G_star: " << v.eigen_G_star[0] << ", " << v.eigen_G_star[1] << '\n';
    os << "rel_min_eig_F_star: " << v.rel_min_eigen_F << '\n';
    os << "rel_min_eig_G_star: " << v.rel_min_eigen_G << '\n';
    if (!v.null_source.empty()) {
        os << "null_source: " << v.null_source << '\n';
        os << "null_vector: " << v.null_vector.x << ", " << v.null_vector.y << '\n';
        os << "K1: " << v.K1 << '\n' << "K2: " << v.K2 << '\n';
        os << "fit_residual: " << v.fit_residual << '\n';
    }
    os << "boundary_decay_ok: " << (v.boundary_decay_ok ? "true" : "false") << '\n';
    if (!v.note.empty()) os << "note: " << v.note << '\n';
}

inline constexpr const char* separability_csv_header =
    "model,verdict,eigF1,eigF2,eigG1,eigG2,rel_min_F,rel_min_G,K1,K2,fit_residual";

inline void write_csv_row(std::ostream& os, const std::string& model, const SeparabilityVerdict& v) {
    os << std::setprecision(17) << model << ',' << to_string(v.verdict) << ',' << v.eigen_F_star[0] << ','
       << v.eigen_F_star[1] << ',' << v.eigen_G_star[0] << ',' << v.eigen_G_star[1] << ',' << v.rel_min_eigen_F
       << ',' << v.rel_min_eigen_G << ',' << v.K1 << ',' << v.K2 << ',' << v.fit_residual << '\n';
}

} // namespace bss

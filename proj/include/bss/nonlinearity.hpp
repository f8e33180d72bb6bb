#pragma once

// The matrix function H(Z) driving the separator, its parity contract, and
// the concrete families used in the experiments.

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "bss/error.hpp"
#include "bss/linalg.hpp"
#include "bss/sources.hpp"

namespace bss {

using Bivariate = std::function<double(double, double)>;
using Univariate1 = std::function<double(double)>;

enum class Parity { even, odd };

/// H(Z) = [[h11, h12], [h21, h22]]. Diagonal entries are declared even in
/// each argument, anti-diagonal entries odd in each argument.
struct HMatrix {
    Bivariate h11;
    Bivariate h12;
    Bivariate h21;
    Bivariate h22;
    std::string label;

    static constexpr std::array<Parity, 4> declared_parity{Parity::even, Parity::odd, Parity::odd, Parity::even};

    const Bivariate& entry(int i, int j) const {
        if (i == 0) return j == 0 ? h11 : h12;
        return j == 0 ? h21 : h22;
    }
};

/// Entry (i, j) of the result is h_ij(z1, z2).
inline Mat2 evaluate(const HMatrix& H, double z1, double z2) {
    Mat2 m{H.h11(z1, z2), H.h12(z1, z2), H.h21(z1, z2), H.h22(z1, z2)};
    if (!m.all_finite()) throw NumericalError("evaluate: H(" + H.label + ") produced a non-finite value");
    return m;
}

struct OddFunctionPair {
    Univariate1 g1;
    Univariate1 g2;
    std::string label;
};

inline OddFunctionPair cubic_pair() {
    auto g = [](double z) { return z * z * z; };
    return {g, g, "cubic"};
}
inline OddFunctionPair linear_pair() {
    auto g = [](double z) { return z; };
    return {g, g, "linear"};
}
inline OddFunctionPair tanh_pair() {
    auto g = [](double z) { return std::tanh(z); };
    return {g, g, "tanh"};
}

struct ParityCheck {
    bool valid = false;
    double worst_violation = 0.0;
    /// Grid point (z1, z2) where the worst violation occurred.
    Vec2 worst_at{};
    /// Entry index 0..3 for h11, h12, h21, h22.
    int worst_entry = -1;
};

inline constexpr double default_parity_half_width = 4.0;
inline constexpr double default_parity_tol = 1e-9;

/// Checks, on a 21x21 grid over [-w, w]^2, that h11 and h22 are even and h12
/// and h21 are odd in each argument.
inline ParityCheck validate_parities(const HMatrix& H, double grid_half_width = default_parity_half_width,
                                     double tol = default_parity_tol) {
    constexpr int n = 21;
    ParityCheck out;
    for (int i = 0; i < n; ++i) {
        const double z1 = grid_half_width * (2.0 * i / (n - 1) - 1.0);
        for (int j = 0; j < n; ++j) {
            const double z2 = grid_half_width * (2.0 * j / (n - 1) - 1.0);
            for (int e = 0; e < 4; ++e) {
                const auto& h = H.entry(e / 2, e % 2);
                const double sign = HMatrix::declared_parity[static_cast<std::size_t>(e)] == Parity::even ? 1.0 : -1.0;
                const double base = h(z1, z2);
                const double v1 = std::abs(h(-z1, z2) - sign * base);
                const double v2 = std::abs(h(z1, -z2) - sign * base);
                const double v = std::isfinite(v1) && std::isfinite(v2) ? std::max(v1, v2) : INFINITY;
                if (v > out.worst_violation || out.worst_entry < 0) {
                    out.worst_violation = v;
                    out.worst_at = {z1, z2};
                    out.worst_entry = e;
                }
            }
        }
    }
    out.valid = out.worst_violation <= tol;
    return out;
}

/// H(Z) = [Z Z^T - I] + [Z G(Z)^T - G(Z) Z^T].
inline HMatrix make_classical(const OddFunctionPair& g) {
    HMatrix H;
    H.label = "classical{" + g.label + "}";
    H.h11 = [](double z1, double) { return z1 * z1 - 1.0; };
    H.h22 = [](double, double z2) { return z2 * z2 - 1.0; };
    H.h12 = [g1 = g.g1, g2 = g.g2](double z1, double z2) { return z1 * z2 + z1 * g2(z2) - g1(z1) * z2; };
    H.h21 = [g1 = g.g1, g2 = g.g2](double z1, double z2) { return z1 * z2 + z2 * g1(z1) - g2(z2) * z1; };
    if (!validate_parities(H).valid) throw DomainError("make_classical: g1, g2 must be odd functions");
    return H;
}

inline HMatrix make_classical_cubic() {
    auto H = make_classical(cubic_pair());
    H.label = "classical_cubic";
    return H;
}

/// The variant without a whitening part:
/// [[|z1| - 1, z1 z2^2 sgn(z2)], [z2 z1^2 sgn(z1), |z2| - 1]].
inline HMatrix make_absvalue() {
    HMatrix H;
    H.label = "absvalue";
    H.h11 = [](double z1, double) { return std::abs(z1) - 1.0; };
    H.h22 = [](double, double z2) { return std::abs(z2) - 1.0; };
    H.h12 = [](double z1, double z2) { return z1 * z2 * std::abs(z2); };
    H.h21 = [](double z1, double z2) { return z2 * z1 * std::abs(z1); };
    return H;
}

/// Score-based selection built from the model density:
/// h11 = -z1 f_1/f, h22 = -z2 f_2/f, h12 = -z2 f_1/f, h21 = -z1 f_2/f.
/// With whitening_offset the diagonal entries get an extra -1, which is what
/// makes c1 = c2 = 1 an equilibrium for densities that vanish at infinity
/// (integration by parts gives E[-s_i f_i/f] = 1).
inline HMatrix make_score_based(const SourceModel& model, bool whitening_offset = true) {
    model.require_gradient("make_score_based");
    const double off = whitening_offset ? 1.0 : 0.0;
    auto score = model.score;
    HMatrix H;
    H.label = whitening_offset ? "score_based" : "score_based{no_offset}";
    H.h11 = [=](double z1, double z2) { return -z1 * score(z1, z2).x - off; };
    H.h22 = [=](double z1, double z2) { return -z2 * score(z1, z2).y - off; };
    H.h12 = [=](double z1, double z2) { return -z2 * score(z1, z2).x; };
    H.h21 = [=](double z1, double z2) { return -z1 * score(z1, z2).y; };
    return H;
}

} // namespace bss

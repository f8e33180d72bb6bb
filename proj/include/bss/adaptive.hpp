#pragma once

// Online separator recursions and non-mixing diagnostics.
//
//   B_t = B_{t-1} - mu H(B_{t-1} X_t) B_{t-1},   X_t = A S_t
//   C_t = C_{t-1} - mu H(C_{t-1} S_t) C_{t-1},   C_t = B_t A

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bss/error.hpp"
#include "bss/linalg.hpp"
#include "bss/nonlinearity.hpp"
#include "bss/random.hpp"
#include "bss/sources.hpp"

namespace bss {

/// Invertible instantaneous mixing matrix A.
class MixingMatrix {
public:
    explicit MixingMatrix(const Mat2& a) : a_(a) {
        if (!a.all_finite() || !(std::abs(a.det()) > 1e-9))
            throw DomainError("MixingMatrix: matrix must be finite with |det| > 1e-9");
    }
    const Mat2& matrix() const { return a_; }
    Vec2 mix(const SamplePair& s) const { return a_ * Vec2{s.s1, s.s2}; }

private:
    Mat2 a_;
};

inline constexpr double random_mixing_min_det = 0.1;

/// Entries i.i.d. U[-1, 1], redrawn until |det| > 0.1.
inline MixingMatrix random_mixing(Rng& rng) {
    for (;;) {
        Mat2 a{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        if (std::abs(a.det()) > random_mixing_min_det) return MixingMatrix(a);
    }
}

struct SeparatorState {
    Mat2 B = Mat2::identity();
    double mu = 0.0;
    std::uint64_t t = 0;
};

struct NormalizedState {
    Mat2 C = Mat2::identity();
    double mu = 0.0;
    std::uint64_t t = 0;
};

inline constexpr double divergence_bound = 1e12;

inline bool is_diverged(const Mat2& m) {
    for (double v : m.a)
        if (!std::isfinite(v) || std::abs(v) > divergence_bound) return true;
    return false;
}

namespace detail {
inline Mat2 h_at(const HMatrix& H, const Vec2& z) {
    return {H.h11(z.x, z.y), H.h12(z.x, z.y), H.h21(z.x, z.y), H.h22(z.x, z.y)};
}
} // namespace detail

/// One step of the separator on an observation x = A s. The result may be
/// non-finite; callers check is_diverged().
inline SeparatorState step_B(const SeparatorState& state, const HMatrix& H, const Vec2& x) {
    const Vec2 s_hat = state.B * x;
    return {state.B - state.mu * (detail::h_at(H, s_hat) * state.B), state.mu, state.t + 1};
}

/// One step of the normalized recursion on a source draw s.
inline NormalizedState step_C(const NormalizedState& state, const HMatrix& H, const SamplePair& s) {
    const Vec2 z = state.C * Vec2{s.s1, s.s2};
    return {state.C - state.mu * (detail::h_at(H, z) * state.C), state.mu, state.t + 1};
}

/// Distance to the set of non-mixing (diagonal or anti-diagonal) matrices:
/// sum over rows and columns of (sum |c| / max |c| - 1). Zero exactly when
/// every row and column has one nonzero entry.
inline double nonmixing_index(const Mat2& c) {
    double index = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double r0 = std::abs(c(i, 0));
        const double r1 = std::abs(c(i, 1));
        const double rmax = std::max(r0, r1);
        const double k0 = std::abs(c(0, i));
        const double k1 = std::abs(c(1, i));
        const double kmax = std::max(k0, k1);
        if (!(rmax > 0.0) || !(kmax > 0.0))
            throw DomainError("nonmixing_index: matrix has an all-zero row or column");
        index += (r0 + r1) / rmax - 1.0;
        index += (k0 + k1) / kmax - 1.0;
    }
    return index;
}

inline bool is_nonmixing(const Mat2& c, double tol) { return nonmixing_index(c) <= tol; }

/// nonmixing_index, or NaN when a row or column is all zero.
inline double nonmixing_index_or_nan(const Mat2& c) {
    try {
        return nonmixing_index(c);
    } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

struct TrajectoryPoint {
    std::uint64_t t = 0;
    Mat2 C;
    double index = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::uint64_t thinning = 100;
    bool diverged = false;
    /// Iteration at which divergence was detected (0 when not diverged).
    std::uint64_t diverged_at = 0;

    const TrajectoryPoint& last() const { return points.back(); }
};

inline constexpr std::uint64_t default_thinning = 100;

/// Iterates the normalized recursion from C_0 = A (equivalently B_0 = I) for
/// n_steps fresh source draws. Records t = 0, every thinning-th iterate and the
/// last iterate. Stops early with diverged = true when an entry becomes
/// non-finite or exceeds 1e12 in magnitude.
inline Trajectory run(const SourceModel& model, const MixingMatrix& A, const HMatrix& H, double mu,
                      std::uint64_t n_steps, std::uint64_t seed, std::uint64_t thinning = default_thinning) {
    if (n_steps < 1) throw DomainError("run: n_steps must be >= 1");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("run: step size must be finite and non-negative");
    if (thinning < 1) throw DomainError("run: thinning must be >= 1");
    Sampler sampler(model, seed, 1);
    Trajectory traj;
    traj.thinning = thinning;
    NormalizedState st{A.matrix(), mu, 0};
    traj.points.push_back({0, st.C, nonmixing_index_or_nan(st.C)});
    for (std::uint64_t k = 1; k <= n_steps; ++k) {
        const auto next = step_C(st, H, sampler.next());
        if (is_diverged(next.C)) {
            traj.diverged = true;
            traj.diverged_at = k;
            if (traj.points.back().t != st.t) traj.points.push_back({st.t, st.C, nonmixing_index_or_nan(st.C)});
            return traj;
        }
        st = next;
        // A transiently singular iterate has no defined index; it is recorded as NaN.
        if (k % thinning == 0 || k == n_steps) traj.points.push_back({k, st.C, nonmixing_index_or_nan(st.C)});
    }
    return traj;
}

// ---------------------------------------------------------------------------
// CSV: t,c11,c12,c21,c22,index with 17 significant digits
// ---------------------------------------------------------------------------

inline constexpr const char* trajectory_csv_header = "t,c11,c12,c21,c22,index";

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << trajectory_csv_header << '\n';
    os << std::setprecision(17);
    for (const auto& p : traj.points) {
        os << p.t;
        for (double v : p.C.a) os << ',' << v;
        os << ',' << p.index << '\n';
    }
}

inline Trajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != trajectory_csv_header)
        throw ParseError("trajectory csv: missing or wrong header");
    Trajectory traj;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw ParseError("trajectory csv: expected 6 columns in '" + line + "'");
        TrajectoryPoint p;
        try {
            p.t = std::stoull(cells[0]);
            for (std::size_t k = 0; k < 4; ++k) p.C.a[k] = std::stod(cells[k + 1]);
            p.index = cells[5] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cells[5]);
        } catch (const std::exception&) {
            throw ParseError("trajectory csv: malformed row '" + line + "'");
        }
        if (!traj.points.empty() && p.t <= traj.points.back().t)
            throw ParseError("trajectory csv: t must be strictly increasing");
        traj.points.push_back(p);
    }
    return traj;
}

} // namespace bss

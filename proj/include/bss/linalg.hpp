#pragma once

// Fixed-size 2x2 linear algebra used throughout the separator and the
// stability analysis. Everything is a value type; no allocation.

#include <array>
#include <cmath>
#include <complex>
#include <ostream>

namespace bss {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x : y; }
    constexpr double& operator[](int i) { return i == 0 ? x : y; }

    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

/// Row-major 2x2 matrix, entry (i, j) accessed as m(i, j) with 0-based indices.
struct Mat2 {
    std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};

    constexpr Mat2() = default;
    constexpr Mat2(double a11, double a12, double a21, double a22) : a{a11, a12, a21, a22} {}

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
    static constexpr Mat2 anti_diag(double u, double l) { return {0.0, u, l, 0.0}; }
    static Mat2 rotation(double angle) {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {c, -s, s, c};
    }

    constexpr double operator()(int i, int j) const { return a[2 * i + j]; }
    constexpr double& operator()(int i, int j) { return a[2 * i + j]; }

    constexpr double trace() const { return a[0] + a[3]; }
    constexpr double det() const { return a[0] * a[3] - a[1] * a[2]; }
    constexpr Mat2 transposed() const { return {a[0], a[2], a[1], a[3]}; }

    /// Inverse; the caller guarantees det() != 0.
    constexpr Mat2 inverse() const {
        const double d = det();
        return {a[3] / d, -a[1] / d, -a[2] / d, a[0] / d};
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : a)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

constexpr Mat2 operator+(const Mat2& l, const Mat2& r) {
    return {l.a[0] + r.a[0], l.a[1] + r.a[1], l.a[2] + r.a[2], l.a[3] + r.a[3]};
}
constexpr Mat2 operator-(const Mat2& l, const Mat2& r) {
    return {l.a[0] - r.a[0], l.a[1] - r.a[1], l.a[2] - r.a[2], l.a[3] - r.a[3]};
}
constexpr Mat2 operator*(double s, const Mat2& m) {
    return {s * m.a[0], s * m.a[1], s * m.a[2], s * m.a[3]};
}
constexpr Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l(0, 0) * r(0, 0) + l(0, 1) * r(1, 0), l(0, 0) * r(0, 1) + l(0, 1) * r(1, 1),
            l(1, 0) * r(0, 0) + l(1, 1) * r(1, 0), l(1, 0) * r(0, 1) + l(1, 1) * r(1, 1)};
}
constexpr Vec2 operator*(const Mat2& m, const Vec2& v) {
    return {m(0, 0) * v.x + m(0, 1) * v.y, m(1, 0) * v.x + m(1, 1) * v.y};
}

inline double max_abs_diff(const Mat2& l, const Mat2& r) { return (l - r).max_abs(); }

/// Eigenvalues of a general real 2x2 matrix, ordered by ascending real part.
inline std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) {
    const double half_tr = 0.5 * m.trace();
    const double disc = half_tr * half_tr - m.det();
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        // Avoid cancellation in the smaller-magnitude root.
        const double big = half_tr >= 0.0 ? half_tr + r : half_tr - r;
        const double small = big != 0.0 ? m.det() / big : 0.0;
        std::complex<double> l1{std::min(big, small), 0.0};
        std::complex<double> l2{std::max(big, small), 0.0};
        return {l1, l2};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>{half_tr, -im}, std::complex<double>{half_tr, im}};
}

inline double spectral_radius(const Mat2& m) {
    const auto ev = eigenvalues(m);
    return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

/// Eigen-decomposition of a symmetric 2x2 matrix (the symmetric part of m is
/// used). values[0] <= values[1]; vectors[k] is a unit eigenvector of values[k].
struct SymmetricEigen {
    std::array<double, 2> values{};
    std::array<Vec2, 2> vectors{};
};

inline SymmetricEigen symmetric_eigen(const Mat2& m) {
    const double p = m(0, 0);
    const double q = 0.5 * (m(0, 1) + m(1, 0));
    const double r = m(1, 1);
    const double mean = 0.5 * (p + r);
    const double half_diff = 0.5 * (p - r);
    const double rad = std::hypot(half_diff, q);
    SymmetricEigen out;
    out.values = {mean - rad, mean + rad};
    // Rotation angle that diagonalizes [[p, q], [q, r]].
    const double theta = 0.5 * std::atan2(2.0 * q, p - r);
    const Vec2 major{std::cos(theta), std::sin(theta)};
    const Vec2 minor{-std::sin(theta), std::cos(theta)};
    out.vectors = {minor, major};
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m(0, 0) << ", " << m(0, 1) << "], [" << m(1, 0) << ", " << m(1, 1) << "]]";
}

} // namespace bss

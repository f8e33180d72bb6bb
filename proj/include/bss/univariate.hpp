#pragma once

// Univariate source laws. They are the building blocks for independent
// pairs and for the epsilon-contamination mixtures, and they carry their own
// quadrature panels so that expectations can be computed without sampling.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bss/error.hpp"
#include "bss/random.hpp"

namespace bss {

struct Univariate {
    std::string label;
    std::function<double(double)> pdf;
    /// Derivative of the density; empty when the density is not differentiable
    /// in the classical sense (e.g. the hard-edged uniform law).
    std::function<double(double)> dpdf;
    /// d/ds log f(s); present whenever dpdf is.
    std::function<double(double)> score;
    std::function<double(Rng&)> draw;
    /// Panel endpoints for Gauss-Legendre quadrature; the outer two bound the
    /// truncated support, inner ones sit on kinks and steep regions.
    std::vector<double> breaks;
    double mean = 0.0;
    double variance = 1.0;

    bool has_derivative() const { return static_cast<bool>(dpdf); }
};

namespace detail {
inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
inline double normal_pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }
} // namespace detail

inline Univariate gaussian(double sigma, double mean = 0.0) {
    if (!(sigma > 0.0)) throw DomainError("gaussian: sigma must be positive");
    Univariate u;
    u.label = "N(" + std::to_string(mean) + "," + std::to_string(sigma * sigma) + ")";
    u.pdf = [=](double s) { return detail::normal_pdf((s - mean) / sigma) / sigma; };
    u.dpdf = [=](double s) {
        const double x = (s - mean) / sigma;
        return -x * detail::normal_pdf(x) / (sigma * sigma);
    };
    u.score = [=](double s) { return -(s - mean) / (sigma * sigma); };
    u.draw = [=](Rng& rng) { return mean + rng.normal(sigma); };
    u.breaks = {mean - 10 * sigma, mean - 3 * sigma, mean, mean + 3 * sigma, mean + 10 * sigma};
    u.mean = mean;
    u.variance = sigma * sigma;
    return u;
}

/// Laplace law with scale b (variance 2 b^2).
inline Univariate laplace(double b) {
    if (!(b > 0.0)) throw DomainError("laplace: scale must be positive");
    Univariate u;
    u.label = "Laplace(" + std::to_string(b) + ")";
    u.pdf = [=](double s) { return std::exp(-std::abs(s) / b) / (2.0 * b); };
    u.dpdf = [=](double s) {
        const double sg = (s > 0.0) - (s < 0.0);
        return -sg * std::exp(-std::abs(s) / b) / (2.0 * b * b);
    };
    u.score = [=](double s) { return -static_cast<double>((s > 0.0) - (s < 0.0)) / b; };
    u.draw = [=](Rng& rng) {
        const double v = rng.uniform() - 0.5;
        const double sg = v >= 0.0 ? 1.0 : -1.0;
        return -b * sg * std::log1p(-2.0 * std::abs(v));
    };
    u.breaks = {-40 * b, -8 * b, 0.0, 8 * b, 40 * b};
    u.variance = 2.0 * b * b;
    return u;
}

/// Uniform law on [-a, a]. The density has jumps at +-a, so no derivative is
/// exposed; analyses that need a score should use smoothed_uniform.
inline Univariate uniform(double a) {
    if (!(a > 0.0)) throw DomainError("uniform: half-width must be positive");
    Univariate u;
    u.label = "U(-" + std::to_string(a) + "," + std::to_string(a) + ")";
    u.pdf = [=](double s) { return std::abs(s) <= a ? 0.5 / a : 0.0; };
    u.draw = [=](Rng& rng) { return rng.uniform(-a, a); };
    u.breaks = {-a, 0.0, a};
    u.variance = a * a / 3.0;
    return u;
}

/// Uniform on [-a, a] convolved with N(0, sigma^2): a smooth density with the
/// same fourth cumulant as the uniform law.
inline Univariate smoothed_uniform(double a, double sigma) {
    if (!(a > 0.0) || !(sigma > 0.0)) throw DomainError("smoothed_uniform: a and sigma must be positive");
    if (a < 8.0 * sigma) throw DomainError("smoothed_uniform: sigma too large relative to a");
    Univariate u;
    u.label = "U(-" + std::to_string(a) + "," + std::to_string(a) + ")*N(0," + std::to_string(sigma * sigma) + ")";
    const double k = 1.0 / (sigma * std::numbers::sqrt2);
    // (Phi((s+a)/sigma) - Phi((s-a)/sigma)) / (2a), written with erfc on |s| to
    // stay accurate in the tails.
    auto pdf = [=](double s) {
        const double x = std::abs(s);
        return 0.25 / a * (std::erfc((x - a) * k) - std::erfc((x + a) * k));
    };
    auto dpdf = [=](double s) {
        return 0.5 / a * (detail::normal_pdf((s + a) / sigma) - detail::normal_pdf((s - a) / sigma)) / sigma;
    };
    u.pdf = pdf;
    u.dpdf = dpdf;
    u.score = [=](double s) { return dpdf(s) / std::max(pdf(s), 1e-300); };
    u.draw = [=](Rng& rng) { return rng.uniform(-a, a) + rng.normal(sigma); };
    u.breaks = {-a - 10 * sigma, -a - 2 * sigma, -a + 2 * sigma, -a + 6 * sigma, 0.0,
                a - 6 * sigma,   a - 2 * sigma,  a + 2 * sigma,  a + 10 * sigma};
    u.variance = a * a / 3.0 + sigma * sigma;
    return u;
}

/// Law of c*X for c > 0.
inline Univariate scaled(const Univariate& base, double c) {
    if (!(c > 0.0)) throw DomainError("scaled: factor must be positive");
    Univariate u;
    u.label = std::to_string(c) + "*" + base.label;
    u.pdf = [=, f = base.pdf](double s) { return f(s / c) / c; };
    if (base.dpdf) {
        u.dpdf = [=, df = base.dpdf](double s) { return df(s / c) / (c * c); };
        u.score = [=, sc = base.score](double s) { return sc(s / c) / c; };
    }
    u.draw = [=, d = base.draw](Rng& rng) { return c * d(rng); };
    for (double b : base.breaks) u.breaks.push_back(c * b);
    u.mean = c * base.mean;
    u.variance = c * c * base.variance;
    return u;
}

} // namespace bss

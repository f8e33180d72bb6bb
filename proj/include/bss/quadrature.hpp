#pragma once

// Gauss-Legendre building blocks for the tensor-grid expectation engine.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "bss/error.hpp"

namespace bss::quad {

struct Node1 {
    double x;
    double w;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline std::vector<Node1> gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    std::vector<Node1> nodes(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = {-x, w};
        nodes[static_cast<std::size_t>(n - 1 - i)] = {x, w};
    }
    return nodes;
}

/// Composite rule: n Gauss-Legendre nodes on every panel [breaks[k], breaks[k+1]].
/// Breakpoints must be strictly increasing.
inline std::vector<Node1> composite(std::span<const double> breaks, int n) {
    if (breaks.size() < 2) throw DomainError("composite rule: need at least two breakpoints");
    const auto ref = gauss_legendre(n);
    std::vector<Node1> out;
    out.reserve(ref.size() * (breaks.size() - 1));
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double lo = breaks[k];
        const double hi = breaks[k + 1];
        if (!(hi > lo)) throw DomainError("composite rule: breakpoints must increase");
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (const auto& nd : ref) out.push_back({mid + half * nd.x, half * nd.w});
    }
    return out;
}

template <class Fn>
double integrate(std::span<const Node1> rule, Fn&& fn) {
    double acc = 0.0;
    for (const auto& nd : rule) acc += nd.w * fn(nd.x);
    return acc;
}

} // namespace bss::quad

#pragma once

// Expectation engine: E[phi(s1, s2)] by Monte Carlo over a seeded sample or
// by tensor-grid Gauss-Legendre quadrature over the model's domain.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "bss/error.hpp"
#include "bss/quadrature.hpp"
#include "bss/sources.hpp"

namespace bss {

struct ExpectationEngine {
    enum class Mode { monte_carlo, quadrature };

    Mode mode = Mode::quadrature;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    /// Gauss-Legendre nodes per panel and per axis.
    int nodes = 64;

    static ExpectationEngine monte_carlo(std::size_t n, std::uint64_t seed) {
        ExpectationEngine e;
        e.mode = Mode::monte_carlo;
        e.samples = n;
        e.seed = seed;
        return e;
    }
    static ExpectationEngine quadrature(int nodes = 64) {
        ExpectationEngine e;
        e.mode = Mode::quadrature;
        e.nodes = nodes;
        return e;
    }

    void validate() const {
        if (mode == Mode::monte_carlo && samples < 10000)
            throw DomainError("expectation engine: Monte Carlo mode needs at least 1e4 samples");
        if (mode == Mode::quadrature && nodes < 32)
            throw DomainError("expectation engine: quadrature mode needs at least 32 nodes per axis");
    }
};

/// value +- error; error is the standard error (Monte Carlo) or the
/// difference against a half-resolution grid (quadrature).
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

struct WeightedPoint {
    double s1;
    double s2;
    double w;
};

namespace detail {

inline std::vector<WeightedPoint> build_rule(const QuadratureDomain& domain, const SourceModel& model, int n) {
    std::vector<WeightedPoint> pts;
    if (const auto* box = std::get_if<BoxDomain>(&domain)) {
        const auto r1 = quad::composite(box->breaks1, n);
        const auto r2 = quad::composite(box->breaks2, n);
        pts.reserve(r1.size() * r2.size());
        for (const auto& a : r1)
            for (const auto& b : r2) {
                const double w = a.w * b.w * model.pdf(a.x, b.x);
                if (w > 0.0) pts.push_back({a.x, b.x, w});
            }
        return pts;
    }
    const auto& polar = std::get<PolarDomain>(domain);
    constexpr double pi = std::numbers::pi;
    const std::array<double, 5> quadrants{-pi, -0.5 * pi, 0.0, 0.5 * pi, pi};
    const auto rr = quad::composite(polar.radius_breaks, n);
    const auto rt = quad::composite(quadrants, n);
    pts.reserve(rr.size() * rt.size());
    for (const auto& r : rr) {
        const double wr = r.w * polar.radial_weight(r.x);
        if (!(wr > 0.0)) continue;
        for (const auto& t : rt)
            pts.push_back({polar.scale1 * r.x * std::cos(t.x), polar.scale2 * r.x * std::sin(t.x), wr * t.w});
    }
    return pts;
}

template <class Fn>
auto as_array(Fn& fn, double s1, double s2) {
    using R = std::invoke_result_t<Fn&, double, double>;
    if constexpr (std::is_arithmetic_v<R>) {
        return std::array<double, 1>{static_cast<double>(fn(s1, s2))};
    } else {
        return fn(s1, s2);
    }
}

} // namespace detail

/// An engine bound to one model. Samples or quadrature points are generated
/// once, so repeated expectations share them (common random numbers in MC
/// mode, which keeps root finding and finite differences well defined).
class Expectation {
public:
    Expectation(const ExpectationEngine& engine, const SourceModel& model) : engine_(engine) {
        engine.validate();
        if (engine.mode == ExpectationEngine::Mode::quadrature) {
            model.require_pdf("expectation (quadrature mode)");
            fine_ = detail::build_rule(*model.domain, model, engine.nodes);
            coarse_ = detail::build_rule(*model.domain, model, engine.nodes / 2);
        } else {
            model.require_sampler("expectation (Monte Carlo mode)");
            Sampler sampler(model, engine.seed);
            samples_.reserve(engine.samples);
            for (std::size_t i = 0; i < engine.samples; ++i) samples_.push_back(sampler.next());
        }
    }

    const ExpectationEngine& engine() const { return engine_; }
    bool is_quadrature() const { return engine_.mode == ExpectationEngine::Mode::quadrature; }

    /// Component-wise expectation of fn(s1, s2), which returns either a real or
    /// a std::array<double, N>.
    template <class Fn>
    auto mean(Fn&& fn) const {
        using A = decltype(detail::as_array(fn, 0.0, 0.0));
        constexpr std::size_t N = std::tuple_size_v<A>;
        std::array<Estimate, N> out{};
        if (is_quadrature()) {
            const auto fine = integrate<N>(fine_, fn);
            const auto coarse = integrate<N>(coarse_, fn);
            for (std::size_t k = 0; k < N; ++k) out[k] = {fine[k], std::abs(fine[k] - coarse[k])};
        } else {
            // Reduction runs in sample order so results are bit-reproducible.
            std::array<double, N> sum{};
            std::array<double, N> sum_sq{};
            for (const auto& p : samples_) {
                const auto v = detail::as_array(fn, p.s1, p.s2);
                for (std::size_t k = 0; k < N; ++k) {
                    sum[k] += v[k];
                    sum_sq[k] += v[k] * v[k];
                }
            }
            const double n = static_cast<double>(samples_.size());
            for (std::size_t k = 0; k < N; ++k) {
                const double m = sum[k] / n;
                const double var = std::max(sum_sq[k] / n - m * m, 0.0);
                out[k] = {m, std::sqrt(var / n)};
            }
        }
        for (const auto& e : out)
            if (!std::isfinite(e.value)) throw NumericalError("expectation: integrand produced a non-finite value");
        return out;
    }

    /// Scalar convenience wrapper.
    template <class Fn>
    Estimate scalar(Fn&& fn) const {
        return mean([&](double s1, double s2) { return std::array<double, 1>{fn(s1, s2)}; })[0];
    }

    const std::vector<WeightedPoint>& points() const { return fine_; }
    const std::vector<SamplePair>& samples() const { return samples_; }

private:
    template <std::size_t N, class Fn>
    static std::array<double, N> integrate(const std::vector<WeightedPoint>& pts, Fn& fn) {
        std::array<double, N> acc{};
        for (const auto& p : pts) {
            const auto v = detail::as_array(fn, p.s1, p.s2);
            for (std::size_t k = 0; k < N; ++k) acc[k] += p.w * v[k];
        }
        return acc;
    }

    ExpectationEngine engine_;
    std::vector<WeightedPoint> fine_;
    std::vector<WeightedPoint> coarse_;
    std::vector<SamplePair> samples_;
};

/// E[phi(s1, s2)] under the model.
template <class Fn>
Estimate expect(const ExpectationEngine& engine, const SourceModel& model, Fn&& phi) {
    return Expectation(engine, model).scalar(std::forward<Fn>(phi));
}

} // namespace bss

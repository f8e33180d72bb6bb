#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bss/expectation.hpp"
#include "bss/sources.hpp"

using namespace bss;
using Catch::Approx;

namespace {

double total_mass(const SourceModel& m, int nodes = 64) {
    return expect(ExpectationEngine::quadrature(nodes), m, [](double, double) { return 1.0; }).value;
}

/// Max relative mismatch between the analytic gradient and central
/// differences at 100 random points inside the bulk of the law.
double gradient_mismatch(const SourceModel& m, std::uint64_t seed) {
    Rng rng(seed, 9);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double a = rng.uniform(-2.5, 2.5) * m.spread[0];
        const double b = rng.uniform(-2.5, 2.5) * m.spread[1];
        const double ha = 1e-5 * std::max(1.0, std::abs(a));
        const double hb = 1e-5 * std::max(1.0, std::abs(b));
        const Vec2 g = m.gradient(a, b);
        const double fa = (m.pdf(a + ha, b) - m.pdf(a - ha, b)) / (2 * ha);
        const double fb = (m.pdf(a, b + hb) - m.pdf(a, b - hb)) / (2 * hb);
        const double scale = std::max(std::hypot(g.x, g.y), 1e-3 * m.pdf(a, b));
        worst = std::max(worst, std::max(std::abs(fa - g.x), std::abs(fb - g.y)) / scale);
    }
    return worst;
}

SourceModel shifted_gaussian() { return make_gaussian_pair(1.0, 1.0, 1.0, 0.0); }

} // namespace

TEST_CASE("sample is deterministic per seed and requires n >= 1") {
    const auto m = make_polar_dependent({0.0});
    const auto a = sample(m, 100, 7);
    const auto b = sample(m, 100, 7);
    CHECK(a == b);
    CHECK(a != sample(m, 100, 8));
    CHECK_THROWS_AS(sample(m, 0, 1), DomainError);
}

TEST_CASE("polar model d=0 stays in the unit disk") {
    for (const auto& p : sample(make_polar_dependent({0.0}), 20000, 3)) CHECK(p.s1 * p.s1 + p.s2 * p.s2 <= 1.0);
}

TEST_CASE("Gaussian scale mixture moments and density") {
    const auto m = make_gaussian_scale_mixture();
    SECTION("second moment from 1e6 draws") {
        const auto xs = sample(m, 1000000, 11);
        double s11 = 0.0, s22 = 0.0;
        for (const auto& p : xs) {
            s11 += p.s1 * p.s1;
            s22 += p.s2 * p.s2;
        }
        CHECK(s11 / 1e6 == Approx(2.5).epsilon(0.01));
        CHECK(s22 / 1e6 == Approx(2.5).epsilon(0.01));
    }
    SECTION("pdf and gradient at the origin") {
        CHECK(m.pdf(0.0, 0.0) == Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-12));
        CHECK(m.gradient(0.0, 0.0).x == 0.0);
        CHECK(m.gradient(0.0, 0.0).y == 0.0);
    }
    SECTION("quadrantal symmetry at sampled points") {
        for (const auto& p : sample(m, 50, 2)) {
            CHECK(m.pdf(-p.s1, p.s2) == Approx(m.pdf(p.s1, p.s2)));
            CHECK(m.pdf(p.s1, -p.s2) == Approx(m.pdf(p.s1, p.s2)));
        }
    }
    SECTION("matches the contamination construction") {
        const auto c = make_contaminated({0.5, gaussian(1.0), gaussian(2.0), gaussian(2.0), gaussian(1.0)});
        for (double a : {-1.3, 0.0, 0.7})
            for (double b : {-2.0, 0.4}) CHECK(c.pdf(a, b) == m.pdf(a, b));
        CHECK(sample(c, 50, 5) == sample(m, 50, 5));
    }
}

TEST_CASE("polar model density for d=0 and capability flags") {
    const auto disk = make_polar_dependent({0.0});
    CHECK(disk.pdf(0.3, 0.4) == Approx(1.0 / (2.0 * std::numbers::pi * 0.5)).epsilon(1e-12));
    CHECK(disk.pdf(0.9, 0.9) == 0.0);
    CHECK(disk.has_gradient());
    const auto d1 = make_polar_dependent({1.0});
    CHECK_FALSE(d1.has_pdf());
    CHECK_FALSE(d1.has_gradient());
    CHECK(d1.has_sampler());
    CHECK_THROWS_AS(d1.require_pdf("test"), CapabilityError);
    CHECK_THROWS_AS(expect(ExpectationEngine::quadrature(), d1, [](double, double) { return 1.0; }),
                    CapabilityError);
}

TEST_CASE("contaminated model edge cases") {
    const auto f1 = gaussian(1.0), f2 = laplace(1.0), g1 = gaussian(3.0), g2 = gaussian(0.5);
    SECTION("epsilon 0 and 1 reduce to the product laws") {
        const auto m0 = make_contaminated({0.0, f1, f2, g1, g2});
        const auto m1 = make_contaminated({1.0, f1, f2, g1, g2});
        for (double a : {-1.0, 0.2, 2.5})
            for (double b : {-0.3, 1.1}) {
                CHECK(m0.pdf(a, b) == Approx(f1.pdf(a) * f2.pdf(b)));
                CHECK(m1.pdf(a, b) == Approx(g1.pdf(a) * g2.pdf(b)));
            }
        CHECK(m0.marginals.has_value());
        CHECK(m1.marginals.has_value());
    }
    SECTION("epsilon outside [0, 1]") {
        CHECK_THROWS_AS(make_contaminated({-0.1, f1, f2, g1, g2}), DomainError);
        CHECK_THROWS_AS(make_contaminated({1.5, f1, f2, g1, g2}), DomainError);
    }
}

TEST_CASE("elliptical model") {
    SECTION("unit Gaussian profile") {
        const auto m = make_elliptical({gaussian_profile(), 1.0, 1.0});
        CHECK(m.pdf(0.0, 0.0) == Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-9));
        CHECK(m.pdf(0.7, -1.1) == Approx(make_gaussian_pair().pdf(0.7, -1.1)).epsilon(1e-9));
    }
    SECTION("contours are ellipses K2 s1^2 + K1 s2^2 = const") {
        const auto m = make_elliptical({exponential_profile(), 2.0, 3.0});
        for (double z : {0.5, 2.0, 6.0}) {
            const double ref = m.pdf(std::sqrt(z / 3.0), 0.0);
            for (double t : {0.3, 1.2, 2.5}) {
                const double s1 = std::sqrt(z / 3.0) * std::cos(t);
                const double s2 = std::sqrt(z / 2.0) * std::sin(t);
                CHECK(m.pdf(s1, s2) == Approx(ref).epsilon(1e-12));
            }
        }
    }
    SECTION("gradient at (1, 1) matches finite differences") {
        const auto m = make_elliptical({gaussian_profile(), 2.0, 3.0});
        const double h = 1e-5;
        const Vec2 g = m.gradient(1.0, 1.0);
        CHECK(g.x == Approx((m.pdf(1 + h, 1) - m.pdf(1 - h, 1)) / (2 * h)).epsilon(1e-5));
        CHECK(g.y == Approx((m.pdf(1, 1 + h) - m.pdf(1, 1 - h)) / (2 * h)).epsilon(1e-5));
    }
    SECTION("invalid configurations") {
        CHECK_THROWS_AS(make_elliptical({gaussian_profile(), 0.0, 1.0}), DomainError);
        EllipticalProfile heavy{"cauchy-like", [](double z) { return 1.0 / (1.0 + z); }, {}, {0.0, 10.0}, {}};
        CHECK_THROWS_AS(make_elliptical({heavy, 1.0, 1.0}), DomainError);
    }
    SECTION("sampler second moments") {
        const auto m = make_elliptical({gaussian_profile(), 2.0, 3.0});
        const auto xs = sample(m, 200000, 4);
        double s11 = 0.0, s22 = 0.0;
        for (const auto& p : xs) {
            s11 += p.s1 * p.s1;
            s22 += p.s2 * p.s2;
        }
        // omega(3 s1^2 + 2 s2^2) Gaussian: Var s1 = 1/3, Var s2 = 1/2.
        CHECK(s11 / 2e5 == Approx(1.0 / 3.0).epsilon(0.02));
        CHECK(s22 / 2e5 == Approx(0.5).epsilon(0.02));
        CHECK(m.spread[0] == Approx(std::sqrt(1.0 / 3.0)));
    }
}

TEST_CASE("every analytic model integrates to one") {
    CHECK(total_mass(make_gaussian_pair()) == Approx(1.0).margin(1e-3));
    CHECK(total_mass(make_gaussian_scale_mixture()) == Approx(1.0).margin(1e-3));
    CHECK(total_mass(make_laplace_pair()) == Approx(1.0).margin(1e-3));
    CHECK(total_mass(make_uniform_pair()) == Approx(1.0).margin(1e-3));
    CHECK(total_mass(make_uniform_pair(0.05)) == Approx(1.0).margin(1e-3));
    CHECK(total_mass(make_polar_dependent({0.0})) == Approx(1.0).margin(1e-3));
    CHECK(total_mass(make_elliptical({gaussian_profile(), 2.0, 3.0})) == Approx(1.0).margin(1e-3));
    CHECK(total_mass(make_elliptical({exponential_profile(), 1.0, 4.0})) == Approx(1.0).margin(1e-3));
}

TEST_CASE("analytic gradients agree with central differences") {
    CHECK(gradient_mismatch(make_gaussian_pair(), 1) < 1e-5);
    CHECK(gradient_mismatch(make_gaussian_scale_mixture(), 2) < 1e-5);
    CHECK(gradient_mismatch(make_elliptical({gaussian_profile(), 2.0, 3.0}), 3) < 1e-5);
    CHECK(gradient_mismatch(make_uniform_pair(0.05), 4) < 1e-5);
    CHECK(gradient_mismatch(make_gaussian_pair(0.5, 2.0), 5) < 1e-5);
}

TEST_CASE("quadrantal symmetry checks") {
    SECTION("analytic mode") {
        const auto gsm = check_quadrantal_symmetry(make_gaussian_scale_mixture(), 1e-12);
        CHECK(gsm.symmetric);
        CHECK(gsm.mode_used == SymmetryMode::analytic);
        const auto shifted = check_quadrantal_symmetry(shifted_gaussian(), 1e-12);
        CHECK_FALSE(shifted.symmetric);
        CHECK(shifted.max_violation > 0.01);
    }
    SECTION("empirical mode") {
        const auto d1 = check_quadrantal_symmetry(make_polar_dependent({1.0}), 0.0);
        CHECK(d1.mode_used == SymmetryMode::empirical);
        CHECK(d1.symmetric);
        CHECK_FALSE(check_quadrantal_symmetry(shifted_gaussian(), 0.0, SymmetryMode::empirical).symmetric);
    }
    SECTION("shipped models are symmetric") {
        for (const auto& m : {make_gaussian_pair(), make_laplace_pair(), make_uniform_pair(), make_uniform_pair(0.05),
                              make_polar_dependent({0.0}), make_elliptical({gaussian_profile(), 2.0, 3.0})})
            CHECK(check_quadrantal_symmetry(m, 1e-12).symmetric);
    }
    SECTION("no capability") {
        SourceModel empty;
        empty.label = "empty";
        CHECK_THROWS_AS(check_quadrantal_symmetry(empty, 1e-12), CapabilityError);
    }
}

TEST_CASE("axis scaling and swapping transform the law") {
    const auto base = make_gaussian_scale_mixture();
    const auto sc = scale_model(base, 2.0, 0.5);
    CHECK(sc.pdf(1.0, 0.3) == Approx(base.pdf(0.5, 0.6) / 1.0));
    CHECK(total_mass(sc) == Approx(1.0).margin(1e-3));
    CHECK(gradient_mismatch(sc, 6) < 1e-5);
    const auto sw = swap_sources(make_gaussian_pair(1.0, 2.0));
    CHECK(sw.pdf(0.3, -1.2) == Approx(make_gaussian_pair(1.0, 2.0).pdf(-1.2, 0.3)));
    CHECK(sw.spread[0] == Approx(2.0));
}

TEST_CASE("empirical second moments match analytic ones within 3 standard errors") {
    for (const auto& m : {make_gaussian_pair(), make_laplace_pair(), make_uniform_pair(),
                          make_gaussian_scale_mixture()}) {
        const auto xs = sample(m, 1000000, 17);
        double s = 0.0, s2 = 0.0;
        for (const auto& p : xs) {
            s += p.s1 * p.s1;
            s2 += p.s1 * p.s1 * p.s1 * p.s1;
        }
        const double n = 1e6, mean = s / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        INFO(m.label);
        CHECK(std::abs(mean - m.spread[0] * m.spread[0]) < 3.0 * se);
    }
}

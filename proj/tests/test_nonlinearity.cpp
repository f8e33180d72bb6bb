#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "bss/expectation.hpp"
#include "bss/nonlinearity.hpp"

using namespace bss;
using Catch::Approx;

namespace {
bool same(const Mat2& a, const Mat2& b, double tol = 1e-14) { return max_abs_diff(a, b) <= tol; }
} // namespace

TEST_CASE("classical cubic H evaluations") {
    const auto H = make_classical_cubic();
    CHECK(same(evaluate(H, 1.0, 1.0), Mat2{0.0, 1.0, 1.0, 0.0}));
    CHECK(same(evaluate(H, 0.0, 0.0), Mat2{-1.0, 0.0, 0.0, -1.0}));
    CHECK(same(evaluate(H, 2.0, 0.0), Mat2{3.0, 0.0, 0.0, -1.0}));
    // h12 = z1 z2 + z1 z2^3 - z2 z1^3
    const double z1 = 0.7, z2 = -1.3;
    CHECK(H.h12(z1, z2) == Approx(z1 * z2 + z1 * std::pow(z2, 3) - z2 * std::pow(z1, 3)));
    CHECK(H.h21(z1, z2) == Approx(z1 * z2 + z2 * std::pow(z1, 3) - z1 * std::pow(z2, 3)));
}

TEST_CASE("classical family structure") {
    SECTION("linear g reduces the off-diagonal part to z1 z2") {
        const auto H = make_classical(linear_pair());
        for (double a : {-1.5, 0.3, 2.0})
            for (double b : {-0.7, 1.1}) {
                CHECK(H.h12(a, b) == Approx(a * b));
                CHECK(H.h21(a, b) == Approx(a * b));
            }
    }
    SECTION("diagonal does not depend on g and the G part is antisymmetric") {
        const auto Hc = make_classical(cubic_pair());
        const auto Ht = make_classical(tanh_pair());
        for (double a : {-2.0, -0.4, 0.9, 3.0})
            for (double b : {-1.7, 0.2, 2.2}) {
                CHECK(Hc.h11(a, b) == Ht.h11(a, b));
                CHECK(Hc.h22(a, b) == Ht.h22(a, b));
                // [Z G^T - G Z^T] = H - [Z Z^T - I]: off-diagonal parts are negatives.
                CHECK(Ht.h12(a, b) - a * b == Approx(-(Ht.h21(a, b) - a * b)).margin(1e-14));
            }
    }
    SECTION("non-odd g is rejected") {
        OddFunctionPair bad{[](double z) { return z * z; }, [](double z) { return z; }, "square"};
        CHECK_THROWS_AS(make_classical(bad), DomainError);
    }
}

TEST_CASE("absolute-value H evaluations") {
    const auto H = make_absvalue();
    CHECK(same(evaluate(H, 1.0, 2.0), Mat2{0.0, 4.0, 2.0, 1.0}));
    // h21 = z2 z1^2 sgn(z1) = 2 * 1 * (-1)
    CHECK(same(evaluate(H, -1.0, 2.0), Mat2{0.0, -4.0, -2.0, 1.0}));
    for (double a : {-2.5, -0.5, 1.5})
        for (double b : {-1.0, 0.25, 3.0}) {
            CHECK(H.h12(-a, b) == -H.h12(a, b));
            CHECK(H.h11(-a, b) == H.h11(a, b));
        }
}

TEST_CASE("evaluate reports non-finite output") {
    auto H = make_absvalue();
    H.h11 = [](double z1, double) { return 1.0 / (z1 * 0.0 * 0.0); };
    CHECK_THROWS_AS(evaluate(H, 0.0, 1.0), NumericalError);
}

TEST_CASE("parity validation") {
    SECTION("shipped families pass to 1e-12") {
        for (const auto& H : {make_classical_cubic(), make_absvalue(), make_classical(tanh_pair()),
                              make_classical(linear_pair()), make_score_based(make_gaussian_scale_mixture())}) {
            const auto r = validate_parities(H, 4.0, 1e-12);
            INFO(H.label);
            CHECK(r.valid);
            CHECK(r.worst_violation <= 1e-12);
        }
    }
    SECTION("an odd diagonal entry fails with violation 2 at (1, 1)") {
        auto H = make_classical_cubic();
        H.h11 = [](double z1, double) { return z1; };
        const auto r = validate_parities(H, 1.0, 1e-9);
        CHECK_FALSE(r.valid);
        CHECK(r.worst_violation == Approx(2.0));
        CHECK(r.worst_entry == 0);
        CHECK(std::abs(r.worst_at.x) == Approx(1.0));
    }
}

TEST_CASE("score-based H") {
    const auto g = make_gaussian_pair();
    SECTION("unit Gaussian gives the second-order monomials") {
        const auto H0 = make_score_based(g, false);
        for (double a : {-1.2, 0.5})
            for (double b : {-0.3, 2.0}) {
                CHECK(H0.h11(a, b) == Approx(a * a));
                CHECK(H0.h12(a, b) == Approx(a * b));
                CHECK(H0.h21(a, b) == Approx(a * b));
                CHECK(H0.h22(a, b) == Approx(b * b));
            }
        const auto H1 = make_score_based(g, true);
        CHECK(H1.h11(1.5, 0.2) == Approx(1.5 * 1.5 - 1.0));
    }
    SECTION("the diagonal expectation is 1 without the offset and 0 with it") {
        const auto eng = ExpectationEngine::quadrature();
        const auto H0 = make_score_based(g, false);
        const auto H1 = make_score_based(g, true);
        CHECK(expect(eng, g, [&](double a, double b) { return H0.h11(a, b); }).value == Approx(1.0).epsilon(1e-10));
        CHECK(expect(eng, g, [&](double a, double b) { return H1.h11(a, b); }).value == Approx(0.0).margin(1e-10));
    }
    SECTION("disk model: E[-s1 f_1 / f] = 1/2") {
        const auto disk = make_polar_dependent({0.0});
        const auto H0 = make_score_based(disk, false);
        const auto e = expect(ExpectationEngine::quadrature(), disk, [&](double a, double b) { return H0.h11(a, b); });
        CHECK(e.value == Approx(0.5).epsilon(1e-10));
    }
    SECTION("capability error without a gradient") {
        CHECK_THROWS_AS(make_score_based(make_polar_dependent({1.0})), CapabilityError);
        CHECK_THROWS_AS(make_score_based(make_uniform_pair()), CapabilityError);
    }
    SECTION("zero density is guarded") {
        const auto H = make_score_based(make_polar_dependent({0.0}));
        CHECK(std::isfinite(H.h11(2.0, 2.0)));
        CHECK(std::isfinite(H.h12(0.0, 0.0)));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dualdiv/closed_form.hpp"
#include "dualdiv/errors.hpp"
#include "dualdiv/levy.hpp"
#include "dualdiv/model.hpp"

using namespace dualdiv;

namespace {

// 50-digit evaluation of int (e^{-z} - 1 + z 1{z<=1}) 2 e^{-2z} dz.
constexpr double kCpExpCompensator = -0.036336258188252371174;

std::vector<std::pair<double, double>> sample_cpexp(double eta, double rho, double h, double zmax) {
    std::vector<std::pair<double, double>> pts;
    for (double z = h; z <= zmax + 1e-12; z += h) pts.emplace_back(z, eta * rho * std::exp(-rho * z));
    return pts;
}

}  // namespace

TEST_CASE("zero measure reduces to the drift") {
    const auto red = effective_drift(LevyMeasureSpec::zero(), 0.1);
    CHECK(red.mbar == 0.1);
    CHECK(red.k == 0.0);
    CHECK(red.l == 0.0);
    CHECK(red.mass == 0.0);
    CHECK(effective_drift(LevyMeasureSpec::zero(0.05), 0.1).mbar == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("compound Poisson exponential measure") {
    const auto spec = LevyMeasureSpec::compound_poisson_exp(1.0, 2.0);
    const auto red = effective_drift(spec, 0.1);
    CHECK(red.compensator == doctest::Approx(kCpExpCompensator).epsilon(1e-14));
    CHECK(red.mbar == doctest::Approx(0.1 - kCpExpCompensator).epsilon(1e-14));
    CHECK(red.k == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(red.mass == 1.0);
    CHECK(std::abs(compensator_by_quadrature(spec) - red.compensator) <= 1e-10);
}

TEST_CASE("closed form matches quadrature over a range of measures") {
    for (double eta : {0.1, 1.0, 5.0}) {
        for (double rho : {0.3, 1.0, 2.0, 10.0}) {
            const auto spec = LevyMeasureSpec::compound_poisson_exp(eta, rho);
            CAPTURE(eta);
            CAPTURE(rho);
            CHECK(std::abs(compensator_by_quadrature(spec) - effective_drift(spec, 0.1).compensator) <= 1e-10);
        }
    }
}

TEST_CASE("tabulated measure sampled from cpexp") {
    const auto tab = LevyMeasureSpec::tabulated(sample_cpexp(1.0, 2.0, 1e-3, 25.0));
    const auto red = effective_drift(tab, 0.1);
    CHECK(std::abs(red.mbar - (0.1 - kCpExpCompensator)) <= 1e-4);
    // the table starts at z = h
    CHECK(std::abs(red.mass - (std::exp(-2e-3) - std::exp(-50.0))) <= 1e-5);
}

TEST_CASE("adding mass beyond z = 1 increases mbar") {
    auto pts = sample_cpexp(1.0, 2.0, 1e-2, 10.0);
    double prev = effective_drift(LevyMeasureSpec::tabulated(pts), 0.1).mbar;
    for (int round = 0; round < 4; ++round) {
        for (auto& [z, v] : pts) {
            if (z > 1.5 + round) v += 0.1;
        }
        const double next = effective_drift(LevyMeasureSpec::tabulated(pts), 0.1).mbar;
        CHECK(next > prev);
        prev = next;
    }
}

TEST_CASE("bad tabulated input") {
    auto throws_code = [](std::vector<std::pair<double, double>> pts) {
        try {
            effective_drift(LevyMeasureSpec::tabulated(std::move(pts)), 0.1);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::PreconditionViolated;
    };
    CHECK(throws_code({{0.5, 1.0}, {1.0, INFINITY}}) == Errc::DivergentIntegral);
    CHECK(throws_code({{0.5, 1.0}, {1.0, NAN}}) == Errc::DivergentIntegral);
    CHECK(throws_code({{0.5, 1.0}, {0.5, 1.0}}) == Errc::InvalidInput);
    CHECK(throws_code({{0.5, -1.0}, {1.0, 1.0}}) == Errc::InvalidInput);
    CHECK(throws_code({{-0.5, 1.0}, {1.0, 1.0}}) == Errc::InvalidInput);
}

TEST_CASE("reduce_model") {
    const DualModelParams p{1.0, 2.0, 1.0};
    SUBCASE("zero measure is the identity") {
        const auto gbm = validate(p, DiscountSpec::gbm(0.0, 0.1, 0.2));
        const auto red = reduce_model(validate(p, DiscountSpec::exp_levy(0.0, 0.1, 0.2, LevyMeasureSpec::zero())));
        CHECK(red.params == gbm.params);
        CHECK(red.discount == gbm.discount);
        CHECK(red.theta() == gbm.theta());
        const auto a = solve_threshold(gbm, 0.5);
        const auto b = solve_threshold(red, 0.5);
        CHECK(a.xhat == b.xhat);
        CHECK(a.A == b.A);
        CHECK(a.B == b.B);
        CHECK(solve_barrier(gbm).b == solve_barrier(red).b);
    }
    SUBCASE("drift only") {
        const auto red = reduce_model(validate(p, DiscountSpec::exp_levy(0.0, 0.1, 0.2, LevyMeasureSpec::zero(0.05))));
        CHECK(red.discount.m == doctest::Approx(0.15).epsilon(1e-15));
    }
    SUBCASE("cpexp shifts the threshold and keeps the invariants") {
        const auto levy = validate(p, DiscountSpec::exp_levy(0.0, 0.1, 0.2, LevyMeasureSpec::compound_poisson_exp(1.0, 2.0)));
        const auto red = reduce_model(levy);
        CHECK(red.theta() == doctest::Approx(levy.theta()).epsilon(1e-15));
        const auto sol = solve_threshold(red, 0.5);
        // 50-digit evaluation with m replaced by mbar
        CHECK(sol.xhat == doctest::Approx(1.2701790946360230496).epsilon(1e-12));
        CHECK(sol.xhat != doctest::Approx(solve_threshold(validate(p, DiscountSpec::gbm(0.0, 0.1, 0.2)), 0.5).xhat));
        CHECK(audit(sol, red).empty());
        CHECK(audit(solve_threshold(levy, 0.5), levy).empty());
        CHECK(audit(solve_barrier(red), red).empty());
    }
    SUBCASE("insufficient reduced drift") {
        try {
            validate(p, DiscountSpec::exp_levy(0.0, 0.1, 0.2, LevyMeasureSpec::zero(-0.09)));
            FAIL("no throw");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InsufficientDrift);
        }
    }
}

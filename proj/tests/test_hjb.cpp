#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "dualdiv/closed_form.hpp"
#include "dualdiv/errors.hpp"
#include "dualdiv/hjb.hpp"
#include "support.hpp"

using namespace dualdiv;
using namespace dualdiv::testing;

namespace {

// J(x) by adaptive quadrature, split at the kink of F when it lies above x.
double jump_integral_quadrature(const PiecewiseExp& f, double x, double beta, double kink) {
    using boost::math::quadrature::gauss_kronrod;
    const double fx = f.value(x);
    auto integrand = [&](double y) { return (f.value(x + y) - fx) * beta * std::exp(-beta * y); };
    const double inf = std::numeric_limits<double>::infinity();
    if (kink > x) {
        return gauss_kronrod<double, 61>::integrate(integrand, 0.0, kink - x, 15, 1e-14) +
               gauss_kronrod<double, 61>::integrate(integrand, kink - x, inf, 15, 1e-14);
    }
    return gauss_kronrod<double, 61>::integrate(integrand, 0.0, inf, 15, 1e-14);
}

// Below the switching level F solves -cF' - theta F + lambda (G - F) = 0 with
// G(x) = int_x^inf F(u) beta e^{-beta(u-x)} du, i.e. G' = beta (G - F).
// From F(0) = 0 the solution is unique up to scale; RK4 gives its shape.
std::vector<double> rk4_shape(const ValidatedModel& model, double top, int steps) {
    const auto& p = model.params;
    const double theta = model.theta();
    auto rhs = [&](std::array<double, 2> y) {
        return std::array<double, 2>{(p.lambda * y[1] - (theta + p.lambda) * y[0]) / p.c, p.beta * (y[1] - y[0])};
    };
    std::array<double, 2> y{0.0, 1.0};
    std::vector<double> out{0.0};
    const double h = top / steps;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = rhs(y);
        const auto k2 = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        const auto k3 = rhs({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        const auto k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]});
        for (int j = 0; j < 2; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        out.push_back(y[0]);
    }
    return out;
}

std::vector<double> grid_for(double level) { return make_grid(0.0, 3 * level / 199, 3 * level, level); }

}  // namespace

TEST_CASE("jump integral of simple functions") {
    const PiecewiseExp constant({Segment{0.0, INFINITY, {}, 2.0, 0.0}});
    CHECK(jump_integral(constant, 1.3, 2.0) == 0.0);
    const PiecewiseExp linear({Segment{0.0, INFINITY, {}, 0.0, 1.0}});
    CHECK(jump_integral(linear, 0.7, 2.5) == doctest::Approx(0.4).epsilon(1e-15));
    const PiecewiseExp exp_term({Segment{0.0, INFINITY, {{1.0, 0.5}}, 0.0, 0.0}});
    // int (e^{0.5(x+y)} - e^{0.5x}) e^{-y} dy = e^{0.5x}
    CHECK(jump_integral(exp_term, 1.0, 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
    try {
        jump_integral(exp_term, 1.0, 0.5);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ExponentAtOrAboveBeta);
    }
}

TEST_CASE("jump integral on the reference solution") {
    const auto model = reference_model();
    const auto sol = solve_threshold(model, kRefXi);
    const auto f = to_piecewise(sol);
    CHECK(jump_integral(f, sol.xhat / 2, 1.0) == doctest::Approx(1.178251073272075196).epsilon(1e-12));
    CHECK(std::abs(jump_integral_quadrature(f, sol.xhat / 2, 1.0, sol.xhat) - 1.178251073272075196) <= 1e-11);
}

TEST_CASE("analytic jump integral and derivative against numerics") {
    InstanceGenerator gen(11);
    for (int i = 0; i < 100; ++i) {
        const auto inst = gen.next();
        const auto model = inst.model();
        const double beta = inst.params.beta;
        const auto sol = solve_threshold(model, inst.xi);
        const double level = sol.regime == Regime::Threshold ? sol.xhat : 0.0;
        const double top = level > 0 ? 3 * level : 3 / -sol.alpha;
        const auto f = to_piecewise(sol);
        const double x = gen.uniform(0.0, top);
        CAPTURE(i);
        CAPTURE(x);
        const double scale = sol.scale();
        CHECK(std::abs(jump_integral(f, x, beta) - jump_integral_quadrature(f, x, beta, level)) <= 1e-9 * std::max(1.0, scale));

        const double h = 1e-5 * std::max(1.0, x);
        if (std::abs(x - level) > 2 * h && x > 2 * h) {
            const double fd = (threshold_F(sol, x + h) - threshold_F(sol, x - h)) / (2 * h);
            const double an = threshold_derivative(sol, x);
            CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), 1e-3 * scale * -sol.alpha));
        }

        if (inst.params.net_drift() > 0) {
            const auto bar = solve_barrier(model);
            const auto g = to_piecewise(bar);
            const double xb = gen.uniform(0.0, 3 * bar.b);
            CHECK(std::abs(jump_integral(g, xb, beta) - jump_integral_quadrature(g, xb, beta, bar.b)) <=
                  1e-9 * std::max(1.0, bar.level_value()));
            const double hb = 1e-5 * std::max(1.0, xb);
            if (std::abs(xb - bar.b) > 2 * hb && xb > 2 * hb) {
                const double fd = (barrier_F(bar, xb + hb) - barrier_F(bar, xb - hb)) / (2 * hb);
                CHECK(std::abs(fd - barrier_derivative(bar, xb)) <= 1e-6 * barrier_derivative(bar, xb));
            }
        }
    }
}

TEST_CASE("make_grid probes kinks from both sides") {
    const auto g = make_grid(0.0, 0.5, 2.0, 1.0);
    REQUIRE(g.size() == 6);
    CHECK(g[2] == doctest::Approx(1.0 - 1e-6).epsilon(1e-15));
    CHECK(g[3] == doctest::Approx(1.0 + 1e-6).epsilon(1e-15));
    CHECK(g.back() == 2.0);
    CHECK(make_grid(0.0, 1.0, 0.0, 5.0) == std::vector<double>{0.0});
}

TEST_CASE("reference residuals") {
    const auto model = reference_model();
    const auto sol = solve_threshold(model, kRefXi);
    for (double x : {0.0, 0.5, 1.0, sol.xhat - 1e-6, sol.xhat + 1e-6, 2.0, 5.0, 20.0}) {
        CHECK(std::abs(residual_restricted(sol, model, x)) <= 1e-12 * sol.scale());
    }
    const auto rep = verify_threshold(sol, model, grid_for(sol.xhat));
    CHECK(rep.pass);
    CHECK(rep.points.size() == 200);
    CHECK(rep.kind == "threshold");

    const auto bar = solve_barrier(model);
    const auto brep = verify_barrier(bar, model, grid_for(bar.b));
    CHECK(brep.pass);
    for (const auto& pt : brep.points) {
        if (pt.x < bar.b) {
            CHECK(pt.branch == "below");
            CHECK(pt.gradient_slack <= 1e-8 * bar.level_value());
        } else {
            CHECK(pt.branch == "above");
            CHECK(pt.residual <= 1e-8 * bar.level_value());
        }
    }
}

TEST_CASE("residual suite on random instances") {
    InstanceGenerator gen(12);
    int always = 0, threshold = 0, barrier = 0;
    for (int i = 0; i < 50; ++i) {
        const auto inst = i < 10 ? gen.next_in(Regime::AlwaysMax) : gen.next();
        const auto model = inst.model();
        const auto sol = solve_threshold(model, inst.xi);
        CAPTURE(i);
        if (sol.regime == Regime::AlwaysMax) {
            ++always;
            const auto rep = verify_threshold(sol, model, make_grid(0.0, 3 / -sol.alpha / 199, 3 / -sol.alpha, -1.0));
            CHECK(rep.pass);
            for (const auto& pt : rep.points) CHECK(pt.gradient_slack >= -1e-12);
        } else {
            ++threshold;
            CHECK(verify_threshold(sol, model, grid_for(sol.xhat)).pass);
        }
        if (model.params.net_drift() > 0) {
            ++barrier;
            const auto bar = solve_barrier(model);
            CHECK(verify_barrier(bar, model, grid_for(bar.b)).pass);
        }
    }
    CHECK(always >= 10);
    CHECK(threshold >= 10);
    CHECK(barrier >= 10);
}

TEST_CASE("corrupted solutions are detected") {
    const auto model = reference_model();
    auto sol = solve_threshold(model, kRefXi);
    sol.B *= 1.01;
    const auto rep = verify_threshold(sol, model, grid_for(sol.xhat));
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_abs > 1e-3);

    const auto bar = solve_barrier(model);
    const auto wrong = barrier_at_level(model, bar.b * 1.05);
    const auto brep = verify_barrier(wrong, model, grid_for(wrong.b));
    CHECK_FALSE(brep.pass);
    bool slack_violated = false;
    for (const auto& pt : brep.points) slack_violated |= pt.branch == "below" && !pt.ok && pt.gradient_slack > 0;
    CHECK(slack_violated);

    const auto low = barrier_at_level(model, bar.b * 0.95);
    CHECK_FALSE(verify_barrier(low, model, grid_for(low.b)).pass);

    // a threshold placed away from the optimum breaks smooth fit
    const auto off = threshold_at_level(model, kRefXi, sol.xhat + 0.3);
    CHECK_FALSE(verify_threshold(off, model, grid_for(off.xhat)).pass);
}

TEST_CASE("RK4 shape agrees with the closed form below the switching level") {
    InstanceGenerator gen(13);
    auto model = reference_model();
    double xi = kRefXi;
    for (int i = 0; i < 10; ++i) {
        if (i > 0) {
            const auto inst = gen.next_in(Regime::Threshold);
            model = inst.model();
            xi = inst.xi;
        }
        CAPTURE(i);
        const auto sol = solve_threshold(model, xi);
        const int steps = 4000;
        const auto shape = rk4_shape(model, sol.xhat, steps);
        const double norm_cf = threshold_F(sol, sol.xhat);
        for (int k = 0; k <= steps; k += 100) {
            const double x = sol.xhat * k / steps;
            CHECK(std::abs(shape[k] / shape.back() - threshold_F(sol, x) / norm_cf) <= 1e-8);
        }
        // boundary condition F'(0) = lambda J(0) / c
        const auto f = to_piecewise(sol);
        CHECK(rel_close(threshold_derivative(sol, 0.0), model.params.lambda * jump_integral(f, 0.0, model.params.beta) / model.params.c,
                        1e-10));
        if (model.params.net_drift() > 0) {
            const auto bar = solve_barrier(model);
            const auto bshape = rk4_shape(model, bar.b, steps);
            for (int k = 0; k <= steps; k += 100) {
                const double x = bar.b * k / steps;
                CHECK(std::abs(bshape[k] / bshape.back() - barrier_F(bar, x) / bar.level_value()) <= 1e-8);
            }
        }
    }
}

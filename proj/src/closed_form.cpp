#include "dualdiv/closed_form.hpp"

#include <cmath>
#include <sstream>

#include "dualdiv/errors.hpp"
#include "dualdiv/quadratic.hpp"

namespace dualdiv {

namespace {

constexpr double kRegimeTieBreak = 1e-12;
constexpr double kRootIdentityTol = 1e-12;
constexpr double kValueMatchTol = 1e-10;

struct Coeffs {
    double a2, a1, a0;
};

// (c + xi) a^2 + (theta + lambda - beta (c + xi)) a - theta beta, the Laplace
// exponent of the ruin time under full payout.
Coeffs payout_quadratic(const ValidatedModel& model, double xi) {
    const auto& p = model.params;
    const double theta = model.theta();
    return {p.c + xi, theta + p.lambda - p.beta * (p.c + xi), -theta * p.beta};
}

// The same quadratic for the F1 branch, spelled with the drift and the
// volatility rather than theta so that r1 = alpha is a genuine cross-check.
Coeffs upper_branch_quadratic(const ValidatedModel& model, double xi) {
    const auto& p = model.params;
    const double m = model.effective_m();
    const double half_var = 0.5 * model.discount.delta * model.discount.delta;
    return {p.c + xi, m + p.lambda - half_var - p.beta * (p.c + xi), -p.beta * (m - half_var)};
}

// c s^2 + (theta + lambda - beta c) s - theta beta, shared by the F2 branch
// and the barrier solution.
Coeffs no_payout_quadratic(const ValidatedModel& model) {
    const auto& p = model.params;
    const double theta = model.theta();
    return {p.c, theta + p.lambda - p.beta * p.c, -theta * p.beta};
}

Coeffs barrier_quadratic(const ValidatedModel& model) {
    const auto& p = model.params;
    const double m = model.effective_m();
    const double half_var = 0.5 * model.discount.delta * model.discount.delta;
    return {p.c, m + p.lambda - half_var - p.beta * p.c, -p.beta * (m - half_var)};
}

QuadraticRoots roots_of(const Coeffs& q) { return solve_signed_quadratic(q.a2, q.a1, q.a0); }

double residual_of(const Coeffs& q, double x) {
    return quadratic_relative_residual(q.a2, q.a1, q.a0, x);
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

template <typename T>
std::string str(const T& v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

ThresholdSolution base_threshold(const ValidatedModel& model, double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
        throw Error(Errc::NonPositiveParameter, "xi must be positive and finite");
    }
    ThresholdSolution sol;
    sol.xi = xi;
    sol.theta = model.theta();
    sol.alpha = roots_of(payout_quadratic(model, xi)).neg;
    sol.r1 = roots_of(upper_branch_quadratic(model, xi)).neg;
    const auto s = roots_of(no_payout_quadratic(model));
    sol.s1 = s.pos;
    sol.s2 = s.neg;
    return sol;
}

}  // namespace

const char* regime_name(Regime r) noexcept {
    return r == Regime::AlwaysMax ? "alwaysmax" : "threshold";
}

double BarrierSolution::level_value() const { return K * (std::exp(s3 * b) - std::exp(s4 * b)); }

double regime_ratio(const ValidatedModel& model, double xi) {
    const double alpha = roots_of(payout_quadratic(model, xi)).neg;
    return -xi * alpha / model.theta();
}

double full_payout_value(const ValidatedModel& model, double xi, double x, bool include_r) {
    const double alpha = roots_of(payout_quadratic(model, xi)).neg;
    const double f = -xi * std::expm1(alpha * x) / model.theta();
    return include_r ? std::exp(-model.discount.r) * f : f;
}

ThresholdSolution threshold_at_level(const ValidatedModel& model, double xi, double level) {
    ThresholdSolution sol = base_threshold(model, xi);
    const double beta = model.params.beta;
    const double s1 = sol.s1, s2 = sol.s2, r1 = sol.r1, theta = sol.theta;
    const double e1 = std::exp(s1 * level);
    const double e2 = std::exp(s2 * level);
    const double den = (s1 - r1) * (beta - s2) * e1 - (s2 - r1) * (beta - s1) * e2;
    const double num_a = s1 * (beta - s2) * e1 - s2 * (beta - s1) * e2;

    sol.regime = Regime::Threshold;
    sol.xhat = level;
    sol.B = xi * (-r1) / (beta * theta) * (beta - s1) * (beta - s2) / den;
    sol.A = -xi * (beta - r1) / (beta * theta) * num_a / den * std::exp(-r1 * level);
    return sol;
}

ThresholdSolution solve_threshold(const ValidatedModel& model, double xi) {
    ThresholdSolution sol = base_threshold(model, xi);
    if (-xi * sol.alpha / sol.theta <= 1.0 + kRegimeTieBreak) {
        sol.regime = Regime::AlwaysMax;
        return sol;
    }
    const double beta = model.params.beta;
    const double s1 = sol.s1, s2 = sol.s2, r1 = sol.r1;
    // Level minimising the denominator of B, equivalently the stationary point of A.
    const double arg = s2 * (s2 - r1) * (beta - s1) / (s1 * (s1 - r1) * (beta - s2));
    if (!(arg > 1.0) || !std::isfinite(arg)) {
        throw Error(Errc::DegenerateThreshold,
                    "threshold level is not positive (log argument " + str(arg) + ")");
    }
    return threshold_at_level(model, xi, std::log(arg) / (s1 - s2));
}

double threshold_F(const ThresholdSolution& sol, double x) {
    if (sol.regime == Regime::AlwaysMax) return -sol.scale() * std::expm1(sol.alpha * x);
    if (x <= sol.xhat) return sol.B * (std::exp(sol.s1 * x) - std::exp(sol.s2 * x));
    return sol.A * std::exp(sol.r1 * x) + sol.scale();
}

double threshold_derivative(const ThresholdSolution& sol, double x) {
    if (sol.regime == Regime::AlwaysMax) return -sol.scale() * sol.alpha * std::exp(sol.alpha * x);
    if (x <= sol.xhat) return sol.B * (sol.s1 * std::exp(sol.s1 * x) - sol.s2 * std::exp(sol.s2 * x));
    return sol.A * sol.r1 * std::exp(sol.r1 * x);
}

double threshold_value(const ThresholdSolution& sol, double x, double r) {
    return std::exp(-r) * threshold_F(sol, x);
}

BarrierSolution barrier_at_level(const ValidatedModel& model, double b) {
    const auto s = roots_of(barrier_quadratic(model));
    const double c = model.params.c;
    const double theta = model.theta();
    BarrierSolution sol;
    sol.s3 = s.pos;
    sol.s4 = s.neg;
    sol.theta = theta;
    sol.b = b;
    sol.K = model.params.lambda / model.params.beta /
            ((c * sol.s3 + theta) * std::exp(sol.s3 * b) - (c * sol.s4 + theta) * std::exp(sol.s4 * b));
    return sol;
}

BarrierSolution solve_barrier(const ValidatedModel& model) {
    const auto s = roots_of(barrier_quadratic(model));
    const double c = model.params.c;
    const double theta = model.theta();
    const double arg = s.neg * (c * s.neg + theta) / (s.pos * (c * s.pos + theta));
    if (!(arg > 1.0) || !std::isfinite(arg)) {
        throw Error(Errc::DegenerateBarrier,
                    "barrier level is not positive (log argument " + str(arg) + ")");
    }
    return barrier_at_level(model, std::log(arg) / (s.pos - s.neg));
}

double barrier_F(const BarrierSolution& sol, double x) {
    if (x <= sol.b) return sol.K * (std::exp(sol.s3 * x) - std::exp(sol.s4 * x));
    return x - sol.b + sol.level_value();
}

double barrier_derivative(const BarrierSolution& sol, double x) {
    if (x <= sol.b) return sol.K * (sol.s3 * std::exp(sol.s3 * x) - sol.s4 * std::exp(sol.s4 * x));
    return 1.0;
}

double barrier_value(const BarrierSolution& sol, double x, double r) {
    return std::exp(-r) * barrier_F(sol, x);
}

PiecewiseExp to_piecewise(const ThresholdSolution& sol) {
    if (sol.regime == Regime::AlwaysMax) {
        Segment all;
        all.exps = {{-sol.scale(), sol.alpha}};
        all.constant = sol.scale();
        return PiecewiseExp({all});
    }
    Segment below;
    below.hi = sol.xhat;
    below.exps = {{sol.B, sol.s1}, {-sol.B, sol.s2}};
    Segment above;
    above.lo = sol.xhat;
    above.exps = {{sol.A, sol.r1}};
    above.constant = sol.scale();
    return PiecewiseExp({below, above});
}

PiecewiseExp to_piecewise(const BarrierSolution& sol) {
    Segment below;
    below.hi = sol.b;
    below.exps = {{sol.K, sol.s3}, {-sol.K, sol.s4}};
    Segment above;
    above.lo = sol.b;
    above.constant = sol.level_value() - sol.b;
    above.slope = 1.0;
    return PiecewiseExp({below, above});
}

std::vector<std::string> audit(const ThresholdSolution& sol, const ValidatedModel& model) {
    std::vector<std::string> out;
    const double beta = model.params.beta;
    auto expect = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(msg);
    };
    expect(sol.alpha < 0.0, "alpha = " + str(sol.alpha) + " is not negative");
    expect(sol.r1 < 0.0, "r1 = " + str(sol.r1) + " is not negative");
    expect(sol.s2 < 0.0 && 0.0 < sol.s1 && sol.s1 < beta,
           "roots violate s2 < 0 < s1 < beta (s1 = " + str(sol.s1) + ", s2 = " + str(sol.s2) + ")");
    expect(close_rel(sol.r1, sol.alpha, kRootIdentityTol),
           "r1 = " + str(sol.r1) + " differs from alpha = " + str(sol.alpha));

    const auto pq = payout_quadratic(model, sol.xi);
    const auto nq = no_payout_quadratic(model);
    expect(residual_of(pq, sol.alpha) <= kRootIdentityTol, "alpha does not solve its quadratic");
    expect(residual_of(pq, sol.r1) <= kRootIdentityTol, "r1 does not solve its quadratic");
    expect(residual_of(nq, sol.s1) <= kRootIdentityTol, "s1 does not solve its quadratic");
    expect(residual_of(nq, sol.s2) <= kRootIdentityTol, "s2 does not solve its quadratic");
    // The no-payout quadratic is -theta beta at 0 and lambda beta at beta.
    expect(nq.a0 < 0.0 && nq.a2 * beta * beta + nq.a1 * beta + nq.a0 > 0.0,
           "no-payout quadratic does not change sign on (0, beta)");

    const double ratio = -sol.xi * sol.alpha / sol.theta;
    expect((ratio <= 1.0 + kRegimeTieBreak) == (sol.regime == Regime::AlwaysMax),
           "regime " + std::string(regime_name(sol.regime)) + " inconsistent with -xi alpha/theta = " +
               str(ratio));
    if (sol.regime == Regime::Threshold) {
        expect(sol.B > 0.0, "B = " + str(sol.B) + " is not positive");
        expect(sol.A < 0.0, "A = " + str(sol.A) + " is not negative");
        expect(sol.xhat > 0.0, "xhat = " + str(sol.xhat) + " is not positive");
        const double f2 = sol.B * (std::exp(sol.s1 * sol.xhat) - std::exp(sol.s2 * sol.xhat));
        const double f1 = sol.A * std::exp(sol.r1 * sol.xhat) + sol.scale();
        expect(std::abs(f1 - f2) <= kValueMatchTol * std::max(1.0, std::abs(f1)),
               "value matching fails: F1(xhat) = " + str(f1) + ", F2(xhat) = " + str(f2));
    }
    return out;
}

std::vector<std::string> audit(const BarrierSolution& sol, const ValidatedModel& model) {
    std::vector<std::string> out;
    auto expect = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(msg);
    };
    expect(sol.s4 < 0.0 && 0.0 < sol.s3 && sol.s3 < model.params.beta,
           "roots violate s4 < 0 < s3 < beta (s3 = " + str(sol.s3) + ", s4 = " + str(sol.s4) + ")");
    const auto nq = no_payout_quadratic(model);
    const auto s = roots_of(nq);
    expect(close_rel(sol.s3, s.pos, kRootIdentityTol) && close_rel(sol.s4, s.neg, kRootIdentityTol),
           "barrier roots differ from the threshold no-payout roots");
    expect(residual_of(nq, sol.s3) <= kRootIdentityTol, "s3 does not solve its quadratic");
    expect(residual_of(nq, sol.s4) <= kRootIdentityTol, "s4 does not solve its quadratic");
    expect(sol.b >= 0.0, "b = " + str(sol.b) + " is negative");
    if (sol.b > 0.0) expect(sol.K > 0.0, "K = " + str(sol.K) + " is not positive");
    return out;
}

}  // namespace dualdiv

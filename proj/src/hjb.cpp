#include "dualdiv/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualdiv/errors.hpp"

namespace dualdiv {

namespace {

constexpr double kKinkOffset = 1e-6;

// int_lo^hi g(u) beta e^{-beta (u - x)} du for one segment, lo >= x.
double weighted_segment_integral(const Segment& s, double lo, double hi, double x, double beta) {
    const bool unbounded = std::isinf(hi);
    const double el = std::exp(-beta * (lo - x));
    const double eh = unbounded ? 0.0 : std::exp(-beta * (hi - x));
    double total = 0.0;
    for (const auto& t : s.exps) {
        const double k = t.coeff * beta / (t.rate - beta);
        const double at_lo = std::exp(t.rate * lo - beta * (lo - x));
        const double at_hi = unbounded ? 0.0 : std::exp(t.rate * hi - beta * (hi - x));
        total += k * (at_hi - at_lo);
    }
    total += s.constant * (el - eh);
    // int_a^inf p(y)(y - a) dy = 1/beta for the linear part
    if (s.slope != 0.0) {
        const double lin_hi = unbounded ? 0.0 : (hi + 1.0 / beta) * eh;
        total += s.slope * ((lo + 1.0 / beta) * el - lin_hi);
    }
    return total;
}

}  // namespace

double jump_integral(const PiecewiseExp& f, double x, double beta) {
    double total = 0.0;
    for (const auto& s : f.segments()) {
        for (const auto& t : s.exps) {
            if (t.rate >= beta) {
                throw Error(Errc::ExponentAtOrAboveBeta,
                            "exponential rate at or above beta in jump integral");
            }
        }
        if (s.hi <= x) continue;
        total += weighted_segment_integral(s, std::max(s.lo, x), s.hi, x, beta);
    }
    return total - f.value(x);
}

double residual_restricted(const ThresholdSolution& sol, const ValidatedModel& model, double x) {
    const auto& p = model.params;
    const PiecewiseExp f = to_piecewise(sol);
    const double fx = threshold_F(sol, x);
    const double dfx = threshold_derivative(sol, x);
    return -p.c * dfx - sol.theta * fx + p.lambda * jump_integral(f, x, p.beta) +
           sol.xi * std::max(0.0, 1.0 - dfx);
}

UnrestrictedResidual residual_unrestricted(const BarrierSolution& sol, const ValidatedModel& model,
                                           double x) {
    const auto& p = model.params;
    const PiecewiseExp f = to_piecewise(sol);
    const double dfx = barrier_derivative(sol, x);
    UnrestrictedResidual out;
    out.operator_value = -p.c * dfx - sol.theta * barrier_F(sol, x) + p.lambda * jump_integral(f, x, p.beta);
    out.gradient_slack = 1.0 - dfx;
    return out;
}

std::vector<double> make_grid(double min, double step, double max, double level) {
    if (!(step > 0.0) || !(max >= min) || !std::isfinite(min) || !std::isfinite(max)) {
        throw Error(Errc::InvalidInput, "grid needs step > 0 and min <= max");
    }
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = min + static_cast<double>(i) * step;
        if (std::abs(x - level) <= 1e-12) {
            grid.push_back(std::max(0.0, level - kKinkOffset));
            grid.push_back(level + kKinkOffset);
        } else {
            grid.push_back(x);
        }
    }
    return grid;
}

ResidualReport verify_threshold(const ThresholdSolution& sol, const ValidatedModel& model,
                                const std::vector<double>& grid, double rel_tol) {
    ResidualReport rep;
    rep.kind = "threshold";
    rep.tol = rel_tol * sol.scale();
    for (double x : grid) {
        ResidualPoint pt;
        pt.x = x;
        pt.residual = residual_restricted(sol, model, x);
        pt.gradient_slack = 1.0 - threshold_derivative(sol, x);
        if (sol.regime == Regime::AlwaysMax) {
            pt.branch = "all";
        } else {
            pt.branch = x <= sol.xhat ? "below" : "above";
        }
        pt.ok = std::abs(pt.residual) <= rep.tol;
        rep.max_abs = std::max(rep.max_abs, std::abs(pt.residual));
        rep.pass = rep.pass && pt.ok;
        rep.points.push_back(pt);
    }
    return rep;
}

ResidualReport verify_barrier(const BarrierSolution& sol, const ValidatedModel& model,
                              const std::vector<double>& grid, double rel_tol) {
    ResidualReport rep;
    rep.kind = "barrier";
    rep.tol = rel_tol * sol.level_value();
    for (double x : grid) {
        const auto r = residual_unrestricted(sol, model, x);
        ResidualPoint pt;
        pt.x = x;
        pt.residual = r.operator_value;
        pt.gradient_slack = r.gradient_slack;
        if (x <= sol.b) {
            pt.branch = "below";
            pt.ok = std::abs(r.operator_value) <= rep.tol && r.gradient_slack <= rep.tol;
            rep.max_abs = std::max({rep.max_abs, std::abs(r.operator_value), r.gradient_slack});
        } else {
            pt.branch = "above";
            pt.ok = std::abs(r.gradient_slack) <= rep.tol && r.operator_value <= rep.tol;
            rep.max_abs = std::max({rep.max_abs, std::abs(r.gradient_slack), r.operator_value});
        }
        rep.pass = rep.pass && pt.ok;
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace dualdiv

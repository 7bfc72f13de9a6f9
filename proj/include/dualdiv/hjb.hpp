#pragma once

// Residual checks of the HJB equations on the F scale (e^{-r} cancelled).
//
// Restricted:   -c F' - theta F + lambda J(x) + xi max(0, 1 - F') = 0
// Unrestricted: max{ -c F' - theta F + lambda J(x) ; 1 - F' } = 0
//
// with J(x) = int_0^inf [F(x + y) - F(x)] beta e^{-beta y} dy. The r-terms of
// the generator collapse to -theta F under V = e^{-r} F.

#include <string>
#include <vector>

#include "dualdiv/closed_form.hpp"
#include "dualdiv/model.hpp"
#include "dualdiv/piecewise.hpp"

namespace dualdiv {

/// Analytic jump integral J(x). Throws ExponentAtOrAboveBeta if any
/// exponential rate of F is >= beta.
double jump_integral(const PiecewiseExp& f, double x, double beta);

double residual_restricted(const ThresholdSolution& sol, const ValidatedModel& model, double x);

struct UnrestrictedResidual {
    double operator_value = 0.0;  ///< -c F' - theta F + lambda J
    double gradient_slack = 0.0;  ///< 1 - F'
};

UnrestrictedResidual residual_unrestricted(const BarrierSolution& sol, const ValidatedModel& model,
                                           double x);

struct ResidualPoint {
    double x = 0.0;
    double residual = 0.0;        ///< restricted residual or unrestricted operator value
    double gradient_slack = 0.0;  ///< 1 - F'(x)
    std::string branch;           ///< "below" / "above" the switching level, or "all"
    bool ok = true;
};

struct ResidualReport {
    std::string kind;  ///< "threshold" or "barrier"
    std::vector<ResidualPoint> points;
    double max_abs = 0.0;
    double tol = 0.0;
    bool pass = true;
};

/// Evenly spaced points min, min+step, ... <= max. A point within 1e-12 of
/// `level` is replaced by the one-sided probes level -/+ 1e-6.
std::vector<double> make_grid(double min, double step, double max, double level);

/// Restricted check: pass iff |residual| <= rel_tol * xi/theta at every point.
ResidualReport verify_threshold(const ThresholdSolution& sol, const ValidatedModel& model,
                                const std::vector<double>& grid, double rel_tol = 1e-8);

/// Unrestricted check with tol = rel_tol * F(b, b): below b, |operator| <= tol
/// and 1 - F' <= tol; above b, |1 - F'| <= tol and operator <= tol.
ResidualReport verify_barrier(const BarrierSolution& sol, const ValidatedModel& model,
                              const std::vector<double>& grid, double rel_tol = 1e-8);

}  // namespace dualdiv

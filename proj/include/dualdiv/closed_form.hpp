#pragma once

// Closed-form value functions of the dual model with exponential gains under
// the effective discount rate theta. Everything here works on the F scale,
// V(x, r) = e^{-r} F(x); the e^{-r} factor is applied only by the *_value
// functions that take r.

#include <string>
#include <vector>

#include "dualdiv/model.hpp"
#include "dualdiv/piecewise.hpp"

namespace dualdiv {

enum class Regime { AlwaysMax, Threshold };

const char* regime_name(Regime r) noexcept;

/// Restricted dividends, rate in [0, xi].
///
/// AlwaysMax: F(x) = xi/theta (1 - e^{alpha x}); paying xi at all times is optimal.
/// Threshold: F(x) = B (e^{s1 x} - e^{s2 x}) for x <= xhat,
///            F(x) = A e^{r1 x} + xi/theta   for x >  xhat.
struct ThresholdSolution {
    Regime regime = Regime::AlwaysMax;
    double xi = 0.0;
    double alpha = 0.0;  ///< negative root of (c+xi) a^2 + (theta + lambda - beta(c+xi)) a - theta beta
    double r1 = 0.0;     ///< same quadratic written with (m, delta) instead of theta
    double s1 = 0.0;     ///< positive root of c s^2 + (theta + lambda - beta c) s - theta beta
    double s2 = 0.0;     ///< negative root of the same
    double A = 0.0;
    double B = 0.0;
    double xhat = 0.0;
    double theta = 0.0;

    /// xi / theta, the supremum of F.
    double scale() const { return xi / theta; }
};

/// Unrestricted dividends: F(x) = K (e^{s3 x} - e^{s4 x}) for x <= b and
/// F(x) = x - b + F(b) above the barrier.
struct BarrierSolution {
    double s3 = 0.0;
    double s4 = 0.0;
    double K = 0.0;
    double b = 0.0;
    double theta = 0.0;

    /// F(b, b); the natural scale for tolerances.
    double level_value() const;
};

/// -xi alpha / theta; the restricted problem is AlwaysMax iff this is <= 1.
double regime_ratio(const ValidatedModel& model, double xi);

/// xi e^{-r} (1 - e^{alpha x}) / theta; omits e^{-r} when include_r is false.
double full_payout_value(const ValidatedModel& model, double xi, double x, bool include_r = true);

/// Solves the restricted problem. Throws DegenerateThreshold when the
/// Threshold regime yields a level xhat <= 0.
ThresholdSolution solve_threshold(const ValidatedModel& model, double xi);

/// Threshold-regime candidate with A and B fitted at an arbitrary level
/// (value matching and the jump-integral consistency condition), without
/// optimising the level. solve_threshold uses the maximising level.
ThresholdSolution threshold_at_level(const ValidatedModel& model, double xi, double level);

double threshold_F(const ThresholdSolution& sol, double x);
double threshold_derivative(const ThresholdSolution& sol, double x);
double threshold_value(const ThresholdSolution& sol, double x, double r);

/// Solves the unrestricted problem. Throws DegenerateBarrier when the optimal
/// barrier is b <= 0, which happens exactly when lambda/beta <= c.
BarrierSolution solve_barrier(const ValidatedModel& model);

/// Barrier candidate with K fitted for an arbitrary level b > 0.
BarrierSolution barrier_at_level(const ValidatedModel& model, double b);

double barrier_F(const BarrierSolution& sol, double x);
double barrier_derivative(const BarrierSolution& sol, double x);
double barrier_value(const BarrierSolution& sol, double x, double r);

/// Symbolic form of F used by the HJB checker.
PiecewiseExp to_piecewise(const ThresholdSolution& sol);
PiecewiseExp to_piecewise(const BarrierSolution& sol);

/// Structural invariants (root signs, cross-equation identities, value
/// matching, sign of the constants). Returns one message per violation.
std::vector<std::string> audit(const ThresholdSolution& sol, const ValidatedModel& model);
std::vector<std::string> audit(const BarrierSolution& sol, const ValidatedModel& model);

}  // namespace dualdiv

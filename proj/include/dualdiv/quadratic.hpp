#pragma once

namespace dualdiv {

struct QuadraticRoots {
    double pos = 0.0;
    double neg = 0.0;
};

/// Roots of a2 x^2 + a1 x + a0 with a2 > 0 and a0 < 0, so exactly one root of
/// each sign exists. The larger-magnitude root comes from the usual formula
/// with the sign of a1 chosen to avoid cancellation; the other from the
/// product a0 / a2. Throws PreconditionViolated on any other sign pattern.
QuadraticRoots solve_signed_quadratic(double a2, double a1, double a0);

/// |a2 x^2 + a1 x + a0| / (|a2 x^2| + |a1 x| + |a0|)
double quadratic_relative_residual(double a2, double a1, double a0, double x);

}  // namespace dualdiv

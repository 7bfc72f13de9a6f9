#include "dualdiv/quadratic.hpp"

#include <cmath>

#include "dualdiv/errors.hpp"

namespace dualdiv {

QuadraticRoots solve_signed_quadratic(double a2, double a1, double a0) {
    if (!(a2 > 0.0) || !(a0 < 0.0) || !std::isfinite(a2) || !std::isfinite(a1) || !std::isfinite(a0)) {
        throw Error(Errc::PreconditionViolated, "quadratic needs a2 > 0 and a0 < 0");
    }
    // a0 < 0 < a2 keeps the discriminant above a1^2
    const double sq = std::sqrt(a1 * a1 - 4.0 * a2 * a0);
    const double q = -0.5 * (a1 >= 0.0 ? a1 + sq : a1 - sq);
    const double big = q / a2;
    const double small = a0 / q;
    return big > 0.0 ? QuadraticRoots{big, small} : QuadraticRoots{small, big};
}

double quadratic_relative_residual(double a2, double a1, double a0, double x) {
    const double t2 = a2 * x * x;
    const double t1 = a1 * x;
    return std::abs(t2 + t1 + a0) / (std::abs(t2) + std::abs(t1) + std::abs(a0));
}

}  // namespace dualdiv

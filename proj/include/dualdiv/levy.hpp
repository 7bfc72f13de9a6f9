#pragma once

// Exponential-Levy discounting exp(-r - m t - L_t), where L is a Levy process
// with triplet (delta, gamma, nu) and only nonnegative, finite-activity jumps.
//
// Under the ansatz V(x, r) = e^{-r} F(x) the r-generator acts on V as
// multiplication by -(mbar - delta^2/2), with
//
//   mbar = m + gamma - int_0^inf (e^{-z} - 1 + z 1{z <= 1}) nu(z) dz,
//
// so every GBM-discount formula applies unchanged once m is replaced by mbar.

#include <utility>
#include <vector>

namespace dualdiv {

struct ValidatedModel;

struct LevyMeasureSpec {
    enum class Kind { Zero, CompoundPoissonExp, Tabulated };

    Kind kind = Kind::Zero;
    double gamma = 0.0;  ///< drift component of the triplet
    double eta = 0.0;    ///< total jump rate (CompoundPoissonExp)
    double rho = 0.0;    ///< exponential jump-size rate (CompoundPoissonExp)
    /// (z, nu(z)) samples on (0, inf), strictly increasing in z; nu is
    /// linearly interpolated between samples and zero beyond the last one.
    std::vector<std::pair<double, double>> points;

    static LevyMeasureSpec zero(double gamma = 0.0);
    static LevyMeasureSpec compound_poisson_exp(double eta, double rho, double gamma = 0.0);
    static LevyMeasureSpec tabulated(std::vector<std::pair<double, double>> points,
                                     double gamma = 0.0);

    /// Density nu(z); zero for z <= 0.
    double density(double z) const;

    friend bool operator==(const LevyMeasureSpec&, const LevyMeasureSpec&) = default;
};

/// Integrals of the measure that determine the effective drift. `k`, `l` and
/// `mass` are reported for traceability; `mbar` is what the solvers consume.
struct LevyReduction {
    double k = 0.0;            ///< int e^{-z} nu(z) dz
    double l = 0.0;            ///< int z 1{z <= 1} nu(z) dz
    double mass = 0.0;         ///< int nu(z) dz
    double compensator = 0.0;  ///< int (e^{-z} - 1 + z 1{z <= 1}) nu(z) dz = k - mass + l
    double mbar = 0.0;         ///< m + gamma - compensator
};

/// Closed form for Zero and CompoundPoissonExp, quadrature of the
/// interpolated density for Tabulated. Throws DivergentIntegral on
/// non-finite input or an integral that does not converge.
LevyReduction effective_drift(const LevyMeasureSpec& spec, double m);

/// int (e^{-z} - 1 + z 1{z <= 1}) nu(z) dz by adaptive Gauss-Kronrod
/// quadrature of spec.density(), independent of the closed forms used by
/// effective_drift. For CompoundPoissonExp the range is cut where the
/// integrand falls below 1e-14 and the remaining tail is added analytically.
double compensator_by_quadrature(const LevyMeasureSpec& spec);

/// Returns the GBM-discount model (r, mbar, delta) equivalent to an
/// exponential-Levy model. GBM models are returned unchanged.
ValidatedModel reduce_model(const ValidatedModel& model);

}  // namespace dualdiv

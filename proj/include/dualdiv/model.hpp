#pragma once

#include <optional>

#include "dualdiv/levy.hpp"

namespace dualdiv {

/// Surplus side of the dual model: X_t = x - c t + S_t - D_t, where S is
/// compound Poisson with rate `lambda` and Exp(`beta`) gains.
struct DualModelParams {
    double c = 0.0;       ///< expense rate
    double lambda = 0.0;  ///< gain arrival intensity
    double beta = 0.0;    ///< gain-size rate, mean gain 1/beta

    /// lambda/beta - c; reported only, any sign is admissible.
    double net_drift() const { return lambda / beta - c; }

    friend bool operator==(const DualModelParams&, const DualModelParams&) = default;
};

/// Stochastic discount factor exp(-r - m t - delta B_t) (Gbm) or
/// exp(-r - m t - L_t) with L Levy of triplet (delta, levy.gamma, nu) (ExpLevy).
struct DiscountSpec {
    enum class Kind { Gbm, ExpLevy };

    Kind kind = Kind::Gbm;
    double r = 0.0;
    double m = 0.0;
    double delta = 0.0;
    LevyMeasureSpec levy;  ///< ignored for Gbm

    static DiscountSpec gbm(double r, double m, double delta);
    static DiscountSpec exp_levy(double r, double m, double delta, LevyMeasureSpec levy);

    friend bool operator==(const DiscountSpec&, const DiscountSpec&) = default;
};

/// theta = m - delta^2/2 (Gbm) or mbar - delta^2/2 (ExpLevy); always > 0 once validated.
struct EffectiveRate {
    double theta = 0.0;
};

/// Output of validate(). Every solver and simulator takes this type and
/// trusts its invariants.
struct ValidatedModel {
    DualModelParams params;
    DiscountSpec discount;
    EffectiveRate rate;
    std::optional<LevyReduction> levy;  ///< set for ExpLevy discounts

    double theta() const { return rate.theta; }
    /// Drift that plays the role of m in the closed forms (m or mbar).
    double effective_m() const { return levy ? levy->mbar : discount.m; }

private:
    friend ValidatedModel validate(const DualModelParams&, const DiscountSpec&);
    ValidatedModel() = default;
};

/// Checks positivity of c, lambda, beta, m, the sign of r and delta, and the
/// standing assumption theta > 0.
ValidatedModel validate(const DualModelParams& params, const DiscountSpec& disc);

EffectiveRate effective_theta(const DiscountSpec& disc);

}  // namespace dualdiv

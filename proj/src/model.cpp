#include "dualdiv/model.hpp"

#include <cmath>
#include <string>

#include "dualdiv/errors.hpp"

namespace dualdiv {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(Errc::NonPositiveParameter, std::string(field) + " must be positive and finite");
    }
}

void require_nonnegative(double v, const char* field) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(Errc::NonPositiveParameter, std::string(field) + " must be nonnegative and finite");
    }
}

double drift_of(const DiscountSpec& disc, std::optional<LevyReduction>& levy) {
    if (disc.kind == DiscountSpec::Kind::Gbm) return disc.m;
    levy = effective_drift(disc.levy, disc.m);
    return levy->mbar;
}

EffectiveRate theta_from(double drift, double delta) {
    const double theta = drift - 0.5 * delta * delta;
    if (!(theta > 0.0)) {
        throw Error(Errc::InsufficientDrift,
                    "effective discount rate " + std::to_string(theta) + " is not positive");
    }
    return {theta};
}

}  // namespace

DiscountSpec DiscountSpec::gbm(double r, double m, double delta) {
    DiscountSpec d;
    d.r = r;
    d.m = m;
    d.delta = delta;
    return d;
}

DiscountSpec DiscountSpec::exp_levy(double r, double m, double delta, LevyMeasureSpec levy) {
    DiscountSpec d;
    d.kind = Kind::ExpLevy;
    d.r = r;
    d.m = m;
    d.delta = delta;
    d.levy = std::move(levy);
    return d;
}

ValidatedModel validate(const DualModelParams& params, const DiscountSpec& disc) {
    require_positive(params.c, "c");
    require_positive(params.lambda, "lambda");
    require_positive(params.beta, "beta");
    require_nonnegative(disc.r, "r");
    require_positive(disc.m, "m");
    require_nonnegative(disc.delta, "delta");

    ValidatedModel model;
    model.params = params;
    model.discount = disc;
    model.rate = theta_from(drift_of(disc, model.levy), disc.delta);
    return model;
}

EffectiveRate effective_theta(const DiscountSpec& disc) {
    std::optional<LevyReduction> levy;
    return theta_from(drift_of(disc, levy), disc.delta);
}

}  // namespace dualdiv

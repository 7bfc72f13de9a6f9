#include "dualdiv/levy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dualdiv/errors.hpp"
#include "dualdiv/model.hpp"

namespace dualdiv {

namespace {

constexpr double kTailCutoff = 1e-14;

double integrate(const auto& f, double a, double b, unsigned max_depth = 20) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, 1e-14, &err);
    if (!std::isfinite(v)) {
        throw Error(Errc::DivergentIntegral, "quadrature of the Levy measure did not converge");
    }
    return v;
}

double compensator_weight(double z) {
    return std::expm1(-z) + (z <= 1.0 ? z : 0.0);
}

void check_tabulated(const std::vector<std::pair<double, double>>& pts) {
    double prev = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto [z, v] = pts[i];
        if (!std::isfinite(z) || !std::isfinite(v)) {
            throw Error(Errc::DivergentIntegral,
                        "tabulated Levy measure has a non-finite entry at index " + std::to_string(i));
        }
        if (z <= 0.0 || (i > 0 && z <= prev)) {
            throw Error(Errc::InvalidInput,
                        "tabulated Levy measure needs strictly increasing z > 0");
        }
        if (v < 0.0) {
            throw Error(Errc::InvalidInput, "tabulated Levy measure has a negative density");
        }
        prev = z;
    }
}

// Integrates g(z) * nu(z) over the support of a tabulated measure, cell by
// cell, with cells split at z = 1 where the truncation indicator jumps.
double integrate_tabulated(const LevyMeasureSpec& spec, const auto& g) {
    // nu is linear on each cell and g is smooth, so a shallow rule suffices
    constexpr unsigned kCellDepth = 3;
    const auto& pts = spec.points;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto [a, va] = pts[i];
        const auto [b, vb] = pts[i + 1];
        auto f = [&](double z) { return g(z) * (va + (z - a) / (b - a) * (vb - va)); };
        if (a < 1.0 && b > 1.0) {
            total += integrate(f, a, 1.0, kCellDepth) + integrate(f, 1.0, b, kCellDepth);
        } else {
            total += integrate(f, a, b, kCellDepth);
        }
    }
    if (!std::isfinite(total)) {
        throw Error(Errc::DivergentIntegral, "tabulated Levy measure is not integrable");
    }
    return total;
}

}  // namespace

LevyMeasureSpec LevyMeasureSpec::zero(double gamma) {
    LevyMeasureSpec s;
    s.gamma = gamma;
    return s;
}

LevyMeasureSpec LevyMeasureSpec::compound_poisson_exp(double eta, double rho, double gamma) {
    LevyMeasureSpec s;
    s.kind = Kind::CompoundPoissonExp;
    s.eta = eta;
    s.rho = rho;
    s.gamma = gamma;
    return s;
}

LevyMeasureSpec LevyMeasureSpec::tabulated(std::vector<std::pair<double, double>> points,
                                           double gamma) {
    LevyMeasureSpec s;
    s.kind = Kind::Tabulated;
    s.points = std::move(points);
    s.gamma = gamma;
    return s;
}

double LevyMeasureSpec::density(double z) const {
    if (z <= 0.0) return 0.0;
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::CompoundPoissonExp:
            return eta * rho * std::exp(-rho * z);
        case Kind::Tabulated: {
            if (points.empty() || z < points.front().first || z > points.back().first) return 0.0;
            auto it = std::lower_bound(points.begin(), points.end(), z,
                                       [](const auto& p, double v) { return p.first < v; });
            if (it->first == z) return it->second;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (z - lo.first) / (hi.first - lo.first);
            return lo.second + w * (hi.second - lo.second);
        }
    }
    return 0.0;
}

LevyReduction effective_drift(const LevyMeasureSpec& spec, double m) {
    if (!std::isfinite(spec.gamma)) {
        throw Error(Errc::InvalidInput, "Levy drift gamma must be finite");
    }
    LevyReduction red;
    switch (spec.kind) {
        case LevyMeasureSpec::Kind::Zero:
            break;
        case LevyMeasureSpec::Kind::CompoundPoissonExp: {
            const double eta = spec.eta;
            const double rho = spec.rho;
            if (!(eta > 0.0) || !(rho > 0.0) || !std::isfinite(eta) || !std::isfinite(rho)) {
                throw Error(Errc::NonPositiveParameter, "levy.eta and levy.rho must be positive");
            }
            red.k = eta * rho / (rho + 1.0);
            red.mass = eta;
            // int_0^1 z rho e^{-rho z} dz = (1 - e^{-rho}(1 + rho)) / rho
            red.l = eta * (-std::expm1(-rho) - rho * std::exp(-rho)) / rho;
            break;
        }
        case LevyMeasureSpec::Kind::Tabulated: {
            check_tabulated(spec.points);
            red.k = integrate_tabulated(spec, [](double z) { return std::exp(-z); });
            red.mass = integrate_tabulated(spec, [](double) { return 1.0; });
            red.l = integrate_tabulated(spec, [](double z) { return z <= 1.0 ? z : 0.0; });
            break;
        }
    }
    if (spec.kind == LevyMeasureSpec::Kind::Tabulated) {
        // Summing k - mass + l would cancel catastrophically near z = 0.
        red.compensator = integrate_tabulated(spec, compensator_weight);
    } else {
        red.compensator = red.k - red.mass + red.l;
    }
    red.mbar = m + spec.gamma - red.compensator;
    return red;
}

double compensator_by_quadrature(const LevyMeasureSpec& spec) {
    switch (spec.kind) {
        case LevyMeasureSpec::Kind::Zero:
            return 0.0;
        case LevyMeasureSpec::Kind::Tabulated:
            check_tabulated(spec.points);
            return integrate_tabulated(spec, compensator_weight);
        case LevyMeasureSpec::Kind::CompoundPoissonExp: {
            const double eta = spec.eta;
            const double rho = spec.rho;
            auto f = [&](double z) { return compensator_weight(z) * spec.density(z); };
            // |integrand| <= eta rho e^{-rho z} beyond z = 1
            const double cut = std::max(1.0, std::log(eta * rho / kTailCutoff) / rho);
            const double body = integrate(f, 0.0, 1.0) + integrate(f, 1.0, cut);
            // int_cut^inf (e^{-z} - 1) eta rho e^{-rho z} dz
            const double tail =
                eta * rho * std::exp(-(rho + 1.0) * cut) / (rho + 1.0) - eta * std::exp(-rho * cut);
            return body + tail;
        }
    }
    return 0.0;
}

ValidatedModel reduce_model(const ValidatedModel& model) {
    if (model.discount.kind == DiscountSpec::Kind::Gbm) return model;
    return validate(model.params,
                    DiscountSpec::gbm(model.discount.r, model.effective_m(), model.discount.delta));
}

}  // namespace dualdiv

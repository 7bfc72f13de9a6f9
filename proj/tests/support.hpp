#pragma once

#include <cmath>
#include <random>

#include "dualdiv/closed_form.hpp"
#include "dualdiv/model.hpp"

namespace dualdiv::testing {

// c=1, lambda=2, beta=1, GBM r=0, m=0.1, delta=0.2 (theta = 0.08); xi = 0.5.
inline constexpr double kRefXi = 0.5;

inline ValidatedModel reference_model() {
    return validate({1.0, 2.0, 1.0}, DiscountSpec::gbm(0.0, 0.1, 0.2));
}

struct RandomInstance {
    DualModelParams params;
    DiscountSpec discount;
    double xi = 0.0;
    ValidatedModel model() const { return validate(params, discount); }
};

// theta in [0.01, 1], lambda/(beta c) in [lo_ratio, hi_ratio], xi/(c theta)
// over [0.05, 50] so that both restricted regimes occur.
class InstanceGenerator {
public:
    explicit InstanceGenerator(std::uint64_t seed, double lo_ratio = 0.5, double hi_ratio = 4.0)
        : rng_(seed), lo_ratio_(lo_ratio), hi_ratio_(hi_ratio) {}

    RandomInstance next() {
        RandomInstance inst;
        const double c = log_uniform(0.2, 5.0);
        const double beta = log_uniform(0.2, 5.0);
        const double ratio = uniform(lo_ratio_, hi_ratio_);
        const double theta = log_uniform(0.01, 1.0);
        const double delta = uniform(0.0, 0.5);
        inst.params = {c, ratio * beta * c, beta};
        inst.discount = DiscountSpec::gbm(uniform(0.0, 2.0), theta + 0.5 * delta * delta, delta);
        inst.xi = c * theta * log_uniform(0.05, 50.0);
        return inst;
    }

    RandomInstance next_in(Regime regime) {
        while (true) {
            RandomInstance inst = next();
            if (solve_threshold(inst.model(), inst.xi).regime == regime) return inst;
        }
    }

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }

private:
    std::mt19937_64 rng_;
    double lo_ratio_;
    double hi_ratio_;
};

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace dualdiv::testing

#pragma once

// Event-driven Monte Carlo for the dual surplus X_t = x - c t + S_t - D_t.
//
// Between gains the surplus is linear, so ruin times and level crossings are
// solved exactly; only the Raw estimator's Brownian discount is put on a grid.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualdiv/model.hpp"

namespace dualdiv {

struct Strategy {
    enum class Kind { NoDividend, ConstRate, Threshold, Barrier };

    Kind kind = Kind::NoDividend;
    double level = 0.0;  ///< threshold x-hat or barrier b
    double rate = 0.0;   ///< dividend rate for ConstRate / Threshold

    static Strategy none();
    static Strategy const_rate(double rate);
    static Strategy threshold(double level, double rate);
    static Strategy barrier(double level);

    std::string label() const;
};

enum class Estimator {
    /// Discount averaged out analytically: weight e^{-r - theta t}.
    Collapsed,
    /// Simulated e^{-r - m t - delta B_t}, GBM discounts only.
    Raw,
};

struct SimConfig {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    Estimator estimator = Estimator::Collapsed;
    /// Raw grid step; 0 selects 0.01/theta. Rounded down to a power of two so
    /// that halving the step refines the same Brownian path.
    double brownian_step = 0.0;
    /// Time truncation; defaults to the horizon implied by truncation_tol.
    std::optional<double> horizon;
    /// Bound on the discounted dividends lost past the horizon; defaults to
    /// 1e-6 times the strategy's value scale.
    std::optional<double> truncation_tol;
    /// Worker threads, 0 for hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
};

/// Model quantities the simulator needs. Built from a ValidatedModel; tests
/// may also fill it directly (e.g. lambda = 0).
struct SimModel {
    double c = 0.0;
    double lambda = 0.0;
    double beta = 0.0;
    double r = 0.0;
    double m = 0.0;
    double delta = 0.0;
    double theta = 0.0;
    bool raw_supported = true;  ///< false for exponential-Levy discounts

    static SimModel from(const ValidatedModel& model);
};

struct PathOutcome {
    double discounted_dividends = 0.0;
    double ruin_time = 0.0;  ///< ruin time, or the horizon when censored
    bool ruined = false;
    std::size_t n_jumps = 0;
};

struct PathEvent {
    enum class Type { Jump, Cross, Lump, Ruin, Horizon };
    double t = 0.0;
    Type type = Type::Jump;
    double surplus_before = 0.0;
    double surplus_after = 0.0;
    double dividend_paid = 0.0;  ///< lump, or rate payments accrued since the previous event
    double discount_weight = 0.0;  ///< discounted / paid, 0 when nothing was paid
};

struct SimEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    double ci_lo = 0.0;  ///< mean - 1.96 std_err
    double ci_hi = 0.0;
    std::size_t n_paths = 0;
    double ruin_fraction = 0.0;
};

/// Horizon actually used for (model, strategy, cfg).
double resolve_horizon(const SimModel& model, const Strategy& strategy, const SimConfig& cfg);

/// Grid step actually used by the Raw estimator.
double resolve_brownian_step(const SimModel& model, const SimConfig& cfg);

/// One path. Path i draws gains from a stream keyed by (cfg.seed, i) and the
/// Brownian discount from separate streams, so gains are shared across
/// strategies and estimators. Appends to `log` when given.
PathOutcome sample_path(const SimModel& model, const Strategy& strategy, double x,
                        const SimConfig& cfg, std::size_t path_index,
                        std::vector<PathEvent>* log = nullptr);

/// Per-path outcomes for paths 0..n_paths-1, in index order.
std::vector<PathOutcome> simulate_paths(const SimModel& model, const Strategy& strategy, double x,
                                        const SimConfig& cfg);

SimEstimate summarize(const std::vector<PathOutcome>& paths);

SimEstimate estimate_value(const SimModel& model, const Strategy& strategy, double x,
                           const SimConfig& cfg);
SimEstimate estimate_value(const ValidatedModel& model, const Strategy& strategy, double x,
                           const SimConfig& cfg);

struct DominanceRow {
    Strategy strategy;
    SimEstimate estimate;
};

/// Rows sorted by estimated value, best first. diff_mean[i][j] and
/// diff_se[i][j] describe the per-path difference row i minus row j under
/// common random numbers.
struct DominanceTable {
    std::vector<DominanceRow> rows;
    std::vector<std::vector<double>> diff_mean;
    std::vector<std::vector<double>> diff_se;
};

DominanceTable dominance_study(const ValidatedModel& model, double x,
                               const std::vector<Strategy>& candidates, const SimConfig& cfg);

const char* event_type_name(PathEvent::Type t) noexcept;

}  // namespace dualdiv

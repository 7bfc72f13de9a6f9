#include "dualdiv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "dualdiv/errors.hpp"

namespace dualdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDefaultRelTruncation = 1e-6;
constexpr double kBarrierRateFactor = 10.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::size_t path, std::uint64_t id) {
    return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ path) ^ id));
}

enum StreamId : std::uint64_t { kGains = 0, kBrownianBase = 1 };

// Compensated running sum.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Discount weights under the collapsed estimator.
class CollapsedDiscount {
public:
    CollapsedDiscount(double r, double theta) : scale_(std::exp(-r)), theta_(theta) {}
    double at(double t) { return scale_ * std::exp(-theta_ * t); }
    double integral(double t1, double t2) {
        return scale_ * std::exp(-theta_ * t1) * -std::expm1(-theta_ * (t2 - t1)) / theta_;
    }

private:
    double scale_;
    double theta_;
};

// e^{-r - m t - delta B_t} sampled on the grid k 2^-J and linearly
// interpolated in between. B is built one unit interval at a time: the
// endpoint from the base stream, then dyadic midpoints level by level, each
// level from its own stream. Grids with J and J+1 therefore share every
// point of the coarser one.
class GridDiscount {
public:
    GridDiscount(const SimModel& model, int levels, std::uint64_t seed, std::size_t path)
        : r_(model.r),
          m_(model.m),
          delta_(model.delta),
          per_unit_(std::size_t{1} << levels),
          h_(1.0 / static_cast<double>(per_unit_)),
          base_(stream(seed, path, kBrownianBase)) {
        for (int j = 1; j <= levels; ++j) level_engines_.push_back(stream(seed, path, kBrownianBase + j));
        level_normals_.resize(static_cast<std::size_t>(levels));
        b_.assign(per_unit_ + 1, 0.0);
        d_.assign(per_unit_ + 1, 0.0);
        fill_unit(0.0);
    }

    double at(double t) {
        const auto [k, w] = locate(t, false);
        return d_[k] + w * (d_[k + 1] - d_[k]);
    }

    // Exact integral of the piecewise-linear discount, i.e. the trapezoidal rule.
    double integral(double t1, double t2) {
        NeumaierSum acc;
        double a = t1;
        while (a < t2) {
            const auto [k, w] = locate(a, true);
            const double cell_start = static_cast<double>(unit_) + static_cast<double>(k) * h_;
            const double b = std::min(t2, cell_start + h_);
            const double da = d_[k] + w * (d_[k + 1] - d_[k]);
            const double db = d_[k] + (b - cell_start) / h_ * (d_[k + 1] - d_[k]);
            acc.add(0.5 * (b - a) * (da + db));
            a = b;
        }
        return acc.value();
    }

private:
    // Grid cell containing t, generating units as needed. Times only move
    // forward. With from_right, a unit's right end maps to the next unit.
    std::pair<std::size_t, double> locate(double t, bool from_right) {
        while (t > static_cast<double>(unit_ + 1) || (from_right && t == static_cast<double>(unit_ + 1))) {
            ++unit_;
            fill_unit(b_[per_unit_]);
        }
        const double local = (t - static_cast<double>(unit_)) / h_;
        const auto k = std::min(static_cast<std::size_t>(std::floor(local)), per_unit_ - 1);
        return {k, local - static_cast<double>(k)};
    }

    void fill_unit(double b_start) {
        b_[0] = b_start;
        b_[per_unit_] = b_start + unit_normal_(base_);
        std::size_t stride = per_unit_ / 2;
        for (std::size_t j = 0; stride > 0; ++j, stride /= 2) {
            const double sd = std::sqrt(static_cast<double>(stride) * h_ / 2.0);
            for (std::size_t i = stride; i < per_unit_; i += 2 * stride) {
                b_[i] = 0.5 * (b_[i - stride] + b_[i + stride]) +
                        sd * level_normals_[j](level_engines_[j]);
            }
        }
        for (std::size_t i = 0; i <= per_unit_; ++i) {
            const double t = static_cast<double>(unit_) + static_cast<double>(i) * h_;
            d_[i] = std::exp(-r_ - m_ * t - delta_ * b_[i]);
        }
    }

    double r_, m_, delta_;
    std::size_t per_unit_;
    double h_;
    std::size_t unit_ = 0;
    std::mt19937_64 base_;
    std::normal_distribution<double> unit_normal_;
    std::vector<std::mt19937_64> level_engines_;
    std::vector<std::normal_distribution<double>> level_normals_;
    std::vector<double> b_;
    std::vector<double> d_;
};

int dyadic_levels(double step) {
    int j = 0;
    while (std::ldexp(1.0, -j) > step * (1.0 + 1e-12)) ++j;
    return j;
}

void check_config(const SimModel& model, const Strategy& s, double x, const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw Error(Errc::InvalidInput, "n_paths must be at least 1");
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(Errc::InvalidInput, "initial surplus must be >= 0");
    if (!(s.level >= 0.0) || !(s.rate >= 0.0) || !std::isfinite(s.level) || !std::isfinite(s.rate)) {
        throw Error(Errc::InvalidInput, "strategy levels and rates must be finite and nonnegative");
    }
    if (cfg.brownian_step < 0.0 || !std::isfinite(cfg.brownian_step)) {
        throw Error(Errc::InvalidInput, "brownian_step must be positive");
    }
    if (cfg.horizon && !(*cfg.horizon >= 0.0)) throw Error(Errc::InvalidInput, "horizon must be >= 0");
    if (cfg.truncation_tol && !(*cfg.truncation_tol > 0.0)) {
        throw Error(Errc::InvalidInput, "truncation_tol must be positive");
    }
    if (cfg.estimator == Estimator::Raw && !model.raw_supported) {
        throw Error(Errc::InvalidInput, "raw estimator is only available for GBM discounts");
    }
    if (!(model.theta > 0.0) || !(model.c > 0.0) || !(model.beta > 0.0) || model.lambda < 0.0) {
        throw Error(Errc::InvalidInput, "simulation model parameters out of range");
    }
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

template <typename Discount>
PathOutcome run_path(const SimModel& model, const Strategy& strategy, double x, double horizon,
                     std::size_t path_index, std::uint64_t seed, Discount& disc,
                     std::vector<PathEvent>* log) {
    PathOutcome out;
    NeumaierSum paid;
    auto emit = [&](PathEvent::Type type, double t, double before, double after, double amount,
                    double discounted) {
        if (!log) return;
        log->push_back({t, type, before, after, amount, amount > 0.0 ? discounted / amount : 0.0});
    };

    const bool is_barrier = strategy.kind == Strategy::Kind::Barrier;
    double rate = 0.0;
    double level = kInf;
    switch (strategy.kind) {
        case Strategy::Kind::NoDividend: break;
        case Strategy::Kind::ConstRate: rate = strategy.rate; level = 0.0; break;
        case Strategy::Kind::Threshold: rate = strategy.rate; level = strategy.level; break;
        case Strategy::Kind::Barrier: level = strategy.level; break;
    }
    if (rate == 0.0 && !is_barrier) level = kInf;

    double t = 0.0;
    double surplus = x;
    auto skim = [&]() {
        if (is_barrier && surplus > level) {
            const double lump = surplus - level;
            const double w = disc.at(t);
            paid.add(lump * w);
            emit(PathEvent::Type::Lump, t, surplus, level, lump, lump * w);
            surplus = level;
        }
    };
    auto finish_ruin = [&](double at, double accrued, double accrued_disc) {
        out.ruined = true;
        out.ruin_time = at;
        emit(PathEvent::Type::Ruin, at, surplus, 0.0, accrued, accrued_disc);
        surplus = 0.0;
        out.discounted_dividends = paid.value();
        return out;
    };

    skim();
    if (surplus <= 0.0) return finish_ruin(0.0, 0.0, 0.0);

    auto gains = stream(seed, path_index, kGains);
    std::exponential_distribution<double> arrival(model.lambda > 0.0 ? model.lambda : 1.0);
    std::exponential_distribution<double> gain_size(model.beta);

    while (true) {
        // Both draws happen every round so paths stay aligned across strategies.
        const double wait = arrival(gains);
        const double size = gain_size(gains);
        const double next_jump = model.lambda > 0.0 ? t + wait : kInf;
        const double stop = std::min(next_jump, horizon);

        double accrued = 0.0;
        double accrued_disc = 0.0;
        while (true) {
            if (surplus > level) {
                // paying region: surplus falls at c + rate until it reaches the level
                const double speed = model.c + rate;
                const double t_cross = t + (surplus - level) / speed;
                const double end = std::min(t_cross, stop);
                const double d = rate * disc.integral(t, end);
                paid.add(d);
                accrued += rate * (end - t);
                accrued_disc += d;
                if (t_cross <= stop) {
                    const double before = surplus;
                    surplus = level;
                    t = t_cross;
                    emit(PathEvent::Type::Cross, t, before, surplus, accrued, accrued_disc);
                    accrued = accrued_disc = 0.0;
                    if (surplus <= 0.0) return finish_ruin(t, 0.0, 0.0);
                    continue;
                }
                surplus -= speed * (end - t);
                t = end;
                break;
            }
            const double t_ruin = t + surplus / model.c;
            if (t_ruin <= stop) {
                t = t_ruin;
                return finish_ruin(t, accrued, accrued_disc);
            }
            surplus -= model.c * (stop - t);
            t = stop;
            break;
        }

        if (t >= horizon) {
            out.ruin_time = horizon;
            emit(PathEvent::Type::Horizon, t, surplus, surplus, accrued, accrued_disc);
            break;
        }
        const double before = surplus;
        surplus += size;
        ++out.n_jumps;
        emit(PathEvent::Type::Jump, t, before, surplus, accrued, accrued_disc);
        skim();
    }
    out.discounted_dividends = paid.value();
    return out;
}

}  // namespace

Strategy Strategy::none() { return {}; }

Strategy Strategy::const_rate(double rate) {
    Strategy s;
    s.kind = Kind::ConstRate;
    s.rate = rate;
    return s;
}

Strategy Strategy::threshold(double level, double rate) {
    Strategy s;
    s.kind = Kind::Threshold;
    s.level = level;
    s.rate = rate;
    return s;
}

Strategy Strategy::barrier(double level) {
    Strategy s;
    s.kind = Kind::Barrier;
    s.level = level;
    return s;
}

std::string Strategy::label() const {
    std::ostringstream os;
    os.precision(6);
    switch (kind) {
        case Kind::NoDividend: os << "none"; break;
        case Kind::ConstRate: os << "const(rate=" << rate << ")"; break;
        case Kind::Threshold: os << "threshold(level=" << level << ",rate=" << rate << ")"; break;
        case Kind::Barrier: os << "barrier(level=" << level << ")"; break;
    }
    return os.str();
}

SimModel SimModel::from(const ValidatedModel& model) {
    SimModel s;
    s.c = model.params.c;
    s.lambda = model.params.lambda;
    s.beta = model.params.beta;
    s.r = model.discount.r;
    s.m = model.discount.m;
    s.delta = model.discount.delta;
    s.theta = model.theta();
    s.raw_supported = model.discount.kind == DiscountSpec::Kind::Gbm;
    return s;
}

double resolve_horizon(const SimModel& model, const Strategy& strategy, const SimConfig& cfg) {
    if (cfg.horizon) return *cfg.horizon;
    // Largest payout rate that can be discounted past the horizon. Strategies
    // that pay nothing share the no-dividend horizon.
    const bool rate_based = (strategy.kind == Strategy::Kind::ConstRate ||
                             strategy.kind == Strategy::Kind::Threshold) &&
                            strategy.rate > 0.0;
    const double cap = rate_based ? strategy.rate : kBarrierRateFactor * model.lambda / model.beta;
    // without gains the surplus only declines, so every path is ruined by x/c
    if (!(cap > 0.0)) return kInf;
    const double scale = (rate_based ? strategy.rate : model.lambda / model.beta) / model.theta;
    const double tol = cfg.truncation_tol.value_or(kDefaultRelTruncation * scale);
    // cap e^{-theta T} / theta = tol
    return std::max(0.0, std::log(cap / (model.theta * tol)) / model.theta);
}

double resolve_brownian_step(const SimModel& model, const SimConfig& cfg) {
    const double step = cfg.brownian_step > 0.0 ? cfg.brownian_step : 0.01 / model.theta;
    return std::ldexp(1.0, -dyadic_levels(step));
}

PathOutcome sample_path(const SimModel& model, const Strategy& strategy, double x,
                        const SimConfig& cfg, std::size_t path_index, std::vector<PathEvent>* log) {
    check_config(model, strategy, x, cfg);
    const double horizon = resolve_horizon(model, strategy, cfg);
    if (cfg.estimator == Estimator::Raw) {
        GridDiscount disc(model, dyadic_levels(resolve_brownian_step(model, cfg)), cfg.seed, path_index);
        return run_path(model, strategy, x, horizon, path_index, cfg.seed, disc, log);
    }
    CollapsedDiscount disc(model.r, model.theta);
    return run_path(model, strategy, x, horizon, path_index, cfg.seed, disc, log);
}

std::vector<PathOutcome> simulate_paths(const SimModel& model, const Strategy& strategy, double x,
                                        const SimConfig& cfg) {
    check_config(model, strategy, x, cfg);
    const double horizon = resolve_horizon(model, strategy, cfg);
    const int levels = dyadic_levels(resolve_brownian_step(model, cfg));
    std::vector<PathOutcome> out(cfg.n_paths);
    parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
        if (cfg.estimator == Estimator::Raw) {
            GridDiscount disc(model, levels, cfg.seed, i);
            out[i] = run_path(model, strategy, x, horizon, i, cfg.seed, disc, nullptr);
        } else {
            CollapsedDiscount disc(model.r, model.theta);
            out[i] = run_path(model, strategy, x, horizon, i, cfg.seed, disc, nullptr);
        }
    });
    return out;
}

SimEstimate summarize(const std::vector<PathOutcome>& paths) {
    SimEstimate est;
    est.n_paths = paths.size();
    if (paths.empty()) return est;
    NeumaierSum sum;
    std::size_t ruined = 0;
    for (const auto& p : paths) {
        sum.add(p.discounted_dividends);
        ruined += p.ruined ? 1 : 0;
    }
    const double n = static_cast<double>(paths.size());
    est.mean = sum.value() / n;
    if (paths.size() > 1) {
        NeumaierSum sq;
        for (const auto& p : paths) {
            const double d = p.discounted_dividends - est.mean;
            sq.add(d * d);
        }
        est.std_err = std::sqrt(sq.value() / (n - 1.0) / n);
    }
    est.ci_lo = est.mean - 1.96 * est.std_err;
    est.ci_hi = est.mean + 1.96 * est.std_err;
    est.ruin_fraction = static_cast<double>(ruined) / n;
    return est;
}

SimEstimate estimate_value(const SimModel& model, const Strategy& strategy, double x,
                           const SimConfig& cfg) {
    return summarize(simulate_paths(model, strategy, x, cfg));
}

SimEstimate estimate_value(const ValidatedModel& model, const Strategy& strategy, double x,
                           const SimConfig& cfg) {
    return estimate_value(SimModel::from(model), strategy, x, cfg);
}

DominanceTable dominance_study(const ValidatedModel& model, double x,
                               const std::vector<Strategy>& candidates, const SimConfig& cfg) {
    if (candidates.empty()) throw Error(Errc::InvalidInput, "dominance study needs a candidate");
    const SimModel sim = SimModel::from(model);
    std::vector<std::vector<PathOutcome>> runs;
    std::vector<SimEstimate> estimates;
    for (const auto& s : candidates) {
        runs.push_back(simulate_paths(sim, s, x, cfg));
        estimates.push_back(summarize(runs.back()));
    }
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return estimates[a].mean > estimates[b].mean;
    });

    DominanceTable table;
    const std::size_t k = order.size();
    table.diff_mean.assign(k, std::vector<double>(k, 0.0));
    table.diff_se.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        table.rows.push_back({candidates[order[i]], estimates[order[i]]});
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const auto& a = runs[order[i]];
            const auto& b = runs[order[j]];
            std::vector<PathOutcome> diff(a.size());
            for (std::size_t p = 0; p < a.size(); ++p) {
                diff[p].discounted_dividends = a[p].discounted_dividends - b[p].discounted_dividends;
            }
            const SimEstimate d = summarize(diff);
            table.diff_mean[i][j] = d.mean;
            table.diff_se[i][j] = d.std_err;
        }
    }
    return table;
}

const char* event_type_name(PathEvent::Type t) noexcept {
    switch (t) {
        case PathEvent::Type::Jump: return "jump";
        case PathEvent::Type::Cross: return "cross";
        case PathEvent::Type::Lump: return "lump";
        case PathEvent::Type::Ruin: return "ruin";
        case PathEvent::Type::Horizon: return "horizon";
    }
    return "unknown";
}

}  // namespace dualdiv

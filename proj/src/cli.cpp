#include "dualdiv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "dualdiv/closed_form.hpp"
#include "dualdiv/errors.hpp"
#include "dualdiv/hjb.hpp"
#include "dualdiv/io.hpp"
#include "dualdiv/simulate.hpp"

namespace dualdiv::cli {

namespace {

using io::format_double;

constexpr const char* kCsvColumnsHelp = R"(CSV columns (fixed order):
  verify     x,residual_or_operator,gradient_slack,branch
  simulate   strategy,level,rate,x,estimator,n_paths,seed,mean,std_err,ci_lo,ci_hi,ruin_fraction,closed_form
  dominance  rank,strategy,level,rate,mean,std_err,diff_vs_best,diff_se_vs_best
  sweep      param,value,regime,level,value_at_x[,mc_mean,mc_std_err])";

struct Options {
    std::string model_path;
    std::string solution_path;
    std::string mode = "threshold";
    std::optional<double> xi;
    double x = 1.0;
    bool x_given = false;
    std::string out_path;
    std::string grid;
    double tol = 1e-8;
    std::size_t paths = 100000;
    bool paths_given = false;
    std::uint64_t seed = 42;
    std::string estimator = "collapsed";
    std::string strategy = "threshold";
    std::optional<double> level;
    std::string param;
    double from = 0.0;
    double to = 0.0;
    std::size_t steps = 1;
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Writes to --out when given, otherwise to stdout.
void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out_path.empty()) {
        out << text;
    } else {
        io::write_text_file(o.out_path, text);
    }
}

double require_xi(const Options& o) {
    if (!o.xi) throw Error(Errc::InvalidInput, "--xi is required for this mode");
    return *o.xi;
}

std::tuple<double, double, double> parse_grid(const std::string& spec) {
    std::vector<double> v;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(Errc::InvalidInput, "--grid expects MIN:STEP:MAX, got '" + spec + "'");
        }
    }
    if (v.size() != 3) throw Error(Errc::InvalidInput, "--grid expects MIN:STEP:MAX, got '" + spec + "'");
    return {v[0], v[1], v[2]};
}

std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
    const ValidatedModel model = io::load_model(o.model_path);
    std::ostringstream summary;
    std::string json_text;
    if (o.mode == "threshold") {
        const auto sol = solve_threshold(model, require_xi(o));
        json_text = dump(io::solution_to_json(sol, model.params));
        summary << "regime=" << regime_name(sol.regime) << " xhat=" << format_double(sol.xhat)
                << " x=" << format_double(o.x) << " value=" << format_double(threshold_value(sol, o.x, model.discount.r))
                << '\n';
    } else {
        const auto sol = solve_barrier(model);
        json_text = dump(io::solution_to_json(sol, model.params));
        summary << "regime=barrier b=" << format_double(sol.b) << " x=" << format_double(o.x)
                << " value=" << format_double(barrier_value(sol, o.x, model.discount.r)) << '\n';
    }
    if (o.out_path.empty()) {
        out << json_text;
        err << summary.str();
    } else {
        io::write_text_file(o.out_path, json_text);
        out << summary.str();
    }
    return kOk;
}

void check_matches(const io::json& j, const ValidatedModel& model, double theta) {
    const DualModelParams p = io::solution_params(j);
    const bool same_params = p == model.params;
    const bool same_theta = std::abs(theta - model.theta()) <= 1e-12 * model.theta();
    if (!same_params || !same_theta) {
        throw Error(Errc::InvalidInput, "solution was not produced for this model");
    }
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    const ValidatedModel model = io::load_model(o.model_path);
    const io::json j = io::read_json_file(o.solution_path);
    if (!j.is_object() || !j.contains("kind")) throw Error(Errc::InvalidInput, "not a solution file");
    ResidualReport rep;
    auto grid_for = [&](double level, double span) {
        if (!o.grid.empty()) {
            const auto [lo, step, hi] = parse_grid(o.grid);
            return make_grid(lo, step, hi, level);
        }
        return make_grid(0.0, span / 199.0, span, level);
    };
    if (j.at("kind") == "barrier") {
        const auto sol = io::barrier_from_json(j);
        check_matches(j, model, sol.theta);
        rep = verify_barrier(sol, model, grid_for(sol.b, 3.0 * sol.b), o.tol);
    } else {
        const auto sol = io::threshold_from_json(j);
        check_matches(j, model, sol.theta);
        const double span = sol.regime == Regime::Threshold ? 3.0 * sol.xhat : 3.0 / -sol.alpha;
        const double level = sol.regime == Regime::Threshold ? sol.xhat : -1.0;
        rep = verify_threshold(sol, model, grid_for(level, span), o.tol);
    }
    if (ends_with(o.out_path, ".json")) {
        emit(o, out, dump(io::report_to_json(rep)));
    } else {
        std::ostringstream csv;
        io::write_report_csv(csv, rep);
        emit(o, out, csv.str());
    }
    err << (rep.pass ? "PASS" : "FAIL") << " max_abs=" << format_double(rep.max_abs)
        << " tol=" << format_double(rep.tol) << " points=" << rep.points.size() << '\n';
    return rep.pass ? kOk : kVerificationFailed;
}

SimConfig sim_config(const Options& o) {
    SimConfig cfg;
    cfg.n_paths = o.paths;
    cfg.seed = o.seed;
    if (o.estimator == "raw") {
        cfg.estimator = Estimator::Raw;
    } else if (o.estimator != "collapsed") {
        throw Error(Errc::InvalidInput, "--estimator must be collapsed or raw");
    }
    return cfg;
}

// Strategy named by --strategy; the level defaults to the optimal one, in
// which case the closed-form value is also returned.
std::pair<Strategy, std::optional<double>> build_strategy(const Options& o, const ValidatedModel& model) {
    const double r = model.discount.r;
    if (o.strategy == "none") return {Strategy::none(), std::nullopt};
    if (o.strategy == "const") return {Strategy::const_rate(require_xi(o)), std::nullopt};
    if (o.strategy == "threshold") {
        const double xi = require_xi(o);
        if (o.level) return {Strategy::threshold(*o.level, xi), std::nullopt};
        const auto sol = solve_threshold(model, xi);
        return {Strategy::threshold(sol.xhat, xi), threshold_value(sol, o.x, r)};
    }
    if (o.strategy == "barrier") {
        if (o.level) return {Strategy::barrier(*o.level), std::nullopt};
        const auto sol = solve_barrier(model);
        return {Strategy::barrier(sol.b), barrier_value(sol, o.x, r)};
    }
    throw Error(Errc::InvalidInput, "--strategy must be none, const, threshold or barrier");
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const ValidatedModel model = io::load_model(o.model_path);
    const auto [strategy, closed] = build_strategy(o, model);
    const SimEstimate est = estimate_value(model, strategy, o.x, sim_config(o));
    std::ostringstream csv;
    csv << "strategy,level,rate,x,estimator,n_paths,seed,mean,std_err,ci_lo,ci_hi,ruin_fraction,closed_form\n";
    const char* kind = o.strategy.c_str();
    csv << kind << ',' << format_double(strategy.level) << ',' << format_double(strategy.rate) << ','
        << format_double(o.x) << ',' << o.estimator << ',' << est.n_paths << ',' << o.seed << ','
        << format_double(est.mean) << ',' << format_double(est.std_err) << ',' << format_double(est.ci_lo)
        << ',' << format_double(est.ci_hi) << ',' << format_double(est.ruin_fraction) << ','
        << (closed ? format_double(*closed) : "") << '\n';
    emit(o, out, csv.str());
    err << strategy.label() << " mean=" << format_double(est.mean) << " se=" << format_double(est.std_err);
    if (closed) err << " closed_form=" << format_double(*closed);
    err << '\n';
    return kOk;
}

int cmd_dominance(const Options& o, std::ostream& out, std::ostream& err) {
    const ValidatedModel model = io::load_model(o.model_path);
    std::vector<Strategy> candidates;
    if (o.mode == "threshold") {
        const double xi = require_xi(o);
        const auto sol = solve_threshold(model, xi);
        for (double shift : {0.0, -0.5, 0.5, -1.0, 1.0}) {
            candidates.push_back(Strategy::threshold(std::max(0.0, sol.xhat + shift), xi));
        }
        candidates.push_back(Strategy::const_rate(xi));
        candidates.push_back(Strategy::none());
    } else {
        const auto sol = solve_barrier(model);
        for (double shift : {0.0, -0.5, 0.5, -1.0, 1.0}) {
            candidates.push_back(Strategy::barrier(std::max(0.0, sol.b + shift)));
        }
    }
    const DominanceTable table = dominance_study(model, o.x, candidates, sim_config(o));
    std::ostringstream csv;
    csv << "rank,strategy,level,rate,mean,std_err,diff_vs_best,diff_se_vs_best\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        csv << i + 1 << ',' << '"' << row.strategy.label() << '"' << ',' << format_double(row.strategy.level)
            << ',' << format_double(row.strategy.rate) << ',' << format_double(row.estimate.mean) << ','
            << format_double(row.estimate.std_err) << ',' << format_double(table.diff_mean[i][0]) << ','
            << format_double(table.diff_se[i][0]) << '\n';
    }
    emit(o, out, csv.str());
    err << "best: " << table.rows.front().strategy.label() << '\n';
    return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const io::json base = io::read_json_file(o.model_path);
    if (o.steps < 1) throw Error(Errc::InvalidInput, "--steps must be at least 1");
    static const std::vector<std::string> known = {"c", "lambda", "beta", "r", "m", "delta", "xi"};
    if (std::find(known.begin(), known.end(), o.param) == known.end()) {
        throw Error(Errc::InvalidInput, "--param must be one of c, lambda, beta, r, m, delta, xi");
    }
    if (o.mode == "threshold" && !o.xi && o.param != "xi") require_xi(o);
    const bool mc = o.paths_given;

    std::ostringstream csv;
    csv << "param,value,regime,level,value_at_x" << (mc ? ",mc_mean,mc_std_err" : "") << '\n';
    for (std::size_t i = 0; i < o.steps; ++i) {
        const double f = o.steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(o.steps - 1);
        const double v = o.from * (1.0 - f) + o.to * f;
        io::json j = base;
        double xi = o.xi.value_or(0.0);
        if (o.param == "xi") {
            xi = v;
        } else if (o.param == "c" || o.param == "lambda" || o.param == "beta") {
            j[o.param] = v;
        } else {
            j["discount"][o.param] = v;
        }
        csv << o.param << ',' << format_double(v) << ',';
        try {
            const auto [params, disc] = io::model_from_json(j);
            const ValidatedModel model = validate(params, disc);
            double level = 0.0;
            double value = 0.0;
            Strategy strategy;
            std::string regime;
            if (o.mode == "threshold") {
                const auto sol = solve_threshold(model, xi);
                regime = regime_name(sol.regime);
                level = sol.xhat;
                value = threshold_value(sol, o.x, disc.r);
                strategy = Strategy::threshold(level, xi);
            } else {
                const auto sol = solve_barrier(model);
                regime = "barrier";
                level = sol.b;
                value = barrier_value(sol, o.x, disc.r);
                strategy = Strategy::barrier(level);
            }
            csv << regime << ',' << format_double(level) << ',' << format_double(value);
            if (mc) {
                const SimEstimate est = estimate_value(model, strategy, o.x, sim_config(o));
                csv << ',' << format_double(est.mean) << ',' << format_double(est.std_err);
            }
        } catch (const Error& e) {
            const bool degenerate = e.code() == Errc::DegenerateThreshold || e.code() == Errc::DegenerateBarrier;
            csv << (degenerate ? "degenerate" : "invalid") << ",," << (mc ? ",," : "");
            err << "row " << i << ": " << e.what() << '\n';
        }
        csv << '\n';
    }
    emit(o, out, csv.str());
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal dividends in the dual risk model under stochastic discounting", "dualdiv"};
    app.footer(kCsvColumnsHelp);
    app.require_subcommand(1);
    Options o;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", o.model_path, "Model JSON")->required()->check(CLI::ExistingFile);
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out_path, "Output file (.json or .csv)"); };
    auto add_mode = [&](CLI::App* sub) {
        sub->add_option("--mode", o.mode, "threshold (restricted) or barrier (unrestricted)")
            ->check(CLI::IsMember({"threshold", "barrier"}));
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--paths", o.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "RNG seed");
        sub->add_option("--estimator", o.estimator, "collapsed or raw")
            ->check(CLI::IsMember({"collapsed", "raw"}));
    };

    auto* solve = app.add_subcommand("solve", "Solve for the optimal threshold or barrier");
    add_model(solve);
    add_mode(solve);
    solve->add_option("--xi", o.xi, "Dividend rate cap (threshold mode)");
    solve->add_option("--x", o.x, "Surplus at which the summary value is reported");
    add_out(solve);

    auto* verify = app.add_subcommand("verify", "Check a solution against its HJB equation");
    verify->add_option("solution", o.solution_path, "Solution JSON from solve")->required()->check(CLI::ExistingFile);
    add_model(verify);
    verify->add_option("--grid", o.grid, "MIN:STEP:MAX (default: 200 points over [0, 3 level])");
    verify->add_option("--tol", o.tol, "Tolerance relative to the solution scale");
    add_out(verify);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo value of a dividend strategy");
    add_model(simulate);
    simulate->add_option("--strategy", o.strategy, "none, const, threshold or barrier")
        ->check(CLI::IsMember({"none", "const", "threshold", "barrier"}));
    simulate->add_option("--level", o.level, "Strategy level (default: optimal)");
    simulate->add_option("--xi", o.xi, "Dividend rate for const and threshold");
    simulate->add_option("--x", o.x, "Initial surplus");
    add_sim(simulate);
    add_out(simulate);

    auto* dominance = app.add_subcommand("dominance", "Rank the optimal strategy against perturbed ones");
    add_model(dominance);
    add_mode(dominance);
    dominance->add_option("--xi", o.xi, "Dividend rate cap (threshold mode)");
    dominance->add_option("--x", o.x, "Initial surplus");
    add_sim(dominance);
    add_out(dominance);

    auto* sweep = app.add_subcommand("sweep", "Re-solve over a range of one parameter");
    add_model(sweep);
    add_mode(sweep);
    sweep->add_option("--param", o.param, "c, lambda, beta, r, m, delta or xi")->required();
    sweep->add_option("--from", o.from, "First value")->required();
    sweep->add_option("--to", o.to, "Last value")->required();
    sweep->add_option("--steps", o.steps, "Number of values")->required();
    sweep->add_option("--xi", o.xi, "Dividend rate cap (threshold mode)");
    sweep->add_option("--x", o.x, "Surplus at which values are reported");
    add_sim(sweep);
    add_out(sweep);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    if (const auto* opt = app.get_subcommands().front()->get_option_no_throw("--paths")) {
        o.paths_given = opt->count() > 0;
    }

    try {
        if (solve->parsed()) return cmd_solve(o, out, err);
        if (verify->parsed()) return cmd_verify(o, out, err);
        if (simulate->parsed()) return cmd_simulate(o, out, err);
        if (dominance->parsed()) return cmd_dominance(o, out, err);
        return cmd_sweep(o, out, err);
    } catch (const Error& e) {
        err << e.name() << ": " << e.what() << '\n';
        const bool degenerate = e.code() == Errc::DegenerateThreshold || e.code() == Errc::DegenerateBarrier;
        return degenerate ? kDegenerate : kValidation;
    }
}

}  // namespace dualdiv::cli

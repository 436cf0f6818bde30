#include "riskroute/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskroute/calibrate.hpp"
#include "riskroute/costmodel.hpp"
#include "riskroute/errors.hpp"
#include "riskroute/eval.hpp"
#include "riskroute/manifest.hpp"
#include "riskroute/providers.hpp"
#include "riskroute/route.hpp"
#include "riskroute/theory.hpp"
#include "riskroute/version.hpp"

namespace riskroute {

namespace {

using json = nlohmann::ordered_json;

std::string now_utc_iso() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct GridFlags {
    double start = 0.0;
    double step = 0.01;
    std::size_t count = 101;
    bool no_auto_extend = false;

    LambdaGrid grid() const { return LambdaGrid{start, step, count, !no_auto_extend}; }

    void attach(CLI::App* cmd) {
        cmd->add_option("--grid-start", start, "First lambda grid point");
        cmd->add_option("--grid-step", step, "Lambda grid spacing");
        cmd->add_option("--grid-count", count, "Number of lambda grid points");
        cmd->add_flag("--no-auto-extend", no_auto_extend,
                      "Do not extend the grid to cover the observed score range");
    }

    void snapshot(RunManifest& m) const {
        m.config.emplace_back("grid_start", fmt_double(start));
        m.config.emplace_back("grid_step", fmt_double(step));
        m.config.emplace_back("grid_count", std::to_string(count));
        m.config.emplace_back("auto_extend", no_auto_extend ? "false" : "true");
    }
};

std::optional<PriceSheet> resolve_price_sheet(const std::string& flag_value, RunManifest& manifest) {
    std::string path = flag_value;
    if (path.empty()) {
        if (const char* env = std::getenv("RISKROUTE_PRICE_SHEET")) path = env;
    }
    if (path.empty()) return std::nullopt;
    manifest.inputs.emplace_back(path, sha256_file_hex(path));
    return load_price_sheet(path);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write output file: " + path);
    return out;
}

StratumKeyFn parse_stratify_key(const std::string& spec) {
    // "id-prefix" or "id-prefix:<delim>"
    std::string scheme = spec;
    char delim = '/';
    if (const auto colon = spec.find(':'); colon != std::string::npos) {
        scheme = spec.substr(0, colon);
        const std::string rest = spec.substr(colon + 1);
        if (rest.size() != 1) {
            throw InvalidInputError("--stratify-key delimiter must be a single character");
        }
        delim = rest[0];
    }
    if (scheme != "id-prefix") {
        throw InvalidInputError("unknown stratify key scheme '" + scheme + "' (supported: id-prefix)");
    }
    return id_prefix_key(delim);
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
    std::string records;
    double alpha = 0.1;
    double b = 1.0;
    GridFlags grid;
    std::string out = "calibration.json";
};

int cmd_calibrate(const CalibrateOptions& opt) {
    RunManifest manifest;
    manifest.command = "calibrate";
    manifest.tool_version = kVersion;
    manifest.timestamp_utc = now_utc_iso();
    manifest.inputs.emplace_back(opt.records, sha256_file_hex(opt.records));
    manifest.config.emplace_back("alpha", fmt_double(opt.alpha));
    manifest.config.emplace_back("b", fmt_double(opt.b));
    opt.grid.snapshot(manifest);

    const auto records = load_records(opt.records);
    const RiskBudget budget{opt.alpha, opt.b};

    json report;
    int exit_code = kExitOk;
    try {
        const CalibrationResult result = fit_lambda(records, budget, opt.grid.grid());
        report["lambda_hat"] = result.lambda_hat;
        report["feasible"] = result.feasible;
        report["n"] = result.n;
        report["alpha"] = opt.alpha;
        report["loss_bound_b"] = opt.b;
        report["max_loss_observed"] = result.max_loss_observed;
        report["loss_exceeds_bound"] = result.loss_exceeds_bound;
        json curve = json::array();
        for (const auto& [lambda, risk] : result.risk_curve) curve.push_back({lambda, risk});
        report["risk_curve"] = curve;
        if (!result.feasible) {
            std::cerr << "infeasible: no grid point satisfies the risk inequality\n";
            exit_code = kExitInfeasibleBudget;
        } else {
            std::cout << "lambda_hat " << result.lambda_hat << " (n=" << result.n << ")\n";
        }
    } catch (const BudgetInfeasibleError& e) {
        report["feasible"] = false;
        report["n"] = records.size();
        report["alpha"] = opt.alpha;
        report["loss_bound_b"] = opt.b;
        report["error"] = e.what();
        report["min_feasible_n"] = e.min_n();
        std::cerr << e.what() << "\n";
        exit_code = kExitInfeasibleBudget;
    }

    open_output(opt.out) << report.dump(2) << "\n";
    write_manifest(opt.out, manifest);
    return exit_code;
}

// -------------------------------------------------------------------- route

struct RouteOptions {
    std::string records;
    double lambda = 0.0;
    bool unrestricted = false;
    std::string price_sheet;
    std::string out = "decisions.jsonl";
};

int cmd_route(const RouteOptions& opt) {
    RunManifest manifest;
    manifest.command = "route";
    manifest.tool_version = kVersion;
    manifest.timestamp_utc = now_utc_iso();
    manifest.inputs.emplace_back(opt.records, sha256_file_hex(opt.records));
    manifest.config.emplace_back("lambda", fmt_double(opt.lambda));
    manifest.config.emplace_back("variant", opt.unrestricted ? "unrestricted" : "restricted");

    const auto prices = resolve_price_sheet(opt.price_sheet, manifest);
    const auto records = load_records(opt.records);
    const RoutingPolicy policy{opt.lambda,
                               opt.unrestricted ? RouteVariant::unrestricted : RouteVariant::restricted};

    auto out = open_output(opt.out);
    std::size_t deferred = 0;
    for (const auto& instance : records) {
        const RoutingDecision decision = decide(instance, policy);
        deferred += decision.deferred ? 1 : 0;
        json line;
        line["id"] = instance.id;
        line["chosen_index"] = decision.chosen_index;
        line["chosen_action"] = instance.actions[decision.chosen_index];
        line["actor"] = decision.actor == Actor::primary ? "primary" : "guardian";
        line["candidate_count"] = decision.candidate_count;
        line["deferred"] = decision.deferred;
        if (prices && instance.tokens) {
            try {
                line["cost"] = routed_cost(*instance.tokens, *prices, decision);
            } catch (const InvalidInputError&) {
                // cost omitted when the needed token legs are absent
            }
        }
        out << line.dump() << "\n";
    }
    write_manifest(opt.out, manifest);
    std::cout << records.size() << " decisions (" << deferred << " deferred) -> " << opt.out << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateOptions {
    std::string records;
    std::vector<double> alphas;
    std::size_t trials = 30;
    std::size_t calib_size = 400;
    std::size_t eval_size = 0;
    double b = 1.0;
    GridFlags grid;
    std::uint64_t seed = 0;
    bool unrestricted = false;
    std::string stratify_key;
    std::string price_sheet;
    std::vector<double> baselines;
    bool no_cost_matched = false;
    bool binarize = false;
    bool exhaustive = false;
    std::size_t jobs = 1;
    std::string out_table = "report.tsv";
    std::string out_frontier = "frontier.jsonl";
};

const char* utility_kind_name(UtilityKind kind) {
    switch (kind) {
        case UtilityKind::accuracy: return "accuracy";
        case UtilityKind::helpful_match: return "helpful_match";
        case UtilityKind::none: return "none";
    }
    return "none";
}

const char* guardrail_kind_name(GuardrailKind kind) {
    switch (kind) {
        case GuardrailKind::severity: return "severity";
        case GuardrailKind::guardian_regret: return "guardian_regret";
        case GuardrailKind::none: return "none";
    }
    return "none";
}

int cmd_evaluate(const EvaluateOptions& opt) {
    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.tool_version = kVersion;
    manifest.timestamp_utc = now_utc_iso();
    manifest.seed = opt.seed;
    manifest.inputs.emplace_back(opt.records, sha256_file_hex(opt.records));
    manifest.config.emplace_back("trials", std::to_string(opt.trials));
    manifest.config.emplace_back("calib_size", std::to_string(opt.calib_size));
    manifest.config.emplace_back("eval_size", std::to_string(opt.eval_size));
    {
        std::string alphas;
        for (double a : opt.alphas) {
            if (!alphas.empty()) alphas += ",";
            alphas += fmt_double(a);
        }
        manifest.config.emplace_back("alphas", alphas);
    }
    manifest.config.emplace_back("b", fmt_double(opt.b));
    opt.grid.snapshot(manifest);
    manifest.config.emplace_back("variant", opt.unrestricted ? "unrestricted" : "restricted");
    manifest.config.emplace_back("stratify_key", opt.stratify_key);
    manifest.config.emplace_back("binarize_guardian", opt.binarize ? "true" : "false");
    manifest.config.emplace_back("exhaustive", opt.exhaustive ? "true" : "false");
    manifest.config.emplace_back("cost_matched", opt.no_cost_matched ? "false" : "true");

    TrialConfig config;
    config.trials = opt.trials;
    config.calib_size = opt.calib_size;
    config.eval_size = opt.eval_size;
    config.alphas = opt.alphas;
    config.loss_bound_b = opt.b;
    config.grid = opt.grid.grid();
    config.variant = opt.unrestricted ? RouteVariant::unrestricted : RouteVariant::restricted;
    config.seed = opt.seed;
    config.exhaustive = opt.exhaustive;
    config.binarize_guardian = opt.binarize;
    config.fixed_router_qs = opt.baselines;
    config.cost_matched_baseline = !opt.no_cost_matched;
    config.jobs = opt.jobs;
    if (!opt.stratify_key.empty()) config.stratify = parse_stratify_key(opt.stratify_key);
    config.prices = resolve_price_sheet(opt.price_sheet, manifest);

    const auto records = load_records(opt.records);
    const TrialReport report = run_trials(records, config);

    auto table = open_output(opt.out_table);
    table << "policy\tutility_mean\tutility_std\tguardrail_mean\tguardrail_std\tcost_mean\t"
             "cost_std\tlambda_mean\tlambda_std\tdelta\tguardian_pct_mean\tguardian_pct_std\n";
    for (const auto& row : report.rows) {
        table << row.policy << '\t' << fmt6(row.utility.mean) << '\t' << fmt6(row.utility.stdev)
              << '\t' << fmt6(row.guardrail.mean) << '\t' << fmt6(row.guardrail.stdev) << '\t'
              << fmt6(row.cost_per_1000.mean) << '\t' << fmt6(row.cost_per_1000.stdev) << '\t'
              << fmt6(row.lambda_hat.mean) << '\t' << fmt6(row.lambda_hat.stdev) << '\t'
              << (row.has_delta ? fmt6(row.delta) : "nan") << '\t' << fmt6(row.guardian_pct.mean)
              << '\t' << fmt6(row.guardian_pct.stdev) << '\n';
    }
    table.close();
    write_manifest(opt.out_table, manifest);

    auto frontier = open_output(opt.out_frontier);
    for (const auto& row : report.rows) {
        json record;
        record["policy"] = row.policy;
        if (row.alpha) {
            record["alpha"] = *row.alpha;
        } else {
            record["alpha"] = nullptr;
        }
        record["utility_kind"] = utility_kind_name(report.utility_kind);
        record["guardrail_kind"] = guardrail_kind_name(report.guardrail_kind);
        record["utility_mean"] = row.utility.mean;
        record["utility_std"] = row.utility.stdev;
        record["guardrail_mean"] = row.guardrail.mean;
        record["guardrail_std"] = row.guardrail.stdev;
        record["cost_mean"] = row.cost_per_1000.mean;
        record["cost_std"] = row.cost_per_1000.stdev;
        record["lambda_mean"] = row.lambda_hat.mean;
        record["lambda_std"] = row.lambda_hat.stdev;
        record["delta"] = row.has_delta ? json(row.delta) : json(nullptr);
        record["guardian_pct_mean"] = row.guardian_pct.mean;
        record["guardian_pct_std"] = row.guardian_pct.stdev;
        record["trials_included"] = row.utility.count;
        record["infeasible_trials"] = row.infeasible_trials;
        frontier << record.dump() << "\n";
    }
    frontier.close();
    write_manifest(opt.out_frontier, manifest);

    std::cout << report.rows.size() << " policy rows over " << report.trials << " trials -> "
              << opt.out_table << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- simulate

struct SimulateOptions {
    double alpha = 0.3;
    std::vector<std::size_t> n_list = {50, 100, 200, 400, 800};
    std::size_t reps = 500;
    std::string family = "beta:2,2";
    double lambda_max = 1.0;
    double b = 1.0;
    std::size_t grid_points = 1001;
    std::uint64_t seed = 0;
    bool assert_rate = false;
    double slope_bound = -0.8;
    std::string out = "convergence.tsv";
};

SyntheticFamily parse_family(const SimulateOptions& opt) {
    SyntheticFamily family;
    family.lambda_max = opt.lambda_max;
    family.loss_bound_b = opt.b;
    if (opt.family == "uniform") {
        family.beta_a = 1.0;
        family.beta_b = 1.0;
        return family;
    }
    if (opt.family.rfind("beta:", 0) == 0) {
        const std::string params = opt.family.substr(5);
        const auto comma = params.find(',');
        if (comma == std::string::npos) {
            throw InvalidInputError("--family beta needs two parameters, e.g. beta:2,2");
        }
        try {
            family.beta_a = std::stod(params.substr(0, comma));
            family.beta_b = std::stod(params.substr(comma + 1));
        } catch (const std::exception&) {
            throw InvalidInputError("cannot parse --family '" + opt.family + "'");
        }
        return family;
    }
    throw InvalidInputError("unknown --family '" + opt.family + "' (supported: uniform, beta:a,b)");
}

int cmd_simulate(const SimulateOptions& opt) {
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.tool_version = kVersion;
    manifest.timestamp_utc = now_utc_iso();
    manifest.seed = opt.seed;
    manifest.config.emplace_back("alpha", fmt_double(opt.alpha));
    {
        std::string ns;
        for (std::size_t n : opt.n_list) {
            if (!ns.empty()) ns += ",";
            ns += std::to_string(n);
        }
        manifest.config.emplace_back("n_list", ns);
    }
    manifest.config.emplace_back("reps", std::to_string(opt.reps));
    manifest.config.emplace_back("family", opt.family);
    manifest.config.emplace_back("lambda_max", fmt_double(opt.lambda_max));
    manifest.config.emplace_back("b", fmt_double(opt.b));
    manifest.config.emplace_back("grid_points", std::to_string(opt.grid_points));

    SyntheticFamily family = parse_family(opt);
    family.grid_points = opt.grid_points;
    const ConvergenceReport report =
        convergence_study(family, opt.alpha, opt.n_list, opt.reps, opt.seed);

    auto out = open_output(opt.out);
    out << "# alpha=" << fmt_double(opt.alpha) << " family=" << opt.family
        << " reps=" << opt.reps << " lambda_star=" << fmt_double(report.lambda_star_value)
        << " grid_step=" << fmt_double(report.grid_step)
        << " slope=" << (report.slope_available ? fmt_double(report.slope) : "nan")
        << " slope_available=" << (report.slope_available ? "1" : "0") << "\n";
    out << "n\tmean_regret\tse_regret\tmean_risk\tse_risk\n";
    for (const auto& point : report.points) {
        char line[200];
        std::snprintf(line, sizeof(line), "%zu\t%.9f\t%.9f\t%.9f\t%.9f\n", point.n,
                      point.mean_regret, point.se_regret, point.mean_risk, point.se_risk);
        out << line;
    }
    out.close();
    write_manifest(opt.out, manifest);

    if (report.slope_available) {
        std::cout << "log-log regret slope " << report.slope << " over " << report.points.size()
                  << " sizes\n";
    } else {
        std::cout << "slope not computed (need >= 2 sizes with positive regret and reps >= 2)\n";
    }

    if (opt.assert_rate) {
        const bool assertable = report.slope_available && opt.reps >= 200;
        if (!assertable) {
            std::cout << "rate assertion unavailable (reps=" << opt.reps << ", need >= 200)\n";
            return kExitOk;
        }
        if (report.slope > opt.slope_bound) {
            std::cerr << "rate assertion failed: slope " << report.slope << " > bound "
                      << opt.slope_bound << "\n";
            return kExitAssertionFailed;
        }
        std::cout << "rate assertion passed: slope " << report.slope << " <= " << opt.slope_bound
                  << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Score-gap routing between a primary and a guardian scorer, "
                 "calibrated with conformal risk control"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CalibrateOptions cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Fit the relaxation threshold from a record file");
    cal_cmd->add_option("--records", cal.records, "Score record file (jsonl)")->required();
    cal_cmd->add_option("--alpha", cal.alpha, "Risk budget")->required();
    cal_cmd->add_option("--b", cal.b, "Loss bound B");
    cal.grid.attach(cal_cmd);
    cal_cmd->add_option("--out", cal.out, "Calibration report path");

    RouteOptions rt;
    auto* rt_cmd = app.add_subcommand("route", "Route each record at a fixed threshold");
    rt_cmd->add_option("--records", rt.records, "Score record file (jsonl)")->required();
    rt_cmd->add_option("--lambda", rt.lambda, "Relaxation threshold")->required();
    rt_cmd->add_flag("--unrestricted", rt.unrestricted, "Guardian reconsiders the full action set");
    rt_cmd->add_option("--price-sheet", rt.price_sheet,
                       "Per-token price file (default $RISKROUTE_PRICE_SHEET)");
    rt_cmd->add_option("--out", rt.out, "Decision file path");

    EvaluateOptions ev;
    auto* ev_cmd = app.add_subcommand("evaluate", "Repeated-split evaluation harness");
    ev_cmd->add_option("--records", ev.records, "Score record file (jsonl)")->required();
    ev_cmd->add_option("--alphas", ev.alphas, "Risk budgets (frontier order)")
        ->required()
        ->delimiter(',');
    ev_cmd->add_option("--trials", ev.trials, "Number of calibration/evaluation splits");
    ev_cmd->add_option("--calib-size", ev.calib_size, "Calibration sample size per trial");
    ev_cmd->add_option("--eval-size", ev.eval_size, "Evaluation size per trial (0 = remainder)");
    ev_cmd->add_option("--b", ev.b, "Loss bound B");
    ev.grid.attach(ev_cmd);
    ev_cmd->add_option("--seed", ev.seed, "Master seed; all randomness derives from it");
    ev_cmd->add_flag("--unrestricted", ev.unrestricted, "Guardian reconsiders the full action set");
    ev_cmd->add_option("--stratify-key", ev.stratify_key,
                       "Balanced splits by stratum, e.g. id-prefix or id-prefix:<delim>");
    ev_cmd->add_option("--price-sheet", ev.price_sheet,
                       "Per-token price file (default $RISKROUTE_PRICE_SHEET)");
    ev_cmd->add_option("--baselines", ev.baselines, "Fixed guardian probabilities to report")
        ->delimiter(',');
    ev_cmd->add_flag("--no-cost-matched", ev.no_cost_matched,
                     "Skip the cost-matched random baseline");
    ev_cmd->add_flag("--binarize-guardian", ev.binarize,
                     "Fit and score the guardrail against the 0/1 guardian view");
    ev_cmd->add_flag("--exhaustive", ev.exhaustive, "Enumerate every split (small fixtures)");
    ev_cmd->add_option("--jobs", ev.jobs, "Worker threads for trials");
    ev_cmd->add_option("--out-table", ev.out_table, "Report table path (tsv)");
    ev_cmd->add_option("--out-frontier", ev.out_frontier, "Frontier records path (jsonl)");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Synthetic-family convergence study");
    sim_cmd->add_option("--alpha", sim.alpha, "Risk budget");
    sim_cmd->add_option("--n-list", sim.n_list, "Calibration sizes")->delimiter(',');
    sim_cmd->add_option("--reps", sim.reps, "Replications per size");
    sim_cmd->add_option("--family", sim.family, "Breakpoint family: uniform or beta:a,b");
    sim_cmd->add_option("--lambda-max", sim.lambda_max, "Threshold range upper end");
    sim_cmd->add_option("--b", sim.b, "Loss bound B");
    sim_cmd->add_option("--grid-points", sim.grid_points, "Grid resolution");
    sim_cmd->add_option("--seed", sim.seed, "Master seed");
    sim_cmd->add_flag("--assert-rate", sim.assert_rate, "Exit nonzero unless the regret slope passes");
    sim_cmd->add_option("--slope-bound", sim.slope_bound, "Slope bound for --assert-rate");
    sim_cmd->add_option("--out", sim.out, "Convergence report path (tsv)");

    try {
        std::vector<const char*> argv;
        argv.push_back("riskroute");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalidInput;
    }

    try {
        if (cal_cmd->parsed()) return cmd_calibrate(cal);
        if (rt_cmd->parsed()) return cmd_route(rt);
        if (ev_cmd->parsed()) return cmd_evaluate(ev);
        if (sim_cmd->parsed()) return cmd_simulate(sim);
    } catch (const BudgetInfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasibleBudget;
    } catch (const InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return kExitInvalidInput;
}

}  // namespace riskroute

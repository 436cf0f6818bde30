#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskroute/calibrate.hpp"
#include "riskroute/costmodel.hpp"
#include "riskroute/route.hpp"
#include "riskroute/rng.hpp"
#include "riskroute/types.hpp"

namespace riskroute {

/// Maps an instance to its stratum (e.g. a subject) for balanced splits.
using StratumKeyFn = std::function<std::string(const ScoredInstance&)>;

struct TrialConfig {
    std::size_t trials = 30;
    std::size_t calib_size = 400;
    std::size_t eval_size = 0;  // 0 = everything left after calibration
    std::vector<double> alphas;
    double loss_bound_b = 1.0;
    LambdaGrid grid;
    RouteVariant variant = RouteVariant::restricted;
    std::uint64_t seed = 0;

    /// Balanced per-stratum draws instead of a plain shuffle.
    std::optional<StratumKeyFn> stratify;

    /// Enumerate every calib/eval split of the dataset instead of sampling;
    /// `trials` is ignored. Intended for small oracle fixtures.
    bool exhaustive = false;

    /// Fit and score the guardrail against the 0/1 guardian view while
    /// decisions still act on the raw guardian scores.
    bool binarize_guardian = false;

    std::vector<double> fixed_router_qs;  // extra fixed-probability baselines
    bool cost_matched_baseline = true;
    std::optional<PriceSheet> prices;
    std::size_t jobs = 1;
};

enum class UtilityKind { accuracy, helpful_match, none };
enum class GuardrailKind { guardian_regret, severity, none };

struct MetricStats {
    double mean = 0.0;
    double stdev = 0.0;       // sample standard deviation (ddof = 1)
    std::size_t count = 0;    // trials contributing
};

struct PolicyRow {
    std::string policy;            // "primary", "ca@0.10", "guardian", "random@0.5", ...
    std::optional<double> alpha;
    MetricStats utility;
    MetricStats guardrail;
    MetricStats cost_per_1000;
    MetricStats lambda_hat;
    MetricStats guardian_pct;      // 0..100
    double delta = 0.0;            // CA utility minus cost-matched-random utility
    bool has_delta = false;
    std::size_t infeasible_trials = 0;
};

struct TrialReport {
    std::vector<PolicyRow> rows;
    UtilityKind utility_kind = UtilityKind::none;
    GuardrailKind guardrail_kind = GuardrailKind::none;
    std::size_t trials = 0;
    std::size_t calib_size = 0;
    std::size_t eval_size = 0;
};

/// Repeated calibration/evaluation splits: per trial fit lambda-hat for each
/// alpha, route the held-out split, and aggregate mean +- std per policy.
TrialReport run_trials(const std::vector<ScoredInstance>& dataset, const TrialConfig& config);

double accuracy_metric(std::span<const RoutingDecision> decisions,
                       std::span<const ScoredInstance> instances);

/// Mean excess severity of the chosen action over the safest available one.
double severity_loss_metric(std::span<const RoutingDecision> decisions,
                            std::span<const ScoredInstance> instances);

double helpful_match_metric(std::span<const RoutingDecision> decisions,
                            std::span<const ScoredInstance> instances);

struct RandomRouterResult {
    double q = 0.0;
    MetricStats utility;
    MetricStats guardrail;
    MetricStats cost_per_1000;
    MetricStats guardian_pct;
    double realized_cost_per_instance = 0.0;  // mean over trials
};

/// Routes each instance to the guardian with probability q, re-drawn per
/// question per trial.
RandomRouterResult random_router_fixed(const std::vector<ScoredInstance>& dataset,
                                       const std::optional<PriceSheet>& prices, double q,
                                       std::size_t trials, std::uint64_t seed,
                                       bool binarize_guardian = false);

/// Solves q * cost_G + (1-q) * cost_P = ca_cost (per-instance averages over
/// the dataset) and simulates that mixture. Throws when ca_cost falls outside
/// the [cost_P, cost_G] bracket.
RandomRouterResult random_router_cost_matched(const std::vector<ScoredInstance>& dataset,
                                              const PriceSheet& prices,
                                              double ca_cost_per_instance, std::size_t trials,
                                              std::uint64_t seed, bool binarize_guardian = false);

/// Balanced draw: floor(n_total/strata) items per stratum, remainder spread
/// at random, then a uniform split of the draw into calib/eval.
std::pair<std::vector<ScoredInstance>, std::vector<ScoredInstance>> stratified_split(
    const std::vector<ScoredInstance>& dataset, const StratumKeyFn& key, std::size_t calib_size,
    std::size_t eval_size, SplitMix64& rng);

/// id text before the first `delim`, or the whole id when absent.
StratumKeyFn id_prefix_key(char delim = '/');

}  // namespace riskroute

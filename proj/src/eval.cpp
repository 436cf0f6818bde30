#include "riskroute/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "riskroute/core.hpp"
#include "riskroute/errors.hpp"

namespace riskroute {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::uint64_t kStreamTrialSplit = 1;
constexpr std::uint64_t kStreamFixedRouter = 2;
constexpr std::uint64_t kStreamCostMatched = 3;

struct DatasetTraits {
    UtilityKind utility = UtilityKind::none;
    GuardrailKind guardrail = GuardrailKind::none;
    bool has_guardian = false;
    bool has_cost_tokens = false;  // every leg needed for all cost formulas
};

DatasetTraits detect_traits(std::span<const ScoredInstance> dataset) {
    DatasetTraits traits;
    bool all_correct = true;
    bool all_helpful = true;
    bool all_sev = true;
    bool all_guardian = true;
    bool all_tokens = true;
    for (const auto& s : dataset) {
        all_correct &= s.labels.correct_index.has_value();
        all_helpful &= s.labels.helpful_index.has_value();
        all_sev &= s.labels.severities.has_value();
        all_guardian &= s.guardian_scores.has_value();
        all_tokens &= s.tokens && s.tokens->primary_in && s.tokens->primary_out &&
                      s.tokens->guardian_in && s.tokens->guardian_out && s.tokens->full_in;
    }
    traits.utility = all_correct    ? UtilityKind::accuracy
                     : all_helpful ? UtilityKind::helpful_match
                                   : UtilityKind::none;
    traits.guardrail = all_sev        ? GuardrailKind::severity
                       : all_guardian ? GuardrailKind::guardian_regret
                                      : GuardrailKind::none;
    traits.has_guardian = all_guardian;
    traits.has_cost_tokens = all_tokens;
    return traits;
}

RoutingDecision primary_only_decision(const ScoredInstance& s) {
    RoutingDecision d;
    d.chosen_index = argmax_index(s.primary_scores.values);
    d.actor = Actor::primary;
    d.candidate_count = 1;
    d.action_count = s.action_count();
    d.menu_count = 1;
    d.deferred = false;
    return d;
}

RoutingDecision guardian_only_decision(const ScoredInstance& s) {
    RoutingDecision d;
    d.chosen_index = argmax_index(s.guardian_scores->values);
    d.actor = Actor::guardian;
    d.candidate_count = s.action_count();
    d.action_count = s.action_count();
    d.menu_count = s.action_count();
    d.deferred = true;
    return d;
}

double utility_of(UtilityKind kind, std::span<const RoutingDecision> decisions,
                  std::span<const ScoredInstance> instances) {
    switch (kind) {
        case UtilityKind::accuracy: return accuracy_metric(decisions, instances);
        case UtilityKind::helpful_match: return helpful_match_metric(decisions, instances);
        case UtilityKind::none: return kNaN;
    }
    return kNaN;
}

/// Mean shortfall of the chosen action's guardian score below the guardian's
/// best, measured against the supplied guardian view (raw or binarized).
double guardian_regret(std::span<const RoutingDecision> decisions,
                       std::span<const ScoreVector> guardian_view) {
    double sum = 0.0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        const auto& g = guardian_view[i].values;
        const double best = *std::max_element(g.begin(), g.end());
        sum += best - g[decisions[i].chosen_index];
    }
    return sum / static_cast<double>(decisions.size());
}

double guardrail_of(GuardrailKind kind, std::span<const RoutingDecision> decisions,
                    std::span<const ScoredInstance> instances,
                    std::span<const ScoreVector> guardian_view) {
    switch (kind) {
        case GuardrailKind::severity: return severity_loss_metric(decisions, instances);
        case GuardrailKind::guardian_regret: return guardian_regret(decisions, guardian_view);
        case GuardrailKind::none: return kNaN;
    }
    return kNaN;
}

enum class CostRule { routed, primary_only, guardian_only, by_actor };

double mean_cost(CostRule rule, std::span<const RoutingDecision> decisions,
                 std::span<const ScoredInstance> instances,
                 const std::optional<PriceSheet>& prices, bool have_tokens) {
    if (!prices || !have_tokens) return kNaN;
    Picodollars total = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const TokenCounts& tokens = *instances[i].tokens;
        switch (rule) {
            case CostRule::routed:
                total += routed_cost_pico(tokens, *prices, decisions[i]);
                break;
            case CostRule::primary_only:
                total += single_cost_pico(tokens, *prices, Model::primary);
                break;
            case CostRule::guardian_only:
                total += single_cost_pico(tokens, *prices, Model::guardian);
                break;
            case CostRule::by_actor:
                total += single_cost_pico(tokens, *prices,
                                          decisions[i].actor == Actor::guardian ? Model::guardian
                                                                                : Model::primary);
                break;
        }
    }
    return to_dollars(total) / static_cast<double>(instances.size());
}

double deferred_pct(std::span<const RoutingDecision> decisions) {
    std::size_t k = 0;
    for (const auto& d : decisions) k += d.deferred ? 1 : 0;
    return 100.0 * static_cast<double>(k) / static_cast<double>(decisions.size());
}

struct TrialCell {
    bool included = false;
    double utility = kNaN;
    double guardrail = kNaN;
    double cost_per_instance = kNaN;
    double lambda_hat = kNaN;
    double guardian_pct = kNaN;
};

MetricStats stats_over(const std::vector<TrialCell>& cells, double TrialCell::* field) {
    MetricStats out;
    std::vector<double> xs;
    xs.reserve(cells.size());
    for (const auto& c : cells) {
        if (c.included) xs.push_back(c.*field);
    }
    out.count = xs.size();
    if (xs.empty()) {
        out.mean = kNaN;
        out.stdev = kNaN;
        return out;
    }
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

MetricStats scale(MetricStats s, double factor) {
    s.mean *= factor;
    s.stdev *= factor;
    return s;
}

std::uint64_t binomial_checked(std::size_t n, std::size_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // c * (n - k + i) / i is exact at every step
        if (c > cap * i / (n - k + i)) return cap + 1;
        c = c * (n - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

std::vector<std::vector<std::size_t>> all_combinations(std::size_t n, std::size_t k) {
    constexpr std::uint64_t kCap = 200000;
    const std::uint64_t count = binomial_checked(n, k, kCap);
    if (count > kCap) {
        throw InvalidInputError("exhaustive split enumeration too large (over " +
                                std::to_string(kCap) + " splits)");
    }
    std::vector<std::vector<std::size_t>> out;
    out.reserve(count);
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;
    while (true) {
        out.push_back(combo);
        // advance to the next lexicographic combination
        std::size_t i = k;
        while (i > 0 && combo[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++combo[i - 1];
        for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
    return out;
}

std::vector<ScoreVector> guardian_view_of(std::span<const ScoredInstance> instances,
                                          bool binarize) {
    std::vector<ScoreVector> view;
    view.reserve(instances.size());
    for (const auto& s : instances) {
        if (!s.guardian_scores) {
            view.push_back(ScoreVector{std::vector<double>(s.action_count(), 0.0), false});
        } else if (binarize) {
            view.push_back(*binarize_guardian(s).guardian_scores);
        } else {
            view.push_back(*s.guardian_scores);
        }
    }
    return view;
}

struct PolicyPlan {
    std::string name;
    std::optional<double> alpha;  // CA rows
    std::optional<double> q;      // fixed random rows
    enum class Kind { primary, ca, guardian, fixed_random } kind;
};

}  // namespace

double accuracy_metric(std::span<const RoutingDecision> decisions,
                       std::span<const ScoredInstance> instances) {
    if (decisions.size() != instances.size() || decisions.empty()) {
        throw InvalidInputError("accuracy_metric: decisions and instances must align and be non-empty");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (!instances[i].labels.correct_index) {
            throw InvalidInputError("accuracy_metric: instance '" + instances[i].id +
                                    "' has no correct_index");
        }
        if (decisions[i].chosen_index ==
            static_cast<std::size_t>(*instances[i].labels.correct_index)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(decisions.size());
}

double severity_loss_metric(std::span<const RoutingDecision> decisions,
                            std::span<const ScoredInstance> instances) {
    if (decisions.size() != instances.size() || decisions.empty()) {
        throw InvalidInputError("severity_loss_metric: decisions and instances must align and be non-empty");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (!instances[i].labels.severities) {
            throw InvalidInputError("severity_loss_metric: instance '" + instances[i].id +
                                    "' has no severities");
        }
        const auto& sev = *instances[i].labels.severities;
        const int lowest = *std::min_element(sev.begin(), sev.end());
        sum += static_cast<double>(sev[decisions[i].chosen_index] - lowest);
    }
    return sum / static_cast<double>(decisions.size());
}

double helpful_match_metric(std::span<const RoutingDecision> decisions,
                            std::span<const ScoredInstance> instances) {
    if (decisions.size() != instances.size() || decisions.empty()) {
        throw InvalidInputError("helpful_match_metric: decisions and instances must align and be non-empty");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (!instances[i].labels.helpful_index) {
            throw InvalidInputError("helpful_match_metric: instance '" + instances[i].id +
                                    "' has no helpful_index");
        }
        if (decisions[i].chosen_index ==
            static_cast<std::size_t>(*instances[i].labels.helpful_index)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(decisions.size());
}

StratumKeyFn id_prefix_key(char delim) {
    return [delim](const ScoredInstance& s) {
        const auto pos = s.id.find(delim);
        return pos == std::string::npos ? s.id : s.id.substr(0, pos);
    };
}

std::pair<std::vector<ScoredInstance>, std::vector<ScoredInstance>> stratified_split(
    const std::vector<ScoredInstance>& dataset, const StratumKeyFn& key, std::size_t calib_size,
    std::size_t eval_size, SplitMix64& rng) {
    const std::size_t n_total = calib_size + eval_size;
    if (n_total == 0) throw InvalidInputError("stratified_split: requested empty split");
    if (n_total > dataset.size()) {
        throw InvalidInputError("stratified_split: requested " + std::to_string(n_total) +
                                " items from " + std::to_string(dataset.size()));
    }

    // Key-sorted strata keep the draw independent of dataset order quirks.
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < dataset.size(); ++i) strata[key(dataset[i])].push_back(i);

    const std::size_t per_stratum = n_total / strata.size();
    std::vector<std::size_t> taken;
    std::vector<std::size_t> leftover;
    taken.reserve(n_total);
    for (auto& [name, members] : strata) {
        shuffle(members, rng);
        const std::size_t take = std::min(per_stratum, members.size());
        taken.insert(taken.end(), members.begin(), members.begin() + take);
        leftover.insert(leftover.end(), members.begin() + take, members.end());
    }
    shuffle(leftover, rng);
    const std::size_t remainder = n_total - taken.size();
    taken.insert(taken.end(), leftover.begin(), leftover.begin() + remainder);

    shuffle(taken, rng);
    std::pair<std::vector<ScoredInstance>, std::vector<ScoredInstance>> out;
    out.first.reserve(calib_size);
    out.second.reserve(eval_size);
    for (std::size_t i = 0; i < calib_size; ++i) out.first.push_back(dataset[taken[i]]);
    for (std::size_t i = calib_size; i < n_total; ++i) out.second.push_back(dataset[taken[i]]);
    return out;
}

namespace {

RandomRouterResult run_random_router(const std::vector<ScoredInstance>& dataset,
                                     const std::optional<PriceSheet>& prices, double q,
                                     std::size_t trials, std::uint64_t seed,
                                     bool binarize_guardian_flag) {
    if (dataset.empty()) throw InvalidInputError("random router: empty dataset");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidInputError("random router: q must be in [0,1]");
    if (trials == 0) throw InvalidInputError("random router: trials must be >= 1");
    const DatasetTraits traits = detect_traits(dataset);
    if (q > 0.0 && !traits.has_guardian) {
        throw InvalidInputError("random router: dataset lacks guardian scores");
    }
    const auto guardian_view = guardian_view_of(dataset, binarize_guardian_flag &&
                                                             traits.guardrail ==
                                                                 GuardrailKind::guardian_regret);

    std::vector<TrialCell> cells(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        SplitMix64 rng(derive_seed(seed, kStreamFixedRouter, t));
        std::vector<RoutingDecision> decisions;
        decisions.reserve(dataset.size());
        for (const auto& s : dataset) {
            decisions.push_back(bernoulli(rng, q) ? guardian_only_decision(s)
                                                  : primary_only_decision(s));
        }
        TrialCell& cell = cells[t];
        cell.included = true;
        cell.utility = utility_of(traits.utility, decisions, dataset);
        cell.guardrail = guardrail_of(traits.guardrail, decisions, dataset, guardian_view);
        cell.cost_per_instance =
            mean_cost(CostRule::by_actor, decisions, dataset, prices, traits.has_cost_tokens);
        cell.guardian_pct = deferred_pct(decisions);
    }

    RandomRouterResult result;
    result.q = q;
    result.utility = stats_over(cells, &TrialCell::utility);
    result.guardrail = stats_over(cells, &TrialCell::guardrail);
    result.cost_per_1000 = scale(stats_over(cells, &TrialCell::cost_per_instance), 1000.0);
    result.guardian_pct = stats_over(cells, &TrialCell::guardian_pct);
    result.realized_cost_per_instance = stats_over(cells, &TrialCell::cost_per_instance).mean;
    return result;
}

}  // namespace

RandomRouterResult random_router_fixed(const std::vector<ScoredInstance>& dataset,
                                       const std::optional<PriceSheet>& prices, double q,
                                       std::size_t trials, std::uint64_t seed,
                                       bool binarize_guardian_flag) {
    return run_random_router(dataset, prices, q, trials, seed, binarize_guardian_flag);
}

RandomRouterResult random_router_cost_matched(const std::vector<ScoredInstance>& dataset,
                                              const PriceSheet& prices,
                                              double ca_cost_per_instance, std::size_t trials,
                                              std::uint64_t seed, bool binarize_guardian_flag) {
    if (dataset.empty()) throw InvalidInputError("cost-matched router: empty dataset");
    const DatasetTraits traits = detect_traits(dataset);
    if (!traits.has_cost_tokens) {
        throw InvalidInputError("cost-matched router: dataset lacks token counts");
    }

    Picodollars sum_p = 0;
    Picodollars sum_g = 0;
    for (const auto& s : dataset) {
        sum_p += single_cost_pico(*s.tokens, prices, Model::primary);
        sum_g += single_cost_pico(*s.tokens, prices, Model::guardian);
    }
    const double cost_p = to_dollars(sum_p) / static_cast<double>(dataset.size());
    const double cost_g = to_dollars(sum_g) / static_cast<double>(dataset.size());

    double q = 0.0;
    if (cost_g == cost_p) {
        if (std::abs(ca_cost_per_instance - cost_p) > 1e-12) {
            throw InvalidInputError("cost-matched router: target cost outside the [primary, guardian] bracket");
        }
    } else {
        q = (ca_cost_per_instance - cost_p) / (cost_g - cost_p);
        if (q < -1e-12 || q > 1.0 + 1e-12) {
            throw InvalidInputError("cost-matched router: target cost outside the [primary, guardian] bracket");
        }
        q = std::clamp(q, 0.0, 1.0);
    }

    RandomRouterResult result =
        run_random_router(dataset, prices, q, trials, seed, binarize_guardian_flag);
    result.q = q;
    return result;
}

TrialReport run_trials(const std::vector<ScoredInstance>& dataset, const TrialConfig& config) {
    if (dataset.empty()) throw InvalidInputError("run_trials: empty dataset");
    for (const auto& s : dataset) validate_instance(s);
    validate_grid(config.grid);
    if (config.calib_size == 0) throw InvalidInputError("run_trials: calib_size must be >= 1");

    const std::size_t n_data = dataset.size();
    if (config.calib_size >= n_data) {
        throw InvalidInputError("run_trials: calib_size " + std::to_string(config.calib_size) +
                                " leaves no evaluation data (" + std::to_string(n_data) +
                                " instances)");
    }
    const std::size_t eval_size = (config.exhaustive || config.eval_size == 0)
                                      ? n_data - config.calib_size
                                      : config.eval_size;
    if (config.calib_size + eval_size > n_data) {
        throw InvalidInputError("run_trials: calib_size + eval_size exceeds the dataset (" +
                                std::to_string(n_data) + " instances)");
    }

    const DatasetTraits traits = detect_traits(dataset);
    if (!traits.has_guardian) {
        throw InvalidInputError("run_trials: every instance needs guardian scores");
    }
    if (config.binarize_guardian && traits.utility != UtilityKind::accuracy) {
        throw InvalidInputError("run_trials: binarize_guardian requires correct_index labels");
    }

    std::vector<std::vector<std::size_t>> combos;
    std::size_t n_trials = config.trials;
    if (config.exhaustive) {
        combos = all_combinations(n_data, config.calib_size);
        n_trials = combos.size();
    }
    if (n_trials == 0) throw InvalidInputError("run_trials: trials must be >= 1");

    // Fixed policy order: primary, ca@alpha..., guardian, random@q...
    std::vector<PolicyPlan> plans;
    plans.push_back({"primary", std::nullopt, std::nullopt, PolicyPlan::Kind::primary});
    for (double alpha : config.alphas) {
        char label[32];
        std::snprintf(label, sizeof(label), "ca@%g", alpha);
        plans.push_back({label, alpha, std::nullopt, PolicyPlan::Kind::ca});
    }
    plans.push_back({"guardian", std::nullopt, std::nullopt, PolicyPlan::Kind::guardian});

    std::vector<std::vector<TrialCell>> cells(plans.size(), std::vector<TrialCell>(n_trials));

    auto run_one_trial = [&](std::size_t t) {
        SplitMix64 rng(derive_seed(config.seed, kStreamTrialSplit, t));

        std::vector<ScoredInstance> calib;
        std::vector<ScoredInstance> eval;
        if (config.exhaustive) {
            const auto& chosen = combos[t];
            calib.reserve(config.calib_size);
            eval.reserve(eval_size);
            std::size_t c = 0;
            for (std::size_t i = 0; i < n_data; ++i) {
                if (c < chosen.size() && chosen[c] == i) {
                    calib.push_back(dataset[i]);
                    ++c;
                } else {
                    eval.push_back(dataset[i]);
                }
            }
        } else if (config.stratify) {
            std::tie(calib, eval) =
                stratified_split(dataset, *config.stratify, config.calib_size, eval_size, rng);
        } else {
            std::vector<std::size_t> order(n_data);
            for (std::size_t i = 0; i < n_data; ++i) order[i] = i;
            shuffle(order, rng);
            calib.reserve(config.calib_size);
            eval.reserve(eval_size);
            for (std::size_t i = 0; i < config.calib_size; ++i) calib.push_back(dataset[order[i]]);
            for (std::size_t i = 0; i < eval_size; ++i) {
                eval.push_back(dataset[order[config.calib_size + i]]);
            }
        }

        // Loss view: what the guardrail is fitted and scored against.
        std::vector<ScoredInstance> calib_loss_view;
        if (config.binarize_guardian) {
            calib_loss_view.reserve(calib.size());
            for (const auto& s : calib) calib_loss_view.push_back(binarize_guardian(s));
        }
        const std::vector<ScoredInstance>& fit_set =
            config.binarize_guardian ? calib_loss_view : calib;
        const auto eval_guardian_view = guardian_view_of(
            eval, config.binarize_guardian && traits.guardrail == GuardrailKind::guardian_regret);

        std::vector<RoutingDecision> decisions;
        decisions.reserve(eval.size());
        for (std::size_t p = 0; p < plans.size(); ++p) {
            const PolicyPlan& plan = plans[p];
            TrialCell& cell = cells[p][t];
            decisions.clear();

            double lambda_hat = kNaN;
            if (plan.kind == PolicyPlan::Kind::ca) {
                RiskBudget budget{*plan.alpha, config.loss_bound_b};
                try {
                    const CalibrationResult fit = fit_lambda(fit_set, budget, config.grid);
                    if (!fit.feasible) continue;  // cell excluded, counted as infeasible
                    lambda_hat = fit.lambda_hat;
                } catch (const BudgetInfeasibleError&) {
                    continue;
                }
                const RoutingPolicy policy{lambda_hat, config.variant};
                for (const auto& s : eval) decisions.push_back(decide(s, policy));
            } else if (plan.kind == PolicyPlan::Kind::primary) {
                for (const auto& s : eval) decisions.push_back(primary_only_decision(s));
            } else {
                for (const auto& s : eval) decisions.push_back(guardian_only_decision(s));
            }

            cell.included = true;
            cell.utility = utility_of(traits.utility, decisions, eval);
            cell.guardrail = guardrail_of(traits.guardrail, decisions, eval, eval_guardian_view);
            cell.lambda_hat = lambda_hat;
            cell.guardian_pct = plan.kind == PolicyPlan::Kind::primary    ? 0.0
                                : plan.kind == PolicyPlan::Kind::guardian ? 100.0
                                                                          : deferred_pct(decisions);
            const CostRule rule = plan.kind == PolicyPlan::Kind::ca         ? CostRule::routed
                                  : plan.kind == PolicyPlan::Kind::primary ? CostRule::primary_only
                                                                           : CostRule::guardian_only;
            cell.cost_per_instance =
                mean_cost(rule, decisions, eval, config.prices, traits.has_cost_tokens);
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, n_trials));
    if (jobs == 1) {
        for (std::size_t t = 0; t < n_trials; ++t) run_one_trial(t);
    } else {
        std::vector<std::thread> workers;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= n_trials) return;
                    try {
                        run_one_trial(t);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
        if (failure) std::rethrow_exception(failure);
    }

    TrialReport report;
    report.utility_kind = traits.utility;
    report.guardrail_kind = traits.guardrail;
    report.trials = n_trials;
    report.calib_size = config.calib_size;
    report.eval_size = eval_size;

    for (std::size_t p = 0; p < plans.size(); ++p) {
        PolicyRow row;
        row.policy = plans[p].name;
        row.alpha = plans[p].alpha;
        row.utility = stats_over(cells[p], &TrialCell::utility);
        row.guardrail = stats_over(cells[p], &TrialCell::guardrail);
        row.cost_per_1000 = scale(stats_over(cells[p], &TrialCell::cost_per_instance), 1000.0);
        row.lambda_hat = stats_over(cells[p], &TrialCell::lambda_hat);
        row.guardian_pct = stats_over(cells[p], &TrialCell::guardian_pct);
        row.infeasible_trials = n_trials - row.utility.count;
        report.rows.push_back(std::move(row));
    }

    // Cost-matched baselines close the loop: Delta on each feasible CA row.
    if (config.cost_matched_baseline && config.prices && traits.has_cost_tokens) {
        for (std::size_t a = 0; a < config.alphas.size(); ++a) {
            PolicyRow& ca_row = report.rows[1 + a];
            if (ca_row.utility.count == 0) continue;
            const double target = ca_row.cost_per_1000.mean / 1000.0;
            RandomRouterResult matched;
            try {
                matched = random_router_cost_matched(
                    dataset, *config.prices, target, n_trials,
                    derive_seed(config.seed, kStreamCostMatched, a), config.binarize_guardian);
            } catch (const InvalidInputError&) {
                continue;  // target fell outside the bracket; row keeps has_delta=false
            }
            PolicyRow row;
            char label[48];
            std::snprintf(label, sizeof(label), "random-cost-matched@%g", config.alphas[a]);
            row.policy = label;
            row.alpha = config.alphas[a];
            row.utility = matched.utility;
            row.guardrail = matched.guardrail;
            row.cost_per_1000 = matched.cost_per_1000;
            row.lambda_hat = MetricStats{kNaN, kNaN, 0};
            row.guardian_pct = matched.guardian_pct;
            report.rows.push_back(std::move(row));
            ca_row.delta = ca_row.utility.mean - matched.utility.mean;
            ca_row.has_delta = true;
        }
    }

    for (std::size_t qi = 0; qi < config.fixed_router_qs.size(); ++qi) {
        const double q = config.fixed_router_qs[qi];
        const RandomRouterResult fixed = random_router_fixed(
            dataset, config.prices, q, n_trials,
            derive_seed(config.seed, kStreamFixedRouter + 100, qi), config.binarize_guardian);
        PolicyRow row;
        char label[32];
        std::snprintf(label, sizeof(label), "random@%g", q);
        row.policy = label;
        row.utility = fixed.utility;
        row.guardrail = fixed.guardrail;
        row.cost_per_1000 = fixed.cost_per_1000;
        row.lambda_hat = MetricStats{kNaN, kNaN, 0};
        row.guardian_pct = fixed.guardian_pct;
        report.rows.push_back(std::move(row));
    }

    return report;
}

}  // namespace riskroute

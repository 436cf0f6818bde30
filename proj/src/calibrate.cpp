#include "riskroute/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "riskroute/errors.hpp"

namespace riskroute {

namespace {

void validate_budget(const RiskBudget& budget) {
    if (!(budget.alpha > 0.0) || !(budget.alpha < 1.0)) {
        throw InvalidInputError("risk budget alpha must lie in (0, 1)");
    }
    if (!(budget.loss_bound_b > 0.0) || !std::isfinite(budget.loss_bound_b)) {
        throw InvalidInputError("loss bound B must be positive and finite");
    }
}

/// The CRC selection inequality at sample size n.
bool inflated_risk_ok(double risk, std::size_t n, const RiskBudget& budget) {
    const double nn = static_cast<double>(n);
    return (nn * risk + budget.loss_bound_b) / (nn + 1.0) <= budget.alpha;
}

double largest_primary_range(std::span<const ScoredInstance> samples) {
    double range = 0.0;
    for (const auto& s : samples) {
        const auto& p = s.primary_scores.values;
        const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
        range = std::max(range, *hi - *lo);
    }
    return range;
}

}  // namespace

void validate_grid(const LambdaGrid& grid) {
    if (grid.count < 2) throw InvalidInputError("lambda grid needs at least 2 points");
    if (!(grid.step > 0.0) || !std::isfinite(grid.step)) {
        throw InvalidInputError("lambda grid step must be positive and finite");
    }
    if (!(grid.start >= 0.0) || !std::isfinite(grid.start)) {
        throw InvalidInputError("lambda grid start must be >= 0 and finite");
    }
}

double empirical_risk(std::span<const ScoredInstance> samples, double lambda) {
    if (samples.empty()) throw InvalidInputError("empirical_risk: empty sample list");
    double sum = 0.0;
    for (const auto& s : samples) sum += residual_loss(s, lambda);
    return sum / static_cast<double>(samples.size());
}

std::vector<std::pair<double, double>> risk_curve(std::span<const ScoredInstance> samples,
                                                  const LambdaGrid& grid) {
    validate_grid(grid);
    if (samples.empty()) throw InvalidInputError("risk_curve: empty sample list");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double lambda = grid.point(i);
        curve.emplace_back(lambda, empirical_risk(samples, lambda));
    }
    return curve;
}

std::size_t min_calibration_size(const RiskBudget& budget) {
    validate_budget(budget);
    // Smallest n with B/(n+1) <= alpha.
    auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(budget.loss_bound_b / budget.alpha - 1.0)));
    while (budget.loss_bound_b / (static_cast<double>(n) + 1.0) > budget.alpha) ++n;
    while (n > 1 && budget.loss_bound_b / static_cast<double>(n) <= budget.alpha) --n;
    return n;
}

CalibrationResult fit_lambda(std::span<const ScoredInstance> samples, const RiskBudget& budget,
                             const LambdaGrid& grid) {
    validate_budget(budget);
    validate_grid(grid);
    if (samples.empty()) throw InvalidInputError("fit_lambda: empty sample list");

    const std::size_t n = samples.size();
    if (!inflated_risk_ok(0.0, n, budget)) {
        throw BudgetInfeasibleError(budget.alpha, budget.loss_bound_b, n, min_calibration_size(budget));
    }

    CalibrationResult result;
    result.n = n;
    result.budget = budget;

    double max_loss = 0.0;
    for (const auto& s : samples) max_loss = std::max(max_loss, residual_loss(s, grid.start));
    result.max_loss_observed = max_loss;
    result.loss_exceeds_bound = max_loss > budget.loss_bound_b;

    std::optional<std::size_t> hit;
    result.risk_curve.reserve(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double lambda = grid.point(i);
        const double risk = empirical_risk(samples, lambda);
        result.risk_curve.emplace_back(lambda, risk);
        if (!hit && inflated_risk_ok(risk, n, budget)) hit = i;
    }

    if (!hit && grid.auto_extend) {
        // Risk hits zero once lambda covers the widest primary-score range,
        // and the budget check above already guarantees zero risk qualifies.
        const double target = largest_primary_range(samples);
        std::size_t i = grid.count;
        while (!hit) {
            const double lambda = grid.point(i);
            const double risk = empirical_risk(samples, lambda);
            result.risk_curve.emplace_back(lambda, risk);
            if (inflated_risk_ok(risk, n, budget)) {
                hit = i;
            } else if (lambda > target + grid.step) {
                break;  // cannot happen for well-formed losses; stop rather than spin
            }
            ++i;
        }
    }

    if (hit) {
        result.feasible = true;
        result.lambda_hat = result.risk_curve[*hit].first;
    } else {
        result.feasible = false;
        result.lambda_hat = result.risk_curve.back().first;
    }
    return result;
}

FitPoint fit_lambda_point(std::span<const ScoredInstance> samples, const RiskBudget& budget,
                          const LambdaGrid& grid) {
    validate_budget(budget);
    validate_grid(grid);
    if (samples.empty()) throw InvalidInputError("fit_lambda_point: empty sample list");

    const std::size_t n = samples.size();
    if (!inflated_risk_ok(0.0, n, budget)) {
        throw BudgetInfeasibleError(budget.alpha, budget.loss_bound_b, n, min_calibration_size(budget));
    }

    const auto qualified = [&](std::size_t i) {
        return inflated_risk_ok(empirical_risk(samples, grid.point(i)), n, budget);
    };

    if (qualified(0)) return {grid.point(0), true};

    if (qualified(grid.count - 1)) {
        // invariant: qualified(hi), !qualified(lo)
        std::size_t lo = 0;
        std::size_t hi = grid.count - 1;
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (qualified(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if (qualified(hi) && !qualified(hi - 1)) return {grid.point(hi), true};
        // mean rounding broke monotonicity; defer to the reference scan
        const CalibrationResult full = fit_lambda(samples, budget, grid);
        return {full.lambda_hat, full.feasible};
    }

    if (grid.auto_extend) {
        const double target = largest_primary_range(samples);
        for (std::size_t i = grid.count;; ++i) {
            const double lambda = grid.point(i);
            if (qualified(i)) return {lambda, true};
            if (lambda > target + grid.step) break;
        }
    }
    return {grid.last(), false};
}

}  // namespace riskroute

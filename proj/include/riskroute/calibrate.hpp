#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "riskroute/core.hpp"
#include "riskroute/types.hpp"

namespace riskroute {

/// Evenly spaced threshold grid. Losses are step functions of lambda, so a
/// grid finer than the smallest score gap searches exactly.
struct LambdaGrid {
    double start = 0.0;
    double step = 0.01;
    std::size_t count = 101;
    /// Append further points (same step) until the grid covers the largest
    /// primary-score range seen in the calibration set.
    bool auto_extend = true;

    double point(std::size_t i) const { return start + step * static_cast<double>(i); }
    double last() const { return point(count - 1); }
};

void validate_grid(const LambdaGrid& grid);

struct CalibrationResult {
    double lambda_hat = 0.0;
    std::vector<std::pair<double, double>> risk_curve;  // (lambda, empirical risk)
    std::size_t n = 0;
    bool feasible = false;
    RiskBudget budget;
    // Diagnostics.
    double max_loss_observed = 0.0;          // largest per-sample loss at lambda = grid start
    bool loss_exceeds_bound = false;         // max_loss_observed > loss_bound_b
};

/// Mean residual loss over the sample at a fixed lambda. Accumulated in
/// sample order so results are bit-stable.
double empirical_risk(std::span<const ScoredInstance> samples, double lambda);

/// Empirical risk at every grid point; non-increasing in lambda.
std::vector<std::pair<double, double>> risk_curve(std::span<const ScoredInstance> samples,
                                                  const LambdaGrid& grid);

/// Smallest n for which a zero-risk threshold can satisfy the budget,
/// i.e. B/(n+1) <= alpha.
std::size_t min_calibration_size(const RiskBudget& budget);

/// Smallest grid point lambda with (n/(n+1)) * R_hat(lambda) + B/(n+1) <= alpha.
///
/// Throws BudgetInfeasibleError when B/(n+1) > alpha (no threshold can ever
/// qualify). When the budget is fine but no grid point qualifies and the grid
/// may not extend, returns feasible=false with lambda_hat at the grid end.
CalibrationResult fit_lambda(std::span<const ScoredInstance> samples,
                             const RiskBudget& budget,
                             const LambdaGrid& grid);

struct FitPoint {
    double lambda_hat = 0.0;
    bool feasible = false;
};

/// fit_lambda without materializing the risk curve. The empirical risk is
/// non-increasing in lambda, so the first qualifying grid point is found by
/// bisection over the same per-point evaluation the linear scan uses; the
/// result and its predecessor are re-checked and any inconsistency falls back
/// to the full scan. Intended for Monte Carlo loops over fine grids.
FitPoint fit_lambda_point(std::span<const ScoredInstance> samples, const RiskBudget& budget,
                          const LambdaGrid& grid);

}  // namespace riskroute

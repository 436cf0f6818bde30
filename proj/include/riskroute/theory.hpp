#pragma once

#include <cstdint>
#include <vector>

#include "riskroute/calibrate.hpp"
#include "riskroute/rng.hpp"
#include "riskroute/types.hpp"

namespace riskroute {

/// Synthetic distribution with everything known in closed form.
///
/// Per-instance losses are steps B * 1{lambda < d} with breakpoints d drawn
/// from Beta(a, b) scaled to [0, lambda_max], so the true risk is
/// R(lambda) = B * (1 - F(lambda)) — continuous, strictly decreasing, and
/// invertible. Utility is the simplest non-increasing Lipschitz curve,
/// U(lambda) = 1 - lambda / lambda_max with constant K = 1 / lambda_max.
struct SyntheticFamily {
    double beta_a = 2.0;
    double beta_b = 2.0;
    double lambda_max = 1.0;
    double loss_bound_b = 1.0;
    std::size_t grid_points = 1001;

    static SyntheticFamily uniform_breakpoints(double lambda_max = 1.0, double b = 1.0) {
        return SyntheticFamily{1.0, 1.0, lambda_max, b};
    }

    double utility(double lambda) const;
    double lipschitz_k() const { return 1.0 / lambda_max; }
    double true_risk(double lambda) const;        // B * (1 - F(lambda))
    double breakpoint_cdf(double x) const;
    double sample_breakpoint(SplitMix64& rng) const;

    /// Two actions scored so the residual loss is exactly B * 1{lambda < d}.
    ScoredInstance make_instance(double breakpoint) const;
    std::vector<ScoredInstance> sample_instances(std::size_t n, SplitMix64& rng) const;

    LambdaGrid grid() const;
};

/// inf{lambda : R(lambda) <= alpha}, found by bisection to 1e-9. Requires
/// alpha within the range of R.
double lambda_star(const SyntheticFamily& family, double alpha);

struct ConvergencePoint {
    std::size_t n = 0;
    double mean_regret = 0.0;    // U(lambda*) - U(lambda_hat), averaged
    double se_regret = 0.0;
    double mean_risk = 0.0;      // R(lambda_hat), averaged
    double se_risk = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergencePoint> points;
    double slope = 0.0;          // log-log fit of mean regret vs n
    bool slope_available = false;
    std::size_t reps = 0;
    double grid_step = 0.0;
    double lipschitz_k = 0.0;
    double lambda_star_value = 0.0;
};

/// For each n: fit lambda-hat on `reps` fresh calibration draws and record the
/// utility regret against lambda* plus the true risk at lambda-hat, then fit
/// the log-log regret slope across n.
ConvergenceReport convergence_study(const SyntheticFamily& family, double alpha,
                                    const std::vector<std::size_t>& n_list, std::size_t reps,
                                    std::uint64_t seed);

struct GuaranteeEstimate {
    double mean = 0.0;       // mean fresh-draw loss at lambda-hat
    double std_error = 0.0;
    std::size_t reps = 0;
};

/// Monte Carlo of the finite-sample guarantee: per rep fit on n draws, then
/// evaluate the loss of one fresh draw at the fitted threshold.
GuaranteeEstimate risk_guarantee_mc(const SyntheticFamily& family, double alpha, std::size_t n,
                                    std::size_t reps, std::uint64_t seed);

}  // namespace riskroute

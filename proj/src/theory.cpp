#include "riskroute/theory.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/beta.hpp>

#include "riskroute/errors.hpp"

namespace riskroute {

namespace {

constexpr std::uint64_t kStreamDraws = 11;

void validate_family(const SyntheticFamily& family) {
    if (!(family.beta_a > 0.0) || !(family.beta_b > 0.0)) {
        throw InvalidInputError("synthetic family: Beta parameters must be positive");
    }
    if (!(family.lambda_max > 0.0)) {
        throw InvalidInputError("synthetic family: lambda_max must be positive");
    }
    if (!(family.loss_bound_b > 0.0)) {
        throw InvalidInputError("synthetic family: loss bound must be positive");
    }
}

boost::math::beta_distribution<double> beta_of(const SyntheticFamily& family) {
    return boost::math::beta_distribution<double>(family.beta_a, family.beta_b);
}

}  // namespace

double SyntheticFamily::utility(double lambda) const {
    return 1.0 - lambda / lambda_max;
}

double SyntheticFamily::breakpoint_cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= lambda_max) return 1.0;
    return boost::math::cdf(beta_of(*this), x / lambda_max);
}

double SyntheticFamily::true_risk(double lambda) const {
    return loss_bound_b * (1.0 - breakpoint_cdf(lambda));
}

double SyntheticFamily::sample_breakpoint(SplitMix64& rng) const {
    const double u = uniform_double(rng);
    if (beta_a == 1.0 && beta_b == 1.0) return lambda_max * u;
    return lambda_max * boost::math::quantile(beta_of(*this), u);
}

ScoredInstance SyntheticFamily::make_instance(double breakpoint) const {
    // Two actions with a primary gap of exactly `breakpoint` and the guardian
    // mass on the runner-up give the step loss B * 1{lambda < breakpoint}.
    ScoredInstance s;
    s.id = "synthetic";
    s.actions = {"keep", "swap"};
    s.primary_scores = ScoreVector{{breakpoint, 0.0}, false};
    s.guardian_scores = ScoreVector{{0.0, loss_bound_b}, false};
    return s;
}

std::vector<ScoredInstance> SyntheticFamily::sample_instances(std::size_t n,
                                                              SplitMix64& rng) const {
    std::vector<ScoredInstance> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(make_instance(sample_breakpoint(rng)));
    return out;
}

LambdaGrid SyntheticFamily::grid() const {
    LambdaGrid g;
    g.start = 0.0;
    g.count = std::max<std::size_t>(grid_points, 2);
    g.step = lambda_max / static_cast<double>(g.count - 1);
    g.auto_extend = true;
    return g;
}

double lambda_star(const SyntheticFamily& family, double alpha) {
    validate_family(family);
    const double risk_at_zero = family.true_risk(0.0);
    const double risk_at_max = family.true_risk(family.lambda_max);
    if (alpha < risk_at_max || alpha > risk_at_zero) {
        throw InvalidInputError("lambda_star: alpha outside the range of the risk curve");
    }
    if (family.true_risk(0.0) <= alpha) return 0.0;

    // R is continuous and strictly decreasing: keep R(lo) > alpha >= R(hi).
    double lo = 0.0;
    double hi = family.lambda_max;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (family.true_risk(mid) <= alpha) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

ConvergenceReport convergence_study(const SyntheticFamily& family, double alpha,
                                    const std::vector<std::size_t>& n_list, std::size_t reps,
                                    std::uint64_t seed) {
    validate_family(family);
    if (n_list.empty()) throw InvalidInputError("convergence_study: empty n list");
    if (!std::is_sorted(n_list.begin(), n_list.end())) {
        throw InvalidInputError("convergence_study: n list must be increasing");
    }
    if (reps == 0) throw InvalidInputError("convergence_study: reps must be >= 1");

    const double star = lambda_star(family, alpha);
    const LambdaGrid grid = family.grid();
    const RiskBudget budget{alpha, family.loss_bound_b};

    ConvergenceReport report;
    report.reps = reps;
    report.grid_step = grid.step;
    report.lipschitz_k = family.lipschitz_k();
    report.lambda_star_value = star;

    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const std::size_t n = n_list[ni];
        double regret_sum = 0.0;
        double regret_sq_sum = 0.0;
        double risk_sum = 0.0;
        double risk_sq_sum = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            SplitMix64 rng(derive_seed(seed, kStreamDraws + ni, rep));
            const auto samples = family.sample_instances(n, rng);
            const FitPoint fit = fit_lambda_point(samples, budget, grid);
            const double regret = family.utility(star) - family.utility(fit.lambda_hat);
            regret_sum += regret;
            regret_sq_sum += regret * regret;
            const double risk = family.true_risk(fit.lambda_hat);
            risk_sum += risk;
            risk_sq_sum += risk * risk;
        }
        const auto std_error = [reps](double sum, double sq_sum) {
            if (reps < 2) return 0.0;
            const double var = (sq_sum - sum * sum / static_cast<double>(reps)) /
                               static_cast<double>(reps - 1);
            return std::sqrt(std::max(0.0, var) / static_cast<double>(reps));
        };
        ConvergencePoint point;
        point.n = n;
        point.mean_regret = regret_sum / static_cast<double>(reps);
        point.se_regret = std_error(regret_sum, regret_sq_sum);
        point.mean_risk = risk_sum / static_cast<double>(reps);
        point.se_risk = std_error(risk_sum, risk_sq_sum);
        report.points.push_back(point);
    }

    // Least-squares slope of log(mean regret) against log(n).
    std::vector<std::pair<double, double>> logs;
    for (const auto& p : report.points) {
        if (p.mean_regret > 0.0) logs.emplace_back(std::log(double(p.n)), std::log(p.mean_regret));
    }
    if (logs.size() >= 2 && reps >= 2) {
        double mx = 0.0;
        double my = 0.0;
        for (const auto& [x, y] : logs) {
            mx += x;
            my += y;
        }
        mx /= double(logs.size());
        my /= double(logs.size());
        double sxy = 0.0;
        double sxx = 0.0;
        for (const auto& [x, y] : logs) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        if (sxx > 0.0) {
            report.slope = sxy / sxx;
            report.slope_available = true;
        }
    }
    return report;
}

GuaranteeEstimate risk_guarantee_mc(const SyntheticFamily& family, double alpha, std::size_t n,
                                    std::size_t reps, std::uint64_t seed) {
    validate_family(family);
    if (n == 0) throw InvalidInputError("risk_guarantee_mc: n must be >= 1");
    if (reps == 0) throw InvalidInputError("risk_guarantee_mc: reps must be >= 1");

    const LambdaGrid grid = family.grid();
    const RiskBudget budget{alpha, family.loss_bound_b};

    double sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        SplitMix64 rng(derive_seed(seed, kStreamDraws, rep));
        const auto samples = family.sample_instances(n, rng);
        const FitPoint fit = fit_lambda_point(samples, budget, grid);
        const ScoredInstance fresh = family.make_instance(family.sample_breakpoint(rng));
        const double loss = residual_loss(fresh, fit.lambda_hat);
        sum += loss;
        sq_sum += loss * loss;
    }

    GuaranteeEstimate estimate;
    estimate.reps = reps;
    estimate.mean = sum / static_cast<double>(reps);
    if (reps >= 2) {
        const double var =
            (sq_sum - sum * sum / static_cast<double>(reps)) / static_cast<double>(reps - 1);
        estimate.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(reps));
    }
    return estimate;
}

}  // namespace riskroute

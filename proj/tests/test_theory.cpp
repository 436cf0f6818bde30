#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "riskroute/errors.hpp"
#include "riskroute/theory.hpp"
#include "testutil.hpp"

using namespace riskroute;

TEST_CASE("lambda_star inverts the closed-form risk curve") {
    const auto uniform = SyntheticFamily::uniform_breakpoints();  // R(l) = 1 - l
    CHECK(lambda_star(uniform, 0.3) == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(lambda_star(uniform, uniform.true_risk(0.0)) == 0.0);
    CHECK(lambda_star(uniform, uniform.true_risk(uniform.lambda_max)) ==
          doctest::Approx(uniform.lambda_max).epsilon(1e-8));

    CHECK_THROWS_AS(lambda_star(uniform, 1.5), InvalidInputError);
    CHECK_THROWS_AS(lambda_star(uniform, -0.1), InvalidInputError);
}

TEST_CASE("property: lambda_star after true_risk is the identity") {
    const SyntheticFamily family;  // Beta(2,2)
    SplitMix64 g(42);
    for (int iter = 0; iter < 200; ++iter) {
        const double lambda = 0.01 + 0.98 * uniform_double(g);
        const double alpha = family.true_risk(lambda);
        CHECK(lambda_star(family, alpha) == doctest::Approx(lambda).epsilon(1e-6));
    }
}

TEST_CASE("synthetic instances realize the step loss exactly") {
    const SyntheticFamily family;
    SplitMix64 g(7);
    for (int iter = 0; iter < 200; ++iter) {
        const double d = family.sample_breakpoint(g);
        const auto instance = family.make_instance(d);
        double prev = family.loss_bound_b;
        for (std::size_t i = 0; i < 101; ++i) {
            const double lambda = double(i) / 100.0;
            const double loss = residual_loss(instance, lambda);
            const double expected = lambda < d ? family.loss_bound_b : 0.0;
            CHECK(loss == expected);
            CHECK(loss <= prev);  // non-increasing
            prev = loss;
        }
    }
}

TEST_CASE("breakpoint sampling matches its CDF") {
    const SyntheticFamily family;
    SplitMix64 g(3);
    const std::size_t n = 20000;
    std::size_t below_half = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = family.sample_breakpoint(g);
        CHECK(d >= 0.0);
        CHECK(d <= family.lambda_max);
        below_half += d < 0.5 ? 1 : 0;
    }
    // Beta(2,2) median is 0.5
    CHECK(double(below_half) / double(n) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("convergence study: regret shrinks, risk sandwich holds") {
    const auto family = SyntheticFamily::uniform_breakpoints();
    const double alpha = 0.3;
    const std::vector<std::size_t> sizes{50, 100, 200};
    const std::size_t reps = 200;
    const auto report = convergence_study(family, alpha, sizes, reps, 17);

    REQUIRE(report.points.size() == 3);
    CHECK(report.lambda_star_value == doctest::Approx(0.7).epsilon(1e-8));

    for (const auto& point : report.points) {
        // E[lambda_hat] >= lambda*, so mean regret is non-negative up to grid
        // quantization plus Monte Carlo noise on the estimate
        CHECK(point.mean_regret >=
              -report.lipschitz_k * report.grid_step - 3.0 * point.se_regret);
        const double lower = alpha - 2.0 * family.loss_bound_b / (double(point.n) + 1.0) -
                             3.0 * point.se_risk;
        CHECK(point.mean_risk <= alpha + 3.0 * point.se_risk);
        CHECK(point.mean_risk >= lower);
    }
    CHECK(report.points.front().mean_regret > report.points.back().mean_regret);
    CHECK(report.slope_available);
    CHECK(report.slope < 0.0);
}

TEST_CASE("convergence study validates input") {
    const SyntheticFamily family;
    CHECK_THROWS_AS(convergence_study(family, 0.3, {}, 10, 1), InvalidInputError);
    CHECK_THROWS_AS(convergence_study(family, 0.3, {100, 50}, 10, 1), InvalidInputError);
    CHECK_THROWS_AS(convergence_study(family, 0.3, {50, 100}, 0, 1), InvalidInputError);
}

TEST_CASE("risk guarantee Monte Carlo stays below the budget") {
    const SyntheticFamily family;
    const double alpha = 0.25;
    const auto estimate = risk_guarantee_mc(family, alpha, 200, 800, 23);
    CHECK(estimate.reps == 800);
    CHECK(estimate.mean <= alpha + 3.0 * estimate.std_error);
    CHECK(estimate.mean >= alpha - 2.0 / 201.0 - 3.0 * estimate.std_error);
}

TEST_CASE("a budget at or above the loss bound pins the threshold at zero") {
    SyntheticFamily family;
    family.loss_bound_b = 0.5;
    const double alpha = 0.6;  // >= B, inequality holds at every lambda
    SplitMix64 g(5);
    const auto samples = family.sample_instances(50, g);
    const auto fit = fit_lambda(samples, RiskBudget{alpha, family.loss_bound_b}, family.grid());
    CHECK(fit.lambda_hat == 0.0);

    const auto estimate = risk_guarantee_mc(family, alpha, 50, 200, 6);
    CHECK(estimate.mean <= alpha);
}

TEST_CASE("large-n tightness: expected risk at the fit sits just under alpha") {
    // E[R(lambda_hat)] equals the expected fresh-draw loss, so evaluating the
    // closed-form risk removes the draw noise and lets a tight window hold
    // with modest replication.
    const SyntheticFamily family;
    const double alpha = 0.25;
    const std::size_t n = 5000;
    const std::size_t reps = 60;
    const LambdaGrid grid = family.grid();
    const RiskBudget budget{alpha, family.loss_bound_b};

    double sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        SplitMix64 g(derive_seed(91, 1, rep));
        const auto samples = family.sample_instances(n, g);
        const auto fit = fit_lambda(samples, budget, grid);
        const double risk = family.true_risk(fit.lambda_hat);
        sum += risk;
        sq_sum += risk * risk;
    }
    const double mean = sum / double(reps);
    const double se = std::sqrt(
        std::max(0.0, (sq_sum - sum * sum / double(reps)) / double(reps - 1)) / double(reps));
    // the true expectation sits in [alpha - 2B/(n+1), alpha]; the estimate
    // gets a 3-sigma allowance on the side with no margin
    CHECK(mean <= alpha + 3.0 * se);
    CHECK(mean >= alpha - 0.01);
}

#include "riskroute/route.hpp"

#include <limits>

#include "riskroute/core.hpp"
#include "riskroute/errors.hpp"

namespace riskroute {

namespace {

std::size_t argmax_over(const std::vector<double>& values, const std::vector<std::size_t>& menu) {
    std::size_t best = menu.front();
    for (std::size_t idx : menu) {
        if (values[idx] > values[best]) best = idx;
    }
    return best;
}

RoutingDecision decide_impl(const ScoredInstance& instance, const RoutingPolicy& policy,
                            const GuardianProvider* guardian_provider) {
    validate_instance(instance);
    const std::size_t n = instance.action_count();
    const CandidateSet candidates = candidate_set(instance.primary_scores, policy.lambda_hat);

    RoutingDecision decision;
    decision.candidate_count = candidates.indices.size();
    decision.action_count = n;

    if (candidates.singleton()) {
        decision.chosen_index = candidates.indices.front();
        decision.actor = Actor::primary;
        decision.menu_count = 1;
        decision.deferred = false;
        return decision;
    }

    // Guardian scores are only pulled once deferral is certain.
    const ScoreVector* guardian = nullptr;
    ScoreVector fetched;
    if (instance.guardian_scores) {
        guardian = &*instance.guardian_scores;
    } else if (guardian_provider) {
        fetched = (*guardian_provider)(instance);
        if (fetched.size() != n) {
            throw InvalidInputError("guardian provider returned " + std::to_string(fetched.size()) +
                                    " scores for " + std::to_string(n) + " actions");
        }
        guardian = &fetched;
    } else {
        throw InvalidInputError("decide: instance '" + instance.id +
                                "' deferred but has no guardian scores");
    }

    decision.actor = Actor::guardian;
    decision.deferred = true;
    if (policy.variant == RouteVariant::restricted) {
        decision.chosen_index = argmax_over(guardian->values, candidates.indices);
        decision.menu_count = candidates.indices.size();
    } else {
        decision.chosen_index = argmax_index(guardian->values);
        decision.menu_count = n;
    }
    return decision;
}

}  // namespace

RoutingDecision decide(const ScoredInstance& instance, const RoutingPolicy& policy) {
    return decide_impl(instance, policy, nullptr);
}

RoutingDecision decide(const ScoredInstance& instance, const RoutingPolicy& policy,
                       const GuardianProvider& guardian) {
    return decide_impl(instance, policy, &guardian);
}

std::optional<std::size_t> gap_route(const ScoredInstance& instance, double lambda) {
    validate_instance(instance);
    if (score_gap(instance.primary_scores) >= lambda) {
        return argmax_index(instance.primary_scores.values);
    }
    return std::nullopt;
}

}  // namespace riskroute

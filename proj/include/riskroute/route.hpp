#pragma once

#include <functional>
#include <optional>

#include "riskroute/types.hpp"

namespace riskroute {

enum class RouteVariant {
    restricted,   // a deferred guardian chooses within the candidate set
    unrestricted  // a deferred guardian reconsiders the full action set
};

enum class Actor { primary, guardian };

struct RoutingPolicy {
    double lambda_hat = 0.0;
    RouteVariant variant = RouteVariant::restricted;
};

struct RoutingDecision {
    std::size_t chosen_index = 0;
    Actor actor = Actor::primary;
    std::size_t candidate_count = 1;  // |C_lambda|
    std::size_t action_count = 1;
    std::size_t menu_count = 1;       // how many options the guardian scored
    bool deferred = false;
};

/// Supplies guardian scores on demand; invoked only when a decision defers,
/// mirroring the one-call-per-model cost story.
using GuardianProvider = std::function<ScoreVector(const ScoredInstance&)>;

/// Singleton candidate set: act with its element. Otherwise the guardian's
/// argmax over the candidate set (restricted) or all actions (unrestricted),
/// ties to the lowest index.
RoutingDecision decide(const ScoredInstance& instance, const RoutingPolicy& policy);
RoutingDecision decide(const ScoredInstance& instance, const RoutingPolicy& policy,
                       const GuardianProvider& guardian);

/// Margin rule: act with the primary argmax iff the score gap is >= lambda
/// (single-action instances always act); nullopt signals deferral.
///
/// Note the deliberate boundary mismatch with decide(): the singleton test
/// acts only when gap > lambda, the margin rule also acts at exact equality.
std::optional<std::size_t> gap_route(const ScoredInstance& instance, double lambda);

}  // namespace riskroute

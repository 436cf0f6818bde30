#pragma once

#include <vector>

#include "riskroute/types.hpp"

namespace riskroute {

/// Slack added to the membership comparison so scores that are analytically
/// tied with the cut line are admitted instead of lost to float noise.
inline constexpr double kMembershipEpsilon = 1e-12;

/// All actions scoring within lambda of the top primary score. Always
/// contains every argmax; grows monotonically with lambda.
CandidateSet candidate_set(const ScoreVector& primary_scores, double lambda);

/// Top primary score minus the runner-up. +infinity when there is a single
/// action; 0 when the maximum is tied.
double score_gap(const ScoreVector& primary_scores);

/// Guardian's best score over all actions minus its best over the lambda-
/// relaxed candidate set. Non-negative; 0 whenever the guardian's argmax
/// survives the relaxation.
double residual_loss(const ScoredInstance& instance, double lambda);

/// Replace guardian scores with the 0/1 view: 1 at the guardian's top-ranked
/// index iff that index is the correct one, otherwise all zeros. Top-rank
/// ties break to the lowest index.
ScoredInstance binarize_guardian(const ScoredInstance& instance);

/// Divide by the sum; a zero sum yields the uniform vector. Inputs must be
/// non-negative and finite.
ScoreVector normalize_scores(const std::vector<double>& raw);

}  // namespace riskroute

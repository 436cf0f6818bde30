#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace riskroute {

/// One score per action. Entries must be finite; the `normalized` flag marks
/// vectors known to be non-negative and summing to 1 (within 1e-9).
struct ScoreVector {
    std::vector<double> values;
    bool normalized = false;

    std::size_t size() const { return values.size(); }
};

/// Validating constructor for scores coming from files, wires, or callers.
ScoreVector make_score_vector(std::vector<double> values, bool normalized = false);

/// Index of the largest entry, ties broken to the lowest index.
std::size_t argmax_index(const std::vector<double>& values);

struct Labels {
    std::optional<int> correct_index;
    std::optional<std::vector<int>> severities;  // each in {0,1,2,3}
    std::optional<int> helpful_index;

    bool empty() const { return !correct_index && !severities && !helpful_index; }
};

/// Per-call token usage. Fields are optional because logs may omit legs that
/// were never exercised; operations that need a count validate its presence.
struct TokenCounts {
    std::optional<std::uint64_t> primary_in;
    std::optional<std::uint64_t> primary_out;
    std::optional<std::uint64_t> guardian_in;
    std::optional<std::uint64_t> guardian_out;
    std::optional<std::uint64_t> full_in;
};

/// One context: its action list plus the scores both models assigned, and
/// whatever ground truth the log carries.
struct ScoredInstance {
    std::string id;
    std::vector<std::string> actions;
    ScoreVector primary_scores;
    std::optional<ScoreVector> guardian_scores;
    Labels labels;
    std::optional<TokenCounts> tokens;

    std::size_t action_count() const { return actions.size(); }
};

/// Cross-field checks: score/label lengths match the action count, severity
/// codes in range, at least one action. Throws InvalidInputError.
void validate_instance(const ScoredInstance& instance);

/// Actions whose primary score is within lambda of the top score.
struct CandidateSet {
    std::vector<std::size_t> indices;  // strictly increasing, never empty
    double lambda_used = 0.0;

    bool singleton() const { return indices.size() == 1; }
    bool contains(std::size_t index) const;
};

/// The user's risk budget: expected guardrail loss must stay <= alpha, with
/// per-sample losses bounded by loss_bound_b.
struct RiskBudget {
    double alpha = 0.1;
    double loss_bound_b = 1.0;
};

}  // namespace riskroute

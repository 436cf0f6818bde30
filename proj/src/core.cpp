#include "riskroute/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskroute/errors.hpp"

namespace riskroute {

namespace {

double max_value(const std::vector<double>& values) {
    return *std::max_element(values.begin(), values.end());
}

}  // namespace

ScoreVector make_score_vector(std::vector<double> values, bool normalized) {
    if (values.empty()) {
        throw InvalidInputError("score vector must have at least one entry");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidInputError("score vector entries must be finite");
        }
    }
    if (normalized) {
        double sum = 0.0;
        for (double v : values) {
            if (v < 0.0) throw InvalidInputError("normalized scores must be non-negative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw InvalidInputError("normalized scores must sum to 1 (got " + std::to_string(sum) + ")");
        }
    }
    return ScoreVector{std::move(values), normalized};
}

std::size_t argmax_index(const std::vector<double>& values) {
    if (values.empty()) throw InvalidInputError("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

void validate_instance(const ScoredInstance& instance) {
    const std::size_t n = instance.actions.size();
    if (n == 0) throw InvalidInputError("instance '" + instance.id + "': needs at least one action");
    if (instance.primary_scores.size() != n) {
        throw InvalidInputError("instance '" + instance.id + "': primary_scores length " +
                                std::to_string(instance.primary_scores.size()) +
                                " != action count " + std::to_string(n));
    }
    if (instance.guardian_scores && instance.guardian_scores->size() != n) {
        throw InvalidInputError("instance '" + instance.id + "': guardian_scores length " +
                                std::to_string(instance.guardian_scores->size()) +
                                " != action count " + std::to_string(n));
    }
    if (instance.labels.correct_index &&
        (*instance.labels.correct_index < 0 ||
         static_cast<std::size_t>(*instance.labels.correct_index) >= n)) {
        throw InvalidInputError("instance '" + instance.id + "': correct_index out of range");
    }
    if (instance.labels.helpful_index &&
        (*instance.labels.helpful_index < 0 ||
         static_cast<std::size_t>(*instance.labels.helpful_index) >= n)) {
        throw InvalidInputError("instance '" + instance.id + "': helpful_index out of range");
    }
    if (instance.labels.severities) {
        if (instance.labels.severities->size() != n) {
            throw InvalidInputError("instance '" + instance.id + "': severities length != action count");
        }
        for (int s : *instance.labels.severities) {
            if (s < 0 || s > 3) {
                throw InvalidInputError("instance '" + instance.id + "': severity outside {0,1,2,3}");
            }
        }
    }
}

bool CandidateSet::contains(std::size_t index) const {
    return std::binary_search(indices.begin(), indices.end(), index);
}

CandidateSet candidate_set(const ScoreVector& primary_scores, double lambda) {
    const auto& p = primary_scores.values;
    if (p.empty()) throw InvalidInputError("candidate_set: empty score vector");
    if (!(lambda >= 0.0)) throw InvalidInputError("candidate_set: lambda must be >= 0");

    const double cut = max_value(p) - lambda - kMembershipEpsilon;
    CandidateSet out;
    out.lambda_used = lambda;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] >= cut) out.indices.push_back(i);
    }
    return out;
}

double score_gap(const ScoreVector& primary_scores) {
    const auto& p = primary_scores.values;
    if (p.empty()) throw InvalidInputError("score_gap: empty score vector");
    if (p.size() == 1) return std::numeric_limits<double>::infinity();

    const std::size_t top = argmax_index(p);
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i != top) second = std::max(second, p[i]);
    }
    return p[top] - second;
}

double residual_loss(const ScoredInstance& instance, double lambda) {
    if (!(lambda >= 0.0)) throw InvalidInputError("residual_loss: lambda must be >= 0");
    if (!instance.guardian_scores) {
        throw InvalidInputError("residual_loss: instance '" + instance.id + "' has no guardian scores");
    }
    const auto& p = instance.primary_scores.values;
    const auto& g = instance.guardian_scores->values;
    if (p.empty() || p.size() != g.size()) {
        throw InvalidInputError("residual_loss: misaligned score vectors on '" + instance.id + "'");
    }

    // Single pass, no candidate-set allocation: this sits in the calibration
    // hot loop.
    const double cut = max_value(p) - lambda - kMembershipEpsilon;
    double best = -std::numeric_limits<double>::infinity();
    double best_in_set = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        best = std::max(best, g[i]);
        if (p[i] >= cut) best_in_set = std::max(best_in_set, g[i]);
    }
    return best - best_in_set;
}

ScoredInstance binarize_guardian(const ScoredInstance& instance) {
    if (!instance.labels.correct_index) {
        throw InvalidInputError("binarize_guardian: instance '" + instance.id + "' has no correct_index");
    }
    if (!instance.guardian_scores) {
        throw InvalidInputError("binarize_guardian: instance '" + instance.id + "' has no guardian scores");
    }
    validate_instance(instance);

    const std::size_t top = argmax_index(instance.guardian_scores->values);
    ScoredInstance out = instance;
    out.guardian_scores = ScoreVector{std::vector<double>(instance.action_count(), 0.0), false};
    if (top == static_cast<std::size_t>(*instance.labels.correct_index)) {
        out.guardian_scores->values[top] = 1.0;
    }
    return out;
}

ScoreVector normalize_scores(const std::vector<double>& raw) {
    if (raw.empty()) throw InvalidInputError("normalize_scores: empty input");
    double sum = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v)) throw InvalidInputError("normalize_scores: non-finite input");
        if (v < 0.0) throw InvalidInputError("normalize_scores: negative input");
        sum += v;
    }
    std::vector<double> values(raw.size());
    if (sum == 0.0) {
        const double uniform = 1.0 / static_cast<double>(raw.size());
        std::fill(values.begin(), values.end(), uniform);
    } else {
        for (std::size_t i = 0; i < raw.size(); ++i) values[i] = raw[i] / sum;
    }
    return ScoreVector{std::move(values), true};
}

}  // namespace riskroute

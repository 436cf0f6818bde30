#include "riskroute/providers.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <httplib.h>
#include <json.hpp>

#include "riskroute/core.hpp"
#include "riskroute/errors.hpp"

namespace riskroute {

namespace {

using json = nlohmann::ordered_json;

std::vector<double> number_array(const json& j, std::size_t line, const std::string& field) {
    if (!j.is_array()) throw SchemaError(line, field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw SchemaError(line, field, "expected an array of numbers");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw SchemaError(line, field, "scores must be finite");
        out.push_back(d);
    }
    return out;
}

std::optional<std::uint64_t> opt_count(const json& j, std::size_t line, const std::string& field) {
    if (!j.contains(field)) return std::nullopt;
    const auto& v = j.at(field);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw SchemaError(line, field, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

ScoreVector uniform_scores(std::size_t n) {
    return ScoreVector{std::vector<double>(n, 1.0 / static_cast<double>(n)), true};
}

bool has_exact_tie(const std::vector<double>& v, std::size_t& i_out, std::size_t& j_out) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[i] == v[j]) {
                i_out = i;
                j_out = j;
                return true;
            }
        }
    }
    return false;
}

}  // namespace

ScoredInstance parse_record(const std::string& text, std::size_t line) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(line, "<line>", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError(line, "<line>", "record must be a JSON object");

    ScoredInstance instance;
    if (!j.contains("id") || !j.at("id").is_string()) {
        throw SchemaError(line, "id", "required string");
    }
    instance.id = j.at("id").get<std::string>();

    if (!j.contains("actions") || !j.at("actions").is_array() || j.at("actions").empty()) {
        throw SchemaError(line, "actions", "required non-empty array of strings");
    }
    for (const auto& a : j.at("actions")) {
        if (!a.is_string()) throw SchemaError(line, "actions", "entries must be strings");
        instance.actions.push_back(a.get<std::string>());
    }
    const std::size_t n = instance.actions.size();

    if (!j.contains("primary_scores")) throw SchemaError(line, "primary_scores", "required");
    auto primary = number_array(j.at("primary_scores"), line, "primary_scores");
    if (primary.size() != n) {
        throw SchemaError(line, "primary_scores",
                          std::to_string(primary.size()) + " scores for " + std::to_string(n) + " actions");
    }
    instance.primary_scores = ScoreVector{std::move(primary), false};

    if (j.contains("guardian_scores")) {
        auto guardian = number_array(j.at("guardian_scores"), line, "guardian_scores");
        if (guardian.size() != n) {
            throw SchemaError(line, "guardian_scores",
                              std::to_string(guardian.size()) + " scores for " + std::to_string(n) + " actions");
        }
        instance.guardian_scores = ScoreVector{std::move(guardian), false};
    }

    if (j.contains("labels")) {
        const auto& labels = j.at("labels");
        if (!labels.is_object()) throw SchemaError(line, "labels", "expected an object");
        if (labels.contains("correct_index")) {
            if (!labels.at("correct_index").is_number_integer()) {
                throw SchemaError(line, "labels.correct_index", "expected an integer");
            }
            instance.labels.correct_index = labels.at("correct_index").get<int>();
        }
        if (labels.contains("severities")) {
            if (!labels.at("severities").is_array()) {
                throw SchemaError(line, "labels.severities", "expected an integer array");
            }
            std::vector<int> sev;
            for (const auto& s : labels.at("severities")) {
                if (!s.is_number_integer()) {
                    throw SchemaError(line, "labels.severities", "expected an integer array");
                }
                sev.push_back(s.get<int>());
            }
            instance.labels.severities = std::move(sev);
        }
        if (labels.contains("helpful_index")) {
            if (!labels.at("helpful_index").is_number_integer()) {
                throw SchemaError(line, "labels.helpful_index", "expected an integer");
            }
            instance.labels.helpful_index = labels.at("helpful_index").get<int>();
        }
    }

    if (j.contains("tokens")) {
        const auto& tokens = j.at("tokens");
        if (!tokens.is_object()) throw SchemaError(line, "tokens", "expected an object");
        TokenCounts counts;
        counts.primary_in = opt_count(tokens, line, "primary_in");
        counts.primary_out = opt_count(tokens, line, "primary_out");
        counts.guardian_in = opt_count(tokens, line, "guardian_in");
        counts.guardian_out = opt_count(tokens, line, "guardian_out");
        counts.full_in = opt_count(tokens, line, "full_in");
        instance.tokens = counts;
    }

    try {
        validate_instance(instance);
    } catch (const InvalidInputError& e) {
        throw SchemaError(line, "labels", e.what());
    }
    return instance;
}

std::string serialize_record(const ScoredInstance& instance) {
    json j;
    j["id"] = instance.id;
    j["actions"] = instance.actions;
    j["primary_scores"] = instance.primary_scores.values;
    if (instance.guardian_scores) j["guardian_scores"] = instance.guardian_scores->values;
    if (!instance.labels.empty()) {
        json labels = json::object();
        if (instance.labels.correct_index) labels["correct_index"] = *instance.labels.correct_index;
        if (instance.labels.severities) labels["severities"] = *instance.labels.severities;
        if (instance.labels.helpful_index) labels["helpful_index"] = *instance.labels.helpful_index;
        j["labels"] = labels;
    }
    if (instance.tokens) {
        json tokens = json::object();
        const auto put = [&](const char* key, const std::optional<std::uint64_t>& v) {
            if (v) tokens[key] = *v;
        };
        put("primary_in", instance.tokens->primary_in);
        put("primary_out", instance.tokens->primary_out);
        put("guardian_in", instance.tokens->guardian_in);
        put("guardian_out", instance.tokens->guardian_out);
        put("full_in", instance.tokens->full_in);
        j["tokens"] = tokens;
    }
    return j.dump();
}

std::vector<ScoredInstance> load_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open record file: " + path.string());

    std::vector<ScoredInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_record(line, line_no));
    }
    if (out.empty()) {
        std::cerr << "warning: no records in " << path.string() << "\n";
    }
    return out;
}

void save_records(const std::filesystem::path& path, std::span<const ScoredInstance> instances) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write record file: " + path.string());
    for (const auto& instance : instances) out << serialize_record(instance) << "\n";
}

ScoreVector fetch_scores(const ScorerEndpoint& endpoint, const std::string& context,
                         const std::vector<std::string>& actions) {
    if (actions.empty()) throw InvalidInputError("fetch_scores: empty action list");
    if (endpoint.timeout_ms <= 0) throw InvalidInputError("fetch_scores: timeout must be positive");

    json request;
    request["context"] = context;
    request["actions"] = actions;
    const std::string body = request.dump();

    httplib::Client client(endpoint.base);
    client.set_connection_timeout(0, endpoint.timeout_ms * 1000);
    client.set_read_timeout(0, endpoint.timeout_ms * 1000);
    client.set_write_timeout(0, endpoint.timeout_ms * 1000);

    httplib::Result response;
    for (int attempt = 0; attempt <= endpoint.retries; ++attempt) {
        response = client.Post("/score", body, "application/json");
        if (response) break;
    }
    if (!response) {
        throw TransportError("scorer at " + endpoint.base + " unreachable: " +
                             httplib::to_string(response.error()));
    }

    // From here on every failure is a content failure and degrades to the
    // uniform vector, keeping calibration and test points exchangeable.
    if (response->status < 200 || response->status >= 300) return uniform_scores(actions.size());
    try {
        const json reply = json::parse(response->body);
        if (!reply.is_object() || !reply.contains("scores")) return uniform_scores(actions.size());
        const auto& scores = reply.at("scores");
        if (!scores.is_array() || scores.size() != actions.size()) {
            return uniform_scores(actions.size());
        }
        std::vector<double> raw;
        raw.reserve(scores.size());
        for (const auto& s : scores) {
            if (!s.is_number()) return uniform_scores(actions.size());
            raw.push_back(s.get<double>());
        }
        return normalize_scores(raw);
    } catch (const json::exception&) {
        return uniform_scores(actions.size());
    } catch (const InvalidInputError&) {  // negative or non-finite scores
        return uniform_scores(actions.size());
    }
}

ScoreVector perturb_ties(const ScoreVector& scores, SplitMix64& rng) {
    ScoreVector out = scores;
    auto& v = out.values;
    std::size_t i = 0;
    std::size_t j = 0;
    // Each step nudges the lower index of the first tied pair by +-0.01 and
    // rescans; the walk separates any tie group after a few steps.
    std::size_t steps = 0;
    const std::size_t max_steps = 1000 * (v.size() + 1) * (v.size() + 1);
    while (has_exact_tie(v, i, j)) {
        if (++steps > max_steps) {
            throw Error("perturb_ties failed to separate ties");  // not reachable in practice
        }
        const double sign = (rng() & 1) ? 1.0 : -1.0;
        v[i] += sign * 0.01;
    }
    out.normalized = false;
    return out;
}

}  // namespace riskroute

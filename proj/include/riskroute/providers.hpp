#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "riskroute/rng.hpp"
#include "riskroute/types.hpp"

namespace riskroute {

/// Parse one record line (the JSONL schema described in the README).
/// Throws SchemaError naming the offending field; `line` is used verbatim in
/// the message.
ScoredInstance parse_record(const std::string& text, std::size_t line = 0);

std::string serialize_record(const ScoredInstance& instance);

/// Read a record file, one instance per line, preserving order. Blank lines
/// are skipped; an empty file yields an empty list and a stderr warning.
std::vector<ScoredInstance> load_records(const std::filesystem::path& path);

void save_records(const std::filesystem::path& path, std::span<const ScoredInstance> instances);

/// A remote scoring service speaking the wire contract
///   request  {"context": str, "actions": [str...]}
///   response {"scores": [real...]}
/// POSTed to <base>/score.
struct ScorerEndpoint {
    std::string base;        // e.g. "http://127.0.0.1:8080"
    int timeout_ms = 5000;
    int retries = 2;         // additional attempts after the first
};

/// Ask the service to score `actions` for `context` and normalize the reply.
/// Content-level failures (unparseable body, wrong length, negative scores,
/// non-2xx status) degrade to the uniform vector so calibration and test
/// points stay exchangeable; only transport failures after all retries throw
/// TransportError.
ScoreVector fetch_scores(const ScorerEndpoint& endpoint, const std::string& context,
                         const std::vector<std::string>& actions);

/// Separate exactly-equal entries by repeatedly adding +-0.01 (sign drawn
/// from `rng`) to the lower index of the first tied pair until all entries
/// are pairwise distinct. Untied entries are left alone.
ScoreVector perturb_ties(const ScoreVector& scores, SplitMix64& rng);

}  // namespace riskroute

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace riskroute {

/// Provenance record written next to every output file: the command, its
/// configuration, the seed, and a digest of every input. Re-runs differ only
/// in the timestamp.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // flag -> value, insertion order
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path -> sha256
    std::string tool_version;
    std::string timestamp_utc;
};

std::string sha256_file_hex(const std::filesystem::path& path);

/// Writes `<output>.manifest.json`.
void write_manifest(const std::filesystem::path& output_path, const RunManifest& manifest);

}  // namespace riskroute

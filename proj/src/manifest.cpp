#include "riskroute/manifest.hpp"

#include <fstream>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "riskroute/errors.hpp"

namespace riskroute {

std::string sha256_file_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open for digest: " + path.string());

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw Error("EVP_MD_CTX_new failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);

    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        const auto got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(got));
    }

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

void write_manifest(const std::filesystem::path& output_path, const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : manifest.config) config[key] = value;
    j["config"] = config;
    j["seed"] = manifest.seed;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : manifest.inputs) {
        inputs.push_back({{"path", path}, {"sha256", digest}});
    }
    j["inputs"] = inputs;
    j["tool_version"] = manifest.tool_version;
    j["timestamp_utc"] = manifest.timestamp_utc;

    const std::filesystem::path manifest_path = output_path.string() + ".manifest.json";
    std::ofstream out(manifest_path);
    if (!out) throw InvalidInputError("cannot write manifest: " + manifest_path.string());
    out << j.dump(2) << "\n";
}

}  // namespace riskroute

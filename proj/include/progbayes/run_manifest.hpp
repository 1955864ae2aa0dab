#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace progbayes {

inline constexpr const char* kToolName = "progbayes";
inline constexpr const char* kToolVersion = "0.1.0";

/// Record of one CLI invocation, written alongside every output file. Two
/// runs whose manifests agree on everything but the timestamp produce
/// byte-identical outputs.
struct RunManifest {
    std::string command;
    nlohmann::json parameters;  // fully resolved flags, including seeds
    struct Input {
        std::string path;
        std::string digest;  // fnv1a64 over the file bytes, hex
    };
    std::vector<Input> inputs;
    std::string timestamp;  // UTC, ISO 8601

    void add_input(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// Writes <output>.manifest.json next to the given output file.
    void write_alongside(const std::filesystem::path& output) const;
};

/// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::filesystem::path& path);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace progbayes

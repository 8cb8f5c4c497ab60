#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace leser {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data);
/// Streams the file; throws Error when it cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to reproduce one produced file.
struct RunManifest {
    std::string command;                             // subcommand name
    std::string mode;                                // retrieval mode, when relevant
    nlohmann::ordered_json config;                   // flag snapshot
    std::map<std::string, std::string> inputs;       // path -> sha256
    std::string output_digest;                       // sha256 of the produced file
    std::string tool_version{kToolVersion};
    std::string timestamp;                           // UTC, ISO 8601

    /// Records the digest of `path` under its string form.
    void add_input(const std::filesystem::path& path);
};

nlohmann::ordered_json to_json(const RunManifest& manifest);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace leser

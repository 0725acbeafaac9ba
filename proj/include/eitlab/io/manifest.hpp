#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eit::io {

inline constexpr const char* kToolName = "eitlab";
inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);
/// Current UTC time, ISO 8601 with seconds.
std::string utc_timestamp();

struct ManifestOutput {
    std::string file;  ///< relative to the manifest's directory
    std::string sha256;
};

/// Sidecar written next to every command's outputs. Feeding it back through
/// --config reproduces the run; the outputs' checksums must then match.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::string model;
    double noise_pct = 0.0;
    std::optional<std::string> input;
    std::optional<std::string> input_sha256;
    std::string wall_clock;
    std::vector<ManifestOutput> outputs;
    std::string config_yaml;  ///< RunConfig::to_yaml()

    std::string to_yaml() const;
};

}  // namespace eit::io

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eitlab/io/config.hpp"
#include "eitlab/io/manifest.hpp"

namespace eit::io {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitNumerical = 4 };

/// Maps the library's exception hierarchy onto process exit codes.
int exit_code_for(const std::exception& e);

struct CommandOptions {
    std::string command;  ///< simulate-scan | sweep-power | sweep-temperature | fit-scan | fit-series | synth
    std::optional<std::filesystem::path> config;  ///< config or manifest; defaults when absent
    std::optional<std::filesystem::path> input;   ///< CSV for the fit commands
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> model;
    std::optional<double> noise_pct;
};

struct CommandResult {
    std::vector<std::filesystem::path> outputs;  ///< data files, in write order
    std::filesystem::path manifest;
    std::string report;  ///< human-readable summary for stdout
};

/// Runs one subcommand, writes its outputs plus `<command>.manifest.yaml`
/// under out_dir. Flags override values from the config; a manifest passed as
/// config also supplies model and noise unless overridden.
CommandResult run_command(const CommandOptions& options);

const std::vector<std::string>& command_names();

}  // namespace eit::io

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace sae::io {

/// Command-line settings. Unset fields fall back to the config file.
struct CommandOptions {
    std::filesystem::path config;
    std::filesystem::path out = "results";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> method;  // simulate: comma-separated method names
    std::optional<std::string> scope;
    std::optional<double> c;
    std::optional<std::string> gamma;  // number or "auto"
    std::optional<std::filesystem::path> sample;
    std::optional<std::filesystem::path> population;
    bool export_cdf = false;
};

/// Each command writes its CSV files and metadata.json under `out`.
/// Errors propagate as InputError or NumericalError.
void cmd_simulate(const CommandOptions& options, std::ostream& log);
void cmd_estimate(const CommandOptions& options, std::ostream& log);
void cmd_tune(const CommandOptions& options, std::ostream& log);

/// Runs a command by name and maps errors to exit codes:
/// 0 success, 1 numerical failure, 2 input or config error.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& log, std::ostream& err);

}  // namespace sae::io

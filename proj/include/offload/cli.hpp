#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offload/config.hpp"
#include "offload/metrics.hpp"

namespace offload {

/// Command-line overrides; unset fields fall back to the config.
struct CommandOptions {
    std::optional<std::vector<std::string>> schedulers;
    std::optional<std::vector<std::uint64_t>> seeds;
    std::optional<std::vector<std::uint32_t>> users;
    std::optional<std::string> out;
    std::optional<std::string> json_out;
    std::optional<std::string> trace;  // run only: event log destination
    unsigned jobs = 1;
};

inline constexpr const char* kOutDirEnv = "OFFLOAD_SIM_OUT_DIR";

/// Places the file name of `path` under $OFFLOAD_SIM_OUT_DIR when it is set.
std::filesystem::path resolve_output(const std::string& path);

/// Orders rows by (scheduler, users, seed).
void sort_rows(std::vector<RunReport>& rows);

int cmd_validate(const std::filesystem::path& path, std::span<const std::string> overrides, std::ostream& out,
                 std::ostream& err);
int cmd_run(const ExperimentConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const ExperimentConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace offload

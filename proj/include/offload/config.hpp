#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offload/scenario.hpp"
#include "offload/schedulers.hpp"

namespace offload {

struct ExperimentConfig {
    ScenarioSpec scenario;
    std::vector<SchedulerKind> schedulers{kAllSchedulers.begin(), kAllSchedulers.end()};
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::uint32_t> users_sweep{5, 10, 20, 40};
    std::string output = "results.csv";
};

struct ConfigResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return config.has_value(); }
};

/// JSON text; nested objects and dotted keys are equivalent ("mmct": {"c": 1}
/// and "mmct.c": 1). Blank input gives the defaults. Every problem is reported,
/// each prefixed with its key path. Overrides are "key=value" with a dotted
/// key; the value is read as JSON, or as a plain string when that fails.
ConfigResult parse_config(std::string_view text, std::span<const std::string> overrides = {});

ConfigResult validate_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

/// Every accepted key path, sorted.
std::vector<std::string> config_keys();

}  // namespace offload

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offload/simcore.hpp"

namespace offload {

struct IntervalMetrics {
    std::uint64_t interval = 0;
    std::uint64_t released = 0;
    std::uint64_t completed = 0;
    std::uint64_t sla_violations = 0;
    std::uint64_t migrations = 0;
    double avg_response_ms = 0.0;
    double energy_j = 0.0;
    double migration_time_ms = 0.0;
    double schedule_time_ms = 0.0;
};

struct RunReport {
    std::string scheduler;
    std::uint64_t seed = 0;
    std::uint32_t users = 0;
    std::uint64_t tasks_released = 0;
    std::uint64_t tasks_completed = 0;
    std::uint64_t tasks_dropped = 0;
    std::uint64_t tasks_pending = 0;
    std::uint64_t sla_violations = 0;
    double avg_response_ms = 0.0;
    double energy_joules = 0.0;
    std::uint64_t migrations_count = 0;
    double avg_migration_time_ms = 0.0;
    double avg_schedule_time_ms = 0.0;
    std::uint64_t intervals = 0;
    std::vector<IntervalMetrics> series;
};

/// Folds one interval in. Response is averaged over completed tasks,
/// migration time over migration events, schedule time over intervals.
void accumulate(RunReport& report, const IntervalReport& interval, double schedule_time_ms);

inline constexpr std::string_view kCsvHeader =
    "scheduler,seed,users,tasks_released,tasks_completed,sla_violations,avg_response_ms,energy_j,migrations,"
    "avg_migration_time_ms,avg_schedule_time_ms";

/// Header plus one row per report; reals use 6 significant digits.
std::string to_csv(std::span<const RunReport> reports);

/// Throws Error when the file cannot be written.
void export_csv(std::span<const RunReport> reports, const std::filesystem::path& path);

/// Reads rows written by to_csv (series are not part of the CSV).
std::vector<RunReport> parse_csv(std::string_view text);

/// JSON mirror with the CSV field names plus the per-interval series.
std::string to_json(std::span<const RunReport> reports);
void export_json(std::span<const RunReport> reports, const std::filesystem::path& path);

/// The six comparison metrics, in CSV column naming.
inline constexpr std::array<std::string_view, 6> kSummaryMetrics = {
    "migrations", "avg_migration_time_ms", "energy_j", "avg_response_ms", "avg_schedule_time_ms", "sla_violations",
};

double metric_value(const RunReport& report, std::string_view metric);

struct MetricStat {
    double mean = 0.0;
    double stddev = 0.0;  // population
    double min = 0.0;
    double max = 0.0;
};

struct SummaryRow {
    std::string scheduler;
    std::uint32_t users = 0;
    std::size_t runs = 0;
    std::array<MetricStat, kSummaryMetrics.size()> metrics{};
};

/// Groups by (scheduler, users), ordered by scheduler name then users.
std::vector<SummaryRow> summarize(std::span<const RunReport> reports);

std::string format_summary(std::span<const SummaryRow> rows);

}  // namespace offload

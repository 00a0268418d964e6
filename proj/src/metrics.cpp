#include "offload/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "offload/error.hpp"

namespace offload {

namespace {

void running_mean(double& mean, double value, std::uint64_t count) { mean += (value - mean) / static_cast<double>(count); }

std::string real(double v) { return fmt::format("{:.6g}", v); }

}  // namespace

void accumulate(RunReport& report, const IntervalReport& interval, double schedule_time_ms) {
    IntervalMetrics m;
    m.interval = report.intervals;
    m.released = interval.released;
    m.completed = interval.completed.size();
    m.sla_violations = interval.deadline_misses;
    m.migrations = interval.migrations.size();
    m.energy_j = interval.energy_j();
    m.migration_time_ms = to_ms(interval.migration_time());
    m.schedule_time_ms = schedule_time_ms;

    for (const CompletedTask& c : interval.completed) {
        const double ms = to_ms(c.response());
        m.avg_response_ms += ms;
        ++report.tasks_completed;
        running_mean(report.avg_response_ms, ms, report.tasks_completed);
    }
    if (m.completed > 0) m.avg_response_ms /= static_cast<double>(m.completed);

    for (const MigrationEvent& e : interval.migrations) {
        ++report.migrations_count;
        running_mean(report.avg_migration_time_ms, to_ms(e.duration), report.migrations_count);
    }

    report.tasks_released += interval.released;
    report.sla_violations += interval.deadline_misses;
    report.energy_joules += m.energy_j;
    ++report.intervals;
    running_mean(report.avg_schedule_time_ms, schedule_time_ms, report.intervals);
    report.series.push_back(m);
}

std::string to_csv(std::span<const RunReport> reports) {
    std::string out{kCsvHeader};
    out += '\n';
    for (const RunReport& r : reports) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.scheduler, r.seed, r.users, r.tasks_released,
                           r.tasks_completed, r.sla_violations, real(r.avg_response_ms), real(r.energy_joules),
                           r.migrations_count, real(r.avg_migration_time_ms), real(r.avg_schedule_time_ms));
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(fmt::format("cannot open {} for writing", path.string()));
    os << content;
    if (!os) throw Error(fmt::format("failed writing {}", path.string()));
}

}  // namespace

void export_csv(std::span<const RunReport> reports, const std::filesystem::path& path) {
    write_file(path, to_csv(reports));
}

std::vector<RunReport> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw Error("csv header mismatch");

    std::vector<RunReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11) throw Error(fmt::format("csv row has {} columns", cells.size()));
        RunReport r;
        r.scheduler = cells[0];
        r.seed = std::stoull(cells[1]);
        r.users = static_cast<std::uint32_t>(std::stoul(cells[2]));
        r.tasks_released = std::stoull(cells[3]);
        r.tasks_completed = std::stoull(cells[4]);
        r.sla_violations = std::stoull(cells[5]);
        r.avg_response_ms = std::stod(cells[6]);
        r.energy_joules = std::stod(cells[7]);
        r.migrations_count = std::stoull(cells[8]);
        r.avg_migration_time_ms = std::stod(cells[9]);
        r.avg_schedule_time_ms = std::stod(cells[10]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string to_json(std::span<const RunReport> reports) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const RunReport& r : reports) {
        nlohmann::ordered_json j;
        j["scheduler"] = r.scheduler;
        j["seed"] = r.seed;
        j["users"] = r.users;
        j["tasks_released"] = r.tasks_released;
        j["tasks_completed"] = r.tasks_completed;
        j["sla_violations"] = r.sla_violations;
        j["avg_response_ms"] = r.avg_response_ms;
        j["energy_j"] = r.energy_joules;
        j["migrations"] = r.migrations_count;
        j["avg_migration_time_ms"] = r.avg_migration_time_ms;
        j["avg_schedule_time_ms"] = r.avg_schedule_time_ms;
        nlohmann::ordered_json series = nlohmann::ordered_json::array();
        for (const IntervalMetrics& m : r.series) {
            series.push_back({{"interval", m.interval},
                              {"released", m.released},
                              {"completed", m.completed},
                              {"sla_violations", m.sla_violations},
                              {"migrations", m.migrations},
                              {"avg_response_ms", m.avg_response_ms},
                              {"energy_j", m.energy_j},
                              {"migration_time_ms", m.migration_time_ms},
                              {"schedule_time_ms", m.schedule_time_ms}});
        }
        j["series"] = std::move(series);
        runs.push_back(std::move(j));
    }
    return runs.dump(2) + "\n";
}

void export_json(std::span<const RunReport> reports, const std::filesystem::path& path) {
    write_file(path, to_json(reports));
}

double metric_value(const RunReport& r, std::string_view metric) {
    if (metric == "migrations") return static_cast<double>(r.migrations_count);
    if (metric == "avg_migration_time_ms") return r.avg_migration_time_ms;
    if (metric == "energy_j") return r.energy_joules;
    if (metric == "avg_response_ms") return r.avg_response_ms;
    if (metric == "avg_schedule_time_ms") return r.avg_schedule_time_ms;
    if (metric == "sla_violations") return static_cast<double>(r.sla_violations);
    if (metric == "tasks_released") return static_cast<double>(r.tasks_released);
    if (metric == "tasks_completed") return static_cast<double>(r.tasks_completed);
    throw Error(fmt::format("unknown metric {}", metric));
}

std::vector<SummaryRow> summarize(std::span<const RunReport> reports) {
    std::map<std::pair<std::string, std::uint32_t>, std::vector<const RunReport*>> groups;
    for (const RunReport& r : reports) groups[{r.scheduler, r.users}].push_back(&r);

    std::vector<SummaryRow> rows;
    for (const auto& [key, members] : groups) {
        SummaryRow row;
        row.scheduler = key.first;
        row.users = key.second;
        row.runs = members.size();
        for (std::size_t m = 0; m < kSummaryMetrics.size(); ++m) {
            MetricStat s;
            s.min = s.max = metric_value(*members.front(), kSummaryMetrics[m]);
            for (const RunReport* r : members) {
                const double x = metric_value(*r, kSummaryMetrics[m]);
                s.mean += x;
                s.min = std::min(s.min, x);
                s.max = std::max(s.max, x);
            }
            s.mean /= static_cast<double>(members.size());
            double var = 0.0;
            for (const RunReport* r : members) {
                const double d = metric_value(*r, kSummaryMetrics[m]) - s.mean;
                var += d * d;
            }
            s.stddev = std::sqrt(var / static_cast<double>(members.size()));
            // Guard against rounding pushing the mean outside the sample range.
            s.mean = std::clamp(s.mean, s.min, s.max);
            row.metrics[m] = s;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_summary(std::span<const SummaryRow> rows) {
    std::string out = fmt::format("{:<12} {:>6} {:>5}", "scheduler", "users", "runs");
    for (std::string_view m : kSummaryMetrics) out += fmt::format(" {:>26}", m);
    out += '\n';
    for (const SummaryRow& r : rows) {
        out += fmt::format("{:<12} {:>6} {:>5}", r.scheduler, r.users, r.runs);
        for (const MetricStat& s : r.metrics) {
            out += fmt::format(" {:>26}", fmt::format("{} +- {}", real(s.mean), real(s.stddev)));
        }
        out += '\n';
    }
    return out;
}

}  // namespace offload

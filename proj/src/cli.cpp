#include "offload/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "offload/error.hpp"

namespace offload {

namespace {

struct Cell {
    SchedulerKind kind;
    std::uint32_t users;
    std::uint64_t seed;
};

struct Outcome {
    std::vector<RunReport> rows;
    std::vector<std::string> failures;
};

std::string valid_kinds() {
    std::string s;
    for (SchedulerKind k : kAllSchedulers) {
        if (!s.empty()) s += ", ";
        s += to_string(k);
    }
    return s;
}

std::optional<std::vector<SchedulerKind>> pick_schedulers(const ExperimentConfig& config, const CommandOptions& opts,
                                                          std::ostream& err) {
    if (!opts.schedulers) return config.schedulers;
    std::vector<SchedulerKind> out;
    for (const std::string& name : *opts.schedulers) {
        const auto kind = parse_scheduler(name);
        if (!kind) {
            err << fmt::format("error: unknown scheduler '{}'; valid kinds: {}\n", name, valid_kinds());
            return std::nullopt;
        }
        out.push_back(*kind);
    }
    return out;
}

Outcome run_cells(const ExperimentConfig& config, const std::vector<Cell>& cells, unsigned jobs) {
    std::vector<std::optional<RunReport>> results(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const Cell& c = cells[i];
            ScenarioSpec spec = config.scenario;
            spec.workload.users = c.users;
            try {
                results[i] = run_experiment(spec, c.kind, c.seed);
            } catch (const std::exception& e) {
                errors[i] = fmt::format("run failed (scheduler {}, seed {}, users {}): {}", to_string(c.kind), c.seed,
                                        c.users, e.what());
            }
        }
    };
    const unsigned n = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    Outcome out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (results[i]) out.rows.push_back(std::move(*results[i]));
        if (!errors[i].empty()) out.failures.push_back(std::move(errors[i]));
    }
    sort_rows(out.rows);
    return out;
}

int finish(const ExperimentConfig& config, const CommandOptions& opts, Outcome outcome, std::ostream& out,
           std::ostream& err) {
    for (const std::string& f : outcome.failures) err << "error: " << f << '\n';
    try {
        const auto csv = resolve_output(opts.out.value_or(config.output));
        export_csv(outcome.rows, csv);
        if (opts.json_out) export_json(outcome.rows, resolve_output(*opts.json_out));
        out << format_summary(summarize(outcome.rows));
        out << fmt::format("wrote {} rows to {}\n", outcome.rows.size(), csv.string());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return outcome.failures.empty() ? 0 : 1;
}

}  // namespace

std::filesystem::path resolve_output(const std::string& path) {
    const char* dir = std::getenv(kOutDirEnv);
    if (dir == nullptr || *dir == '\0') return path;
    return std::filesystem::path(dir) / std::filesystem::path(path).filename();
}

void sort_rows(std::vector<RunReport>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const RunReport& a, const RunReport& b) {
        return std::tie(a.scheduler, a.users, a.seed) < std::tie(b.scheduler, b.users, b.seed);
    });
}

int cmd_validate(const std::filesystem::path& path, std::span<const std::string> overrides, std::ostream& out,
                 std::ostream& err) {
    const ConfigResult r = validate_config(path, overrides);
    if (!r.ok()) {
        for (const std::string& e : r.errors) err << "error: " << e << '\n';
        return 1;
    }
    const ScenarioSpec& s = r.config->scenario;
    out << fmt::format("ok: {} edge + {} cloud hosts, {} users x {} frames, mmct c={} N={} M={}\n", s.edge_hosts,
                       s.cloud_hosts, s.workload.users, effective_frames(s.workload), s.mmct.c, s.mmct.rollout_steps,
                       s.mmct.iterations);
    return 0;
}

int cmd_run(const ExperimentConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const auto kinds = pick_schedulers(config, opts, err);
    if (!kinds) return 2;
    if (kinds->size() != 1 && opts.schedulers) {
        err << "error: run takes exactly one scheduler\n";
        return 2;
    }
    const SchedulerKind kind = opts.schedulers ? kinds->front() : SchedulerKind::Mmct;
    const std::uint64_t seed = opts.seeds && !opts.seeds->empty() ? opts.seeds->front() : config.seeds.front();

    Outcome outcome;
    EventLog log;
    RunHooks hooks;
    if (opts.trace) hooks.log = &log;
    try {
        outcome.rows.push_back(run_experiment(config.scenario, kind, seed, hooks));
    } catch (const std::exception& e) {
        outcome.failures.push_back(fmt::format("run failed (scheduler {}, seed {}): {}", to_string(kind), seed, e.what()));
    }
    if (opts.trace) {
        const auto path = resolve_output(*opts.trace);
        std::ofstream os(path);
        if (!os) {
            err << fmt::format("error: cannot open {} for writing\n", path.string());
            return 1;
        }
        log.write(os);
    }
    return finish(config, opts, std::move(outcome), out, err);
}

int cmd_compare(const ExperimentConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const auto kinds = pick_schedulers(config, opts, err);
    if (!kinds) return 2;
    if (!opts.schedulers) {
        out << "note: the comparison set is mmct, mcts_plain, greedy, random and genetic; "
               "learned (DRL) and Closure baselines are not included\n";
    }
    const auto& seeds = opts.seeds ? *opts.seeds : config.seeds;
    std::vector<Cell> cells;
    for (SchedulerKind k : *kinds) {
        for (std::uint64_t s : seeds) cells.push_back({k, config.scenario.workload.users, s});
    }
    return finish(config, opts, run_cells(config, cells, opts.jobs), out, err);
}

int cmd_sweep(const ExperimentConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    const auto kinds = pick_schedulers(config, opts, err);
    if (!kinds) return 2;
    const auto& seeds = opts.seeds ? *opts.seeds : config.seeds;
    const auto& users = opts.users ? *opts.users : config.users_sweep;
    std::vector<Cell> cells;
    for (std::uint32_t u : users) {
        for (SchedulerKind k : *kinds) {
            for (std::uint64_t s : seeds) cells.push_back({k, u, s});
        }
    }
    return finish(config, opts, run_cells(config, cells, opts.jobs), out, err);
}

}  // namespace offload

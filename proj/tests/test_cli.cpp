#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "offload/cli.hpp"
#include "offload/config.hpp"
#include "offload/error.hpp"
#include "offload/metrics.hpp"
#include "offload/scenario.hpp"

using namespace offload;
using namespace std::chrono_literals;

namespace {

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "offload_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_config(const std::string& name, const std::string& text) {
    const auto p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has_error(const ConfigResult& r, const std::string& text) {
    return std::find(r.errors.begin(), r.errors.end(), text) != r.errors.end();
}

const char* kTiny = R"({
  "workload": {"users": 2, "frames": 8},
  "cluster": {"edge_hosts": 2, "cloud_hosts": 1},
  "sim": {"drain_intervals": 2},
  "mmct": {"iterations": 4, "rollout_steps": 2},
  "genetic": {"population": 6, "generations": 2}
})";

ExperimentConfig tiny() {
    auto r = parse_config(kTiny);
    REQUIRE(r.ok());
    return *r.config;
}

/// Everything but the wall-clock column.
std::string strip_schedule_time(const std::string& csv) {
    std::stringstream in(csv);
    std::string line;
    std::string out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

}  // namespace

TEST_CASE("empty config gives the published defaults") {
    const auto path = write_config("empty.json", "");
    const auto r = validate_config(path);
    REQUIRE(r.ok());
    const ScenarioSpec& s = r.config->scenario;
    CHECK(s.mmct.c == 0.5);
    CHECK(s.mmct.rollout_steps == 7);
    CHECK(s.mmct.iterations == 10);
    CHECK(s.edge.connection_time == 500us);
    CHECK(s.cloud.connection_time == 5ms);
    CHECK(s.edge.cores == 2);
    CHECK(s.edge.mips_per_core == 4029.0);
    CHECK(s.cloud.cores == 8);
    CHECK(s.cloud.mips_per_core == 1601.0);
    CHECK(s.workload.frame_rate == 60.0);
    CHECK(s.edge_hosts == 30);
    CHECK(s.cloud_hosts == 20);
    CHECK(s.sim.interval == s.workload.frame_period());
    CHECK(r.config->schedulers.size() == 5);
}

TEST_CASE("config errors") {
    CHECK(has_error(parse_config(R"({"mmct": {"c": 1.5}})"), "mmct.c out of [0,1]"));
    CHECK(has_error(parse_config(R"({"mmct.c": -0.1})"), "mmct.c out of [0,1]"));
    CHECK(has_error(parse_config(R"({"foo": 1})"), "unknown key foo"));
    CHECK(has_error(parse_config(R"({"mmct": {"bogus": 1}})"), "unknown key mmct.bogus"));
    CHECK(has_error(parse_config(R"({"mmct": {"c": 0.1}, "mmct.c": 0.2})"), "duplicate key mmct.c"));

    const auto many = parse_config(R"({"foo": 1, "bar": 2, "mmct.c": 3})");
    CHECK_FALSE(many.ok());
    CHECK(many.errors.size() == 3);

    CHECK_FALSE(parse_config("{not json").ok());
    CHECK_FALSE(parse_config("[1, 2]").ok());
    CHECK_FALSE(parse_config(R"({"mmct.iterations": 0})").ok());
    CHECK_FALSE(parse_config(R"({"mmct.iterations": 2.5})").ok());
    CHECK_FALSE(parse_config(R"({"mmct.commit_random_root": 1})").ok());
    CHECK_FALSE(parse_config(R"({"experiment.schedulers": ["mmct", "drl"]})").ok());
    CHECK_FALSE(parse_config(R"({"cluster.edge_hosts": 0, "cluster.cloud_hosts": 0})").ok());
    CHECK_FALSE(parse_config(R"({"mobility.min_ms": 5, "mobility.max_ms": 1})").ok());

    const auto missing = validate_config(scratch_dir() / "does_not_exist.json");
    CHECK_FALSE(missing.ok());
    CHECK(missing.errors.at(0).find("cannot read config") == 0);
}

TEST_CASE("nested and dotted keys are equivalent") {
    const auto a = parse_config(R"({"mmct": {"c": 0.25, "iterations": 12}, "workload": {"users": 3}})");
    const auto b = parse_config(R"({"mmct.c": 0.25, "mmct.iterations": 12, "workload.users": 3})");
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.config->scenario.mmct.c == b.config->scenario.mmct.c);
    CHECK(a.config->scenario.mmct.iterations == 12);
    CHECK(b.config->scenario.workload.users == 3);

    const auto c = parse_config(R"({
      // comments are fine
      "experiment": {"schedulers": ["greedy", "random"], "seeds": [3, 4], "users": [1, 2], "output": "x.csv"},
      "workload": {"mapper": {"length_mi": 55}},
      "objective": {"alpha": 1, "beta": 1, "gamma": 1, "delta": 1}
    })");
    REQUIRE(c.ok());
    CHECK(c.config->schedulers == std::vector<SchedulerKind>{SchedulerKind::Greedy, SchedulerKind::Random});
    CHECK(c.config->seeds == std::vector<std::uint64_t>{3, 4});
    CHECK(c.config->users_sweep == std::vector<std::uint32_t>{1, 2});
    CHECK(c.config->output == "x.csv");
    CHECK(c.config->scenario.workload.defaults(ComponentKind::Mapper).length_mi == 55.0);
    CHECK(c.config->scenario.weights.alpha == doctest::Approx(0.25));
}

TEST_CASE("command-line overrides") {
    const std::vector<std::string> sets{"mmct.iterations=20", "experiment.output=o.csv", "mmct.c=0.1"};
    const auto r = parse_config(R"({"mmct": {"iterations": 3, "c": 0.9}})", sets);
    REQUIRE(r.ok());
    CHECK(r.config->scenario.mmct.iterations == 20);
    CHECK(r.config->scenario.mmct.c == 0.1);
    CHECK(r.config->output == "o.csv");

    const std::vector<std::string> bad{"mmct.c=7"};
    CHECK(has_error(parse_config("", bad), "mmct.c out of [0,1]"));
    const std::vector<std::string> malformed{"mmct.c"};
    CHECK_FALSE(parse_config("", malformed).ok());
}

TEST_CASE("every listed key is accepted") {
    const auto keys = config_keys();
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(std::find(keys.begin(), keys.end(), "mmct.c") != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), "genetic.population") != keys.end());
}

TEST_CASE("scenario runs") {
    ScenarioSpec spec = tiny().scenario;
    const auto a = run_experiment(spec, SchedulerKind::Random, 5);
    const auto b = run_experiment(spec, SchedulerKind::Random, 5);
    CHECK(a.tasks_released == b.tasks_released);
    CHECK(a.tasks_completed == b.tasks_completed);
    CHECK(a.sla_violations == b.sla_violations);
    CHECK(a.energy_joules == b.energy_joules);
    CHECK(a.avg_response_ms == b.avg_response_ms);
    CHECK(a.migrations_count == b.migrations_count);
    CHECK(a.tasks_released == a.tasks_completed + a.tasks_dropped + a.tasks_pending);
    CHECK(a.intervals == scenario_horizon(spec));
    CHECK(a.series.size() == a.intervals);

    const auto cluster = make_cluster(spec);
    const auto ctx = make_context(spec, cluster);
    const auto workload = generate_workload(spec.workload, 1);
    const auto empty = run_scenario(workload, cluster, SchedulerKind::Random, ctx, spec.mobility, 2, 0, 1);
    CHECK(empty.intervals == 0);
    CHECK(empty.tasks_released == 0);
    CHECK(empty.energy_joules == 0.0);

    ScenarioSpec paper = ExperimentConfig{}.scenario;
    std::uint64_t workflows = 0;
    for (const auto& w : generate_workload(paper.workload, 1)) workflows += w.tasks.empty() ? 0 : 1;
    CHECK(workflows == 2000);
}

TEST_CASE("run command") {
    auto config = tiny();
    const auto out = scratch_dir() / "run.csv";
    CommandOptions opts;
    opts.schedulers = std::vector<std::string>{"random"};
    opts.seeds = std::vector<std::uint64_t>{3};
    opts.out = out.string();
    opts.trace = (scratch_dir() / "trace.txt").string();
    std::ostringstream o;
    std::ostringstream e;
    CHECK(cmd_run(config, opts, o, e) == 0);
    const auto first = slurp(out);
    CHECK(parse_csv(first).size() == 1);
    CHECK(o.str().find("wrote 1 rows") != std::string::npos);
    CHECK_FALSE(slurp(*opts.trace).empty());

    CHECK(cmd_run(config, opts, o, e) == 0);
    CHECK(strip_schedule_time(slurp(out)) == strip_schedule_time(first));

    opts.schedulers = std::vector<std::string>{"drl"};
    std::ostringstream err;
    CHECK(cmd_run(config, opts, o, err) != 0);
    CHECK(err.str().find("mmct, mcts_plain, greedy, random, genetic") != std::string::npos);
}

TEST_CASE("compare command") {
    auto config = tiny();
    const auto out = scratch_dir() / "compare.csv";
    CommandOptions opts;
    opts.seeds = std::vector<std::uint64_t>{1, 2};
    opts.out = out.string();
    opts.json_out = (scratch_dir() / "compare.json").string();
    opts.jobs = 2;
    std::ostringstream o;
    std::ostringstream e;
    REQUIRE(cmd_compare(config, opts, o, e) == 0);
    const auto rows = parse_csv(slurp(out));
    CHECK(rows.size() == 10);
    CHECK(summarize(rows).size() == 5);
    CHECK(o.str().find("DRL") != std::string::npos);
    CHECK(std::is_sorted(rows.begin(), rows.end(), [](const RunReport& a, const RunReport& b) {
        return std::tie(a.scheduler, a.users, a.seed) < std::tie(b.scheduler, b.users, b.seed);
    }));
    CHECK_FALSE(slurp(*opts.json_out).empty());

    // Parallel and serial runs write the same rows.
    opts.jobs = 1;
    const auto serial = scratch_dir() / "compare_serial.csv";
    opts.out = serial.string();
    REQUIRE(cmd_compare(config, opts, o, e) == 0);
    CHECK(strip_schedule_time(slurp(serial)) == strip_schedule_time(slurp(out)));
}

TEST_CASE("sweep command") {
    auto config = tiny();
    const auto out = scratch_dir() / "sweep.csv";
    CommandOptions opts;
    opts.schedulers = std::vector<std::string>{"greedy"};
    opts.users = std::vector<std::uint32_t>{5, 10, 20};
    opts.out = out.string();
    std::ostringstream o;
    std::ostringstream e;
    REQUIRE(cmd_sweep(config, opts, o, e) == 0);
    const auto rows = parse_csv(slurp(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].users == 5);
    CHECK(rows[0].tasks_released < rows[1].tasks_released);
    CHECK(rows[1].tasks_released < rows[2].tasks_released);

    opts.users = std::vector<std::uint32_t>{0};
    std::ostringstream err;
    CHECK(cmd_sweep(config, opts, o, err) != 0);
    CHECK(err.str().find("empty workload") != std::string::npos);
    CHECK(err.str().find("scheduler greedy, seed 1") != std::string::npos);
}

TEST_CASE("output directory override") {
    const auto dir = scratch_dir() / "redirect";
    std::filesystem::create_directories(dir);
    ::setenv(kOutDirEnv, dir.c_str(), 1);
    CHECK(resolve_output("some/where/r.csv") == dir / "r.csv");
    auto config = tiny();
    CommandOptions opts;
    opts.schedulers = std::vector<std::string>{"random"};
    opts.out = "elsewhere/redirected.csv";
    std::ostringstream o;
    std::ostringstream e;
    CHECK(cmd_run(config, opts, o, e) == 0);
    CHECK(std::filesystem::exists(dir / "redirected.csv"));
    ::unsetenv(kOutDirEnv);
    CHECK(resolve_output("a/b.csv") == std::filesystem::path("a/b.csv"));
}

TEST_CASE("validate command") {
    std::ostringstream o;
    std::ostringstream e;
    CHECK(cmd_validate(write_config("ok.json", kTiny), {}, o, e) == 0);
    CHECK(o.str().rfind("ok:", 0) == 0);
    std::ostringstream o2;
    std::ostringstream e2;
    CHECK(cmd_validate(write_config("bad.json", R"({"foo": 1})"), {}, o2, e2) == 1);
    CHECK(e2.str() == "error: unknown key foo\n");
}

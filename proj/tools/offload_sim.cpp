#include <iostream>

#include <CLI11.hpp>

#include "offload/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> schedulers;
    std::vector<std::uint64_t> seeds;
    std::vector<std::uint32_t> users;
    std::string out;
    std::string json;
    std::string trace;
    std::vector<std::string> overrides;
    unsigned jobs = 1;
};

offload::CommandOptions to_options(const Flags& f) {
    offload::CommandOptions o;
    if (!f.schedulers.empty()) o.schedulers = f.schedulers;
    if (!f.seeds.empty()) o.seeds = f.seeds;
    if (!f.users.empty()) o.users = f.users;
    if (!f.out.empty()) o.out = f.out;
    if (!f.json.empty()) o.json_out = f.json;
    if (!f.trace.empty()) o.trace = f.trace;
    o.jobs = f.jobs;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-cloud offloading simulator"};
    app.require_subcommand(1);
    Flags f;

    const auto common = [&f](CLI::App* sub) {
        sub->add_option("config", f.config, "JSON experiment config (empty file = defaults)")->required();
        sub->add_option("--out", f.out, "CSV output path");
        sub->add_option("--json", f.json, "Also write a JSON mirror here");
        sub->add_option("--set", f.overrides, "Override a config key, e.g. --set mmct.iterations=20");
    };

    auto* run = app.add_subcommand("run", "One scheduler, one seed");
    common(run);
    std::string scheduler;
    std::uint64_t seed = 0;
    auto* sched_opt = run->add_option("--scheduler", scheduler, "mmct, mcts_plain, greedy, random or genetic");
    auto* seed_opt = run->add_option("--seed", seed, "Seed");
    run->add_option("--trace", f.trace, "Write the event log here");

    auto* compare = app.add_subcommand("compare", "Schedulers x seeds");
    common(compare);
    compare->add_option("--schedulers", f.schedulers)->delimiter(',');
    compare->add_option("--seeds", f.seeds)->delimiter(',');
    compare->add_option("--jobs", f.jobs, "Parallel cells")->check(CLI::Range(1u, 256u));

    auto* sweep = app.add_subcommand("sweep", "Schedulers x seeds x user counts");
    common(sweep);
    sweep->add_option("--users", f.users)->delimiter(',');
    sweep->add_option("--schedulers", f.schedulers)->delimiter(',');
    sweep->add_option("--seeds", f.seeds)->delimiter(',');
    sweep->add_option("--jobs", f.jobs, "Parallel cells")->check(CLI::Range(1u, 256u));

    auto* validate = app.add_subcommand("validate", "Check a config file");
    validate->add_option("config", f.config)->required();
    validate->add_option("--set", f.overrides, "Override a config key");

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return offload::cmd_validate(f.config, f.overrides, std::cout, std::cerr);

    const offload::ConfigResult cfg = offload::validate_config(f.config, f.overrides);
    if (!cfg.ok()) {
        for (const std::string& e : cfg.errors) std::cerr << "error: " << e << '\n';
        return 2;
    }
    if (run->parsed()) {
        if (*sched_opt) f.schedulers = {scheduler};
        if (*seed_opt) f.seeds = {seed};
        return offload::cmd_run(*cfg.config, to_options(f), std::cout, std::cerr);
    }
    if (compare->parsed()) return offload::cmd_compare(*cfg.config, to_options(f), std::cout, std::cerr);
    return offload::cmd_sweep(*cfg.config, to_options(f), std::cout, std::cerr);
}

#include "offload/scenario.hpp"

#include <chrono>

#include <fmt/format.h>

#include "offload/error.hpp"

namespace offload {

ClusterState make_cluster(const ScenarioSpec& spec) {
    return default_cluster(spec.edge_hosts, spec.cloud_hosts, spec.edge, spec.cloud, spec.network);
}

SchedulerContext make_context(const ScenarioSpec& spec, const ClusterState& cluster) {
    SchedulerContext ctx;
    ctx.sim = spec.sim;
    ctx.sim.interval = spec.workload.frame_period();
    ctx.weights = spec.weights;
    ctx.bounds = default_bounds(cluster.hosts, spec.workload.frame_period(), ctx.sim.interval);
    if (spec.ars_bounds_s) ctx.bounds.ars_s = *spec.ars_bounds_s;
    if (spec.aec_bounds_j) ctx.bounds.aec_j = *spec.aec_bounds_j;
    ctx.mmct = spec.mmct;
    ctx.ga = spec.ga;
    return ctx;
}

std::uint64_t scenario_horizon(const ScenarioSpec& spec) {
    return effective_frames(spec.workload) + spec.drain_intervals;
}

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
    return mix_seed(seed, static_cast<std::uint64_t>(stream));
}

RunReport run_scenario(std::span<const WorkflowInstance> workload, const ClusterState& cluster, SchedulerKind kind,
                       const SchedulerContext& ctx, const MobilitySpec& mobility, std::uint32_t users,
                       std::uint64_t horizon, std::uint64_t seed, const RunHooks& hooks) {
    RunReport report;
    report.scheduler = std::string(to_string(kind));
    report.seed = seed;
    report.users = users;

    SimState state = make_sim_state(cluster, users, mobility);
    Rng mobility_rng(stream_seed(seed, Stream::Mobility));
    Rng scheduler_rng(stream_seed(seed, Stream::Scheduler));
    std::size_t next = 0;

    for (std::uint64_t i = 0; i < horizon; ++i) {
        const Duration window_end = state.clock() + ctx.sim.interval;
        const std::uint64_t released_before = state.released;
        while (next < workload.size() && workload[next].release_time < window_end) {
            release_workflow(state, workload[next], hooks.log);
            ++next;
        }
        mobility_step(state.cluster, mobility, mobility_rng);

        const std::vector<TaskId> pending = schedulable_tasks(state, ctx.sim);
        Assignment assignment;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            assignment = schedule(kind, state, pending, ctx, scheduler_rng, hooks.search);
        } catch (const std::exception& e) {
            throw Error(fmt::format("scheduler {} failed at interval {} (seed {}): {}", to_string(kind), i, seed,
                                    e.what()));
        }
        const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - t0;

        IntervalReport interval = simulate_interval(state, assignment, ctx.sim, hooks.log);
        interval.released = state.released - released_before;
        if (hooks.on_interval) hooks.on_interval(state, interval);
        accumulate(report, interval, elapsed.count());
    }

    const HorizonTally tally = close_horizon(state, hooks.log);
    report.tasks_dropped = tally.dropped;
    report.tasks_pending = tally.pending;
    report.sla_violations += tally.new_violations;
    return report;
}

RunReport run_experiment(const ScenarioSpec& spec, SchedulerKind kind, std::uint64_t seed, const RunHooks& hooks) {
    const auto workload = generate_workload(spec.workload, stream_seed(seed, Stream::Workload));
    const ClusterState cluster = make_cluster(spec);
    const SchedulerContext ctx = make_context(spec, cluster);
    return run_scenario(workload, cluster, kind, ctx, spec.mobility, spec.workload.users, scenario_horizon(spec), seed,
                        hooks);
}

}  // namespace offload

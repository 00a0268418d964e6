#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "offload/infra.hpp"
#include "offload/metrics.hpp"
#include "offload/schedulers.hpp"
#include "offload/workflow.hpp"

namespace offload {

/// Everything needed to rebuild one experiment cell apart from scheduler and seed.
struct ScenarioSpec {
    WorkloadProfile workload;
    std::uint32_t edge_hosts = 30;
    std::uint32_t cloud_hosts = 20;
    HostTemplate edge = default_edge_template();
    HostTemplate cloud = default_cloud_template();
    NetworkSpec network;
    MobilitySpec mobility;
    SimConfig sim;  // interval is overwritten with the frame period
    QosWeights weights;
    std::optional<Range> ars_bounds_s;  // defaults derive from the fleet
    std::optional<Range> aec_bounds_j;
    MmctParams mmct;
    GaParams ga;
    std::uint64_t drain_intervals = 12;  // extra intervals after the last frame
};

ClusterState make_cluster(const ScenarioSpec& spec);
SchedulerContext make_context(const ScenarioSpec& spec, const ClusterState& cluster);

/// Release frames, then drain.
std::uint64_t scenario_horizon(const ScenarioSpec& spec);

/// Independent streams per seed so every scheduler sees the same environment.
enum class Stream : std::uint64_t { Workload = 1, Mobility = 2, Scheduler = 3 };
std::uint64_t stream_seed(std::uint64_t seed, Stream stream);

struct RunHooks {
    EventLog* log = nullptr;
    std::function<void(const SimState&, const IntervalReport&)> on_interval;
    SearchStats* search = nullptr;
};

/// Per interval: release due workflows, move users, schedule (timed),
/// simulate, accumulate. Unfinished work is classified at the horizon.
/// Scheduler errors are rethrown with the scheduler name and interval.
RunReport run_scenario(std::span<const WorkflowInstance> workload, const ClusterState& cluster, SchedulerKind kind,
                       const SchedulerContext& ctx, const MobilitySpec& mobility, std::uint32_t users,
                       std::uint64_t horizon, std::uint64_t seed, const RunHooks& hooks = {});

/// Generates the workload from the seed and runs the full horizon.
RunReport run_experiment(const ScenarioSpec& spec, SchedulerKind kind, std::uint64_t seed,
                         const RunHooks& hooks = {});

}  // namespace offload

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "offload/infra.hpp"
#include "offload/rng.hpp"
#include "offload/scenario.hpp"
#include "offload/schedulers.hpp"
#include "offload/simcore.hpp"
#include "offload/workflow.hpp"

namespace testkit {

using namespace offload;

/// Standalone offloadable task (no predecessors) wrapped in its own instance.
inline WorkflowInstance lone_task(TaskId id, UserId user, double mi, double in_bits, double out_bits,
                                  Duration release = Duration{0}, Duration deadline = std::chrono::milliseconds{100}) {
    WorkflowInstance w;
    w.id = id;
    w.user = user;
    w.release_time = release;
    TaskSpec t;
    t.id = id;
    t.user = user;
    t.kind = ComponentKind::FeatureExtractor;
    t.length_mi = mi;
    t.input_bits = in_bits;
    t.output_bits = out_bits;
    t.deadline = deadline;
    w.tasks.push_back(t);
    return w;
}

inline MobilitySpec still_users() {
    MobilitySpec m;
    m.handover_probability = 0.0;
    return m;
}

inline SchedulerContext context_for(const ClusterState& cluster, Duration interval, Duration frame_period) {
    SchedulerContext ctx;
    ctx.sim.interval = interval;
    ctx.bounds = default_bounds(cluster.hosts, frame_period, interval);
    return ctx;
}

/// Small mixed fleet: `edge` edge hosts then `cloud` cloud hosts.
inline ClusterState small_cluster(std::uint32_t edge, std::uint32_t cloud) { return default_cluster(edge, cloud); }

struct Snapshot {
    SimState state;
    SchedulerContext ctx;
    std::vector<TaskId> pending;
};

/// Mid-run state of a random small scenario: a few frames released, driven
/// by random placements for a random number of intervals. `pending` holds
/// 1..max_tasks schedulable tasks.
inline Snapshot random_snapshot(Rng& rng, std::size_t max_tasks, std::uint32_t max_hosts) {
    while (true) {
        const auto hosts = static_cast<std::uint32_t>(1 + rng.index(max_hosts));
        const auto edge = static_cast<std::uint32_t>(rng.index(hosts + 1));
        ClusterState cluster = default_cluster(edge, hosts - edge);

        WorkloadProfile profile;
        profile.users = static_cast<std::uint32_t>(1 + rng.index(3));
        profile.frames = 1 + rng.index(6);
        const auto workload = generate_workload(profile, rng.next());

        Snapshot s{make_sim_state(cluster, profile.users, still_users()), {}, {}};
        s.ctx = context_for(s.state.cluster, profile.frame_period(), profile.frame_period());
        const std::size_t warmup = rng.index(4);
        std::size_t next = 0;
        for (std::size_t i = 0;; ++i) {
            const Duration t1 = s.state.clock() + s.ctx.sim.interval;
            while (next < workload.size() && workload[next].release_time < t1) release_workflow(s.state, workload[next++]);
            if (i == warmup) break;
            const auto tasks = schedulable_tasks(s.state, s.ctx.sim);
            simulate_interval(s.state, random_schedule(s.state, tasks, rng), s.ctx.sim);
        }
        auto tasks = schedulable_tasks(s.state, s.ctx.sim);
        if (tasks.empty()) continue;
        while (tasks.size() > max_tasks) tasks.erase(tasks.begin() + static_cast<std::ptrdiff_t>(rng.index(tasks.size())));
        s.pending = tasks;
        return s;
    }
}

}  // namespace testkit

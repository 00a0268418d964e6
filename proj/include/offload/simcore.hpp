#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "offload/infra.hpp"
#include "offload/objective.hpp"
#include "offload/time.hpp"
#include "offload/workflow.hpp"

namespace offload {

struct Decision {
    TaskId task = 0;
    HostId host = 0;

    friend auto operator<=>(const Decision&, const Decision&) = default;
};

/// Task-to-host mapping for one interval. Tasks left out keep their current
/// placement (or keep waiting when they have none).
using Assignment = std::vector<Decision>;

struct SimConfig {
    Duration interval = from_seconds(1.0 / 60.0);
    double migration_state_fraction = 0.5;
    // Also re-place tasks that are assigned but not yet computing.
    bool replace_queued = false;
    Duration renderer_time = std::chrono::milliseconds{1};
};

enum class Phase : std::uint8_t {
    Unassigned,      // released, no host yet
    AwaitingInputs,  // host chosen, predecessors not delivered
    Uplink,
    Connecting,
    Queued,
    Running,
    Migrating,       // state transfer between tiers
    Downlink,
    LocalRun,        // renderer on the device
    Done,
};

std::string_view to_string(Phase phase);

struct TimeSplit {
    Duration transmission{0};
    Duration connection{0};
    Duration queuing{0};
    Duration computation{0};

    Duration total() const { return transmission + connection + queuing + computation; }
};

inline constexpr std::size_t kMaxPredecessors = 4;

struct LiveTask {
    TaskId id = 0;
    UserId user = 0;
    ComponentKind kind = ComponentKind::FeatureExtractor;
    Phase phase = Phase::Unassigned;
    bool missed = false;
    bool has_due = false;
    std::uint8_t pred_count = 0;
    std::uint8_t preds_left = 0;
    std::uint16_t migrations = 0;
    std::int32_t host = -1;

    double length_mi = 0.0;
    double remaining_mi = 0.0;
    double input_bits = 0.0;
    double output_bits = 0.0;

    Duration release{0};
    Duration deadline{0};
    Duration due{0};  // absolute; renderer's is anchored when its inputs are ready
    Duration phase_since{0};
    Duration phase_end{0};
    Duration enqueued_at{0};
    Duration started_at{-1};
    Duration finished_at{-1};
    Duration delivered_at{-1};

    std::array<TaskId, kMaxPredecessors> preds{};
    TimeSplit times;  // complete once the task is done; queuing lags while waiting

    bool offloadable() const { return !is_local_only(kind); }
};

/// Released tasks in id order, stored in shared fixed-size chunks. Copying a
/// store copies chunk pointers; a chunk is duplicated on its first write, so a
/// forked state only pays for the tasks an interval actually touches.
class TaskStore {
public:
    static constexpr std::size_t kChunkSize = 32;

    /// Absolute indices [first(), end()) are addressable; earlier chunks were retired.
    std::size_t first() const { return base_ * kChunkSize; }
    std::size_t end() const { return size_; }

    const LiveTask& operator[](std::size_t i) const { return (*chunks_[i / kChunkSize - base_])[i % kChunkSize]; }
    LiveTask& mut(std::size_t i);

    void push_back(const LiveTask& task);
    const LiveTask* back() const { return size_ > first() ? &(*this)[size_ - 1] : nullptr; }

    /// First index in [from, end()) whose id is >= `id`.
    std::size_t lower_bound(TaskId id, std::size_t from) const;

    /// Drops whole chunks lying entirely below `index`.
    void retire_before(std::size_t index);

private:
    using Chunk = std::array<LiveTask, kChunkSize>;
    std::vector<std::shared_ptr<Chunk>> chunks_;
    std::size_t base_ = 0;
    std::size_t size_ = 0;
};

/// FIFO of task indices waiting for a core; ordered by (enqueue time, id).
struct HostQueue {
    std::vector<std::uint32_t> items;
    std::size_t head = 0;

    bool empty() const { return head == items.size(); }
};

struct SimState {
    ClusterState cluster;
    TaskStore tasks;
    std::vector<HostQueue> queues;    // per host
    std::vector<std::uint32_t> timed;  // tasks whose current phase ends at a known time
    std::size_t first_live = 0;        // every task below is done
    std::size_t miss_cursor = 0;       // every unfinished task below is already marked missed
    Duration max_deadline{0};
    std::uint64_t live_offloadable = 0;
    std::uint64_t interval = 0;
    std::uint64_t released = 0;
    std::uint64_t completed = 0;

    Duration clock() const { return cluster.clock; }

    /// Calls f(const LiveTask&) for every unfinished task in id order.
    template <class F>
    void for_each_live(F&& f) const {
        for (std::size_t i = first_live; i < tasks.end(); ++i) {
            if (tasks[i].phase != Phase::Done) f(tasks[i]);
        }
    }
};

struct CompletedTask {
    TaskId id = 0;
    UserId user = 0;
    ComponentKind kind = ComponentKind::FeatureExtractor;
    std::int32_t host = -1;
    Duration release{0};
    Duration started{0};
    Duration finish{0};     // computation done
    Duration delivered{0};  // output back at the device
    TimeSplit times;
    bool missed = false;
    std::uint16_t migrations = 0;

    Duration response() const { return delivered - release; }
};

struct MigrationEvent {
    TaskId task = 0;
    HostId from = 0;
    HostId to = 0;
    Duration duration{0};
    double energy_j = 0.0;
};

struct IntervalReport {
    Duration start{0};
    Duration length{0};
    std::uint64_t released = 0;       // filled in by the scenario driver
    std::uint64_t window_tasks = 0;   // live offloadable tasks at interval start
    std::vector<CompletedTask> completed;
    std::vector<MigrationEvent> migrations;
    double transmission_energy_j = 0.0;  // uplinks, downlinks, migrations
    double computation_energy_j = 0.0;   // host idle + busy
    std::uint64_t deadline_misses = 0;
    std::vector<double> host_utilization;

    double energy_j() const { return transmission_energy_j + computation_energy_j; }
    Duration migration_time() const;
};

enum class TraceKind : std::uint8_t {
    Release,
    Assign,
    UplinkStart,
    Arrive,
    Start,
    Finish,
    Delivered,
    MigrationStart,
    Miss,
};

std::string_view to_string(TraceKind kind);

struct TraceEvent {
    Duration time{0};
    TraceKind kind = TraceKind::Release;
    TaskId task = 0;
    std::int64_t host = -1;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Newline-delimited "time_ns kind task host" records. Debugging aid; the
/// format is not a stable interface.
struct EventLog {
    std::vector<TraceEvent> events;

    void write(std::ostream& os) const;
};

SimState make_sim_state(ClusterState cluster, std::uint32_t users, const MobilitySpec& mobility = {});

void release_workflow(SimState& state, const WorkflowInstance& instance, EventLog* log = nullptr);

const LiveTask* find_task(const SimState& state, TaskId id);

bool is_schedulable(const LiveTask& task, const SimConfig& config);

/// Offloadable tasks the broker may (re)place this interval, ascending id.
std::vector<TaskId> schedulable_tasks(const SimState& state, const SimConfig& config);

inline SimState fork_state(const SimState& state) { return state; }

/// Advances the state by one interval. Throws Error("invalid assignment")
/// when a decision names an unknown host or a task that cannot be placed now.
IntervalReport simulate_interval(SimState& state, std::span<const Decision> assignment, const SimConfig& config,
                                 EventLog* log = nullptr);

QosIndicators indicators_of(const IntervalReport& report);

struct HorizonTally {
    std::uint64_t dropped = 0;  // past their deadline, counted as SLA violations
    std::uint64_t pending = 0;
    std::uint64_t new_violations = 0;
};

/// Classifies every unfinished task at the end of a run.
HorizonTally close_horizon(SimState& state, EventLog* log = nullptr);

}  // namespace offload

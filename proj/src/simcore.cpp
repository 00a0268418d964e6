#include "offload/simcore.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <ostream>

#include "offload/error.hpp"

namespace offload {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Unassigned: return "unassigned";
        case Phase::AwaitingInputs: return "awaiting_inputs";
        case Phase::Uplink: return "uplink";
        case Phase::Connecting: return "connecting";
        case Phase::Queued: return "queued";
        case Phase::Running: return "running";
        case Phase::Migrating: return "migrating";
        case Phase::Downlink: return "downlink";
        case Phase::LocalRun: return "local_run";
        case Phase::Done: return "done";
    }
    return "unknown";
}

std::string_view to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::Release: return "release";
        case TraceKind::Assign: return "assign";
        case TraceKind::UplinkStart: return "uplink";
        case TraceKind::Arrive: return "arrive";
        case TraceKind::Start: return "start";
        case TraceKind::Finish: return "finish";
        case TraceKind::Delivered: return "delivered";
        case TraceKind::MigrationStart: return "migrate";
        case TraceKind::Miss: return "miss";
    }
    return "unknown";
}

void EventLog::write(std::ostream& os) const {
    for (const TraceEvent& e : events) {
        os << e.time.count() << ' ' << to_string(e.kind) << ' ' << e.task << ' ' << e.host << '\n';
    }
}

Duration IntervalReport::migration_time() const {
    Duration total{0};
    for (const MigrationEvent& m : migrations) total += m.duration;
    return total;
}

LiveTask& TaskStore::mut(std::size_t i) {
    std::shared_ptr<Chunk>& chunk = chunks_[i / kChunkSize - base_];
    if (chunk.use_count() > 1) chunk = std::make_shared<Chunk>(*chunk);
    return (*chunk)[i % kChunkSize];
}

void TaskStore::push_back(const LiveTask& task) {
    if (size_ % kChunkSize == 0) chunks_.push_back(std::make_shared<Chunk>());
    mut(size_) = task;
    ++size_;
}

std::size_t TaskStore::lower_bound(TaskId id, std::size_t from) const {
    std::size_t lo = std::max(from, first());
    std::size_t hi = size_;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if ((*this)[mid].id < id) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

void TaskStore::retire_before(std::size_t index) {
    const std::size_t upto = std::min(index, size_) / kChunkSize;
    if (upto <= base_) return;
    const std::size_t drop = upto - base_;
    chunks_.erase(chunks_.begin(), chunks_.begin() + static_cast<std::ptrdiff_t>(drop));
    base_ += drop;
}

SimState make_sim_state(ClusterState cluster, std::uint32_t users, const MobilitySpec& mobility) {
    SimState state;
    state.cluster = std::move(cluster);
    state.cluster.runtime.assign(state.cluster.hosts.size(), HostRuntime{});
    state.cluster.users.assign(users, UserLink{mobility.initial_latency, Duration{0}});
    state.queues.assign(state.cluster.hosts.size(), HostQueue{});
    return state;
}

namespace {

bool timed(Phase p) {
    switch (p) {
        case Phase::Uplink:
        case Phase::Connecting:
        case Phase::Running:
        case Phase::Migrating:
        case Phase::Downlink:
        case Phase::LocalRun: return true;
        default: return false;
    }
}

Duration& bucket(TimeSplit& times, Phase p) {
    switch (p) {
        case Phase::Uplink:
        case Phase::Migrating:
        case Phase::Downlink: return times.transmission;
        case Phase::Connecting: return times.connection;
        case Phase::Running:
        case Phase::LocalRun: return times.computation;
        default: return times.queuing;
    }
}

std::optional<std::size_t> index_of(const SimState& state, TaskId id) {
    const std::size_t i = state.tasks.lower_bound(id, state.first_live);
    if (i == state.tasks.end() || state.tasks[i].id != id) return std::nullopt;
    return i;
}

}  // namespace

const LiveTask* find_task(const SimState& state, TaskId id) {
    const auto i = index_of(state, id);
    return i ? &state.tasks[*i] : nullptr;
}

void release_workflow(SimState& state, const WorkflowInstance& instance, EventLog* log) {
    for (const TaskSpec& spec : instance.tasks) {
        if (spec.kind == ComponentKind::VideoCapturer) continue;
        if (spec.predecessors.size() > kMaxPredecessors) throw Error("too many predecessors");
        const LiveTask* last = state.tasks.back();
        if (last != nullptr && last->id >= spec.id) throw Error("task ids must be released in order");
        if (spec.user >= state.cluster.users.size()) throw Error("user out of range");

        LiveTask t;
        t.id = spec.id;
        t.user = spec.user;
        t.kind = spec.kind;
        t.phase = Phase::Unassigned;
        t.length_mi = spec.length_mi;
        t.remaining_mi = spec.length_mi;
        t.input_bits = spec.input_bits;
        t.output_bits = spec.output_bits;
        t.release = instance.release_time;
        t.deadline = spec.deadline;
        t.phase_since = instance.release_time;
        t.pred_count = static_cast<std::uint8_t>(spec.predecessors.size());
        t.preds_left = t.pred_count;
        std::copy(spec.predecessors.begin(), spec.predecessors.end(), t.preds.begin());
        if (t.offloadable()) {
            t.has_due = true;
            t.due = t.release + t.deadline;
            state.max_deadline = std::max(state.max_deadline, t.deadline);
            ++state.live_offloadable;
        } else {
            t.phase = Phase::AwaitingInputs;
        }
        state.tasks.push_back(t);
        ++state.released;
        if (log) log->events.push_back({instance.release_time, TraceKind::Release, t.id, -1});
    }
}

bool is_schedulable(const LiveTask& t, const SimConfig& config) {
    if (!t.offloadable()) return false;
    switch (t.phase) {
        case Phase::Unassigned:
        case Phase::Running: return true;
        case Phase::AwaitingInputs:
        case Phase::Queued: return config.replace_queued;
        default: return false;
    }
}

std::vector<TaskId> schedulable_tasks(const SimState& state, const SimConfig& config) {
    std::vector<TaskId> out;
    state.for_each_live([&](const LiveTask& t) {
        if (is_schedulable(t, config)) out.push_back(t.id);
    });
    return out;
}

namespace {

/// Executes one interval [t0, t1] over a state it exclusively borrows.
class IntervalRun {
public:
    IntervalRun(SimState& state, const SimConfig& config, EventLog* log)
        : state_(state), tasks_(state.tasks), config_(config), log_(log), hosts_(state.cluster.hosts),
          runtime_(state.cluster.runtime) {
        t0_ = state.cluster.clock;
        t1_ = t0_ + config.interval;
        window_busy_.assign(hosts_.size(), Duration{0});
        report_.start = t0_;
        report_.length = config.interval;
        report_.window_tasks = state.live_offloadable;
    }

    IntervalReport run(std::span<const Decision> assignment) {
        validate(assignment);
        for (const Decision& d : assignment) apply(d);

        std::sort(state_.timed.begin(), state_.timed.end());
        state_.timed.erase(std::unique(state_.timed.begin(), state_.timed.end()), state_.timed.end());
        for (std::uint32_t i : state_.timed) {
            if (timed(tasks_[i].phase)) events_.push_back({tasks_[i].phase_end, i});
        }
        std::make_heap(events_.begin(), events_.end(), later);
        state_.timed.clear();
        looping_ = true;

        for (HostId h = 0; h < hosts_.size(); ++h) dispatch(h, t0_);

        while (!events_.empty() && events_.front().time <= t1_) {
            std::pop_heap(events_.begin(), events_.end(), later);
            const Event e = events_.back();
            events_.pop_back();
            fire(e.index, e.time);
        }

        close_window();
        return std::move(report_);
    }

private:
    struct Event {
        Duration time;
        std::uint32_t index;
    };

    // Heap order: earliest time first, then lower task index.
    static bool later(const Event& a, const Event& b) {
        if (a.time != b.time) return a.time > b.time;
        return a.index > b.index;
    }

    void trace(Duration at, TraceKind kind, const LiveTask& t) {
        if (log_) log_->events.push_back({at, kind, t.id, t.host});
    }

    void validate(std::span<const Decision> assignment) {
        std::vector<TaskId> seen;
        seen.reserve(assignment.size());
        for (const Decision& d : assignment) {
            if (d.host >= hosts_.size()) throw Error("invalid assignment: unknown host");
            const LiveTask* t = find_task(state_, d.task);
            if (t == nullptr || !is_schedulable(*t, config_)) throw Error("invalid assignment: task not schedulable");
            seen.push_back(d.task);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            throw Error("invalid assignment: duplicate task");
        }
    }

    // Sets the end of a timed phase and files the event.
    void until(std::uint32_t index, LiveTask& t, Duration end) {
        t.phase_end = end;
        events_.push_back({end, index});
        std::push_heap(events_.begin(), events_.end(), later);
    }

    // Closes the current phase's time span at `at` and opens the next one.
    void enter(LiveTask& t, Phase next, Duration at) {
        bucket(t.times, t.phase) += at - t.phase_since;
        if (t.phase == Phase::Running) add_busy(static_cast<HostId>(t.host), at - t.phase_since);
        t.phase = next;
        t.phase_since = at;
    }

    void add_busy(HostId h, Duration span) {
        runtime_[h].busy_core_time += span;
        window_busy_[h] += span;
    }

    void enqueue(std::uint32_t index, LiveTask& t, Duration at) {
        enter(t, Phase::Queued, at);
        t.enqueued_at = at;
        HostQueue& q = state_.queues[static_cast<HostId>(t.host)];
        auto pos = q.items.end();
        while (pos != q.items.begin() + static_cast<std::ptrdiff_t>(q.head)) {
            const LiveTask& prev = tasks_[*(pos - 1)];
            if (prev.enqueued_at < at || (prev.enqueued_at == at && prev.id < t.id)) break;
            --pos;
        }
        q.items.insert(pos, index);
    }

    void dequeue(std::uint32_t index, HostId h) {
        HostQueue& q = state_.queues[h];
        const auto it = std::find(q.items.begin() + static_cast<std::ptrdiff_t>(q.head), q.items.end(), index);
        if (it != q.items.end()) q.items.erase(it);
    }

    void apply(const Decision& d) {
        const std::uint32_t index = static_cast<std::uint32_t>(*index_of(state_, d.task));
        LiveTask& t = tasks_.mut(index);
        if (log_) log_->events.push_back({t0_, TraceKind::Assign, t.id, static_cast<std::int64_t>(d.host)});
        if (t.host == static_cast<std::int32_t>(d.host)) return;

        switch (t.phase) {
            case Phase::Unassigned:
                t.host = static_cast<std::int32_t>(d.host);
                if (t.preds_left == 0) {
                    start_uplink(index, t, t0_);
                } else {
                    t.phase = Phase::AwaitingInputs;  // still queuing time
                }
                return;
            case Phase::AwaitingInputs:
                t.host = static_cast<std::int32_t>(d.host);
                return;
            case Phase::Queued:
                dequeue(index, static_cast<HostId>(t.host));
                migrate(index, t, d.host);
                return;
            case Phase::Running:
                migrate(index, t, d.host);
                return;
            default:
                throw Error("invalid assignment: task not schedulable");
        }
    }

    // Applied before the event heap exists; timed phases are recorded in state_.timed.
    void migrate(std::uint32_t index, LiveTask& t, HostId to) {
        const HostId from = static_cast<HostId>(t.host);
        const HostSpec& src = hosts_[from];
        if (t.phase == Phase::Running) {
            t.remaining_mi = std::max(0.0, to_seconds(t.phase_end - t0_) * src.mips_per_core);
            --runtime_[from].busy_cores;
        }
        const double progress = t.length_mi > 0 ? 1.0 - t.remaining_mi / t.length_mi : 0.0;
        const double payload = t.input_bits + config_.migration_state_fraction * t.output_bits * progress;
        const MigrationCost cost = migration_cost(payload, src, hosts_[to], state_.cluster.network);

        // Moves inside a tier are free and not counted as migrations.
        if (src.tier != hosts_[to].tier) {
            report_.migrations.push_back({t.id, from, to, cost.duration(), cost.energy_j});
            report_.transmission_energy_j += cost.energy_j;
            ++t.migrations;
        }

        if (cost.duration() == Duration{0}) {
            t.host = static_cast<std::int32_t>(to);
            enqueue(index, t, t0_);
        } else {
            if (cost.transmission > Duration{0}) {
                enter(t, Phase::Migrating, t0_);
                t.phase_end = t0_ + cost.transmission;
            } else {
                enter(t, Phase::Connecting, t0_);
                t.phase_end = t0_ + cost.connection;
            }
            t.host = static_cast<std::int32_t>(to);
            state_.timed.push_back(index);
        }
        trace(t0_, TraceKind::MigrationStart, t);
    }

    void start_uplink(std::uint32_t index, LiveTask& t, Duration at) {
        const HostSpec& h = hosts_[static_cast<HostId>(t.host)];
        const Route route = uplink_route(h.tier);
        const NetworkSpec& net = state_.cluster.network;
        enter(t, Phase::Uplink, at);
        const Duration end = at + transfer_time(t.input_bits, route, net, state_.cluster.users[t.user].effective());
        if (looping_) {
            until(index, t, end);
        } else {
            t.phase_end = end;
            state_.timed.push_back(index);
        }
        report_.transmission_energy_j += transfer_energy(t.input_bits, route, net);
        trace(at, TraceKind::UplinkStart, t);
    }

    void dispatch(HostId h, Duration at) {
        HostRuntime& rt = runtime_[h];
        const HostSpec& spec = hosts_[h];
        HostQueue& q = state_.queues[h];
        while (rt.busy_cores < spec.cores && !q.empty()) {
            const std::uint32_t index = q.items[q.head++];
            LiveTask& t = tasks_.mut(index);
            enter(t, Phase::Running, at);
            if (t.started_at < Duration{0}) t.started_at = at;
            until(index, t, at + ceil_seconds(t.remaining_mi / spec.mips_per_core));
            ++rt.busy_cores;
            trace(at, TraceKind::Start, t);
        }
    }

    void fire(std::uint32_t index, Duration at) {
        LiveTask& t = tasks_.mut(index);
        switch (t.phase) {
            case Phase::Uplink:
            case Phase::Migrating:
                enter(t, Phase::Connecting, at);
                until(index, t, at + hosts_[static_cast<HostId>(t.host)].connection_time);
                break;
            case Phase::Connecting:
                enqueue(index, t, at);
                trace(at, TraceKind::Arrive, t);
                dispatch(static_cast<HostId>(t.host), at);
                break;
            case Phase::Running: {
                const HostId h = static_cast<HostId>(t.host);
                const HostSpec& spec = hosts_[h];
                const Route route = downlink_route(spec.tier);
                const NetworkSpec& net = state_.cluster.network;
                enter(t, Phase::Downlink, at);
                t.remaining_mi = 0.0;
                t.finished_at = at;
                --runtime_[h].busy_cores;
                trace(at, TraceKind::Finish, t);
                check_deadline(t, at);
                until(index, t, at + transfer_time(t.output_bits, route, net, Duration{0}));
                report_.transmission_energy_j += transfer_energy(t.output_bits, route, net);
                dispatch(h, at);
                break;
            }
            case Phase::LocalRun:
                enter(t, Phase::Done, at);
                t.finished_at = at;
                check_deadline(t, at);
                deliver(index, t, at);
                break;
            case Phase::Downlink:
                enter(t, Phase::Done, at);
                deliver(index, t, at);
                break;
            default:
                break;
        }
    }

    void check_deadline(LiveTask& t, Duration finish) {
        if (!t.missed && t.has_due && finish > t.due) {
            t.missed = true;
            ++report_.deadline_misses;
            trace(finish, TraceKind::Miss, t);
        }
    }

    void deliver(std::uint32_t index, LiveTask& t, Duration at) {
        t.phase = Phase::Done;
        t.delivered_at = at;
        ++state_.completed;
        if (t.offloadable()) --state_.live_offloadable;
        trace(at, TraceKind::Delivered, t);

        CompletedTask c;
        c.id = t.id;
        c.user = t.user;
        c.kind = t.kind;
        c.host = t.host;
        c.release = t.release;
        c.started = t.started_at;
        c.finish = t.finished_at;
        c.delivered = at;
        c.times = t.times;
        c.missed = t.missed;
        c.migrations = t.migrations;
        report_.completed.push_back(c);

        // Successors share the instance, i.e. the id block [id/8*8, id/8*8+8),
        // and have larger ids, so they follow directly in the store.
        const TaskId done = t.id;
        const TaskId block_end = done / 8 * 8 + 8;
        for (std::size_t i = index + 1; i < tasks_.end() && tasks_[i].id < block_end; ++i) {
            const LiveTask& peek = tasks_[i];
            if (peek.phase == Phase::Done) continue;
            const auto end = peek.preds.begin() + peek.pred_count;
            if (std::find(peek.preds.begin(), end, done) == end) continue;
            LiveTask& s = tasks_.mut(i);
            if (--s.preds_left == 0) on_ready(static_cast<std::uint32_t>(i), s, at);
        }
    }

    void on_ready(std::uint32_t index, LiveTask& t, Duration at) {
        if (!t.offloadable()) {
            enter(t, Phase::LocalRun, at);
            t.has_due = true;
            t.due = at + t.deadline;
            t.started_at = at;
            until(index, t, at + config_.renderer_time);
            trace(at, TraceKind::Start, t);
            return;
        }
        if (t.phase == Phase::AwaitingInputs) start_uplink(index, t, at);
    }

    bool past_due(const LiveTask& t) const {
        return t.phase != Phase::Done && t.finished_at < Duration{0} && !t.missed && t.has_due && t1_ > t.due;
    }

    void close_window() {
        // Phases still in flight are split at the window edge.
        for (const Event& e : events_) {
            LiveTask& t = tasks_.mut(e.index);
            bucket(t.times, t.phase) += t1_ - t.phase_since;
            if (t.phase == Phase::Running) {
                const HostId h = static_cast<HostId>(t.host);
                add_busy(h, t1_ - t.phase_since);
                t.remaining_mi = std::max(0.0, to_seconds(t.phase_end - t1_) * hosts_[h].mips_per_core);
            }
            t.phase_since = t1_;
            state_.timed.push_back(e.index);
        }

        // Unfinished tasks past due: everything the cursor passes, plus the recent tail.
        std::vector<std::size_t> missed;
        while (state_.miss_cursor < tasks_.end() && tasks_[state_.miss_cursor].release + state_.max_deadline < t1_) {
            if (past_due(tasks_[state_.miss_cursor])) missed.push_back(state_.miss_cursor);
            ++state_.miss_cursor;
        }
        for (std::size_t i = state_.miss_cursor; i < tasks_.end(); ++i) {
            if (past_due(tasks_[i])) missed.push_back(i);
        }
        for (const Event& e : events_) {
            if (e.index < state_.miss_cursor && past_due(tasks_[e.index])) missed.push_back(e.index);
        }
        std::sort(missed.begin(), missed.end());
        missed.erase(std::unique(missed.begin(), missed.end()), missed.end());
        for (std::size_t i : missed) {
            LiveTask& t = tasks_.mut(i);
            t.missed = true;
            ++report_.deadline_misses;
            trace(t1_, TraceKind::Miss, t);
        }

        const double window = to_seconds(config_.interval);
        report_.host_utilization.resize(hosts_.size());
        for (HostId h = 0; h < hosts_.size(); ++h) {
            const HostSpec& spec = hosts_[h];
            const double busy_host_s = to_seconds(window_busy_[h]) / spec.cores;
            report_.computation_energy_j += spec.idle_power_w * window + (spec.busy_power_w - spec.idle_power_w) * busy_host_s;
            report_.host_utilization[h] = std::clamp(busy_host_s / window, 0.0, 1.0);

            HostQueue& q = state_.queues[h];
            if (q.head > 256 && q.head * 2 > q.items.size()) {
                q.items.erase(q.items.begin(), q.items.begin() + static_cast<std::ptrdiff_t>(q.head));
                q.head = 0;
            }
        }

        while (state_.first_live < tasks_.end() && tasks_[state_.first_live].phase == Phase::Done) ++state_.first_live;
        state_.miss_cursor = std::max(state_.miss_cursor, state_.first_live);
        tasks_.retire_before(state_.first_live);
        state_.cluster.clock = t1_;
        ++state_.interval;
    }

    SimState& state_;
    TaskStore& tasks_;
    const SimConfig& config_;
    EventLog* log_;
    const std::vector<HostSpec>& hosts_;
    std::vector<HostRuntime>& runtime_;
    Duration t0_{0};
    Duration t1_{0};
    std::vector<Duration> window_busy_;
    std::vector<Event> events_;
    bool looping_ = false;  // event heap is live
    IntervalReport report_;
};

}  // namespace

IntervalReport simulate_interval(SimState& state, std::span<const Decision> assignment, const SimConfig& config,
                                 EventLog* log) {
    if (config.interval <= Duration{0}) throw Error("interval must be positive");
    return IntervalRun{state, config, log}.run(assignment);
}

QosIndicators indicators_of(const IntervalReport& report) {
    QosIndicators ind;
    if (!report.completed.empty()) {
        double total = 0.0;
        for (const CompletedTask& c : report.completed) total += to_seconds(c.response());
        ind.ars_s = total / static_cast<double>(report.completed.size());
    }
    ind.aec_j = report.energy_j();
    ind.hc_util_variance = variance(report.host_utilization);
    ind.hc_migrations = report.migrations.size();
    ind.sla = report.deadline_misses;
    return ind;
}

HorizonTally close_horizon(SimState& state, EventLog* log) {
    HorizonTally tally;
    const Duration now = state.cluster.clock;
    for (std::size_t i = state.first_live; i < state.tasks.end(); ++i) {
        if (state.tasks[i].phase == Phase::Done) continue;
        const LiveTask& t = state.tasks[i];
        if (t.missed || (t.has_due && now > t.due)) {
            ++tally.dropped;
            if (!t.missed) {
                LiveTask& m = state.tasks.mut(i);
                m.missed = true;
                ++tally.new_violations;
                if (log) log->events.push_back({now, TraceKind::Miss, m.id, m.host});
            }
        } else {
            ++tally.pending;
        }
    }
    return tally;
}

}  // namespace offload

#include "offload/workflow.hpp"

#include <algorithm>
#include <unordered_map>

#include "offload/error.hpp"
#include "offload/rng.hpp"

namespace offload {

std::string_view to_string(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::VideoCapturer: return "video_capturer";
        case ComponentKind::FeatureExtractor: return "feature_extractor";
        case ComponentKind::Mapper: return "mapper";
        case ComponentKind::ObjectRecognizer: return "object_recognizer";
        case ComponentKind::Tracker: return "tracker";
        case ComponentKind::Renderer: return "renderer";
    }
    return "unknown";
}

std::string_view to_string(DagError error) {
    switch (error) {
        case DagError::Cyclic: return "cyclic";
        case DagError::Unresolved: return "unresolved";
        case DagError::BadSink: return "bad sink";
        case DagError::BadSource: return "bad source";
    }
    return "unknown";
}

Duration deadline_of(ComponentKind kind, const WorkloadProfile& profile) {
    const Duration td = profile.frame_period();
    switch (kind) {
        case ComponentKind::FeatureExtractor:
        case ComponentKind::Renderer: return td;
        case ComponentKind::Tracker: return 2 * td;
        case ComponentKind::Mapper: return 3 * td;
        case ComponentKind::ObjectRecognizer: return 4 * td;
        case ComponentKind::VideoCapturer: break;
    }
    throw Error("not schedulable");
}

std::vector<ComponentKind> frame_components(std::uint64_t frame_index) {
    std::vector<ComponentKind> kinds{ComponentKind::FeatureExtractor};
    if (frame_index % 3 == 0) kinds.push_back(ComponentKind::Mapper);
    if (frame_index % 4 == 0) kinds.push_back(ComponentKind::ObjectRecognizer);
    if (frame_index % 2 == 0) kinds.push_back(ComponentKind::Tracker);
    kinds.push_back(ComponentKind::Renderer);
    return kinds;
}

TaskId task_id_for(std::uint64_t instance_id, ComponentKind kind) {
    return instance_id * 8 + index_of(kind);
}

std::uint64_t instance_id_for(UserId user, std::uint64_t frame_index, std::uint32_t users) {
    return frame_index * users + user;
}

WorkflowInstance build_frame_dag(UserId user, std::uint64_t frame_index, const WorkloadProfile& profile) {
    if (user >= profile.users) throw Error("user out of range");

    WorkflowInstance instance;
    instance.id = instance_id_for(user, frame_index, profile.users);
    instance.user = user;
    instance.frame = frame_index;
    instance.release_time = static_cast<std::int64_t>(frame_index) * profile.frame_period();

    const auto kinds = frame_components(frame_index);
    const auto present = [&](ComponentKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
    const auto id = [&](ComponentKind k) { return task_id_for(instance.id, k); };

    for (ComponentKind kind : kinds) {
        const ComponentDefaults& d = profile.defaults(kind);
        TaskSpec task;
        task.id = id(kind);
        task.user = user;
        task.frame = frame_index;
        task.kind = kind;
        task.length_mi = d.length_mi;
        task.input_bits = d.input_bits;
        task.output_bits = d.output_bits;
        task.deadline = deadline_of(kind, profile);

        switch (kind) {
            case ComponentKind::Mapper:
            case ComponentKind::Tracker:
                task.predecessors.push_back(id(ComponentKind::FeatureExtractor));
                break;
            case ComponentKind::ObjectRecognizer:
                task.predecessors.push_back(id(ComponentKind::FeatureExtractor));
                if (present(ComponentKind::Mapper)) task.predecessors.push_back(id(ComponentKind::Mapper));
                break;
            case ComponentKind::Renderer:
                for (ComponentKind p : kinds) {
                    if (p != ComponentKind::Renderer) task.predecessors.push_back(id(p));
                }
                break;
            default:
                break;
        }
        instance.tasks.push_back(std::move(task));
    }

    // The tracker follows the recognizer's result when both run in a frame.
    if (present(ComponentKind::Tracker) && present(ComponentKind::ObjectRecognizer)) {
        for (TaskSpec& t : instance.tasks) {
            if (t.kind == ComponentKind::Tracker) t.predecessors.push_back(id(ComponentKind::ObjectRecognizer));
        }
    }
    return instance;
}

std::uint64_t effective_frames(const WorkloadProfile& profile) {
    if (profile.component_task_budget == 0) return profile.frames;
    if (profile.users == 0) return 0;
    std::uint64_t total = 0;
    std::uint64_t frames = 0;
    while (total < profile.component_task_budget) {
        total += profile.users * frame_components(frames).size();
        ++frames;
    }
    return frames;
}

std::vector<WorkflowInstance> generate_workload(const WorkloadProfile& profile, std::uint64_t seed) {
    const std::uint64_t frames = effective_frames(profile);
    if (profile.users == 0 || frames == 0) throw Error("empty workload");

    Rng rng{seed};
    std::vector<WorkflowInstance> out;
    out.reserve(profile.users * frames);
    for (std::uint64_t f = 0; f < frames; ++f) {
        for (UserId u = 0; u < profile.users; ++u) {
            WorkflowInstance w = build_frame_dag(u, f, profile);
            for (TaskSpec& t : w.tasks) {
                t.length_mi *= rng.uniform(1.0 - profile.jitter, 1.0 + profile.jitter);
            }
            out.push_back(std::move(w));
        }
    }
    return out;
}

std::optional<DagError> validate_dag(const WorkflowInstance& instance) {
    std::unordered_map<TaskId, std::size_t> index;
    for (std::size_t i = 0; i < instance.tasks.size(); ++i) index.emplace(instance.tasks[i].id, i);

    const std::size_t n = instance.tasks.size();
    std::vector<std::vector<std::size_t>> successors(n);
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (TaskId p : instance.tasks[i].predecessors) {
            auto it = index.find(p);
            if (it == index.end()) return DagError::Unresolved;
            successors[it->second].push_back(i);
            ++indegree[i];
        }
    }

    // Kahn: every node is popped exactly when the graph is acyclic.
    std::vector<std::size_t> ready;
    auto remaining = indegree;
    for (std::size_t i = 0; i < n; ++i) {
        if (remaining[i] == 0) ready.push_back(i);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t i = ready.back();
        ready.pop_back();
        ++visited;
        for (std::size_t s : successors[i]) {
            if (--remaining[s] == 0) ready.push_back(s);
        }
    }
    if (visited != n) return DagError::Cyclic;

    std::size_t sinks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const TaskSpec& t = instance.tasks[i];
        const bool is_sink = successors[i].empty();
        if (is_sink) {
            ++sinks;
            if (t.kind != ComponentKind::Renderer) return DagError::BadSink;
        } else if (t.kind == ComponentKind::Renderer) {
            return DagError::BadSink;
        }
        if (t.kind == ComponentKind::VideoCapturer && indegree[i] != 0) return DagError::BadSource;
    }
    if (sinks != 1) return DagError::BadSink;
    return std::nullopt;
}

}  // namespace offload

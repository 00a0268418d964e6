#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "offload/time.hpp"

namespace offload {

enum class ComponentKind : std::uint8_t {
    VideoCapturer,
    FeatureExtractor,
    Mapper,
    ObjectRecognizer,
    Tracker,
    Renderer,
};

inline constexpr std::size_t kComponentKinds = 6;

/// Capturer and renderer interact with the user directly and never leave the device.
constexpr bool is_local_only(ComponentKind kind) {
    return kind == ComponentKind::VideoCapturer || kind == ComponentKind::Renderer;
}

constexpr std::size_t index_of(ComponentKind kind) { return static_cast<std::size_t>(kind); }

std::string_view to_string(ComponentKind kind);

using TaskId = std::uint64_t;
using UserId = std::uint32_t;

struct TaskSpec {
    TaskId id = 0;
    UserId user = 0;
    std::uint64_t frame = 0;
    ComponentKind kind = ComponentKind::FeatureExtractor;
    double length_mi = 0.0;    // million instructions
    double input_bits = 0.0;
    double output_bits = 0.0;
    Duration deadline{0};      // relative to the workflow release
    std::vector<TaskId> predecessors;
};

struct WorkflowInstance {
    std::uint64_t id = 0;
    UserId user = 0;
    std::uint64_t frame = 0;
    std::vector<TaskSpec> tasks;
    Duration release_time{0};
};

struct ComponentDefaults {
    double length_mi = 0.0;
    double input_bits = 0.0;
    double output_bits = 0.0;
};

/// Per-user frame stream description. Lengths and payloads are modelling
/// choices, not measurements; every field is overridable from the config.
struct WorkloadProfile {
    double frame_rate = 60.0;
    std::uint32_t users = 10;
    std::uint64_t frames = 200;
    double jitter = 0.2;  // uniform +-fraction around the per-kind length
    // When non-zero, the horizon is the smallest frame count whose total
    // task count reaches this budget (the "count component tasks" reading).
    std::uint64_t component_task_budget = 0;
    std::array<ComponentDefaults, kComponentKinds> components = {{
        {0.0, 0.0, 1.5e6},     // VideoCapturer: zero-cost release event
        {2.0, 1.5e6, 0.3e6},   // FeatureExtractor
        {40.0, 0.3e6, 0.1e6},  // Mapper
        {60.0, 0.3e6, 0.1e6},  // ObjectRecognizer
        {8.0, 0.3e6, 0.1e6},   // Tracker
        {0.5, 0.1e6, 0.0},     // Renderer (local)
    }};

    /// One frame period t_d, rounded to whole nanoseconds.
    Duration frame_period() const { return from_seconds(1.0 / frame_rate); }
    const ComponentDefaults& defaults(ComponentKind kind) const { return components[index_of(kind)]; }
};

/// Deadline relative to the frame release: F and R get t_d, T 2t_d, M 3t_d, O 4t_d.
/// Throws Error("not schedulable") for the capturer.
Duration deadline_of(ComponentKind kind, const WorkloadProfile& profile);

/// Components present in a given frame. Period is lcm(2, 3, 4) = 12.
std::vector<ComponentKind> frame_components(std::uint64_t frame_index);

/// Task ids are dense: (frame * users + user) * 8 + kind.
TaskId task_id_for(std::uint64_t instance_id, ComponentKind kind);
std::uint64_t instance_id_for(UserId user, std::uint64_t frame_index, std::uint32_t users);

WorkflowInstance build_frame_dag(UserId user, std::uint64_t frame_index, const WorkloadProfile& profile);

/// Horizon in frames after applying component_task_budget.
std::uint64_t effective_frames(const WorkloadProfile& profile);

/// users * effective_frames instances ordered by (frame, user); lengths jittered
/// from a stream seeded with `seed`. Throws Error("empty workload").
std::vector<WorkflowInstance> generate_workload(const WorkloadProfile& profile, std::uint64_t seed);

enum class DagError : std::uint8_t { Cyclic, Unresolved, BadSink, BadSource };

std::string_view to_string(DagError error);

std::optional<DagError> validate_dag(const WorkflowInstance& instance);

}  // namespace offload

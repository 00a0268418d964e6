#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "offload/rng.hpp"
#include "offload/time.hpp"

namespace offload {

using HostId = std::uint32_t;

enum class Tier : std::uint8_t { Edge, Cloud };

std::string_view to_string(Tier tier);

struct HostSpec {
    HostId id = 0;
    Tier tier = Tier::Edge;
    std::uint32_t cores = 1;
    double mips_per_core = 1.0;
    Duration connection_time{0};
    double busy_power_w = 0.0;
    double idle_power_w = 0.0;

    double capacity_mips() const { return cores * mips_per_core; }
};

/// Host template used to stamp out a homogeneous tier.
struct HostTemplate {
    std::uint32_t cores = 1;
    double mips_per_core = 1.0;
    Duration connection_time{0};
    double busy_power_w = 0.0;
    double idle_power_w = 0.0;
};

/// Azure B2s-like edge host.
inline HostTemplate default_edge_template() {
    return {2, 4029.0, std::chrono::microseconds{500}, 30.0, 10.0};
}

/// Azure B8ms-like cloud host.
inline HostTemplate default_cloud_template() {
    return {8, 1601.0, std::chrono::milliseconds{5}, 120.0, 40.0};
}

struct NetworkSpec {
    double user_edge_bps = 100e6;
    double edge_cloud_bps = 1e9;
    double tx_power_edge_w = 0.5;
    double tx_power_cloud_w = 1.5;
};

struct MobilitySpec {
    Duration step = std::chrono::milliseconds{1};
    Duration min_latency{0};
    Duration max_latency = std::chrono::milliseconds{20};
    Duration initial_latency{0};
    double handover_probability = 0.001;
    Duration handover_penalty = std::chrono::milliseconds{200};
};

/// Per-host occupancy. Queue membership lives on the tasks themselves.
struct HostRuntime {
    std::uint32_t busy_cores = 0;
    Duration busy_core_time{0};  // cumulative over the run
};

struct UserLink {
    Duration extra_latency{0};
    Duration handover_penalty{0};  // non-zero for the interval after a handover

    Duration effective() const { return extra_latency + handover_penalty; }
};

struct ClusterState {
    std::vector<HostSpec> hosts;
    std::vector<HostRuntime> runtime;
    std::vector<UserLink> users;
    NetworkSpec network;
    Duration clock{0};

    double total_mips() const;
};

/// Edge hosts get ids [0, n_edge), cloud hosts follow. Throws Error("empty cluster").
ClusterState default_cluster(std::uint32_t n_edge, std::uint32_t n_cloud,
                             const HostTemplate& edge = default_edge_template(),
                             const HostTemplate& cloud = default_cloud_template(),
                             const NetworkSpec& network = {});

enum class Route : std::uint8_t { UserToEdge, UserToCloud, EdgeToUser, CloudToUser, EdgeToCloud, CloudToEdge };

Route uplink_route(Tier tier);
Route downlink_route(Tier tier);

/// Serialization time over each segment of the route, without extra latency.
Duration serialization_time(double bits, Route route, const NetworkSpec& net);

/// Serialization plus the user's extra latency on user-originated routes.
Duration transfer_time(double bits, Route route, const NetworkSpec& net, Duration user_extra_latency);

/// Radio energy for the serialization part of a transfer.
double transfer_energy(double bits, Route route, const NetworkSpec& net);

struct MigrationCost {
    Duration transmission{0};
    Duration connection{0};
    double energy_j = 0.0;

    Duration duration() const { return transmission + connection; }
};

/// Moves within a tier are free; crossing tiers pays the backhaul transfer,
/// the destination's connection time, and cloud radio power for the whole move.
MigrationCost migration_cost(double state_bits, const HostSpec& from, const HostSpec& to, const NetworkSpec& net);

/// Bounded random walk of every user's extra latency plus rare handovers.
void mobility_step(ClusterState& state, const MobilitySpec& spec, Rng& rng);

}  // namespace offload

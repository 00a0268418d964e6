#include "offload/infra.hpp"

#include <algorithm>

#include "offload/error.hpp"

namespace offload {

std::string_view to_string(Tier tier) { return tier == Tier::Edge ? "edge" : "cloud"; }

double ClusterState::total_mips() const {
    double total = 0.0;
    for (const HostSpec& h : hosts) total += h.capacity_mips();
    return total;
}

ClusterState default_cluster(std::uint32_t n_edge, std::uint32_t n_cloud, const HostTemplate& edge,
                             const HostTemplate& cloud, const NetworkSpec& network) {
    if (n_edge + n_cloud == 0) throw Error("empty cluster");

    ClusterState state;
    state.network = network;
    const auto add = [&](Tier tier, const HostTemplate& t) {
        HostSpec h;
        h.id = static_cast<HostId>(state.hosts.size());
        h.tier = tier;
        h.cores = t.cores;
        h.mips_per_core = t.mips_per_core;
        h.connection_time = t.connection_time;
        h.busy_power_w = t.busy_power_w;
        h.idle_power_w = t.idle_power_w;
        state.hosts.push_back(h);
    };
    for (std::uint32_t i = 0; i < n_edge; ++i) add(Tier::Edge, edge);
    for (std::uint32_t i = 0; i < n_cloud; ++i) add(Tier::Cloud, cloud);
    state.runtime.resize(state.hosts.size());
    return state;
}

Route uplink_route(Tier tier) { return tier == Tier::Edge ? Route::UserToEdge : Route::UserToCloud; }
Route downlink_route(Tier tier) { return tier == Tier::Edge ? Route::EdgeToUser : Route::CloudToUser; }

namespace {

bool user_originated(Route route) { return route == Route::UserToEdge || route == Route::UserToCloud; }

bool reaches_cloud(Route route) { return route != Route::UserToEdge && route != Route::EdgeToUser; }

}  // namespace

Duration serialization_time(double bits, Route route, const NetworkSpec& net) {
    switch (route) {
        case Route::UserToEdge:
        case Route::EdgeToUser: return from_seconds(bits / net.user_edge_bps);
        case Route::EdgeToCloud:
        case Route::CloudToEdge: return from_seconds(bits / net.edge_cloud_bps);
        case Route::UserToCloud:
        case Route::CloudToUser:
            return from_seconds(bits / net.user_edge_bps) + from_seconds(bits / net.edge_cloud_bps);
    }
    return Duration{0};
}

Duration transfer_time(double bits, Route route, const NetworkSpec& net, Duration user_extra_latency) {
    Duration t = serialization_time(bits, route, net);
    if (user_originated(route)) t += user_extra_latency;
    return t;
}

double transfer_energy(double bits, Route route, const NetworkSpec& net) {
    const double power = reaches_cloud(route) ? net.tx_power_cloud_w : net.tx_power_edge_w;
    return power * to_seconds(serialization_time(bits, route, net));
}

MigrationCost migration_cost(double state_bits, const HostSpec& from, const HostSpec& to, const NetworkSpec& net) {
    MigrationCost cost;
    if (from.tier == to.tier) return cost;
    cost.transmission = from_seconds(state_bits / net.edge_cloud_bps);
    cost.connection = to.connection_time;
    cost.energy_j = net.tx_power_cloud_w * to_seconds(cost.duration());
    return cost;
}

void mobility_step(ClusterState& state, const MobilitySpec& spec, Rng& rng) {
    for (UserLink& u : state.users) {
        const Duration step = rng.bernoulli(0.5) ? spec.step : -spec.step;
        u.extra_latency = std::clamp(u.extra_latency + step, spec.min_latency, spec.max_latency);
        u.handover_penalty = rng.bernoulli(spec.handover_probability) ? spec.handover_penalty : Duration{0};
    }
}

}  // namespace offload

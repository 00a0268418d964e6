#include "offload/objective.hpp"

#include <algorithm>

#include "offload/error.hpp"

namespace offload {

QosWeights QosWeights::normalized(double alpha, double beta, double gamma, double delta) {
    if (alpha < 0 || beta < 0 || gamma < 0 || delta < 0) throw Error("negative weight");
    const double sum = alpha + beta + gamma + delta;
    if (sum <= 0.0) throw Error("weights sum to zero");
    return {alpha / sum, beta / sum, gamma / sum, delta / sum};
}

namespace {

double scale(double value, const Range& r) { return std::clamp((value - r.min) / (r.max - r.min), 0.0, 1.0); }

}  // namespace

NormalizedQos normalize_indicators(const QosIndicators& ind, const NormalizationBounds& bounds,
                                   std::size_t window_task_count) {
    if (!(bounds.ars_s.max > bounds.ars_s.min) || !(bounds.aec_j.max > bounds.aec_j.min)) {
        throw Error("bad bounds");
    }
    const double tasks = static_cast<double>(window_task_count);
    const double migration_share = window_task_count == 0 ? 0.0 : static_cast<double>(ind.hc_migrations) / tasks;
    const double sla_share = window_task_count == 0 ? 0.0 : static_cast<double>(ind.sla) / tasks;
    const double hc = 0.5 * (ind.hc_util_variance / kMaxUtilVariance) + 0.5 * migration_share;
    return {
        scale(ind.ars_s, bounds.ars_s),
        scale(ind.aec_j, bounds.aec_j),
        std::clamp(hc, 0.0, 1.0),
        std::clamp(sla_share, 0.0, 1.0),
    };
}

double score(const NormalizedQos& v, const QosWeights& w) {
    return w.alpha * v[0] + w.beta * v[1] + w.gamma * v[2] + w.delta * v[3];
}

NormalizationBounds default_bounds(std::span<const HostSpec> hosts, Duration frame_period, Duration window) {
    double idle = 0.0;
    double busy = 0.0;
    for (const HostSpec& h : hosts) {
        idle += h.idle_power_w;
        busy += h.busy_power_w;
    }
    const double seconds = to_seconds(window);
    NormalizationBounds b;
    b.ars_s = {0.0, 8.0 * to_seconds(frame_period)};
    b.aec_j = {idle * seconds, busy * seconds};
    if (!(b.aec_j.max > b.aec_j.min)) b.aec_j.max = b.aec_j.min + 1.0;
    return b;
}

double variance(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(values.size());
}

}  // namespace offload

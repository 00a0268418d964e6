#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "offload/infra.hpp"
#include "offload/time.hpp"

namespace offload {

/// Trade-off coefficients of Y = alpha*ARS + beta*AEC + gamma*HC + delta*SLA.
struct QosWeights {
    double alpha = 0.3;
    double beta = 0.2;
    double gamma = 0.2;
    double delta = 0.3;

    /// Scales non-negative weights to sum 1. Throws Error on negative or all-zero input.
    static QosWeights normalized(double alpha, double beta, double gamma, double delta);
};

struct QosIndicators {
    double ars_s = 0.0;             // mean response time
    double aec_j = 0.0;             // energy
    double hc_util_variance = 0.0;  // variance of per-host utilization in [0, 1]
    std::uint64_t hc_migrations = 0;
    std::uint64_t sla = 0;          // deadline misses
};

struct Range {
    double min = 0.0;
    double max = 1.0;
};

struct NormalizationBounds {
    Range ars_s;
    Range aec_j;
};

/// Largest possible population variance of values confined to [0, 1].
inline constexpr double kMaxUtilVariance = 0.25;

/// (ARS, AEC, HC, SLA), each in [0, 1].
using NormalizedQos = std::array<double, 4>;

/// Throws Error("bad bounds") unless max > min for every range.
NormalizedQos normalize_indicators(const QosIndicators& ind, const NormalizationBounds& bounds,
                                   std::size_t window_task_count);

double score(const NormalizedQos& normalized, const QosWeights& weights);

inline double reward(double y) { return 1.0 - y; }

/// ARS over [0, 8 t_d]; AEC between the fleet's idle floor and busy ceiling
/// for one window of `window` length.
NormalizationBounds default_bounds(std::span<const HostSpec> hosts, Duration frame_period, Duration window);

/// Population variance.
double variance(std::span<const double> values);

}  // namespace offload

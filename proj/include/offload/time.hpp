#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace offload {

// Simulation time is kept in integer nanoseconds so that per-task time
// components sum exactly to the observed response time.
using Duration = std::chrono::nanoseconds;

inline Duration from_seconds(double s) {
    return Duration{static_cast<std::int64_t>(std::llround(s * 1e9))};
}

inline Duration from_ms(double ms) { return from_seconds(ms * 1e-3); }

// Rounds up so that work of positive size never takes zero time.
inline Duration ceil_seconds(double s) {
    return Duration{static_cast<std::int64_t>(std::ceil(s * 1e9))};
}

inline double to_seconds(Duration d) { return static_cast<double>(d.count()) * 1e-9; }
inline double to_ms(Duration d) { return static_cast<double>(d.count()) * 1e-6; }

}  // namespace offload

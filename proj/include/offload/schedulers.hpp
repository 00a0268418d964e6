#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "offload/objective.hpp"
#include "offload/rng.hpp"
#include "offload/search_tree.hpp"
#include "offload/simcore.hpp"

namespace offload {

enum class SchedulerKind : std::uint8_t { Mmct, MctsPlain, Greedy, Random, Genetic };

inline constexpr std::array<SchedulerKind, 5> kAllSchedulers = {
    SchedulerKind::Mmct, SchedulerKind::MctsPlain, SchedulerKind::Greedy, SchedulerKind::Random,
    SchedulerKind::Genetic,
};

std::string_view to_string(SchedulerKind kind);
std::optional<SchedulerKind> parse_scheduler(std::string_view name);

/// Genetic baseline settings. These are modelling choices for the baseline,
/// not values taken from any published GA scheduler.
struct GaParams {
    std::uint32_t population = 20;
    std::uint32_t generations = 10;
    std::uint32_t tournament = 3;
    double crossover_rate = 0.5;  // per-gene probability of taking the second parent
    double mutation_rate = 0.1;   // per-gene
};

struct SchedulerContext {
    SimConfig sim;
    QosWeights weights;
    NormalizationBounds bounds;
    MmctParams mmct;
    GaParams ga;
};

struct SearchStats {
    std::uint64_t trees = 0;
    std::uint64_t iterations = 0;
    std::uint64_t discards = 0;
};

/// Y of the interval that follows applying `assignment` to a fork of `state`.
double interval_objective(const SimState& state, std::span<const Decision> assignment, const SchedulerContext& ctx);

double objective_of(const IntervalReport& report, const SchedulerContext& ctx);

/// Dispatches to one scheduler. Returns one decision per pending task, ordered
/// by task id. Throws Error("no hosts") when there is work but no host.
Assignment schedule(SchedulerKind kind, const SimState& state, std::span<const TaskId> pending,
                    const SchedulerContext& ctx, Rng& rng, SearchStats* stats = nullptr);

Assignment random_schedule(const SimState& state, std::span<const TaskId> pending, Rng& rng);

/// Deadline order; each task takes the host with the lowest one-interval Y
/// given the decisions already made (ties to the lower host id).
Assignment greedy_schedule(const SimState& state, std::span<const TaskId> pending, const SchedulerContext& ctx);

Assignment ga_schedule(const SimState& state, std::span<const TaskId> pending, const SchedulerContext& ctx, Rng& rng);

/// One search tree per committed decision until every pending task is placed.
/// `discard` enables the early stop once a child holds a majority of visits.
Assignment mmct_schedule(const SimState& state, std::span<const TaskId> pending, const SchedulerContext& ctx,
                         Rng& rng, bool discard = true, SearchStats* stats = nullptr);

inline Assignment mcts_plain_schedule(const SimState& state, std::span<const TaskId> pending,
                                      const SchedulerContext& ctx, Rng& rng, SearchStats* stats = nullptr) {
    return mmct_schedule(state, pending, ctx, rng, false, stats);
}

/// Simulator-backed rewards for the tree search: forks the snapshot, runs the
/// path for one interval, then places one random unassigned task per step.
/// The state after an immediate() call is kept until the next evaluate(), which
/// resumes from it when the path matches.
class SimulationEnvironment final : public SearchEnvironment {
public:
    SimulationEnvironment(const SimState& root, const SchedulerContext& ctx) : root_(root), ctx_(ctx) {}

    std::vector<double> evaluate(std::span<const Decision> path, std::span<const TaskId> unassigned,
                                 std::uint32_t steps, Rng& rng) override;
    double immediate(std::span<const Decision> path) override;

private:
    struct Cached {
        std::vector<Decision> path;
        SimState state;
        double q = 0.0;
    };

    const SimState& root_;
    const SchedulerContext& ctx_;
    std::vector<Cached> cache_;
};

}  // namespace offload

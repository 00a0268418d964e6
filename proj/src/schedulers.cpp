#include "offload/schedulers.hpp"

#include <algorithm>
#include <limits>

#include "offload/error.hpp"

namespace offload {

std::string_view to_string(SchedulerKind kind) {
    switch (kind) {
        case SchedulerKind::Mmct: return "mmct";
        case SchedulerKind::MctsPlain: return "mcts_plain";
        case SchedulerKind::Greedy: return "greedy";
        case SchedulerKind::Random: return "random";
        case SchedulerKind::Genetic: return "genetic";
    }
    return "unknown";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) {
    for (SchedulerKind k : kAllSchedulers) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

double objective_of(const IntervalReport& report, const SchedulerContext& ctx) {
    const auto normalized = normalize_indicators(indicators_of(report), ctx.bounds, report.window_tasks);
    return score(normalized, ctx.weights);
}

double interval_objective(const SimState& state, std::span<const Decision> assignment, const SchedulerContext& ctx) {
    SimState fork = fork_state(state);
    return objective_of(simulate_interval(fork, assignment, ctx.sim), ctx);
}

namespace {

Assignment sorted(Assignment a) {
    std::sort(a.begin(), a.end());
    return a;
}

std::uint32_t host_count(const SimState& state) { return static_cast<std::uint32_t>(state.cluster.hosts.size()); }

}  // namespace

Assignment random_schedule(const SimState& state, std::span<const TaskId> pending, Rng& rng) {
    Assignment out;
    std::vector<TaskId> tasks(pending.begin(), pending.end());
    std::sort(tasks.begin(), tasks.end());
    for (TaskId t : tasks) out.push_back({t, static_cast<HostId>(rng.index(host_count(state)))});
    return out;
}

Assignment greedy_schedule(const SimState& state, std::span<const TaskId> pending, const SchedulerContext& ctx) {
    std::vector<const LiveTask*> order;
    for (TaskId id : pending) {
        const LiveTask* t = find_task(state, id);
        if (t == nullptr) throw Error("invalid assignment: unknown task");
        order.push_back(t);
    }
    std::sort(order.begin(), order.end(), [](const LiveTask* a, const LiveTask* b) {
        if (a->due != b->due) return a->due < b->due;
        return a->id < b->id;
    });

    Assignment partial;
    for (const LiveTask* t : order) {
        HostId best = 0;
        double best_y = std::numeric_limits<double>::infinity();
        partial.push_back({t->id, 0});
        for (HostId h = 0; h < host_count(state); ++h) {
            partial.back().host = h;
            const double y = interval_objective(state, partial, ctx);
            if (y < best_y) {
                best_y = y;
                best = h;
            }
        }
        partial.back().host = best;
    }
    return sorted(std::move(partial));
}

Assignment ga_schedule(const SimState& state, std::span<const TaskId> pending, const SchedulerContext& ctx, Rng& rng) {
    const GaParams& p = ctx.ga;
    std::vector<TaskId> tasks(pending.begin(), pending.end());
    std::sort(tasks.begin(), tasks.end());
    const std::uint32_t hosts = host_count(state);
    using Chromosome = std::vector<HostId>;

    const auto decode = [&](const Chromosome& c) {
        Assignment a;
        for (std::size_t i = 0; i < tasks.size(); ++i) a.push_back({tasks[i], c[i]});
        return a;
    };
    const auto fitness = [&](const Chromosome& c) { return reward(interval_objective(state, decode(c), ctx)); };

    const std::uint32_t size = std::max<std::uint32_t>(p.population, 1);
    std::vector<Chromosome> population(size, Chromosome(tasks.size()));
    std::vector<double> fit(size);
    for (std::uint32_t i = 0; i < size; ++i) {
        for (HostId& g : population[i]) g = static_cast<HostId>(rng.index(hosts));
        fit[i] = fitness(population[i]);
    }

    const auto fittest = [&]() {
        std::size_t best = 0;
        for (std::size_t i = 1; i < size; ++i) {
            if (fit[i] > fit[best]) best = i;
        }
        return best;
    };
    Chromosome best = population[fittest()];
    double best_fit = fit[fittest()];

    const auto tournament = [&]() {
        std::size_t winner = rng.index(size);
        for (std::uint32_t k = 1; k < p.tournament; ++k) {
            const std::size_t c = rng.index(size);
            if (fit[c] > fit[winner] || (fit[c] == fit[winner] && c < winner)) winner = c;
        }
        return winner;
    };

    for (std::uint32_t g = 0; g < p.generations; ++g) {
        std::vector<Chromosome> next{population[fittest()]};
        std::vector<double> next_fit{fit[fittest()]};
        while (next.size() < size) {
            const Chromosome& a = population[tournament()];
            const Chromosome& b = population[tournament()];
            Chromosome child(tasks.size());
            for (std::size_t i = 0; i < child.size(); ++i) {
                child[i] = rng.bernoulli(p.crossover_rate) ? b[i] : a[i];
                if (rng.bernoulli(p.mutation_rate)) child[i] = static_cast<HostId>(rng.index(hosts));
            }
            next_fit.push_back(fitness(child));
            next.push_back(std::move(child));
        }
        population = std::move(next);
        fit = std::move(next_fit);
        const std::size_t i = fittest();
        if (fit[i] > best_fit) {
            best_fit = fit[i];
            best = population[i];
        }
    }
    return decode(best);
}

std::vector<double> SimulationEnvironment::evaluate(std::span<const Decision> path, std::span<const TaskId> unassigned,
                                                    std::uint32_t steps, Rng& rng) {
    std::vector<double> rewards;
    rewards.reserve(steps + 1);
    const auto hit = std::find_if(cache_.begin(), cache_.end(), [&](const Cached& c) {
        return std::equal(c.path.begin(), c.path.end(), path.begin(), path.end());
    });
    SimState fork;
    if (hit != cache_.end()) {
        fork = std::move(hit->state);
        rewards.push_back(hit->q);
    } else {
        fork = fork_state(root_);
        rewards.push_back(reward(objective_of(simulate_interval(fork, path, ctx_.sim), ctx_)));
    }
    cache_.clear();

    std::vector<TaskId> left(unassigned.begin(), unassigned.end());
    const auto hosts = static_cast<std::uint32_t>(fork.cluster.hosts.size());
    for (std::uint32_t d = 0; d < steps; ++d) {
        // Running tasks may have finished meanwhile; only still-placeable ones
        // count. Drawing and discarding stale picks keeps the choice uniform.
        Assignment step;
        while (!left.empty()) {
            const std::size_t i = rng.index(left.size());
            const TaskId id = left[i];
            left[i] = left.back();
            left.pop_back();
            const LiveTask* t = find_task(fork, id);
            if (t != nullptr && is_schedulable(*t, ctx_.sim)) {
                step.push_back({id, static_cast<HostId>(rng.index(hosts))});
                break;
            }
        }
        rewards.push_back(reward(objective_of(simulate_interval(fork, step, ctx_.sim), ctx_)));
    }
    return rewards;
}

double SimulationEnvironment::immediate(std::span<const Decision> path) {
    Cached c{{path.begin(), path.end()}, fork_state(root_), 0.0};
    c.q = reward(objective_of(simulate_interval(c.state, path, ctx_.sim), ctx_));
    cache_.push_back(std::move(c));
    return cache_.back().q;
}

Assignment mmct_schedule(const SimState& state, std::span<const TaskId> pending, const SchedulerContext& ctx,
                         Rng& rng, bool discard, SearchStats* stats) {
    std::vector<TaskId> remaining(pending.begin(), pending.end());
    std::sort(remaining.begin(), remaining.end());
    const std::uint32_t hosts = host_count(state);
    Assignment committed;

    if (ctx.mmct.commit_random_root && !remaining.empty()) {
        const std::size_t i = rng.index(remaining.size());
        committed.push_back({remaining[i], static_cast<HostId>(rng.index(hosts))});
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
    }

    SimulationEnvironment env(state, ctx);
    while (!remaining.empty()) {
        Rng tree_rng = rng.split();
        const TreeSearchResult r = search_decision(env, committed, remaining, hosts, ctx.mmct, discard, tree_rng);
        committed.push_back(r.decision);
        std::erase(remaining, r.decision.task);
        if (stats) {
            ++stats->trees;
            stats->iterations += r.iterations;
            stats->discards += r.discarded ? 1 : 0;
        }
    }
    return sorted(std::move(committed));
}

Assignment schedule(SchedulerKind kind, const SimState& state, std::span<const TaskId> pending,
                    const SchedulerContext& ctx, Rng& rng, SearchStats* stats) {
    if (pending.empty()) return {};
    if (state.cluster.hosts.empty()) throw Error("no hosts");
    switch (kind) {
        case SchedulerKind::Mmct: return mmct_schedule(state, pending, ctx, rng, true, stats);
        case SchedulerKind::MctsPlain: return mmct_schedule(state, pending, ctx, rng, false, stats);
        case SchedulerKind::Greedy: return greedy_schedule(state, pending, ctx);
        case SchedulerKind::Random: return random_schedule(state, pending, rng);
        case SchedulerKind::Genetic: return ga_schedule(state, pending, ctx, rng);
    }
    throw Error("unknown scheduler");
}

}  // namespace offload

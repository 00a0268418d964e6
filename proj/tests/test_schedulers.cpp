#include <doctest.h>

#include <algorithm>
#include <limits>

#include "offload/error.hpp"
#include "offload/schedulers.hpp"
#include "support.hpp"

using namespace offload;
using namespace std::chrono_literals;
using testkit::lone_task;

namespace {

struct Fixture {
    SimState state;
    SchedulerContext ctx;
};

Fixture lone_tasks(std::uint32_t edge, std::uint32_t cloud, std::size_t count) {
    Fixture f{make_sim_state(default_cluster(edge, cloud), 1, testkit::still_users()), {}};
    for (std::size_t i = 0; i < count; ++i) {
        release_workflow(f.state, lone_task(8 * (i + 1), 0, 20.0 + 10.0 * i, 1e6, 1e5));
    }
    const Duration td = from_seconds(1.0 / 60.0);
    f.ctx = testkit::context_for(f.state.cluster, td, td);
    return f;
}

bool covers_once(const Assignment& a, std::span<const TaskId> pending) {
    if (a.size() != pending.size()) return false;
    std::vector<TaskId> ids;
    for (const Decision& d : a) ids.push_back(d.task);
    std::vector<TaskId> want(pending.begin(), pending.end());
    std::sort(want.begin(), want.end());
    return ids == want;
}

}  // namespace

TEST_CASE("names round-trip") {
    for (SchedulerKind k : kAllSchedulers) CHECK(parse_scheduler(to_string(k)) == k);
    CHECK_FALSE(parse_scheduler("drl").has_value());
}

TEST_CASE("trivial decision spaces") {
    auto f = lone_tasks(1, 0, 1);
    const std::vector<TaskId> one{8};
    Rng rng(1);
    CHECK(schedule(SchedulerKind::Random, f.state, one, f.ctx, rng) == Assignment{{8, 0}});
    for (SchedulerKind k : kAllSchedulers) {
        Rng r(2);
        CHECK(schedule(k, f.state, {}, f.ctx, r).empty());
        CHECK(schedule(k, f.state, one, f.ctx, r) == Assignment{{8, 0}});
    }

    SimState bare = make_sim_state(ClusterState{}, 0);
    Rng r(3);
    CHECK_THROWS_WITH_AS(schedule(SchedulerKind::Greedy, bare, one, f.ctx, r), "no hosts", Error);
    CHECK(schedule(SchedulerKind::Greedy, bare, {}, f.ctx, r).empty());
}

TEST_CASE("greedy takes the one-interval argmin with ties to the lower host") {
    auto f = lone_tasks(2, 1, 1);
    const std::vector<TaskId> one{8};
    double best = std::numeric_limits<double>::infinity();
    HostId arg = 0;
    for (HostId h = 0; h < 3; ++h) {
        const double y = interval_objective(f.state, Assignment{{8, h}}, f.ctx);
        if (y < best) {
            best = y;
            arg = h;
        }
    }
    CHECK(greedy_schedule(f.state, one, f.ctx) == Assignment{{8, arg}});
    // Hosts 0 and 1 are identical edge hosts.
    CHECK(interval_objective(f.state, Assignment{{8, 0}}, f.ctx) ==
          interval_objective(f.state, Assignment{{8, 1}}, f.ctx));
    CHECK(arg != 1);
}

TEST_CASE("greedy matches sequential exhaustive argmin") {
    Rng rng(5);
    for (int i = 0; i < 60; ++i) {
        auto s = testkit::random_snapshot(rng, 3, 3);
        std::vector<const LiveTask*> order;
        for (TaskId id : s.pending) order.push_back(find_task(s.state, id));
        std::sort(order.begin(), order.end(), [](const LiveTask* a, const LiveTask* b) {
            return a->due != b->due ? a->due < b->due : a->id < b->id;
        });
        Assignment partial;
        for (const LiveTask* t : order) {
            double best = std::numeric_limits<double>::infinity();
            HostId arg = 0;
            for (HostId h = 0; h < s.state.cluster.hosts.size(); ++h) {
                Assignment trial = partial;
                trial.push_back({t->id, h});
                const double y = interval_objective(s.state, trial, s.ctx);
                if (y < best) {
                    best = y;
                    arg = h;
                }
            }
            partial.push_back({t->id, arg});
        }
        std::sort(partial.begin(), partial.end());
        CHECK(greedy_schedule(s.state, s.pending, s.ctx) == partial);
    }
}

TEST_CASE("genetic baseline") {
    auto single = lone_tasks(1, 0, 1);
    const std::vector<TaskId> one{8};
    Rng rng(1);
    CHECK(ga_schedule(single.state, one, single.ctx, rng) == Assignment{{8, 0}});

    auto f = lone_tasks(1, 1, 2);
    const std::vector<TaskId> two{8, 16};
    Rng a(9);
    Rng b(9);
    const auto ga = ga_schedule(f.state, two, f.ctx, a);
    CHECK(ga == ga_schedule(f.state, two, f.ctx, b));
    CHECK(covers_once(ga, two));

    const double ga_fit = reward(interval_objective(f.state, ga, f.ctx));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng r(seed);
        const auto rnd = random_schedule(f.state, two, r);
        CHECK(ga_fit >= reward(interval_objective(f.state, rnd, f.ctx)));
    }
    double table_max = 0.0;
    for (HostId h0 = 0; h0 < 2; ++h0) {
        for (HostId h1 = 0; h1 < 2; ++h1) {
            table_max = std::max(table_max, reward(interval_objective(f.state, Assignment{{8, h0}, {16, h1}}, f.ctx)));
        }
    }
    CHECK(ga_fit == table_max);
}

TEST_CASE("every scheduler is deterministic and places each task once") {
    Rng gen(13);
    for (int i = 0; i < 12; ++i) {
        auto s = testkit::random_snapshot(gen, 5, 4);
        s.ctx.mmct.iterations = 6;
        s.ctx.mmct.rollout_steps = 3;
        for (SchedulerKind k : kAllSchedulers) {
            Rng a(100 + i);
            Rng b(100 + i);
            const auto x = schedule(k, s.state, s.pending, s.ctx, a);
            const auto y = schedule(k, s.state, s.pending, s.ctx, b);
            CHECK(x == y);
            CHECK(covers_once(x, s.pending));
            for (const Decision& d : x) CHECK(d.host < s.state.cluster.hosts.size());
        }
    }
}

TEST_CASE("one tree per pending task") {
    auto f = lone_tasks(2, 1, 2);
    const std::vector<TaskId> two{8, 16};
    SearchStats stats;
    Rng rng(4);
    const auto a = mmct_schedule(f.state, two, f.ctx, rng, true, &stats);
    CHECK(stats.trees == 2);
    CHECK(covers_once(a, two));
    CHECK(stats.iterations <= 2 * f.ctx.mmct.iterations);
}

TEST_CASE("plain search agrees with early stopping") {
    Rng gen(29);
    for (int i = 0; i < 20; ++i) {
        auto s = testkit::random_snapshot(gen, 4, 4);
        SearchStats on;
        SearchStats off;
        Rng a(i);
        Rng b(i);
        CHECK(mmct_schedule(s.state, s.pending, s.ctx, a, true, &on) ==
              mcts_plain_schedule(s.state, s.pending, s.ctx, b, &off));
        CHECK(on.iterations <= off.iterations);
        CHECK(off.discards == 0);
        CHECK(off.iterations == off.trees * s.ctx.mmct.iterations);
    }
}

TEST_CASE("random root commitment still covers every task") {
    auto f = lone_tasks(2, 2, 3);
    f.ctx.mmct.commit_random_root = true;
    const std::vector<TaskId> three{8, 16, 24};
    SearchStats stats;
    Rng rng(6);
    const auto a = mmct_schedule(f.state, three, f.ctx, rng, true, &stats);
    CHECK(covers_once(a, three));
    CHECK(stats.trees == 2);
}

TEST_CASE("simulated roll-outs have N+1 rewards") {
    auto f = lone_tasks(2, 1, 3);
    SimulationEnvironment env(f.state, f.ctx);
    Rng rng(1);
    const Assignment path{{8, 0}};
    const std::vector<TaskId> rest{16, 24};
    auto r = env.evaluate(path, rest, 7, rng);
    CHECK(r.size() == 8);
    for (double q : r) {
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
    }
    CHECK(env.evaluate(path, {}, 7, rng).size() == 8);
    CHECK(env.evaluate(path, rest, 0, rng).size() == 1);

    // The cached immediate state gives the same rewards as a fresh one.
    const double q = env.immediate(path);
    Rng x(3);
    Rng y(3);
    const auto cached = env.evaluate(path, rest, 4, x);
    const auto fresh = env.evaluate(path, rest, 4, y);
    CHECK(cached.front() == q);
    CHECK(cached == fresh);
}

#include <doctest.h>

#include <vector>

#include "offload/error.hpp"
#include "offload/objective.hpp"
#include "offload/rng.hpp"

using namespace offload;

namespace {

NormalizationBounds unit_bounds() { return {{0.0, 1.0}, {0.0, 10.0}}; }

}  // namespace

TEST_CASE("min-max endpoints and clamping") {
    QosIndicators at_min;
    const auto lo = normalize_indicators(at_min, unit_bounds(), 5);
    CHECK(lo == NormalizedQos{0.0, 0.0, 0.0, 0.0});

    QosIndicators above;
    above.ars_s = 3.0;
    above.aec_j = 50.0;
    above.hc_util_variance = 0.25;
    above.hc_migrations = 100;
    above.sla = 100;
    const auto hi = normalize_indicators(above, unit_bounds(), 5);
    CHECK(hi == NormalizedQos{1.0, 1.0, 1.0, 1.0});

    QosIndicators mid;
    mid.ars_s = 0.25;
    mid.aec_j = 5.0;
    mid.hc_util_variance = 0.05;
    mid.hc_migrations = 1;
    mid.sla = 2;
    const auto m = normalize_indicators(mid, unit_bounds(), 4);
    CHECK(m[0] == doctest::Approx(0.25));
    CHECK(m[1] == doctest::Approx(0.5));
    CHECK(m[2] == doctest::Approx(0.5 * 0.2 + 0.5 * 0.25));
    CHECK(m[3] == doctest::Approx(0.5));
}

TEST_CASE("empty window zeroes the per-task terms") {
    QosIndicators ind;
    ind.hc_migrations = 3;
    ind.sla = 3;
    const auto v = normalize_indicators(ind, unit_bounds(), 0);
    CHECK(v[2] == 0.0);
    CHECK(v[3] == 0.0);
}

TEST_CASE("bad bounds") {
    CHECK_THROWS_WITH_AS(normalize_indicators({}, {{1.0, 1.0}, {0.0, 1.0}}, 1), "bad bounds", Error);
    CHECK_THROWS_WITH_AS(normalize_indicators({}, {{0.0, 1.0}, {2.0, 1.0}}, 1), "bad bounds", Error);
}

TEST_CASE("score and reward") {
    CHECK(score({0.4, 0.9, 0.9, 0.9}, {1.0, 0.0, 0.0, 0.0}) == doctest::Approx(0.4));
    CHECK(score({1, 1, 1, 1}, QosWeights{}) == doctest::Approx(1.0));
    CHECK(score({1, 1, 1, 1}, QosWeights::normalized(3, 1, 4, 1)) == doctest::Approx(1.0));
    CHECK(score({0.2, 0.4, 0.6, 0.8}, {0.25, 0.25, 0.25, 0.25}) == doctest::Approx(0.5));
    CHECK(reward(0.0) == 1.0);
    CHECK(reward(1.0) == 0.0);
    CHECK(reward(0.5) == 0.5);
}

TEST_CASE("weights") {
    const QosWeights d;
    CHECK(d.alpha + d.beta + d.gamma + d.delta == doctest::Approx(1.0));
    const auto w = QosWeights::normalized(2, 2, 0, 0);
    CHECK(w.alpha == 0.5);
    CHECK(w.gamma == 0.0);
    CHECK_THROWS_AS(QosWeights::normalized(0, 0, 0, 0), Error);
    CHECK_THROWS_AS(QosWeights::normalized(-1, 1, 1, 1), Error);
}

TEST_CASE("score stays in the unit interval") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        QosIndicators ind;
        ind.ars_s = rng.uniform(-1.0, 3.0);
        ind.aec_j = rng.uniform(-5.0, 20.0);
        ind.hc_util_variance = rng.uniform(0.0, 0.25);
        ind.hc_migrations = rng.index(20);
        ind.sla = rng.index(20);
        const auto v = normalize_indicators(ind, unit_bounds(), rng.index(10));
        for (double x : v) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        const auto w = QosWeights::normalized(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform() + 1e-3);
        const double y = score(v, w);
        CHECK(y >= -1e-12);
        CHECK(y <= 1.0 + 1e-12);
    }
}

TEST_CASE("variance and default bounds") {
    const std::vector<double> v{0.0, 1.0};
    CHECK(variance(v) == doctest::Approx(kMaxUtilVariance));
    CHECK(variance(std::vector<double>{}) == 0.0);
    CHECK(variance(std::vector<double>{0.3, 0.3, 0.3}) == doctest::Approx(0.0));

    std::vector<HostSpec> hosts(2);
    hosts[0].idle_power_w = 10;
    hosts[0].busy_power_w = 30;
    hosts[1].idle_power_w = 40;
    hosts[1].busy_power_w = 120;
    const auto b = default_bounds(hosts, std::chrono::milliseconds{10}, std::chrono::seconds{2});
    CHECK(b.ars_s.min == 0.0);
    CHECK(b.ars_s.max == doctest::Approx(0.08));
    CHECK(b.aec_j.min == doctest::Approx(100.0));
    CHECK(b.aec_j.max == doctest::Approx(300.0));
}

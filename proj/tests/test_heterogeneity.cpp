#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "mimic/heterogeneity.hpp"
#include "mimic/log.hpp"
#include "oracles.hpp"

using namespace mimic;

TEST_CASE("tolerant intersection examples") {
    const MetricConfig cfg{MetricKind::euclidean, 1.0};
    SUBCASE("pair within tolerance keeps both") {
        auto r = tolerant_intersection({oracle::ps({{0.0}}), oracle::ps({{0.5}})}, cfg);
        CHECK(r.points == std::vector<InputPoint>{{0.0}, {0.5}});
    }
    SUBCASE("not associative") {
        auto a = oracle::ps({{0.0}}), b = oracle::ps({{0.9}}), c = oracle::ps({{1.8}});
        CHECK(tolerant_intersection({a, b, c}, cfg).points == std::vector<InputPoint>{{0.9}});
        const auto ab = tolerant_intersection({a, b}, cfg);
        CHECK(tolerant_intersection({ab, c}, cfg).points == std::vector<InputPoint>{{0.9}, {1.8}});
    }
    SUBCASE("empty member gives empty result") {
        CHECK(tolerant_intersection({oracle::ps({{0.0}}), PointSet()}, cfg).empty());
    }
    SUBCASE("single set is itself") {
        auto a = oracle::ps({{0.0}, {5.0}});
        CHECK(tolerant_intersection({a}, cfg).points == a.points);
    }
    SUBCASE("no sets") { CHECK_THROWS_AS(tolerant_intersection({}, cfg), std::invalid_argument); }
    SUBCASE("weights follow the surviving elements") {
        auto a = oracle::ps({{0.0}, {9.0}}, {3.0, 4.0});
        auto b = oracle::ps({{0.2}}, {2.0});
        auto r = tolerant_intersection({a, b}, cfg);
        CHECK(r.points == std::vector<InputPoint>{{0.0}, {0.2}});
        CHECK(r.weights == std::vector<double>{3.0, 2.0});
    }
}

TEST_CASE("tolerant intersection is commutative as a set and matches the element-wise definition") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 200; ++trial) {
        const MetricConfig cfg{MetricKind::euclidean, 0.5 + trial % 5 * 0.5};
        const int n = 1 + trial % 4;
        std::vector<PointSet> sets;
        std::vector<std::vector<InputPoint>> raw;
        for (int i = 0; i < n; ++i) {
            std::vector<InputPoint> pts;
            for (int j = 0; j < 1 + static_cast<int>(rng() % 12); ++j) pts.push_back({u(rng), u(rng)});
            sets.emplace_back(pts);
            raw.push_back(pts);
        }
        const auto got = tolerant_intersection(sets, cfg).points;
        CHECK(got == oracle::tolerant_intersection(raw, cfg.epsilon0));

        auto reversed = sets;
        std::reverse(reversed.begin(), reversed.end());
        auto back = tolerant_intersection(reversed, cfg).points;
        CHECK(std::set<InputPoint>(got.begin(), got.end()) == std::set<InputPoint>(back.begin(), back.end()));
    }
}

TEST_CASE("empirical probability") {
    const MetricConfig cfg{MetricKind::euclidean, 1.0};
    const auto a = oracle::ps({{0.0, 0.0}});
    const auto inside = within_tolerance(a, cfg);
    CHECK(estimate_probability(inside, {{0.5, 0}, {3, 0}, {4, 0}, {5, 0}}) == 0.25);
    CHECK(estimate_probability(inside, {{0.5, 0}}) == 1.0);
    CHECK_THROWS_AS(estimate_probability(inside, {}), std::invalid_argument);

    ClusterSummary s;
    s.clusters = {{{0, 0}, 3.0}, {{10, 10}, 1.0}};
    CHECK(weighted_probability(s, inside) == 0.75);
    CHECK(weighted_probability(ClusterSummary{}, inside) == 0.0);
}

TEST_CASE("empirical probability converges to the disc area") {
    const double truth = std::numbers::pi * 36.0 / 1e4;
    auto disc = [](const InputPoint& m) { return m[0] * m[0] + m[1] * m[1] < 36.0; };
    auto draw = [](std::size_t n, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-50, 50);
        std::vector<InputPoint> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back({u(rng), u(rng)});
        return out;
    };
    CHECK(std::abs(estimate_probability(disc, draw(100000, 1)) - truth) <= 0.003);
}

TEST_CASE("k-order similarity examples") {
    const MetricConfig cfg{MetricKind::euclidean, 1.0};
    auto v1 = oracle::ps({{0.0, 0.0}, {5.0, 5.0}});
    SUBCASE("single executor is its own probability") {
        CHECK(k_order_similarity({v1}, 1, cfg, 10.0) == 0.2);
    }
    SUBCASE("pair of disjoint sets never fails together") {
        auto far = oracle::ps({{40.0, 40.0}});
        CHECK(k_order_similarity({v1, far}, 2, cfg, 10.0) == 0.0);
        CHECK(k_order_heterogeneity({v1, far}, 2, cfg, 10.0) == 1.0);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(k_order_similarity({v1}, 2, cfg, 10.0), std::invalid_argument);
        CHECK_THROWS_AS(k_order_similarity({v1}, 1, cfg, 0.0), std::invalid_argument);
        std::vector<PointSet> many(kMaxSimilaritySets + 1, v1);
        CHECK_THROWS_AS(k_order_similarity(many, 1, cfg, 10.0), std::invalid_argument);
    }
}

TEST_CASE("k-order similarity equals brute-force frequency and the family expansion") {
    std::mt19937_64 rng(5);
    const MetricConfig cfg{MetricKind::euclidean, 0.4};  // grid spacing is 1
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + trial % 4;
        const std::size_t m = 1 + rng() % 20;
        std::vector<InputPoint> samples;
        for (std::size_t i = 0; i < m; ++i) samples.push_back({static_cast<double>(i), 0.0});
        std::vector<PointSet> sets(n);
        std::vector<std::set<std::size_t>> members(n);
        for (int e = 0; e < n; ++e) {
            for (std::size_t i = 0; i < m; ++i) {
                if (rng() % 2) {
                    sets[e].points.push_back(samples[i]);
                    members[e].insert(i);
                }
            }
        }
        for (int k = 1; k <= n; ++k) {
            const double got = k_order_similarity(sets, k, cfg, static_cast<double>(m));
            CHECK(got == oracle::at_least_k_frequency(m, members, k));
            if (n <= 3) CHECK(got == doctest::Approx(oracle::k_order_by_families(sets, k, cfg, m)));
        }
    }
}

TEST_CASE("k-order similarity warns and clamps outside [0,1]") {
    std::vector<std::string> warnings;
    set_warning_sink([&](std::string_view w) { warnings.emplace_back(w); });
    const MetricConfig cfg{MetricKind::euclidean, 1.0};
    auto a = oracle::ps({{0.0}, {3.0}});
    CHECK(k_order_similarity({a}, 1, cfg, 1.0) == 1.0);
    CHECK(warnings.size() == 1);
    set_warning_sink({});
    CHECK(k_order_similarity({a}, 1, cfg, 1.0) == 1.0);
}

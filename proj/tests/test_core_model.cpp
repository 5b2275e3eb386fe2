#include <doctest.h>

#include <cmath>
#include <random>

#include "mimic/core_model.hpp"
#include "oracles.hpp"

using namespace mimic;

namespace {

ExecutorSpec disc_at(int id, InputPoint c, double r) { return ExecutorSpec{id, {{std::move(c), r}}}; }

}  // namespace

TEST_CASE("input points reject non-finite coordinates") {
    CHECK_THROWS_AS(InputPoint({0.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(InputPoint({INFINITY, 0.0}), std::invalid_argument);
    CHECK(InputPoint({1.0, 2.0}).dim() == 2);
}

TEST_CASE("distance") {
    const MetricConfig cfg;
    CHECK(distance({0, 0}, {3, 4}, cfg) == 5.0);
    CHECK(distance({1.5, -2}, {1.5, -2}, cfg) == 0.0);
    CHECK_THROWS_AS(distance({0, 0}, {0, 0, 0}, cfg), std::invalid_argument);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 200; ++i) {
        InputPoint a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        CHECK(distance(a, b, cfg) == distance(b, a, cfg));
        CHECK(distance(a, c, cfg) <= distance(a, b, cfg) + distance(b, c, cfg) + 1e-12);
    }
}

TEST_CASE("metric and box validation") {
    MetricConfig bad;
    bad.epsilon0 = 0.0;
    CHECK_THROWS(bad.validate());
    InputBox box;
    CHECK(box.volume() == 10000.0);
    CHECK(box.contains({50, -50}));
    CHECK_FALSE(box.contains({50.1, 0}));
    box.upper = {0, 0, 0};
    CHECK_THROWS(box.validate());
}

TEST_CASE("ground-truth abnormality uses the strict interior") {
    const auto f = disc_at(0, {0, 0}, 6);
    CHECK(is_abnormal_truth(f, {1, 1}));
    CHECK_FALSE(is_abnormal_truth(f, {6, 0}));
    CHECK_FALSE(is_abnormal_truth(f, {50, 50}));
    CHECK_FALSE(is_abnormal_truth(ExecutorSpec{1, {}}, {0, 0}));
}

TEST_CASE("evaluate") {
    const auto a = disc_at(3, {0, 0}, 6);
    const auto b = disc_at(5, {0, 0}, 6);
    CHECK(evaluate(a, {20, 20}).is_correct());
    CHECK(evaluate(a, {20, 20}) == evaluate(b, {20, 20}));
    CHECK_FALSE(evaluate(a, {1, 0}).is_correct());
    CHECK(evaluate(a, {1, 0}) != evaluate(b, {1, 0}));
    CHECK(evaluate(a, {1, 0}, true) == evaluate(b, {1, 0}, true));
    CHECK(to_string(Output::correct()) == "CORRECT");
    CHECK(to_string(Output::wrong(3)) == "WRONG(3)");
}

TEST_CASE("vulnerability partition") {
    const MetricConfig cfg{MetricKind::euclidean, 1.0};
    SUBCASE("chain in one dimension") {
        KnownAbnormalSet s{0, {{0.0}, {0.5}, {1.0}, {10.0}}};
        auto parts = partition_vulnerabilities(s, cfg);
        REQUIRE(parts.size() == 2);
        CHECK(parts[0] == std::vector<InputPoint>{{0.0}, {0.5}, {1.0}});
        CHECK(parts[1] == std::vector<InputPoint>{{10.0}});
    }
    SUBCASE("empty and singleton") {
        CHECK(partition_vulnerabilities({0, {}}, cfg).empty());
        CHECK(partition_vulnerabilities({0, {{2, 2}}}, cfg).size() == 1);
    }
    SUBCASE("matches all-pairs components on random sets") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 100; ++trial) {
            std::uniform_real_distribution<double> u(0, 10);
            KnownAbnormalSet s{0, {}};
            const int n = 1 + trial % 40;
            for (int i = 0; i < n; ++i) s.points.push_back({u(rng), u(rng)});
            const auto got = partition_vulnerabilities(s, cfg);
            const auto want = oracle::components(s.points, cfg.epsilon0);
            REQUIRE(got.size() == want.size());
            for (std::size_t c = 0; c < want.size(); ++c) {
                std::vector<InputPoint> pts;
                for (auto i : want[c]) pts.push_back(s.points[i]);
                auto sorted_got = got[c];
                std::sort(sorted_got.begin(), sorted_got.end());
                std::sort(pts.begin(), pts.end());
                CHECK(sorted_got == pts);
            }
        }
    }
}

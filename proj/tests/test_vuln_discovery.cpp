#include <doctest.h>

#include <cmath>
#include <random>

#include "mimic/vuln_discovery.hpp"
#include "oracles.hpp"

using namespace mimic;

namespace {

std::vector<InputPoint> blob(double cx, double cy, double radius, std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<InputPoint> out;
    while (out.size() < n) {
        const double x = u(rng), y = u(rng);
        if (x * x + y * y < 1.0) out.push_back({cx + radius * x, cy + radius * y});
    }
    return out;
}

InputPoint mean_of(const std::vector<InputPoint>& pts) {
    double x = 0, y = 0;
    for (const auto& p : pts) {
        x += p[0];
        y += p[1];
    }
    return {x / pts.size(), y / pts.size()};
}

}  // namespace

TEST_CASE("arbitrate") {
    const auto A = Output::correct(), B = Output::wrong(1), C = Output::wrong(2);
    CHECK(arbitrate({A, A, B, B, C}) == A);
    CHECK(arbitrate({B, A, A, B}) == B);
    CHECK(arbitrate({B, A, A}) == A);
    CHECK_THROWS_AS(arbitrate({}), std::invalid_argument);
}

TEST_CASE("detect abnormal") {
    std::vector<ExecutorSpec> execs;
    for (int i = 0; i < 5; ++i) execs.push_back({i, {}});
    execs[3].discs.push_back({{0, 0}, 6});
    const auto det = detect_abnormal({1, 1}, execs);
    CHECK(det.abnormal == std::vector<bool>{false, false, false, true, false});
    CHECK(det.verdict.is_correct());
    CHECK(detect_abnormal({30, 30}, execs).abnormal == std::vector<bool>(5, false));
}

TEST_CASE("fitness") {
    const MetricConfig cfg;
    CHECK(fitness({{0, 0}}, 1.0, 1.0, cfg) == std::vector<double>{1.0});
    CHECK(fitness({{0, 0}, {0, 0}}, 1.0, 1.0, cfg) == std::vector<double>{2.0, 2.0});
    const auto f = fitness({{0.0}, {0.6931}}, 1.0, 1.0, cfg);
    CHECK(f[0] == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(f[1] == f[0]);
}

TEST_CASE("cluster two separated blobs") {
    std::mt19937_64 rng(1);
    auto a = blob(0, 0, 1, 30, rng);
    auto b = blob(20, 0, 1, 20, rng);
    Chunk chunk{1, a};
    chunk.points.insert(chunk.points.end(), b.begin(), b.end());
    ClusteringParams params;
    params.r = 2.0;
    const auto s = cluster_chunk(chunk, params, MetricConfig{}, rng);
    REQUIRE(s.size() == 2);
    CHECK(s.up_to_time == 1);
    const auto ma = mean_of(a), mb = mean_of(b);
    for (const auto& c : s.clusters) {
        const bool first = distance(c.center, ma, MetricConfig{}) < 1.0;
        const bool second = distance(c.center, mb, MetricConfig{}) < 1.0;
        CHECK(first != second);
        CHECK(c.density == (first ? 30.0 : 20.0));
    }
    CHECK_THROWS_AS(cluster_chunk(Chunk{}, params, MetricConfig{}, rng), std::invalid_argument);
}

TEST_CASE("cluster_chunk agrees with the literal greedy procedure") {
    std::mt19937_64 rng(9);
    const MetricConfig cfg;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<InputPoint> pts;
        for (int b = 0; b < 3; ++b) {
            auto more = blob(static_cast<double>(rng() % 40), static_cast<double>(rng() % 40), 3, 10 + rng() % 20, rng);
            pts.insert(pts.end(), more.begin(), more.end());
        }
        ClusteringParams params;
        params.beta = 2.0;
        const auto got = cluster_chunk({1, pts}, params, cfg, rng);
        const auto want = oracle::greedy_clusters(pts, params.r, 2.0, params.gamma);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got.clusters[i].center == want.clusters[i].center);
            CHECK(got.clusters[i].density == want.clusters[i].density);
        }
    }
}

TEST_CASE("cluster_chunk subsamples N candidates") {
    std::mt19937_64 rng(2);
    ClusteringParams params;
    params.N = 40;
    const auto s = cluster_chunk({1, blob(0, 0, 10, 500, rng)}, params, MetricConfig{}, rng);
    CHECK(s.total_density() == 40.0);
}

TEST_CASE("merge summary") {
    const MetricConfig cfg;
    ClusteringParams params;  // r0 = 4
    ClusterSummary iss{{{{0, 0}, 5}}, 7, 1};
    ClusterSummary chs{{{{1, 0}, 3}}, 7, 2};
    SUBCASE("close clusters fuse into the chunk center") {
        const auto m = merge_summary(iss, chs, params, cfg);
        REQUIRE(m.size() == 1);
        CHECK(m.clusters[0].center == InputPoint{1, 0});
        CHECK(m.clusters[0].density == 8.0);
        CHECK(m.up_to_time == 2);
    }
    SUBCASE("far clusters are both kept") {
        chs.clusters[0].center = {10, 0};
        const auto m = merge_summary(iss, chs, params, cfg);
        CHECK(m.size() == 2);
        CHECK(m.total_density() == 8.0);
    }
    SUBCASE("empty stream summary takes the chunk summary") {
        const auto m = merge_summary(ClusterSummary{{}, 7, 0}, chs, params, cfg);
        CHECK(m.size() == 1);
        CHECK(m.clusters[0].density == 3.0);
    }
    SUBCASE("contract violations") {
        ClusterSummary other = chs;
        other.owner_executor = 8;
        CHECK_THROWS_AS(merge_summary(iss, other, params, cfg), std::invalid_argument);
        other = chs;
        other.up_to_time = 1;
        CHECK_THROWS_AS(merge_summary(iss, other, params, cfg), std::invalid_argument);
    }
}

TEST_CASE("decay and prune") {
    ClusterSummary s{{{{0, 0}, 10}, {{5, 5}, 0.5}}, 0, 3};
    auto d = decay_and_prune(s, 0.5, 0.5, 10);
    REQUIRE(d.size() == 1);
    CHECK(d.clusters[0].density == 5.0);

    ClusterSummary many{{}, 0, 1};
    for (int i = 0; i < 6; ++i) many.clusters.push_back({{static_cast<double>(i), 0}, static_cast<double>(i % 3 + 1)});
    auto capped = decay_and_prune(many, 1.0, 0.0, 5);
    CHECK(capped.size() == 5);
    // Ties on density keep the earlier cluster.
    for (const auto& c : capped.clusters) CHECK(c.center != InputPoint{3, 0});
    CHECK_THROWS_AS(decay_and_prune(s, 0.0, 0.0, 5), std::invalid_argument);
}

TEST_CASE("stream of chunks from two discs recovers both") {
    std::mt19937_64 rng(4);
    SummaryTracker tracker(0, 100);
    const InputPoint c1{-20, -10}, c2{15, 20};
    ClusteringParams params;
    for (int chunk = 0; chunk < 20; ++chunk) {
        for (int i = 0; i < 100; ++i) {
            const auto& c = rng() % 2 ? c1 : c2;
            tracker.observe(blob(c[0], c[1], 6, 1, rng).front());
        }
        CHECK(tracker.flush(params, MetricConfig{}, rng) == 1);
    }
    CHECK(tracker.buffered() == 0);
    CHECK(tracker.clustered() == 2000);
    CHECK(tracker.summary().total_density() == 2000.0);
    for (const auto& c : {c1, c2}) {
        double best = 1e9;
        for (const auto& k : tracker.summary().clusters) best = std::min(best, distance(k.center, c, MetricConfig{}));
        CHECK(best < 6.0);
    }
}

TEST_CASE("clustering invariants on random chunks") {
    std::mt19937_64 rng(12);
    const MetricConfig cfg;
    std::uniform_real_distribution<double> u(-50, 50);
    for (int trial = 0; trial < 200; ++trial) {
        ClusteringParams params;
        params.r = 1.0 + trial % 4;
        std::vector<InputPoint> pts;
        const std::size_t n = 1 + rng() % 100;
        const int blobs = 1 + static_cast<int>(rng() % 4);
        for (std::size_t i = 0; i < n; ++i) {
            const auto more = blob(std::round(u(rng) / 10 * blobs) , std::round(u(rng) / 10 * blobs), 5, 1, rng);
            pts.push_back(more.front());
        }
        const auto s = cluster_chunk({1, pts}, params, cfg, rng);
        CHECK(s.total_density() == static_cast<double>(n));
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                CHECK(distance(s.clusters[i].center, s.clusters[j].center, cfg) > params.r);
        // Each point belongs to the first center within r; those counts are the densities.
        std::vector<double> counts(s.size(), 0.0);
        for (const auto& p : pts) {
            std::size_t owner = s.size();
            for (std::size_t c = 0; c < s.size() && owner == s.size(); ++c)
                if (distance(p, s.clusters[c].center, cfg) < params.r) owner = c;
            REQUIRE(owner < s.size());
            counts[owner] += 1.0;
        }
        for (std::size_t c = 0; c < s.size(); ++c) CHECK(counts[c] == s.clusters[c].density);
    }
}

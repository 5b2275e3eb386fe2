#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mimic/config.hpp"
#include "mimic/io.hpp"
#include "mimic/runner.hpp"

using namespace mimic;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("mimic_test_" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

ExperimentMatrix tiny_matrix() {
    ExperimentMatrix m;
    m.base.pool_size = 8;
    m.base.total_inputs = 6000;
    m.base.scheduling_period = 2000;
    m.base.warmup_epochs = 1;
    m.base.scheduler.K = 20;
    m.seeds = {2, 1};
    m.sweeps = {{"strategy", {"sidmd", "dhr_random"}}};
    return m;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config(R"(
# baseline style
pool_size = 20
strategy = idmd
[clustering]
r = 2.5
beta = 0.75
[scheduler]
harm = 0:0, 1:2, 4:5
[experiment]
seeds = 1..3, 7
output_dir = out/x
[sweep]
online_set_size = 5, 7
[cost]
cost_f = 2
N_C = 3
)");
    CHECK(c.matrix.base.pool_size == 20);
    CHECK(c.matrix.base.strategy == Strategy::idmd);
    CHECK(c.matrix.base.clustering.r == 2.5);
    CHECK(c.matrix.base.clustering.beta == 0.75);
    CHECK(c.matrix.base.scheduler.harm(1.0) == 2.0);
    CHECK(c.matrix.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(c.matrix.output_dir == "out/x");
    REQUIRE(c.matrix.sweeps.size() == 1);
    CHECK(c.matrix.sweeps[0].values == std::vector<std::string>{"5", "7"});
    REQUIRE(c.cost.has_value());
    CHECK(c.cost->params.cost_f == 2.0);
    CHECK(c.cost->cleanings == 3.0);
}

TEST_CASE("config errors name the field") {
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("pool_sise = 3").find("pool_sise") != std::string::npos);
    CHECK(message("\n\nclustering.r = abc").find("line 3") != std::string::npos);
    CHECK(message("clustering.r = abc").find("clustering.r") != std::string::npos);
    CHECK(message("strategy = best").find("strategy") != std::string::npos);
    CHECK(message("seed = 1\nseed = 2").find("duplicate") != std::string::npos);
    CHECK(message("sweep.nope = 1, 2").find("nope") != std::string::npos);
    CHECK(message("cost.bogus = 1").find("cost.bogus") != std::string::npos);
    CHECK(message("just words").find("line 1") != std::string::npos);
    CHECK(message("[scheduler\nK = 3").find("section") != std::string::npos);
}

TEST_CASE("config round-trips") {
    ConfigFile c;
    c.matrix.base.clustering.beta = 1.0 / 3.0;
    c.matrix.base.metric.epsilon0 = 0.1 + 0.2;
    c.matrix.base.scheduler.harm = HarmFunction::table({{0, 0}, {0.5, 1.25}});
    c.matrix.base.box.lower = {-1, -2, -3};
    c.matrix.base.box.upper = {1, 2, 3};
    c.matrix.base.correlated_wrong_outputs = true;
    c.matrix.seeds = {4, 9};
    c.matrix.sweeps = {{"strategy", {"idmd", "sidmd"}}, {"scheduler.L_ST", {"0", "2"}}};
    c.cost = CostJob{};
    c.cost->params.cost_D1 = 0.125;
    c.cost->t = 12;

    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    CHECK(back.matrix.base == c.matrix.base);
    CHECK(back.matrix.seeds == c.matrix.seeds);
    CHECK(back.matrix.sweeps == c.matrix.sweeps);
    CHECK(back.matrix.output_dir == c.matrix.output_dir);
    REQUIRE(back.cost.has_value());
    CHECK(back.cost->params.cost_D1 == 0.125);
    CHECK(serialize_config(back) == text);
    CHECK(parse_config(serialize_config(ConfigFile{})).matrix.base == SimConfig{});
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("json schemas") {
    ClusterSummary s{{{{1.5, -2}, 3}}, 4, 7};
    const auto j = to_json(s);
    CHECK(j["executor_id"] == 4);
    CHECK(j["up_to_time"] == 7);
    CHECK(j["clusters"][0]["center"] == json::array({1.5, -2.0}));
    CHECK(j["clusters"][0]["density"] == 3.0);
    const auto back = summary_from_json(j);
    CHECK(back.clusters[0].center == s.clusters[0].center);

    const auto truth = truth_to_json({{0, {{{1, 2}, 6}}}}, InputBox{});
    CHECK(truth["executors"][0]["discs"][0]["radius"] == 6.0);
    CHECK(truth["box"]["lower"] == json::array({-50.0, -50.0}));

    CHECK(to_json(Event{AttackStart{}})["type"] == "attack_start");
    CHECK(to_json(Event{AttackEnd{}})["type"] == "attack_end");
    CHECK(to_json(Event{EpochEvent{}})["type"] == "epoch");
    CHECK(to_json(Event{ScheduleEvent{}})["type"] == "schedule");
}

TEST_CASE("metrics rows") {
    RunMetrics m{2, 100, 0.02, 8, 1, 0.5, 4};
    CHECK(metrics_row("sidmd", 3, m) == "sidmd,3,2,0.02,8,1,0.5,4");
    CHECK(kMetricsHeader == "strategy,seed,N,P,T,n_surv,P2,ET");
}

TEST_CASE("matrix expansion") {
    auto m = tiny_matrix();
    m.sweeps.push_back({"scheduler.L_ST", {"0", "2"}});
    const auto jobs = expand_matrix(m);
    CHECK(jobs.size() == 8);
    CHECK(jobs[0].group == "scheduler.L_ST_0");
    m.sweeps.push_back({"strategy", {"idmd"}});
    m.sweeps.push_back({"strategy", {"idmd"}});
    CHECK_THROWS_AS(expand_matrix(m), ConfigError);
    m = tiny_matrix();
    m.seeds.clear();
    CHECK_THROWS_AS(expand_matrix(m), ConfigError);
    m = tiny_matrix();
    m.sweeps = {{"online_set_size", {"20"}}};
    CHECK_THROWS_AS(expand_matrix(m), ConfigError);
}

TEST_CASE("matrix runner output") {
    const auto dir = scratch("runner");
    const auto m = tiny_matrix();
    const auto rows = run_matrix(m, {dir, false, 2});
    REQUIRE(rows.size() == 4);

    const auto csv = lines_of(read_file(dir / "metrics.csv"));
    REQUIRE(csv.size() == 5);
    CHECK(csv[0] == "strategy,seed,N,P,T,n_surv,P2,ET");
    CHECK(csv[1].rfind("dhr_random,1,", 0) == 0);
    CHECK(csv[2].rfind("dhr_random,2,", 0) == 0);
    CHECK(csv[3].rfind("sidmd,1,", 0) == 0);
    CHECK(csv[4].rfind("sidmd,2,", 0) == 0);

    for (const auto& line : lines_of(read_file(dir / "events.jsonl"))) {
        const auto e = json::parse(line);
        const std::string type = e.at("type");
        CHECK((type == "attack_start" || type == "attack_end" || type == "epoch" || type == "schedule"));
    }
    const auto summaries = json::parse(read_file(dir / "summaries.json"));
    REQUIRE(summaries.size() == 4);
    CHECK(summaries[0]["executors"].size() == 8);
    CHECK(fs::exists(dir / "config.resolved"));
    CHECK_FALSE(fs::exists(dir / ".parts"));

    CHECK_THROWS_AS(run_matrix(m, {dir, false, 1}), OutputExistsError);
    const auto before = read_file(dir / "metrics.csv");
    run_matrix(m, {dir, true, 1});
    CHECK(read_file(dir / "metrics.csv") == before);
    fs::remove_all(dir);
}

TEST_CASE("demo output") {
    const auto dir = scratch("demo");
    SimConfig cfg = tiny_matrix().base;
    const auto r = run_experiment(cfg);
    fs::create_directories(dir);
    write_demo(r, dir);
    const auto truth = json::parse(read_file(dir / "truth.json"));
    CHECK(truth["executors"].size() == 8);
    CHECK(truth["executors"][0]["discs"].size() == 10);
    const auto found = json::parse(read_file(dir / "discovered.json"));
    CHECK(found.size() == 8);
    fs::remove_all(dir);
}

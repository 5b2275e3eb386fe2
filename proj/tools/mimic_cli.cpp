#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mimic/attack_sim.hpp"
#include "mimic/config.hpp"
#include "mimic/cost_model.hpp"
#include "mimic/io.hpp"
#include "mimic/runner.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<std::string> out;
    std::vector<std::string> sets;
    bool force = false;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config, "config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", a.seed, "run a single seed");
    cmd->add_option("--strategy", a.strategy, "dhr_random, idmd or sidmd");
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--set", a.sets, "override a config key (key=value)");
    cmd->add_flag("--force", a.force, "overwrite a non-empty output directory");
}

mimic::ConfigFile load(const CommonArgs& a) {
    mimic::ConfigFile cfg = a.config.empty() ? mimic::ConfigFile{} : mimic::load_config(a.config);
    for (const auto& kv : a.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw mimic::ConfigError("--set expects key=value, got '" + kv + "'");
        mimic::apply_setting(cfg.matrix.base, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (a.seed) cfg.matrix.seeds = {*a.seed};
    if (a.strategy) {
        cfg.matrix.base.strategy = mimic::parse_strategy(*a.strategy);
        std::erase_if(cfg.matrix.sweeps, [](const mimic::Sweep& s) { return s.key == "strategy"; });
    }
    if (a.out) cfg.matrix.output_dir = *a.out;
    return cfg;
}

int cmd_run(const CommonArgs& a) {
    const auto cfg = load(a);
    const auto rows = mimic::run_matrix(cfg.matrix, {cfg.matrix.output_dir, a.force, a.jobs});
    std::string group = "\x01";
    for (const auto& r : rows) {
        if (r.group != group) {
            group = r.group;
            if (!group.empty()) std::cout << "[" << group << "]\n";
            std::cout << mimic::kMetricsHeader << '\n';
        }
        std::cout << mimic::metrics_row(mimic::to_string(r.strategy), r.seed, r.metrics) << '\n';
    }
    std::cout << "wrote " << rows.size() << " run(s) to " << cfg.matrix.output_dir << '\n';
    return 0;
}

int cmd_demo(const CommonArgs& a) {
    auto cfg = load(a);
    auto sim = cfg.matrix.base;
    sim.seed = cfg.matrix.seeds.front();
    const std::filesystem::path out = cfg.matrix.output_dir;

    mimic::RunResult result;
    result.config = sim;
    if (sim.pool_size == 0) {
        auto probe = sim;
        probe.pool_size = probe.online_set_size;
        probe.validate();
    } else {
        result = mimic::run_experiment(sim);
    }
    mimic::prepare_output_dir(out, a.force);
    mimic::write_demo(result, out);

    const auto [qualifying, recovered] = mimic::recovery_stats(result, 20, 6.0);
    std::size_t discs = 0;
    std::size_t centers = 0;
    for (const auto& e : result.pool) discs += e.discs.size();
    for (const auto& s : result.summaries) centers += s.size();
    std::cout << "planted discs: " << discs << "\ndiscovered centers: " << centers
              << "\ndiscs with >=20 detections: " << qualifying << "\nrecovered within 6: " << recovered
              << '\n';
    std::cout << "wrote truth.json and discovered.json to " << out.string() << '\n';
    return 0;
}

int cmd_cost(const CommonArgs& a) {
    const auto cfg = load(a);
    if (!cfg.cost) throw mimic::ConfigError("config has no cost.* keys");
    cfg.cost->params.validate();
    const auto b = mimic::cost_breakdown(cfg.cost->params, cfg.cost->t, cfg.cost->cleanings);
    using mimic::format_double;
    std::cout << "heterogeneity " << format_double(b.heterogeneity) << '\n'
              << "redundancy_rate " << format_double(b.redundancy_rate) << '\n'
              << "dynamic_rate " << format_double(b.dynamic_rate) << '\n'
              << "running " << format_double(b.running) << '\n'
              << "cleaning " << format_double(b.cleaning) << '\n'
              << "total " << format_double(b.total) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"input-based mimic defense simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, demo_args, cost_args;
    auto* run = app.add_subcommand("run", "run an experiment matrix");
    add_common(run, run_args);
    run->add_option("--jobs", run_args.jobs, "parallel runs")->check(CLI::PositiveNumber);
    auto* demo = app.add_subcommand("demo-cluster", "one run; dump planted and discovered vulnerabilities");
    add_common(demo, demo_args);
    auto* cost = app.add_subcommand("cost", "print the deployment cost breakdown");
    cost->add_option("--config", cost_args.config, "config file")->check(CLI::ExistingFile)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (demo->parsed()) return cmd_demo(demo_args);
        return cmd_cost(cost_args);
    } catch (const mimic::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const mimic::OutputExistsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

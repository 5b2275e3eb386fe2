#include "mimic/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "mimic/io.hpp"

namespace fs = std::filesystem;

namespace mimic {

namespace {

std::string sanitize(std::string_view text) {
    std::string out;
    for (char c : text) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
        out += keep ? c : '_';
    }
    return out;
}

std::string run_name(const SimConfig& cfg) {
    return std::string(to_string(cfg.strategy)) + "_seed" + std::to_string(cfg.seed);
}

}  // namespace

std::vector<RunJob> expand_matrix(const ExperimentMatrix& matrix) {
    if (matrix.seeds.empty()) throw ConfigError("experiment.seeds: at least one seed is required");
    matrix.base.validate();

    std::vector<RunJob> jobs{{matrix.base, ""}};
    for (const auto& sweep : matrix.sweeps) {
        std::vector<RunJob> next;
        for (const auto& job : jobs) {
            for (const auto& value : sweep.values) {
                RunJob j = job;
                apply_setting(j.config, sweep.key, value);
                if (sweep.key != "strategy") {
                    if (!j.group.empty()) j.group += "__";
                    j.group += sanitize(sweep.key + "=" + value);
                }
                next.push_back(std::move(j));
            }
        }
        jobs = std::move(next);
    }

    std::vector<RunJob> out;
    for (const auto& job : jobs) {
        for (auto seed : matrix.seeds) {
            RunJob j = job;
            j.config.seed = seed;
            try {
                j.config.validate();
            } catch (const ConfigError& e) {
                throw ConfigError((j.group.empty() ? std::string() : j.group + ": ") + e.what());
            }
            out.push_back(std::move(j));
        }
    }

    std::set<std::tuple<std::string, std::string, std::uint64_t>> seen;
    for (const auto& j : out) {
        if (!seen.emplace(j.group, std::string(to_string(j.config.strategy)), j.config.seed).second)
            throw ConfigError("experiment matrix repeats run " + run_name(j.config) +
                              (j.group.empty() ? "" : " in " + j.group));
    }
    return out;
}

void prepare_output_dir(const fs::path& dir, bool force) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw OutputExistsError(dir.string() + " exists and is not a directory");
        if (!fs::is_empty(dir) && !force)
            throw OutputExistsError("output directory " + dir.string() +
                                    " is not empty (use --force to overwrite)");
    }
    fs::create_directories(dir);
}

std::vector<RunRow> run_matrix(const ExperimentMatrix& matrix, const RunnerOptions& options) {
    const auto jobs = expand_matrix(matrix);
    prepare_output_dir(options.out_dir, options.force);

    const fs::path parts = options.out_dir / ".parts";
    fs::remove_all(parts);
    fs::create_directories(parts);

    std::vector<RunRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (error) return;
            }
            try {
                const auto& job = jobs[i];
                const auto result = run_experiment(job.config);
                const fs::path dir = parts / (job.group.empty() ? "_" : job.group) / run_name(job.config);
                fs::create_directories(dir);

                std::string events;
                for (const auto& e : result.events) {
                    json line = {{"strategy", to_string(job.config.strategy)}, {"seed", job.config.seed}};
                    line.update(to_json(e));
                    events += line.dump();
                    events += '\n';
                }
                write_atomic(dir / "events.jsonl", events);
                json summaries = {{"strategy", to_string(job.config.strategy)},
                                  {"seed", job.config.seed},
                                  {"executors", to_json(result.summaries)}};
                write_atomic(dir / "summaries.json", summaries.dump());
                rows[i] = {job.group, job.config.strategy, job.config.seed, result.metrics};
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    const int threads = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto key = [&](std::size_t i) {
        return std::make_tuple(rows[i].group, std::string(to_string(rows[i].strategy)), rows[i].seed);
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

    std::map<std::string, std::vector<std::size_t>> groups;
    for (auto i : order) groups[rows[i].group].push_back(i);

    for (const auto& [group, members] : groups) {
        const fs::path dir = group.empty() ? options.out_dir : options.out_dir / group;
        fs::create_directories(dir);
        std::string csv(kMetricsHeader);
        csv += '\n';
        std::string events;
        std::string summaries = "[";
        bool first = true;
        for (auto i : members) {
            csv += metrics_row(to_string(rows[i].strategy), rows[i].seed, rows[i].metrics);
            csv += '\n';
            const fs::path part = parts / (group.empty() ? "_" : group) / run_name(jobs[i].config);
            events += read_file(part / "events.jsonl");
            if (!first) summaries += ',';
            summaries += read_file(part / "summaries.json");
            first = false;
        }
        summaries += "]\n";
        write_atomic(dir / "metrics.csv", csv);
        write_atomic(dir / "events.jsonl", events);
        write_atomic(dir / "summaries.json", summaries);

        ConfigFile resolved;
        resolved.matrix.base = jobs[members.front()].config;
        resolved.matrix.seeds.clear();
        for (auto i : members) {
            if (std::find(resolved.matrix.seeds.begin(), resolved.matrix.seeds.end(), rows[i].seed) ==
                resolved.matrix.seeds.end())
                resolved.matrix.seeds.push_back(rows[i].seed);
        }
        std::set<std::string> strategies;
        for (auto i : members) strategies.insert(std::string(to_string(rows[i].strategy)));
        if (strategies.size() > 1)
            resolved.matrix.sweeps.push_back({"strategy", {strategies.begin(), strategies.end()}});
        resolved.matrix.output_dir = options.out_dir.string();
        write_atomic(dir / "config.resolved", serialize_config(resolved));
    }
    fs::remove_all(parts);

    std::vector<RunRow> sorted;
    for (auto i : order) sorted.push_back(rows[i]);
    return sorted;
}

void write_demo(const RunResult& result, const fs::path& dir) {
    write_atomic(dir / "truth.json", truth_to_json(result.pool, result.config.box).dump(2) + "\n");
    write_atomic(dir / "discovered.json", to_json(result.summaries).dump(2) + "\n");
}

}  // namespace mimic

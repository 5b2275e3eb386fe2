#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mimic/attack_sim.hpp"
#include "mimic/config.hpp"

namespace mimic {

/// Output directory already holds results and overwriting was not allowed.
struct OutputExistsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunJob {
    SimConfig config;
    // Subdirectory for this run's sweep combination; empty when only the
    // strategy (or nothing) is swept.
    std::string group;
};

/// Cartesian product of the sweeps and seeds. Strategy sweeps share one
/// output group; any other swept key gets a subdirectory per combination.
std::vector<RunJob> expand_matrix(const ExperimentMatrix& matrix);

struct RunnerOptions {
    std::filesystem::path out_dir;
    bool force = false;
    int jobs = 1;
};

struct RunRow {
    std::string group;
    Strategy strategy = Strategy::sidmd;
    std::uint64_t seed = 0;
    RunMetrics metrics;
};

/// Runs every job and writes metrics.csv, events.jsonl and summaries.json
/// per group. Rows come back ordered by (group, strategy, seed).
std::vector<RunRow> run_matrix(const ExperimentMatrix& matrix, const RunnerOptions& options);

/// Creates the directory; throws OutputExistsError if it is non-empty and
/// force is false.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

/// truth.json and discovered.json for one run.
void write_demo(const RunResult& result, const std::filesystem::path& dir);

}  // namespace mimic

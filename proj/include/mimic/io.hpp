#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mimic/attack_sim.hpp"
#include "mimic/summary.hpp"

namespace mimic {

using json = nlohmann::json;

// {executor_id, up_to_time, clusters: [{center: [x, y], density}]}
json to_json(const ClusterSummary& s);
ClusterSummary summary_from_json(const json& j);
json to_json(const std::vector<ClusterSummary>& summaries);

// {box: {lower, upper}, executors: [{executor_id, discs: [{center, radius}]}]}
json truth_to_json(const std::vector<ExecutorSpec>& pool, const InputBox& box);

/// One events.jsonl record; `type` is the event_type() discriminator.
json to_json(const Event& e);

inline constexpr std::string_view kMetricsHeader = "strategy,seed,N,P,T,n_surv,P2,ET";
std::string metrics_row(std::string_view strategy, std::uint64_t seed, const RunMetrics& m);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace mimic

#pragma once

#include <vector>

#include "mimic/core_model.hpp"

namespace mimic {

struct Cluster {
    InputPoint center;
    double density = 0.0;
};

/// Cluster-center digest of one executor's abnormal inputs: either a single
/// chunk (chunk summary) or the whole stream so far (stream summary).
struct ClusterSummary {
    std::vector<Cluster> clusters;
    int owner_executor = 0;
    int up_to_time = 0;

    bool empty() const { return clusters.empty(); }
    std::size_t size() const { return clusters.size(); }
    double total_density() const;
};

}  // namespace mimic

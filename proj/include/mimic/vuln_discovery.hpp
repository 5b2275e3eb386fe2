#pragma once

#include <optional>
#include <random>
#include <vector>

#include "mimic/core_model.hpp"
#include "mimic/summary.hpp"

namespace mimic {

struct Chunk {
    int time_index = 1;
    std::vector<InputPoint> points;
};

struct ClusteringParams {
    int N = 100;         // candidate-center count
    double r = 2.0;      // cluster radius
    double r0 = 4.0;     // merge radius
    // Kernel bandwidth; unset means "variance of the chunk's data".
    std::optional<double> beta;
    double gamma = 1.0;  // kernel shape exponent
    int max_clusters = 256;  // N_c, per-executor summary cap

    void validate() const;
};

/// Plurality vote. Ties go to the tied output whose first producer comes
/// earliest in the result list (the lowest executor id when results are
/// listed in id order).
Output arbitrate(const std::vector<Output>& results);

struct Detection {
    std::vector<bool> abnormal;  // one bit per executor, same order as input
    Output verdict;
};

/// Runs every executor on m and flags those that disagree with the arbiter.
Detection detect_abnormal(const InputPoint& m, const std::vector<const ExecutorSpec*>& executors,
                          bool correlated_wrong = false);
Detection detect_abnormal(const InputPoint& m, const std::vector<ExecutorSpec>& executors,
                          bool correlated_wrong = false);

/// Gaussian-kernel density of each candidate over the candidate set.
std::vector<double> fitness(const std::vector<InputPoint>& candidates, double beta, double gamma,
                            const MetricConfig& cfg);

/// Mean per-coordinate variance of the points (0 for fewer than two points).
double data_variance(const std::vector<InputPoint>& points);

/// Greedy density-peak clustering with fitness proportionate sharing.
/// Densities are member counts, so they sum to the number of candidates.
ClusterSummary cluster_chunk(const Chunk& chunk, const ClusteringParams& params,
                             const MetricConfig& cfg, std::mt19937_64& rng);

/// Folds a chunk summary into a stream summary. Each stream cluster within
/// r0 of a chunk cluster is absorbed by its nearest such chunk cluster;
/// everything else carries over. Total density is conserved.
ClusterSummary merge_summary(const ClusterSummary& iss, const ClusterSummary& chs,
                             const ClusteringParams& params, const MetricConfig& cfg);

/// Forgetting step: scale densities, drop clusters below min_density, then
/// keep at most max_clusters of the densest.
ClusterSummary decay_and_prune(const ClusterSummary& iss, double decay, double min_density,
                               int max_clusters);

/// Per-executor abnormal-input buffer feeding chunked clustering into a
/// stream summary. Single writer.
class SummaryTracker {
public:
    SummaryTracker(int executor_id, int chunk_size);

    void observe(const InputPoint& m) { buffer_.push_back(m); }

    /// Clusters every full chunk in the buffer and merges it into the stream
    /// summary. Leftover points stay buffered. Returns the number of chunks.
    int flush(const ClusteringParams& params, const MetricConfig& cfg, std::mt19937_64& rng);

    void decay(double factor, double min_density, int max_clusters);

    const ClusterSummary& summary() const { return iss_; }
    std::size_t buffered() const { return buffer_.size(); }
    // Points already folded into the stream summary.
    std::size_t clustered() const { return clustered_; }

private:
    ClusterSummary iss_;
    std::vector<InputPoint> buffer_;
    int chunk_size_;
    int next_time_ = 1;
    std::size_t clustered_ = 0;
};

}  // namespace mimic

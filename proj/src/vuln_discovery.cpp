#include "mimic/vuln_discovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mimic {

void ClusteringParams::validate() const {
    if (N < 1) throw std::invalid_argument("clustering.N must be >= 1");
    if (!(r > 0.0)) throw std::invalid_argument("clustering.r must be > 0");
    if (!(r0 > 0.0)) throw std::invalid_argument("clustering.r0 must be > 0");
    if (beta && !(*beta > 0.0)) throw std::invalid_argument("clustering.beta must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("clustering.gamma must be > 0");
    if (max_clusters < 1) throw std::invalid_argument("clustering.max_clusters must be >= 1");
}

Output arbitrate(const std::vector<Output>& results) {
    if (results.empty()) throw std::invalid_argument("arbitrate: no results");
    // Distinct outputs in order of first appearance, with vote counts.
    std::vector<std::pair<Output, int>> tally;
    for (const auto& r : results) {
        auto it = std::find_if(tally.begin(), tally.end(),
                               [&](const auto& entry) { return entry.first == r; });
        if (it == tally.end())
            tally.emplace_back(r, 1);
        else
            ++it->second;
    }
    // max_element keeps the first of equal maxima, i.e. the earliest producer.
    auto best = std::max_element(tally.begin(), tally.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    return best->first;
}

Detection detect_abnormal(const InputPoint& m, const std::vector<const ExecutorSpec*>& executors,
                          bool correlated_wrong) {
    if (executors.empty()) throw std::invalid_argument("detect_abnormal: no executors");
    std::vector<Output> results;
    results.reserve(executors.size());
    for (const auto* exec : executors) results.push_back(evaluate(*exec, m, correlated_wrong));

    Detection d;
    d.verdict = arbitrate(results);
    d.abnormal.reserve(results.size());
    for (const auto& r : results) d.abnormal.push_back(!(r == d.verdict));
    return d;
}

Detection detect_abnormal(const InputPoint& m, const std::vector<ExecutorSpec>& executors,
                          bool correlated_wrong) {
    std::vector<const ExecutorSpec*> ptrs;
    ptrs.reserve(executors.size());
    for (const auto& e : executors) ptrs.push_back(&e);
    return detect_abnormal(m, ptrs, correlated_wrong);
}

std::vector<double> fitness(const std::vector<InputPoint>& candidates, double beta, double gamma,
                            const MetricConfig& cfg) {
    const std::size_t n = candidates.size();
    std::vector<double> f(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] += 1.0;  // self term, e^0
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = std::pow(std::exp(-distance(candidates[i], candidates[j], cfg) / beta),
                                      gamma);
            f[i] += k;
            f[j] += k;
        }
    }
    return f;
}

double data_variance(const std::vector<InputPoint>& points) {
    if (points.size() < 2) return 0.0;
    const std::size_t dim = points.front().dim();
    double total = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        double mean = 0.0;
        for (const auto& p : points) mean += p[c];
        mean /= static_cast<double>(points.size());
        double ss = 0.0;
        for (const auto& p : points) ss += (p[c] - mean) * (p[c] - mean);
        total += ss / static_cast<double>(points.size());
    }
    return total / static_cast<double>(dim);
}

ClusterSummary cluster_chunk(const Chunk& chunk, const ClusteringParams& params,
                             const MetricConfig& cfg, std::mt19937_64& rng) {
    if (chunk.points.empty()) throw std::invalid_argument("cluster_chunk: empty chunk");
    params.validate();

    std::vector<InputPoint> candidates;
    if (chunk.points.size() <= static_cast<std::size_t>(params.N)) {
        candidates = chunk.points;
    } else {
        candidates.reserve(params.N);
        std::sample(chunk.points.begin(), chunk.points.end(), std::back_inserter(candidates),
                    params.N, rng);
    }

    double beta = params.beta.value_or(data_variance(candidates));
    if (!(beta > 0.0)) beta = 1.0;
    std::vector<double> fit = fitness(candidates, beta, params.gamma, cfg);

    const std::size_t n = candidates.size();
    std::vector<bool> assigned(n, false);
    std::size_t remaining = n;

    ClusterSummary out;
    out.up_to_time = chunk.time_index;
    while (remaining > 0) {
        std::size_t peak = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!assigned[i] && (peak == n || fit[i] > fit[peak])) peak = i;
        }

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (!assigned[i] && distance(candidates[i], candidates[peak], cfg) < params.r)
                members.push_back(i);
        }

        double shared = 0.0;
        for (auto i : members) shared += fit[i];
        for (auto i : members) {
            fit[i] /= shared;
            assigned[i] = true;
        }
        remaining -= members.size();
        out.clusters.push_back({candidates[peak], static_cast<double>(members.size())});
    }
    return out;
}

ClusterSummary merge_summary(const ClusterSummary& iss, const ClusterSummary& chs,
                             const ClusteringParams& params, const MetricConfig& cfg) {
    if (iss.empty()) return chs;
    if (iss.owner_executor != chs.owner_executor)
        throw std::invalid_argument("merge_summary: summaries belong to different executors");
    if (chs.up_to_time <= iss.up_to_time)
        throw std::invalid_argument("merge_summary: chunk summary must be newer than stream summary");

    ClusterSummary out;
    out.owner_executor = chs.owner_executor;
    out.up_to_time = chs.up_to_time;
    out.clusters = chs.clusters;

    std::vector<Cluster> carried;
    for (const auto& old : iss.clusters) {
        std::size_t nearest = chs.size();
        double best = params.r0;
        for (std::size_t i = 0; i < chs.size(); ++i) {
            const double d = distance(old.center, chs.clusters[i].center, cfg);
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        if (nearest < chs.size())
            out.clusters[nearest].density += old.density;
        else
            carried.push_back(old);
    }
    out.clusters.insert(out.clusters.end(), carried.begin(), carried.end());
    return out;
}

ClusterSummary decay_and_prune(const ClusterSummary& iss, double decay, double min_density,
                               int max_clusters) {
    if (!(decay > 0.0 && decay <= 1.0))
        throw std::invalid_argument("decay_and_prune: decay must be in (0, 1]");

    ClusterSummary out;
    out.owner_executor = iss.owner_executor;
    out.up_to_time = iss.up_to_time;
    for (const auto& c : iss.clusters) {
        const double z = c.density * decay;
        if (z >= min_density && z > 0.0) out.clusters.push_back({c.center, z});
    }

    if (max_clusters >= 0 && out.clusters.size() > static_cast<std::size_t>(max_clusters)) {
        std::vector<std::size_t> order(out.clusters.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return out.clusters[a].density > out.clusters[b].density;
        });
        order.resize(max_clusters);
        std::sort(order.begin(), order.end());
        std::vector<Cluster> kept;
        kept.reserve(order.size());
        for (auto i : order) kept.push_back(out.clusters[i]);
        out.clusters = std::move(kept);
    }
    return out;
}

SummaryTracker::SummaryTracker(int executor_id, int chunk_size) : chunk_size_(chunk_size) {
    if (chunk_size < 1) throw std::invalid_argument("SummaryTracker: chunk size must be >= 1");
    iss_.owner_executor = executor_id;
    iss_.up_to_time = 0;
}

int SummaryTracker::flush(const ClusteringParams& params, const MetricConfig& cfg,
                          std::mt19937_64& rng) {
    const auto size = static_cast<std::size_t>(chunk_size_);
    std::size_t consumed = 0;
    int chunks = 0;
    while (buffer_.size() - consumed >= size) {
        Chunk chunk;
        chunk.time_index = next_time_++;
        chunk.points.assign(buffer_.begin() + static_cast<std::ptrdiff_t>(consumed),
                            buffer_.begin() + static_cast<std::ptrdiff_t>(consumed + size));
        consumed += size;

        ClusterSummary chs = cluster_chunk(chunk, params, cfg, rng);
        chs.owner_executor = iss_.owner_executor;
        iss_ = merge_summary(iss_, chs, params, cfg);
        ++chunks;
    }
    clustered_ += consumed;
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(consumed));
    return chunks;
}

void SummaryTracker::decay(double factor, double min_density, int max_clusters) {
    iss_ = decay_and_prune(iss_, factor, min_density, max_clusters);
}

}  // namespace mimic

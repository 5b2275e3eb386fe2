#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mimic/core_model.hpp"
#include "mimic/summary.hpp"

namespace mimic {

/// A finite set of inputs, optionally carrying a positive weight per point.
struct PointSet {
    std::vector<InputPoint> points;
    std::vector<double> weights;  // empty, or parallel to points

    PointSet() = default;
    explicit PointSet(std::vector<InputPoint> pts) : points(std::move(pts)) {}
    PointSet(std::vector<InputPoint> pts, std::vector<double> w);

    static PointSet from_summary(const ClusterSummary& summary);

    bool weighted() const { return !weights.empty(); }
    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
    double weight(std::size_t i) const { return weighted() ? weights[i] : 1.0; }
    // Sum of weights, or the point count for unweighted sets.
    double mass() const;
};

using Membership = std::function<bool(const InputPoint&)>;

/// Predicate "closer than epsilon0 to some point of the set".
Membership within_tolerance(const PointSet& set, const MetricConfig& cfg);

/// For every element of every input set: is it a common element of all the
/// sets within epsilon0? Result is indexed like the inputs.
std::vector<std::vector<bool>> tolerant_common_flags(const std::vector<PointSet>& sets,
                                                     const MetricConfig& cfg);

/// n-way intersection within epsilon0 error tolerance. Exact duplicates
/// across the inputs appear once (first occurrence and its weight win).
/// The operation is commutative but not associative, so callers must pass
/// every set at once.
PointSet tolerant_intersection(const std::vector<PointSet>& sets, const MetricConfig& cfg);

/// Fraction of samples satisfying the predicate.
double estimate_probability(const Membership& in_set, const std::vector<InputPoint>& samples);

/// Density-weighted fraction of summary centers satisfying the predicate.
/// Returns 0 for an empty summary.
double weighted_probability(const ClusterSummary& summary, const Membership& in_set);
double weighted_probability(const PointSet& weighted_centers, const Membership& in_set);

inline constexpr int kMaxSimilaritySets = 9;

/// Probability that at least k of the executors fail together, estimated
/// from their known abnormal sets by inclusion-exclusion over the C(n,k)
/// tolerant k-way intersections. Each probability term is the mass of the
/// term's set divided by sample_mass (the size of the known input set).
/// Clamped to [0,1].
double k_order_similarity(const std::vector<PointSet>& known_sets, int k, const MetricConfig& cfg,
                          double sample_mass);

inline double k_order_heterogeneity(const std::vector<PointSet>& known_sets, int k,
                                    const MetricConfig& cfg, double sample_mass) {
    return 1.0 - k_order_similarity(known_sets, k, cfg, sample_mass);
}

}  // namespace mimic

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mimic/core_model.hpp"
#include "mimic/heterogeneity.hpp"
#include "mimic/summary.hpp"

namespace mimic {

/// Loss h(T) of an attack lasting T. Linear by default; a custom table is
/// interpolated piecewise-linearly and extrapolated with its last slope.
class HarmFunction {
public:
    HarmFunction() = default;  // h(T) = T
    /// Table of (T, h) knots; must start at (0, 0) and be nondecreasing.
    static HarmFunction table(std::vector<std::pair<double, double>> knots);

    double operator()(double duration) const;
    bool is_linear() const { return knots_.empty(); }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;
};

struct SchedulerParams {
    int L_ST = 2;             // history depth
    int K = 200;              // Monte-Carlo candidate count
    HarmFunction harm;
    double exploration = 0.05;
    double p_att = 1.0;       // per-tick attack probability (attacker model)

    void validate() const;
};

struct ScheduleRecord {
    int epoch = 0;
    std::vector<int> online_ids;  // sorted
    PointSet common_set;          // estimated O(t) when the record was made
};

/// Estimated common abnormal set of an online set: summary centers within
/// epsilon0 of at least breach_order of the summaries (0 means all of them,
/// which is the n-way tolerant intersection). Centers keep their densities.
/// With breach_order == n, any empty summary yields an empty set.
PointSet common_abnormal_set(const std::vector<ClusterSummary>& summaries, const MetricConfig& cfg,
                             int breach_order = 0);

/// p_t: density share of the reference centers lying within epsilon0 of O(t).
double success_probability(const PointSet& common, const PointSet& reference,
                           const MetricConfig& cfg);

/// Share of O(t)'s mass still common to every later set O(t+1..t+k).
/// chain.front() is O(t). Returns 0 when O(t) is empty.
double persistence_probability(const std::vector<PointSet>& chain, const MetricConfig& cfg);

/// Inputs to the attack and harm expectations. past[k-1] describes epoch
/// t-k: its success probability and the persistence p_{t-k -> t}.
struct ExposureProfile {
    struct Past {
        double p = 0.0;
        double persistence = 0.0;
    };
    double p_now = 0.0;
    std::vector<Past> past;
};

/// E_t = p_t + sum_{k=1..L_ST} p_{t-k->t} p_{t-k}.
double expected_attacks(const ExposureProfile& profile, int L_ST);

/// E(Harm)_t = h(p_t) + sum_{k=1..L_ST} h((k+1) p_{t-k->t} p_{t-k}).
double expected_harm(const ExposureProfile& profile, int L_ST, const HarmFunction& h);

/// Builds the profile from O(t-L..t) (oldest first, current last).
ExposureProfile exposure_profile(const std::vector<PointSet>& chain, const PointSet& reference,
                                 const MetricConfig& cfg);

/// Proximity structure over every center of every pool summary, built once
/// per scheduling decision. Answers O(S), p_t and persistence for candidate
/// online sets without re-running pairwise distance scans.
class ExposureModel {
public:
    ExposureModel(const std::vector<ClusterSummary>& pool, const MetricConfig& cfg);

    std::size_t pool_size() const { return pool_size_; }
    std::size_t center_count() const { return centers_.size(); }
    double reference_mass() const { return reference_mass_; }

    /// Global indices of the centers forming O(S); S holds pool positions.
    std::vector<std::size_t> common_centers(const std::vector<int>& positions,
                                            int breach_order) const;
    double success_probability(const std::vector<std::size_t>& common) const;
    double mass(const std::vector<std::size_t>& centers) const;
    /// Members of `from` lying within epsilon0 of some member of `to`.
    std::vector<std::size_t> near_subset(const std::vector<std::size_t>& from,
                                         const std::vector<std::size_t>& to) const;

    PointSet to_point_set(const std::vector<std::size_t>& centers) const;

private:
    struct Center {
        int position;
        InputPoint point;
        double density;
    };
    std::size_t pool_size_ = 0;
    std::size_t words_ = 0;
    std::vector<Center> centers_;
    std::vector<std::vector<std::size_t>> neighbors_;  // within epsilon0, includes self
    std::vector<std::uint64_t> near_mask_;             // centers x words
    std::vector<std::vector<std::size_t>> by_position_;
    double reference_mass_ = 0.0;
    mutable std::vector<std::uint32_t> stamp_;
    mutable std::uint32_t epoch_stamp_ = 0;
};

struct ScheduleDecision {
    std::vector<int> online_ids;  // sorted
    std::size_t candidates = 0;
    double best_score = 0.0;
    double chosen_score = 0.0;
    bool explored = false;
};

/// Monte-Carlo minimization of the expected harm over n-subsets of the pool.
/// `pool` is indexed by pool position; each summary's owner_executor is the
/// executor id. `history` holds earlier records, oldest first. The current
/// online set, when given, is always one of the candidates.
ScheduleDecision select_schedule(const std::vector<ClusterSummary>& pool, int n,
                                 const std::vector<ScheduleRecord>& history,
                                 const SchedulerParams& params, const MetricConfig& cfg,
                                 std::mt19937_64& rng, int breach_order = 0,
                                 const std::vector<int>& current_online = {});

/// Uniform n-subset of the pool ids, sorted.
std::vector<int> random_schedule(const std::vector<int>& pool_ids, int n, std::mt19937_64& rng);

}  // namespace mimic

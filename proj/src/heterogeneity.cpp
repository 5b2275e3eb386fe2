#include "mimic/heterogeneity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include "mimic/log.hpp"

namespace mimic {

double ClusterSummary::total_density() const {
    double s = 0.0;
    for (const auto& c : clusters) s += c.density;
    return s;
}

PointSet::PointSet(std::vector<InputPoint> pts, std::vector<double> w)
    : points(std::move(pts)), weights(std::move(w)) {
    if (!weights.empty() && weights.size() != points.size())
        throw std::invalid_argument("PointSet: weights must parallel points");
    for (double x : weights) {
        if (!(x > 0.0)) throw std::invalid_argument("PointSet: weights must be positive");
    }
}

PointSet PointSet::from_summary(const ClusterSummary& summary) {
    PointSet out;
    out.points.reserve(summary.size());
    out.weights.reserve(summary.size());
    for (const auto& c : summary.clusters) {
        out.points.push_back(c.center);
        out.weights.push_back(c.density);
    }
    return out;
}

double PointSet::mass() const {
    if (!weighted()) return static_cast<double>(points.size());
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

namespace {

bool near_any(const InputPoint& a, const PointSet& set, double eps2) {
    for (const auto& b : set.points) {
        if (b.dim() == a.dim() && squared_distance(a.coords(), b.coords()) < eps2) return true;
    }
    return false;
}

}  // namespace

Membership within_tolerance(const PointSet& set, const MetricConfig& cfg) {
    cfg.validate();
    const double eps2 = cfg.epsilon0 * cfg.epsilon0;
    return [set, eps2](const InputPoint& m) { return near_any(m, set, eps2); };
}

std::vector<std::vector<bool>> tolerant_common_flags(const std::vector<PointSet>& sets,
                                                     const MetricConfig& cfg) {
    if (sets.empty()) throw std::invalid_argument("tolerant_intersection: no sets given");
    cfg.validate();
    const double eps2 = cfg.epsilon0 * cfg.epsilon0;

    std::vector<std::vector<bool>> flags(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        flags[i].assign(sets[i].size(), false);
        for (std::size_t e = 0; e < sets[i].size(); ++e) {
            const auto& a = sets[i].points[e];
            bool common = true;
            for (std::size_t j = 0; j < sets.size() && common; ++j) {
                if (j == i) continue;
                common = near_any(a, sets[j], eps2);
            }
            flags[i][e] = common;
        }
    }
    return flags;
}

PointSet tolerant_intersection(const std::vector<PointSet>& sets, const MetricConfig& cfg) {
    const auto flags = tolerant_common_flags(sets, cfg);
    const bool weighted = std::all_of(sets.begin(), sets.end(),
                                      [](const PointSet& s) { return s.weighted() || s.empty(); }) &&
                          std::any_of(sets.begin(), sets.end(),
                                      [](const PointSet& s) { return s.weighted(); });
    PointSet out;
    std::set<InputPoint> seen;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t e = 0; e < sets[i].size(); ++e) {
            if (!flags[i][e]) continue;
            const auto& p = sets[i].points[e];
            if (!seen.insert(p).second) continue;
            out.points.push_back(p);
            if (weighted) out.weights.push_back(sets[i].weight(e));
        }
    }
    return out;
}

double estimate_probability(const Membership& in_set, const std::vector<InputPoint>& samples) {
    if (samples.empty()) throw std::invalid_argument("estimate_probability: empty sample set");
    std::size_t hits = 0;
    for (const auto& m : samples) {
        if (in_set(m)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double weighted_probability(const ClusterSummary& summary, const Membership& in_set) {
    return weighted_probability(PointSet::from_summary(summary), in_set);
}

double weighted_probability(const PointSet& centers, const Membership& in_set) {
    double total = 0.0;
    double inside = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double z = centers.weight(i);
        total += z;
        if (in_set(centers.points[i])) inside += z;
    }
    if (total <= 0.0) return 0.0;
    return inside / total;
}

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

// Every inclusion-exclusion term over the k-subset intersections is itself
// the tolerant intersection of the union U of the executors involved. The
// signed number of families of k-subsets whose union is exactly U depends
// only on |U| = u; Moebius inversion of "some non-empty family of k-subsets
// of a u-set" (signed sum 1 when u >= k) gives the coefficient below.
double union_coefficient(int u, int k) {
    double c = 0.0;
    for (int j = k; j <= u; ++j) c += ((u - j) % 2 == 0 ? 1.0 : -1.0) * binomial(u, j);
    return c;
}

}  // namespace

double k_order_similarity(const std::vector<PointSet>& known_sets, int k, const MetricConfig& cfg,
                          double sample_mass) {
    const int n = static_cast<int>(known_sets.size());
    if (k < 1 || k > n) throw std::invalid_argument("k_order_similarity: k must be in [1, n]");
    if (n > kMaxSimilaritySets)
        throw std::invalid_argument("k_order_similarity: at most 9 executor sets are supported");
    if (!(sample_mass > 0.0))
        throw std::invalid_argument("k_order_similarity: sample mass must be positive");
    cfg.validate();

    double total = 0.0;
    for (unsigned mask = 1; mask < (1U << n); ++mask) {
        const int u = std::popcount(mask);
        if (u < k) continue;
        const double coeff = union_coefficient(u, k);
        if (coeff == 0.0) continue;
        std::vector<PointSet> involved;
        for (int i = 0; i < n; ++i) {
            if (mask & (1U << i)) involved.push_back(known_sets[i]);
        }
        total += coeff * tolerant_intersection(involved, cfg).mass();
    }
    total /= sample_mass;

    if (total < 0.0 || total > 1.0) {
        std::ostringstream msg;
        msg << "k_order_similarity: inclusion-exclusion gave " << total << ", clamped to [0,1]";
        log_warning(msg.str());
        total = std::clamp(total, 0.0, 1.0);
    }
    return total;
}

}  // namespace mimic

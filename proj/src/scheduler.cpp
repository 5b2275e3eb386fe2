#include "mimic/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace mimic {

HarmFunction HarmFunction::table(std::vector<std::pair<double, double>> knots) {
    if (knots.empty() || knots.front().first != 0.0 || knots.front().second != 0.0)
        throw ConfigError("harm table must start at (0, 0)");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first))
            throw ConfigError("harm table durations must be strictly increasing");
        if (knots[i].second < knots[i - 1].second)
            throw ConfigError("harm table must be nondecreasing");
    }
    HarmFunction h;
    h.knots_ = std::move(knots);
    return h;
}

double HarmFunction::operator()(double duration) const {
    if (knots_.empty()) return duration;
    if (knots_.size() == 1) return 0.0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), duration,
                               [](double t, const auto& knot) { return t < knot.first; });
    if (it == knots_.begin()) return 0.0;
    // Past the last knot, continue with the last segment's slope.
    if (it == knots_.end()) it = std::prev(knots_.end());
    const auto& [t1, h1] = *it;
    const auto& [t0, h0] = *std::prev(it);
    return h0 + (h1 - h0) * (duration - t0) / (t1 - t0);
}

void SchedulerParams::validate() const {
    if (L_ST < 0) throw ConfigError("scheduler.L_ST must be >= 0");
    if (K < 1) throw ConfigError("scheduler.K must be >= 1");
    if (!(exploration >= 0.0 && exploration <= 1.0))
        throw ConfigError("scheduler.exploration must be in [0, 1]");
    if (!(p_att >= 0.0 && p_att <= 1.0)) throw ConfigError("scheduler.p_att must be in [0, 1]");
}

namespace {

int resolve_breach_order(int breach_order, int n) {
    const int k = breach_order == 0 ? n : breach_order;
    if (k < 1 || k > n) throw std::invalid_argument("breach order must be in [1, n]");
    return k;
}

}  // namespace

PointSet common_abnormal_set(const std::vector<ClusterSummary>& summaries, const MetricConfig& cfg,
                             int breach_order) {
    if (summaries.empty()) throw std::invalid_argument("common_abnormal_set: no summaries");
    const int n = static_cast<int>(summaries.size());
    const int k = resolve_breach_order(breach_order, n);

    std::vector<PointSet> sets;
    sets.reserve(summaries.size());
    for (const auto& s : summaries) sets.push_back(PointSet::from_summary(s));

    if (k == n) {
        if (std::any_of(sets.begin(), sets.end(), [](const PointSet& s) { return s.empty(); }))
            return {};
        return tolerant_intersection(sets, cfg);
    }

    cfg.validate();
    const double eps2 = cfg.epsilon0 * cfg.epsilon0;
    PointSet out;
    std::set<InputPoint> seen;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t e = 0; e < sets[i].size(); ++e) {
            const auto& a = sets[i].points[e];
            int near = 0;
            for (const auto& other : sets) {
                for (const auto& b : other.points) {
                    if (squared_distance(a.coords(), b.coords()) < eps2) {
                        ++near;
                        break;
                    }
                }
            }
            if (near >= k && seen.insert(a).second) {
                out.points.push_back(a);
                out.weights.push_back(sets[i].weight(e));
            }
        }
    }
    return out;
}

double success_probability(const PointSet& common, const PointSet& reference,
                           const MetricConfig& cfg) {
    if (common.empty()) return 0.0;
    return weighted_probability(reference, within_tolerance(common, cfg));
}

double persistence_probability(const std::vector<PointSet>& chain, const MetricConfig& cfg) {
    if (chain.empty()) throw std::invalid_argument("persistence_probability: empty chain");
    const PointSet& first = chain.front();
    const double total = first.mass();
    if (!(total > 0.0)) return 0.0;
    if (std::any_of(chain.begin() + 1, chain.end(), [](const PointSet& s) { return s.empty(); }))
        return 0.0;

    const auto flags = tolerant_common_flags(chain, cfg);
    double kept = 0.0;
    for (std::size_t e = 0; e < first.size(); ++e) {
        if (flags[0][e]) kept += first.weight(e);
    }
    return std::clamp(kept / total, 0.0, 1.0);
}

double expected_attacks(const ExposureProfile& profile, int L_ST) {
    double e = profile.p_now;
    const auto terms = std::min<std::size_t>(profile.past.size(), static_cast<std::size_t>(std::max(L_ST, 0)));
    for (std::size_t k = 0; k < terms; ++k) e += profile.past[k].persistence * profile.past[k].p;
    return e;
}

double expected_harm(const ExposureProfile& profile, int L_ST, const HarmFunction& h) {
    double e = h(profile.p_now);
    const auto terms = std::min<std::size_t>(profile.past.size(), static_cast<std::size_t>(std::max(L_ST, 0)));
    for (std::size_t k = 0; k < terms; ++k) {
        const double weight = static_cast<double>(k + 2);
        e += h(weight * profile.past[k].persistence * profile.past[k].p);
    }
    return e;
}

ExposureProfile exposure_profile(const std::vector<PointSet>& chain, const PointSet& reference,
                                 const MetricConfig& cfg) {
    if (chain.empty()) throw std::invalid_argument("exposure_profile: empty chain");
    ExposureProfile profile;
    profile.p_now = success_probability(chain.back(), reference, cfg);
    for (std::size_t k = 1; k < chain.size(); ++k) {
        const std::size_t start = chain.size() - 1 - k;
        std::vector<PointSet> tail(chain.begin() + static_cast<std::ptrdiff_t>(start), chain.end());
        profile.past.push_back({success_probability(chain[start], reference, cfg),
                                persistence_probability(tail, cfg)});
    }
    return profile;
}

ExposureModel::ExposureModel(const std::vector<ClusterSummary>& pool, const MetricConfig& cfg)
    : pool_size_(pool.size()), words_((pool.size() + 63) / 64), by_position_(pool.size()) {
    cfg.validate();
    for (std::size_t pos = 0; pos < pool.size(); ++pos) {
        for (const auto& c : pool[pos].clusters) {
            by_position_[pos].push_back(centers_.size());
            centers_.push_back({static_cast<int>(pos), c.center, c.density});
            reference_mass_ += c.density;
        }
    }

    const std::size_t m = centers_.size();
    neighbors_.assign(m, {});
    near_mask_.assign(m * words_, 0);
    stamp_.assign(m, 0);

    const double eps = cfg.epsilon0;
    const double eps2 = eps * eps;
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return centers_[a].point[0] < centers_[b].point[0];
    });
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t a = order[i];
        neighbors_[a].push_back(a);
        for (std::size_t j = i + 1; j < m; ++j) {
            const std::size_t b = order[j];
            if (centers_[b].point[0] - centers_[a].point[0] >= eps) break;
            if (squared_distance(centers_[a].point.coords(), centers_[b].point.coords()) < eps2) {
                neighbors_[a].push_back(b);
                neighbors_[b].push_back(a);
            }
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        std::sort(neighbors_[c].begin(), neighbors_[c].end());
        for (std::size_t nb : neighbors_[c]) {
            const auto pos = static_cast<std::size_t>(centers_[nb].position);
            near_mask_[c * words_ + pos / 64] |= std::uint64_t{1} << (pos % 64);
        }
    }
}

std::vector<std::size_t> ExposureModel::common_centers(const std::vector<int>& positions,
                                                       int breach_order) const {
    const int n = static_cast<int>(positions.size());
    const int k = resolve_breach_order(breach_order, n);
    std::vector<std::uint64_t> mask(words_, 0);
    for (int pos : positions) {
        if (pos < 0 || static_cast<std::size_t>(pos) >= pool_size_)
            throw std::invalid_argument("ExposureModel: position outside the pool");
        mask[static_cast<std::size_t>(pos) / 64] |= std::uint64_t{1} << (pos % 64);
    }
    if (k == n) {
        for (int pos : positions) {
            if (by_position_[pos].empty()) return {};
        }
    }

    std::vector<int> sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> out;
    for (int pos : sorted) {
        for (std::size_t c : by_position_[pos]) {
            int count = 0;
            for (std::size_t w = 0; w < words_; ++w)
                count += std::popcount(near_mask_[c * words_ + w] & mask[w]);
            if (count >= k) out.push_back(c);
        }
    }
    return out;
}

double ExposureModel::success_probability(const std::vector<std::size_t>& common) const {
    if (common.empty() || !(reference_mass_ > 0.0)) return 0.0;
    if (++epoch_stamp_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_stamp_ = 1;
    }
    double inside = 0.0;
    for (std::size_t c : common) {
        for (std::size_t nb : neighbors_[c]) {
            if (stamp_[nb] == epoch_stamp_) continue;
            stamp_[nb] = epoch_stamp_;
            inside += centers_[nb].density;
        }
    }
    return inside / reference_mass_;
}

double ExposureModel::mass(const std::vector<std::size_t>& centers) const {
    double s = 0.0;
    for (std::size_t c : centers) s += centers_[c].density;
    return s;
}

std::vector<std::size_t> ExposureModel::near_subset(const std::vector<std::size_t>& from,
                                                    const std::vector<std::size_t>& to) const {
    if (from.empty() || to.empty()) return {};
    if (++epoch_stamp_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_stamp_ = 1;
    }
    for (std::size_t c : to) stamp_[c] = epoch_stamp_;
    std::vector<std::size_t> out;
    for (std::size_t c : from) {
        const auto& nbs = neighbors_[c];
        if (std::any_of(nbs.begin(), nbs.end(),
                        [&](std::size_t nb) { return stamp_[nb] == epoch_stamp_; }))
            out.push_back(c);
    }
    return out;
}

PointSet ExposureModel::to_point_set(const std::vector<std::size_t>& centers) const {
    PointSet out;
    for (std::size_t c : centers) {
        out.points.push_back(centers_[c].point);
        out.weights.push_back(centers_[c].density);
    }
    return out;
}

std::vector<int> random_schedule(const std::vector<int>& pool_ids, int n, std::mt19937_64& rng) {
    if (n < 1 || static_cast<std::size_t>(n) > pool_ids.size())
        throw std::invalid_argument("random_schedule: online set larger than the pool");
    std::vector<int> ids = pool_ids;
    std::sort(ids.begin(), ids.end());
    std::vector<int> out;
    out.reserve(n);
    std::sample(ids.begin(), ids.end(), std::back_inserter(out), n, rng);
    return out;
}

namespace {

double choose(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

std::vector<std::vector<int>> all_subsets(int pool, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        out.push_back(idx);
        int i = n - 1;
        while (i >= 0 && idx[i] == pool - n + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

}  // namespace

ScheduleDecision select_schedule(const std::vector<ClusterSummary>& pool, int n,
                                 const std::vector<ScheduleRecord>& history,
                                 const SchedulerParams& params, const MetricConfig& cfg,
                                 std::mt19937_64& rng, int breach_order,
                                 const std::vector<int>& current_online) {
    params.validate();
    if (n < 1 || static_cast<std::size_t>(n) > pool.size())
        throw std::invalid_argument("select_schedule: pool smaller than the online set");
    const int k = resolve_breach_order(breach_order, n);

    std::map<int, int> position_of;
    for (std::size_t pos = 0; pos < pool.size(); ++pos) {
        if (!position_of.emplace(pool[pos].owner_executor, static_cast<int>(pos)).second)
            throw std::invalid_argument("select_schedule: duplicate executor id in pool");
    }
    auto to_positions = [&](const std::vector<int>& ids) {
        std::vector<int> out;
        for (int id : ids) {
            auto it = position_of.find(id);
            if (it == position_of.end())
                throw std::invalid_argument("select_schedule: executor id not in pool");
            out.push_back(it->second);
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    const ExposureModel model(pool, cfg);

    // Past epochs re-estimated from the current summaries. hist[k-1] is t-k.
    const std::size_t depth = std::min<std::size_t>(history.size(), static_cast<std::size_t>(params.L_ST));
    struct Past {
        double p;
        double mass;
        std::vector<std::size_t> survivors;  // members of O(t-k) common to O(t-k+1..t-1)
    };
    std::vector<std::vector<std::size_t>> past_common;
    std::vector<Past> past;
    for (std::size_t kk = 1; kk <= depth; ++kk) {
        const auto& rec = history[history.size() - kk];
        const int order = breach_order == 0 ? 0 : std::min<int>(k, static_cast<int>(rec.online_ids.size()));
        past_common.push_back(model.common_centers(to_positions(rec.online_ids), order));
    }
    for (std::size_t kk = 1; kk <= depth; ++kk) {
        const auto& o = past_common[kk - 1];
        std::vector<std::size_t> survivors = o;
        for (std::size_t j = kk - 1; j >= 1; --j) survivors = model.near_subset(survivors, past_common[j - 1]);
        past.push_back({model.success_probability(o), model.mass(o), std::move(survivors)});
    }

    // Candidate list: current online set first, then distinct uniform draws.
    std::vector<std::vector<int>> candidates;
    const double total = choose(pool.size(), static_cast<std::size_t>(n));
    if (static_cast<double>(params.K) >= total) {
        candidates = all_subsets(static_cast<int>(pool.size()), n);
    } else {
        std::set<std::vector<int>> seen;
        if (current_online.size() == static_cast<std::size_t>(n)) {
            auto cur = to_positions(current_online);
            seen.insert(cur);
            candidates.push_back(std::move(cur));
        }
        std::vector<int> positions(pool.size());
        std::iota(positions.begin(), positions.end(), 0);
        while (candidates.size() < static_cast<std::size_t>(params.K)) {
            std::vector<int> pick;
            pick.reserve(n);
            std::sample(positions.begin(), positions.end(), std::back_inserter(pick), n, rng);
            if (seen.insert(pick).second) candidates.push_back(std::move(pick));
        }
    }

    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const auto& cand : candidates) {
        const auto common = model.common_centers(cand, k);
        ExposureProfile profile;
        profile.p_now = model.success_probability(common);
        for (const auto& p : past) {
            const double persistence =
                p.mass > 0.0 ? model.mass(model.near_subset(p.survivors, common)) / p.mass : 0.0;
            profile.past.push_back({p.p, persistence});
        }
        scores.push_back(expected_harm(profile, params.L_ST, params.harm));
    }

    ScheduleDecision decision;
    decision.candidates = candidates.size();
    decision.best_score = *std::min_element(scores.begin(), scores.end());

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t chosen = 0;
    if (unit(rng) < params.exploration) {
        decision.explored = true;
        chosen = std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
    } else {
        constexpr double tie = 1e-12;
        std::vector<std::size_t> tied;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] <= decision.best_score + tie) tied.push_back(i);
        }
        chosen = tied[std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng)];
    }
    decision.chosen_score = scores[chosen];
    for (int pos : candidates[chosen]) decision.online_ids.push_back(pool[pos].owner_executor);
    std::sort(decision.online_ids.begin(), decision.online_ids.end());
    return decision;
}

}  // namespace mimic

#include "mimic/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace mimic {

InputPoint::InputPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_) {
        if (!std::isfinite(c)) throw std::invalid_argument("InputPoint: non-finite coordinate");
    }
}

InputPoint::InputPoint(std::initializer_list<double> coords)
    : InputPoint(std::vector<double>(coords)) {}

void MetricConfig::validate() const {
    if (!(epsilon0 > 0.0) || !std::isfinite(epsilon0))
        throw std::invalid_argument("metric.epsilon0 must be a positive finite number");
}

bool InputBox::contains(const InputPoint& p) const {
    if (p.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (p[i] < lower[i] || p[i] > upper[i]) return false;
    }
    return true;
}

double InputBox::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= upper[i] - lower[i];
    return v;
}

void InputBox::validate() const {
    if (lower.empty() || lower.size() != upper.size())
        throw std::invalid_argument("input box bounds must be non-empty and of equal dimension");
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("input box lower bound must be below upper bound");
    }
}

std::string to_string(const Output& out) {
    if (out.is_correct()) return "CORRECT";
    return "WRONG(" + std::to_string(out.tag) + ")";
}

double distance(const InputPoint& a, const InputPoint& b, const MetricConfig& cfg) {
    if (a.dim() != b.dim()) throw std::invalid_argument("distance: dimension mismatch");
    switch (cfg.kind) {
        case MetricKind::euclidean:
            return std::sqrt(squared_distance(a.coords(), b.coords()));
    }
    throw std::invalid_argument("distance: unknown metric kind");
}

bool is_abnormal_truth(const ExecutorSpec& exec, const InputPoint& m) {
    for (const auto& disc : exec.discs) {
        if (disc.center.dim() != m.dim()) continue;
        if (squared_distance(disc.center.coords(), m.coords()) < disc.radius * disc.radius)
            return true;
    }
    return false;
}

namespace {

std::int64_t point_token(const InputPoint& m) {
    // FNV-1a over the coordinate bit patterns.
    std::uint64_t h = 1469598103934665603ULL;
    for (double c : m.coords()) {
        auto bits = std::bit_cast<std::uint64_t>(c);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffU;
            h *= 1099511628211ULL;
        }
    }
    return static_cast<std::int64_t>(h >> 1);
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
};

}  // namespace

Output evaluate(const ExecutorSpec& exec, const InputPoint& m, bool correlated_wrong) {
    if (!is_abnormal_truth(exec, m)) return Output::correct();
    return Output::wrong(correlated_wrong ? point_token(m) : exec.id);
}

std::vector<std::vector<InputPoint>> partition_vulnerabilities(const KnownAbnormalSet& points,
                                                               const MetricConfig& cfg) {
    cfg.validate();
    const auto& pts = points.points;
    const std::size_t n = pts.size();
    if (n == 0) return {};

    // Sweep along the first coordinate: only pairs whose first coordinates
    // differ by less than epsilon0 can be related.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pts[a][0] < pts[b][0]; });

    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = pts[order[i]];
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& b = pts[order[j]];
            if (b[0] - a[0] >= cfg.epsilon0) break;
            if (distance(a, b, cfg) < cfg.epsilon0) sets.unite(order[i], order[j]);
        }
    }

    // Components are emitted in order of their first member in the input.
    std::map<std::size_t, std::size_t> slot;
    std::vector<std::vector<InputPoint>> components;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        auto [it, inserted] = slot.emplace(root, components.size());
        if (inserted) components.emplace_back();
        components[it->second].push_back(pts[i]);
    }
    return components;
}

}  // namespace mimic

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimic {

/// Invalid run or experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point of the executors' input space. Coordinates are dimensionless.
class InputPoint {
public:
    InputPoint() = default;
    explicit InputPoint(std::vector<double> coords);
    InputPoint(std::initializer_list<double> coords);

    std::size_t dim() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::span<const double> coords() const { return coords_; }

    friend bool operator==(const InputPoint&, const InputPoint&) = default;
    friend auto operator<=>(const InputPoint&, const InputPoint&) = default;

private:
    std::vector<double> coords_;
};

enum class MetricKind { euclidean };

struct MetricConfig {
    MetricKind kind = MetricKind::euclidean;
    // Relatedness threshold; two inputs are related when closer than this.
    double epsilon0 = 4.0;

    void validate() const;
};

/// Axis-aligned box bounding the input space.
struct InputBox {
    std::vector<double> lower{-50.0, -50.0};
    std::vector<double> upper{50.0, 50.0};

    std::size_t dim() const { return lower.size(); }
    bool contains(const InputPoint& p) const;
    double volume() const;
    void validate() const;
};

struct VulnerabilityDisc {
    InputPoint center;
    double radius = 0.0;
};

struct ExecutorSpec {
    int id = 0;
    std::vector<VulnerabilityDisc> discs;
};

/// Abnormal inputs observed for one executor during a run.
struct KnownAbnormalSet {
    int executor_id = 0;
    std::vector<InputPoint> points;
};

/// Symbolic executor output. Wrong outputs carry a tag so that failures of
/// different executors do not agree unless the tag is shared on purpose.
struct Output {
    enum class Kind : std::uint8_t { correct, wrong };
    Kind kind = Kind::correct;
    std::int64_t tag = 0;

    static Output correct() { return {}; }
    static Output wrong(std::int64_t tag) { return {Kind::wrong, tag}; }
    bool is_correct() const { return kind == Kind::correct; }

    friend bool operator==(const Output&, const Output&) = default;
};

std::string to_string(const Output& out);

double distance(const InputPoint& a, const InputPoint& b, const MetricConfig& cfg);

/// Squared euclidean distance without the dimension check; hot-path helper.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Ground truth: strictly inside one of the executor's discs.
bool is_abnormal_truth(const ExecutorSpec& exec, const InputPoint& m);

/// Executor output for input m. With correlated_wrong set, every failing
/// executor returns the same wrong token for a given input.
Output evaluate(const ExecutorSpec& exec, const InputPoint& m, bool correlated_wrong = false);

/// Connected components of the graph joining points closer than epsilon0.
std::vector<std::vector<InputPoint>> partition_vulnerabilities(const KnownAbnormalSet& points,
                                                               const MetricConfig& cfg);

}  // namespace mimic

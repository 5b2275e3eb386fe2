#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mimic/core_model.hpp"
#include "mimic/scheduler.hpp"
#include "mimic/summary.hpp"
#include "mimic/vuln_discovery.hpp"

namespace mimic {

enum class Strategy { dhr_random, idmd, sidmd };

// Which executors see benign traffic for vulnerability discovery: every pool
// member (each input is replicated to all executors) or only the online set.
enum class DetectionScope { pool, online };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);
std::string_view to_string(DetectionScope s);
DetectionScope parse_detection_scope(std::string_view name);

struct SimConfig {
    int pool_size = 50;
    int vulns_per_executor = 10;
    double vuln_radius = 6.0;
    std::int64_t total_inputs = 100000;
    int online_set_size = 5;
    std::int64_t scheduling_period = 5000;
    Strategy strategy = Strategy::sidmd;
    ClusteringParams clustering;
    SchedulerParams scheduler;
    MetricConfig metric;
    InputBox box;
    int warmup_epochs = 4;
    std::uint64_t seed = 1;

    // Discovery
    int chunk_size = 100;
    double decay = 1.0;
    double min_density = 0.0;
    DetectionScope detection_scope = DetectionScope::pool;
    bool correlated_wrong_outputs = false;

    // Attacker
    double replay_bias = 0.5;
    // Online executors that must fail together for an attack to get through;
    // 0 means a simple majority of the online set.
    int breach_order = 0;

    void validate() const;
    int effective_breach_order() const;
    std::int64_t epoch_count() const;
};

struct AttackStart {
    int attack_id = 0;
    std::int64_t tick = 0;
    int epoch = 0;
    InputPoint input;
    bool replay = false;
    bool counted = true;  // launched after warmup
};

struct AttackEnd {
    int attack_id = 0;
    std::int64_t tick = 0;  // first tick the attack no longer got through
    int epoch = 0;
    std::int64_t duration = 0;
    int schedule_changes_survived = 0;
    bool counted = true;
    bool truncated = false;  // still running when the run ended
};

struct EpochEvent {
    int epoch = 0;
    std::int64_t start_tick = 0;
    std::int64_t end_tick = 0;
    std::vector<int> online_ids;
    bool warmup = false;
    std::int64_t launched = 0;   // attack attempts counted toward metrics
    std::int64_t succeeded = 0;  // counted attempts that got through
    std::int64_t abnormal_detected = 0;
};

struct ScheduleEvent {
    int epoch = 0;
    std::int64_t tick = 0;
    bool scheduled = false;  // false: random schedule
    std::size_t candidates = 0;
    double best_score = 0.0;
    double chosen_score = 0.0;
    bool explored = false;
    double estimated_p = 0.0;
    std::vector<int> online_ids;
};

using Event = std::variant<AttackStart, AttackEnd, EpochEvent, ScheduleEvent>;
using EventLog = std::vector<Event>;

std::string_view event_type(const Event& e);

struct RunMetrics {
    std::int64_t N = 0;         // successful attacks
    std::int64_t launched = 0;  // attack attempts
    double P = 0.0;
    std::int64_t T = 0;         // total attacked ticks
    std::int64_t n_surv = 0;    // attacks that survived a schedule change
    double P2 = 0.0;
    double ET = 0.0;
};

RunMetrics compute_metrics(const EventLog& log);

std::vector<ExecutorSpec> generate_pool(const SimConfig& cfg, std::mt19937_64& rng);

/// Uniform point in the box.
InputPoint uniform_input(const InputBox& box, std::mt19937_64& rng);

/// Number of executors in `online` that are truly abnormal on m.
int failing_count(const std::vector<const ExecutorSpec*>& online, const InputPoint& m);

/// Attacker of the simulation: launches with probability p_att per tick,
/// replays remembered successful inputs with probability replay_bias, and
/// tracks running attacks until a schedule change stops them.
class Attacker {
public:
    struct Active {
        int attack_id;
        std::size_t memory_slot;
        std::int64_t start_tick;
        int start_epoch;
        int survived = 0;
        bool counted;
    };

    Attacker(double p_att, double replay_bias) : p_att_(p_att), replay_bias_(replay_bias) {}

    /// One tick. Returns the launched attack's start event if it got through.
    /// `launched` is set when an attempt was made.
    std::optional<AttackStart> tick(std::int64_t now, int epoch, bool counted,
                                    const std::vector<const ExecutorSpec*>& online,
                                    int breach_order, const InputBox& box, std::mt19937_64& rng,
                                    bool& launched);

    /// Schedule change: attacks still getting through survive, the rest end.
    std::vector<AttackEnd> reschedule(std::int64_t now, int epoch,
                                      const std::vector<const ExecutorSpec*>& online,
                                      int breach_order);

    /// Ends every running attack at the end of the run.
    std::vector<AttackEnd> finish(std::int64_t now, int epoch);

    const std::vector<Active>& active() const { return active_; }
    const std::vector<InputPoint>& memory() const { return memory_; }

private:
    AttackEnd end(const Active& a, std::int64_t now, int epoch, bool truncated);

    double p_att_;
    double replay_bias_;
    int next_id_ = 0;
    std::vector<InputPoint> memory_;
    std::vector<std::size_t> dormant_;  // memory slots not currently active
    std::vector<Active> active_;
};

struct RunResult {
    SimConfig config;
    RunMetrics metrics;
    EventLog events;
    std::vector<ExecutorSpec> pool;
    std::vector<ClusterSummary> summaries;  // final stream summary per executor
    // disc_hits[e][d]: detected abnormal inputs of executor e inside disc d.
    std::vector<std::vector<std::int64_t>> disc_hits;
};

RunResult run_experiment(const SimConfig& cfg);

/// Share of planted discs with at least min_hits detections whose nearest
/// discovered center lies within max_distance of the true center. Returns
/// {qualifying discs, recovered discs}.
std::pair<std::size_t, std::size_t> recovery_stats(const RunResult& result, std::int64_t min_hits,
                                                   double max_distance);

}  // namespace mimic

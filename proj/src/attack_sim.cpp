#include "mimic/attack_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mimic/rng.hpp"

namespace mimic {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::dhr_random: return "dhr_random";
        case Strategy::idmd: return "idmd";
        case Strategy::sidmd: return "sidmd";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "dhr_random") return Strategy::dhr_random;
    if (name == "idmd") return Strategy::idmd;
    if (name == "sidmd") return Strategy::sidmd;
    throw ConfigError("unknown strategy '" + std::string(name) +
                      "' (expected dhr_random, idmd or sidmd)");
}

std::string_view to_string(DetectionScope s) {
    return s == DetectionScope::pool ? "pool" : "online";
}

DetectionScope parse_detection_scope(std::string_view name) {
    if (name == "pool") return DetectionScope::pool;
    if (name == "online") return DetectionScope::online;
    throw ConfigError("unknown detection scope '" + std::string(name) + "' (expected pool or online)");
}

void SimConfig::validate() const {
    if (pool_size < 0) throw ConfigError("pool_size must be >= 0");
    if (online_set_size < 1) throw ConfigError("online_set_size must be >= 1");
    if (pool_size < online_set_size) throw ConfigError("pool_size must be >= online_set_size");
    if (vulns_per_executor < 0) throw ConfigError("vulns_per_executor must be >= 0");
    if (!(vuln_radius > 0.0)) throw ConfigError("vuln_radius must be > 0");
    if (scheduling_period < 1) throw ConfigError("scheduling_period must be >= 1");
    if (total_inputs < scheduling_period) throw ConfigError("total_inputs must be >= scheduling_period");
    if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
    if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
    if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("decay must be in (0, 1]");
    if (min_density < 0.0) throw ConfigError("min_density must be >= 0");
    if (!(replay_bias >= 0.0 && replay_bias <= 1.0)) throw ConfigError("replay_bias must be in [0, 1]");
    if (breach_order < 0 || breach_order > online_set_size)
        throw ConfigError("breach_order must be in [0, online_set_size]");
    try {
        clustering.validate();
        metric.validate();
        box.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    scheduler.validate();
}

int SimConfig::effective_breach_order() const {
    return breach_order == 0 ? online_set_size / 2 + 1 : breach_order;
}

std::int64_t SimConfig::epoch_count() const {
    return (total_inputs + scheduling_period - 1) / scheduling_period;
}

std::string_view event_type(const Event& e) {
    struct {
        std::string_view operator()(const AttackStart&) const { return "attack_start"; }
        std::string_view operator()(const AttackEnd&) const { return "attack_end"; }
        std::string_view operator()(const EpochEvent&) const { return "epoch"; }
        std::string_view operator()(const ScheduleEvent&) const { return "schedule"; }
    } visitor;
    return std::visit(visitor, e);
}

RunMetrics compute_metrics(const EventLog& log) {
    RunMetrics m;
    for (const auto& e : log) {
        if (const auto* start = std::get_if<AttackStart>(&e)) {
            if (start->counted) ++m.N;
        } else if (const auto* end = std::get_if<AttackEnd>(&e)) {
            if (!end->counted) continue;
            m.T += end->duration;
            if (end->schedule_changes_survived > 0) ++m.n_surv;
        } else if (const auto* epoch = std::get_if<EpochEvent>(&e)) {
            m.launched += epoch->launched;
        }
    }
    if (m.launched > 0) m.P = static_cast<double>(m.N) / static_cast<double>(m.launched);
    if (m.N > 0) {
        m.P2 = static_cast<double>(m.n_surv) / static_cast<double>(m.N);
        m.ET = static_cast<double>(m.T) / static_cast<double>(m.N);
    }
    return m;
}

InputPoint uniform_input(const InputBox& box, std::mt19937_64& rng) {
    std::vector<double> coords(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i)
        coords[i] = std::uniform_real_distribution<double>(box.lower[i], box.upper[i])(rng);
    return InputPoint(std::move(coords));
}

std::vector<ExecutorSpec> generate_pool(const SimConfig& cfg, std::mt19937_64& rng) {
    std::vector<ExecutorSpec> pool(static_cast<std::size_t>(cfg.pool_size));
    for (int id = 0; id < cfg.pool_size; ++id) {
        auto& exec = pool[static_cast<std::size_t>(id)];
        exec.id = id;
        for (int d = 0; d < cfg.vulns_per_executor; ++d)
            exec.discs.push_back({uniform_input(cfg.box, rng), cfg.vuln_radius});
    }
    return pool;
}

int failing_count(const std::vector<const ExecutorSpec*>& online, const InputPoint& m) {
    int count = 0;
    for (const auto* exec : online) {
        if (is_abnormal_truth(*exec, m)) ++count;
    }
    return count;
}

std::optional<AttackStart> Attacker::tick(std::int64_t now, int epoch, bool counted,
                                          const std::vector<const ExecutorSpec*>& online,
                                          int breach_order, const InputBox& box,
                                          std::mt19937_64& rng, bool& launched) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    launched = unit(rng) < p_att_;
    if (!launched) return std::nullopt;

    const bool replay = unit(rng) < replay_bias_ && !dormant_.empty();
    std::size_t dormant_index = 0;
    InputPoint input;
    if (replay) {
        dormant_index = std::uniform_int_distribution<std::size_t>(0, dormant_.size() - 1)(rng);
        input = memory_[dormant_[dormant_index]];
    } else {
        input = uniform_input(box, rng);
    }

    if (failing_count(online, input) < breach_order) return std::nullopt;

    std::size_t slot;
    if (replay) {
        slot = dormant_[dormant_index];
        dormant_[dormant_index] = dormant_.back();
        dormant_.pop_back();
    } else {
        slot = memory_.size();
        memory_.push_back(input);
    }
    const int id = next_id_++;
    active_.push_back({id, slot, now, epoch, 0, counted});
    return AttackStart{id, now, epoch, std::move(input), replay, counted};
}

AttackEnd Attacker::end(const Active& a, std::int64_t now, int epoch, bool truncated) {
    dormant_.push_back(a.memory_slot);
    return AttackEnd{a.attack_id, now, epoch, now - a.start_tick, a.survived, a.counted, truncated};
}

std::vector<AttackEnd> Attacker::reschedule(std::int64_t now, int epoch,
                                            const std::vector<const ExecutorSpec*>& online,
                                            int breach_order) {
    std::vector<AttackEnd> ended;
    std::vector<Active> still;
    for (auto& a : active_) {
        if (failing_count(online, memory_[a.memory_slot]) >= breach_order) {
            ++a.survived;
            still.push_back(a);
        } else {
            ended.push_back(end(a, now, epoch, false));
        }
    }
    active_ = std::move(still);
    return ended;
}

std::vector<AttackEnd> Attacker::finish(std::int64_t now, int epoch) {
    std::vector<AttackEnd> ended;
    for (const auto& a : active_) ended.push_back(end(a, now, epoch, true));
    active_.clear();
    return ended;
}

namespace {

std::vector<const ExecutorSpec*> resolve(const std::vector<ExecutorSpec>& pool,
                                         const std::vector<int>& ids) {
    std::vector<const ExecutorSpec*> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(&pool[static_cast<std::size_t>(id)]);
    return out;
}

}  // namespace

RunResult run_experiment(const SimConfig& cfg) {
    cfg.validate();

    RunResult result;
    result.config = cfg;

    auto pool_rng = make_stream(cfg.seed, Stream::pool);
    auto benign_rng = make_stream(cfg.seed, Stream::benign);
    auto attack_rng = make_stream(cfg.seed, Stream::attacker);
    auto cluster_rng = make_stream(cfg.seed, Stream::clustering);
    auto sched_rng = make_stream(cfg.seed, Stream::scheduler);

    result.pool = generate_pool(cfg, pool_rng);
    const auto& pool = result.pool;
    const int n = cfg.online_set_size;
    const int breach = cfg.effective_breach_order();

    std::vector<int> pool_ids;
    std::vector<const ExecutorSpec*> all;
    std::vector<SummaryTracker> trackers;
    for (const auto& e : pool) {
        pool_ids.push_back(e.id);
        all.push_back(&e);
        trackers.emplace_back(e.id, cfg.chunk_size);
    }
    result.disc_hits.resize(pool.size());
    for (std::size_t e = 0; e < pool.size(); ++e) result.disc_hits[e].assign(pool[e].discs.size(), 0);

    SchedulerParams sched = cfg.scheduler;
    if (cfg.strategy == Strategy::idmd) sched.L_ST = 0;

    std::vector<ScheduleRecord> history;
    Attacker attacker(cfg.scheduler.p_att, cfg.replay_bias);
    const std::int64_t warmup_ticks = static_cast<std::int64_t>(cfg.warmup_epochs) * cfg.scheduling_period;
    const std::int64_t epochs = cfg.epoch_count();

    auto current_summaries = [&] {
        std::vector<ClusterSummary> out;
        out.reserve(trackers.size());
        for (const auto& t : trackers) out.push_back(t.summary());
        return out;
    };

    std::vector<int> online;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const std::int64_t start = static_cast<std::int64_t>(epoch) * cfg.scheduling_period;
        const std::int64_t stop = std::min(start + cfg.scheduling_period, cfg.total_inputs);

        // Pick the online set for this epoch.
        ScheduleEvent sched_event;
        sched_event.epoch = epoch;
        sched_event.tick = start;
        auto summaries = current_summaries();
        const bool informed = std::all_of(summaries.begin(), summaries.end(),
                                          [](const ClusterSummary& s) { return !s.empty(); });
        if (cfg.strategy != Strategy::dhr_random && epoch >= cfg.warmup_epochs && informed) {
            auto decision = select_schedule(summaries, n, history, sched, cfg.metric, sched_rng,
                                            breach, online);
            online = decision.online_ids;
            sched_event.scheduled = true;
            sched_event.candidates = decision.candidates;
            sched_event.best_score = decision.best_score;
            sched_event.chosen_score = decision.chosen_score;
            sched_event.explored = decision.explored;
        } else {
            online = random_schedule(pool_ids, n, sched_rng);
        }
        sched_event.online_ids = online;

        ScheduleRecord record;
        record.epoch = epoch;
        record.online_ids = online;
        if (informed) {
            std::vector<ClusterSummary> chosen;
            for (int id : online) chosen.push_back(summaries[static_cast<std::size_t>(id)]);
            record.common_set = common_abnormal_set(chosen, cfg.metric, breach);
            PointSet reference;
            for (const auto& s : summaries) {
                for (const auto& c : s.clusters) {
                    reference.points.push_back(c.center);
                    reference.weights.push_back(c.density);
                }
            }
            sched_event.estimated_p = success_probability(record.common_set, reference, cfg.metric);
        }
        history.push_back(std::move(record));
        result.events.emplace_back(sched_event);

        const auto online_execs = resolve(pool, online);
        if (epoch > 0) {
            for (auto& end : attacker.reschedule(start, epoch, online_execs, breach))
                result.events.emplace_back(std::move(end));
        }

        EpochEvent epoch_event;
        epoch_event.epoch = epoch;
        epoch_event.start_tick = start;
        epoch_event.end_tick = stop;
        epoch_event.online_ids = online;
        epoch_event.warmup = epoch < cfg.warmup_epochs;

        const auto& observers = cfg.detection_scope == DetectionScope::pool ? all : online_execs;
        for (std::int64_t tick = start; tick < stop; ++tick) {
            const InputPoint m = uniform_input(cfg.box, benign_rng);
            const Detection det = detect_abnormal(m, observers, cfg.correlated_wrong_outputs);
            for (std::size_t i = 0; i < observers.size(); ++i) {
                if (!det.abnormal[i]) continue;
                const auto& exec = *observers[i];
                trackers[static_cast<std::size_t>(exec.id)].observe(m);
                ++epoch_event.abnormal_detected;
                auto& hits = result.disc_hits[static_cast<std::size_t>(exec.id)];
                for (std::size_t d = 0; d < exec.discs.size(); ++d) {
                    const auto& disc = exec.discs[d];
                    if (squared_distance(disc.center.coords(), m.coords()) < disc.radius * disc.radius)
                        ++hits[d];
                }
            }

            const bool counted = tick >= warmup_ticks;
            bool launched = false;
            auto hit = attacker.tick(tick, epoch, counted, online_execs, breach, cfg.box, attack_rng,
                                     launched);
            if (launched && counted) ++epoch_event.launched;
            if (hit) {
                if (counted) ++epoch_event.succeeded;
                result.events.emplace_back(std::move(*hit));
            }
        }

        // Close the epoch: fold buffered abnormal inputs into the summaries.
        for (auto& t : trackers) {
            t.flush(cfg.clustering, cfg.metric, cluster_rng);
            t.decay(cfg.decay, cfg.min_density, cfg.clustering.max_clusters);
        }
        result.events.emplace_back(std::move(epoch_event));
    }

    for (auto& end : attacker.finish(cfg.total_inputs, static_cast<int>(epochs)))
        result.events.emplace_back(std::move(end));

    result.summaries = current_summaries();
    result.metrics = compute_metrics(result.events);
    return result;
}

std::pair<std::size_t, std::size_t> recovery_stats(const RunResult& result, std::int64_t min_hits,
                                                   double max_distance) {
    std::size_t qualifying = 0;
    std::size_t recovered = 0;
    for (std::size_t e = 0; e < result.pool.size(); ++e) {
        const auto& exec = result.pool[e];
        const auto& summary = result.summaries[e];
        for (std::size_t d = 0; d < exec.discs.size(); ++d) {
            if (result.disc_hits[e][d] < min_hits) continue;
            ++qualifying;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : summary.clusters)
                best = std::min(best, distance(c.center, exec.discs[d].center, result.config.metric));
            if (best <= max_distance) ++recovered;
        }
    }
    return {qualifying, recovered};
}

}  // namespace mimic

#include "mimic/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mimic/config.hpp"

namespace mimic {

namespace {

json coords(const InputPoint& p) { return json(std::vector<double>(p.coords().begin(), p.coords().end())); }

}  // namespace

json to_json(const ClusterSummary& s) {
    json clusters = json::array();
    for (const auto& c : s.clusters) clusters.push_back({{"center", coords(c.center)}, {"density", c.density}});
    return {{"executor_id", s.owner_executor}, {"up_to_time", s.up_to_time}, {"clusters", std::move(clusters)}};
}

ClusterSummary summary_from_json(const json& j) {
    ClusterSummary s;
    s.owner_executor = j.at("executor_id").get<int>();
    s.up_to_time = j.at("up_to_time").get<int>();
    for (const auto& c : j.at("clusters"))
        s.clusters.push_back({InputPoint(c.at("center").get<std::vector<double>>()), c.at("density").get<double>()});
    return s;
}

json to_json(const std::vector<ClusterSummary>& summaries) {
    json out = json::array();
    for (const auto& s : summaries) out.push_back(to_json(s));
    return out;
}

json truth_to_json(const std::vector<ExecutorSpec>& pool, const InputBox& box) {
    json executors = json::array();
    for (const auto& e : pool) {
        json discs = json::array();
        for (const auto& d : e.discs) discs.push_back({{"center", coords(d.center)}, {"radius", d.radius}});
        executors.push_back({{"executor_id", e.id}, {"discs", std::move(discs)}});
    }
    return {{"box", {{"lower", box.lower}, {"upper", box.upper}}}, {"executors", std::move(executors)}};
}

json to_json(const Event& e) {
    struct {
        json operator()(const AttackStart& a) const {
            return {{"attack_id", a.attack_id}, {"tick", a.tick},     {"epoch", a.epoch},
                    {"input", coords(a.input)}, {"replay", a.replay}, {"counted", a.counted}};
        }
        json operator()(const AttackEnd& a) const {
            return {{"attack_id", a.attack_id},
                    {"tick", a.tick},
                    {"epoch", a.epoch},
                    {"duration", a.duration},
                    {"schedule_changes_survived", a.schedule_changes_survived},
                    {"counted", a.counted},
                    {"truncated", a.truncated}};
        }
        json operator()(const EpochEvent& a) const {
            return {{"epoch", a.epoch},       {"start_tick", a.start_tick}, {"end_tick", a.end_tick},
                    {"online_ids", a.online_ids}, {"warmup", a.warmup},     {"launched", a.launched},
                    {"succeeded", a.succeeded}, {"abnormal_detected", a.abnormal_detected}};
        }
        json operator()(const ScheduleEvent& a) const {
            return {{"epoch", a.epoch},
                    {"tick", a.tick},
                    {"scheduled", a.scheduled},
                    {"candidates", a.candidates},
                    {"best_score", a.best_score},
                    {"chosen_score", a.chosen_score},
                    {"explored", a.explored},
                    {"estimated_p", a.estimated_p},
                    {"online_ids", a.online_ids}};
        }
    } visitor;
    json out = {{"type", event_type(e)}};
    out.update(std::visit(visitor, e));
    return out;
}

std::string metrics_row(std::string_view strategy, std::uint64_t seed, const RunMetrics& m) {
    std::string row(strategy);
    row += ',' + std::to_string(seed);
    row += ',' + std::to_string(m.N);
    row += ',' + format_double(m.P);
    row += ',' + std::to_string(m.T);
    row += ',' + std::to_string(m.n_surv);
    row += ',' + format_double(m.P2);
    row += ',' + format_double(m.ET);
    return row;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace mimic

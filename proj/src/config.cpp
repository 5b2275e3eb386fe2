#include "mimic/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mimic {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        out.emplace_back(trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
    throw ConfigError(std::string(key) + ": invalid value '" + std::string(value) + "' (" +
                      std::string(what) + ")");
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
    value = trim(value);
    Int out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "expected an integer");
    return out;
}

double parse_double(std::string_view key, std::string_view value) {
    value = trim(value);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "expected a number");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    value = trim(value);
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(key, value, "expected true or false");
}

std::vector<double> parse_doubles(std::string_view key, std::string_view value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
    return out;
}

std::string doubles_text(const std::vector<double>& v) {
    std::vector<std::string> items;
    for (double x : v) items.push_back(format_double(x));
    return join(items);
}

HarmFunction parse_harm(std::string_view key, std::string_view value) {
    value = trim(value);
    if (value == "linear") return HarmFunction{};
    std::vector<std::pair<double, double>> knots;
    for (const auto& item : split_list(value)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) bad_value(key, value, "expected 'linear' or T:h knots");
        knots.emplace_back(parse_double(key, item.substr(0, colon)),
                           parse_double(key, item.substr(colon + 1)));
    }
    return HarmFunction::table(std::move(knots));
}

std::string harm_text(const HarmFunction& h) {
    if (h.is_linear()) return "linear";
    std::vector<std::string> items;
    for (const auto& [t, v] : h.knots()) items.push_back(format_double(t) + ":" + format_double(v));
    return join(items);
}

struct Field {
    std::function<void(SimConfig&, std::string_view, std::string_view)> set;
    std::function<std::string(const SimConfig&)> get;
};

template <typename Int>
Field int_field(Int SimConfig::*member) {
    return {[member](SimConfig& c, std::string_view k, std::string_view v) { c.*member = parse_int<Int>(k, v); },
            [member](const SimConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double SimConfig::*member) {
    return {[member](SimConfig& c, std::string_view k, std::string_view v) { c.*member = parse_double(k, v); },
            [member](const SimConfig& c) { return format_double(c.*member); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"seed", int_field(&SimConfig::seed)},
        {"strategy",
         {[](SimConfig& c, std::string_view, std::string_view v) { c.strategy = parse_strategy(trim(v)); },
          [](const SimConfig& c) { return std::string(to_string(c.strategy)); }}},
        {"pool_size", int_field(&SimConfig::pool_size)},
        {"vulns_per_executor", int_field(&SimConfig::vulns_per_executor)},
        {"vuln_radius", double_field(&SimConfig::vuln_radius)},
        {"total_inputs", int_field(&SimConfig::total_inputs)},
        {"online_set_size", int_field(&SimConfig::online_set_size)},
        {"scheduling_period", int_field(&SimConfig::scheduling_period)},
        {"warmup_epochs", int_field(&SimConfig::warmup_epochs)},
        {"chunk_size", int_field(&SimConfig::chunk_size)},
        {"decay", double_field(&SimConfig::decay)},
        {"min_density", double_field(&SimConfig::min_density)},
        {"detection_scope",
         {[](SimConfig& c, std::string_view, std::string_view v) {
              c.detection_scope = parse_detection_scope(trim(v));
          },
          [](const SimConfig& c) { return std::string(to_string(c.detection_scope)); }}},
        {"correlated_wrong_outputs",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.correlated_wrong_outputs = parse_bool(k, v); },
          [](const SimConfig& c) { return std::string(c.correlated_wrong_outputs ? "true" : "false"); }}},
        {"replay_bias", double_field(&SimConfig::replay_bias)},
        {"breach_order", int_field(&SimConfig::breach_order)},
        {"box.lower",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.box.lower = parse_doubles(k, v); },
          [](const SimConfig& c) { return doubles_text(c.box.lower); }}},
        {"box.upper",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.box.upper = parse_doubles(k, v); },
          [](const SimConfig& c) { return doubles_text(c.box.upper); }}},
        {"metric.kind",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              if (trim(v) != "euclidean") bad_value(k, v, "only euclidean is supported");
              c.metric.kind = MetricKind::euclidean;
          },
          [](const SimConfig&) { return std::string("euclidean"); }}},
        {"metric.epsilon0",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.metric.epsilon0 = parse_double(k, v); },
          [](const SimConfig& c) { return format_double(c.metric.epsilon0); }}},
        {"clustering.N",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.clustering.N = parse_int<int>(k, v); },
          [](const SimConfig& c) { return std::to_string(c.clustering.N); }}},
        {"clustering.r",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.clustering.r = parse_double(k, v); },
          [](const SimConfig& c) { return format_double(c.clustering.r); }}},
        {"clustering.r0",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.clustering.r0 = parse_double(k, v); },
          [](const SimConfig& c) { return format_double(c.clustering.r0); }}},
        {"clustering.beta",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              if (trim(v) == "auto")
                  c.clustering.beta.reset();
              else
                  c.clustering.beta = parse_double(k, v);
          },
          [](const SimConfig& c) {
              return c.clustering.beta ? format_double(*c.clustering.beta) : std::string("auto");
          }}},
        {"clustering.gamma",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.clustering.gamma = parse_double(k, v); },
          [](const SimConfig& c) { return format_double(c.clustering.gamma); }}},
        {"clustering.max_clusters",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              c.clustering.max_clusters = parse_int<int>(k, v);
          },
          [](const SimConfig& c) { return std::to_string(c.clustering.max_clusters); }}},
        {"scheduler.L_ST",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.scheduler.L_ST = parse_int<int>(k, v); },
          [](const SimConfig& c) { return std::to_string(c.scheduler.L_ST); }}},
        {"scheduler.K",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.scheduler.K = parse_int<int>(k, v); },
          [](const SimConfig& c) { return std::to_string(c.scheduler.K); }}},
        {"scheduler.exploration",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              c.scheduler.exploration = parse_double(k, v);
          },
          [](const SimConfig& c) { return format_double(c.scheduler.exploration); }}},
        {"scheduler.p_att",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.scheduler.p_att = parse_double(k, v); },
          [](const SimConfig& c) { return format_double(c.scheduler.p_att); }}},
        {"scheduler.harm",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.scheduler.harm = parse_harm(k, v); },
          [](const SimConfig& c) { return harm_text(c.scheduler.harm); }}},
    };
    return table;
}

const Field* find_field(std::string_view key) {
    for (const auto& [name, field] : fields()) {
        if (name == key) return &field;
    }
    return nullptr;
}

std::vector<std::uint64_t> parse_seeds(std::string_view key, std::string_view value) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(value)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(parse_int<std::uint64_t>(key, item));
            continue;
        }
        const auto lo = parse_int<std::uint64_t>(key, item.substr(0, dots));
        const auto hi = parse_int<std::uint64_t>(key, item.substr(dots + 2));
        if (hi < lo) bad_value(key, item, "empty seed range");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) bad_value(key, value, "at least one seed is required");
    return seeds;
}

const std::vector<std::pair<std::string, double CostParams::*>>& cost_fields() {
    static const std::vector<std::pair<std::string, double CostParams::*>> table = {
        {"cost.cost_f", &CostParams::cost_f},     {"cost.N_f", &CostParams::N_f},
        {"cost.cost_D1", &CostParams::cost_D1},   {"cost.cost_D2", &CostParams::cost_D2},
        {"cost.T_period", &CostParams::T_period}, {"cost.cost_R0", &CostParams::cost_R0},
        {"cost.cost_C", &CostParams::cost_C},     {"cost.n", &CostParams::n},
    };
    return table;
}

}  // namespace

void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value) {
    const Field* field = find_field(trim(key));
    if (!field) throw ConfigError("unknown key '" + std::string(key) + "'");
    field->set(cfg, trim(key), value);
}

std::vector<std::pair<std::string, std::string>> sim_settings(const SimConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(cfg));
    return out;
}

bool operator==(const SimConfig& a, const SimConfig& b) { return sim_settings(a) == sim_settings(b); }

ConfigFile parse_config(std::string_view text) {
    ConfigFile out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        if (!seen.emplace(key, line_no).second) throw ConfigError(where() + "duplicate key '" + key + "'");

        try {
            if (key == "experiment.seeds") {
                out.matrix.seeds = parse_seeds(key, value);
            } else if (key == "experiment.output_dir") {
                out.matrix.output_dir = std::string(value);
            } else if (key.rfind("sweep.", 0) == 0) {
                Sweep sweep{key.substr(6), split_list(value)};
                if (!find_field(sweep.key)) throw ConfigError("unknown sweep field '" + sweep.key + "'");
                if (sweep.values.empty()) throw ConfigError(key + ": sweep needs at least one value");
                SimConfig probe = out.matrix.base;
                for (const auto& v : sweep.values) apply_setting(probe, sweep.key, v);
                out.matrix.sweeps.push_back(std::move(sweep));
            } else if (key.rfind("cost.", 0) == 0) {
                if (!out.cost) out.cost = CostJob{};
                if (key == "cost.t") {
                    out.cost->t = parse_double(key, value);
                } else if (key == "cost.N_C") {
                    out.cost->cleanings = parse_double(key, value);
                } else {
                    auto it = std::find_if(cost_fields().begin(), cost_fields().end(),
                                           [&](const auto& f) { return f.first == key; });
                    if (it == cost_fields().end()) throw ConfigError("unknown key '" + key + "'");
                    out.cost->params.*(it->second) = parse_double(key, value);
                }
            } else {
                apply_setting(out.matrix.base, key, value);
            }
        } catch (const ConfigError& e) {
            throw ConfigError(where() + e.what());
        }
    }
    return out;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ConfigFile& config) {
    std::ostringstream out;
    for (const auto& [key, value] : sim_settings(config.matrix.base)) out << key << " = " << value << '\n';

    std::vector<std::string> seeds;
    for (auto s : config.matrix.seeds) seeds.push_back(std::to_string(s));
    out << "experiment.seeds = " << join(seeds) << '\n';
    out << "experiment.output_dir = " << config.matrix.output_dir << '\n';
    for (const auto& sweep : config.matrix.sweeps) out << "sweep." << sweep.key << " = " << join(sweep.values) << '\n';

    if (config.cost) {
        for (const auto& [key, member] : cost_fields())
            out << key << " = " << format_double(config.cost->params.*member) << '\n';
        out << "cost.t = " << format_double(config.cost->t) << '\n';
        out << "cost.N_C = " << format_double(config.cost->cleanings) << '\n';
    }
    return out.str();
}

}  // namespace mimic

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mimic/attack_sim.hpp"
#include "mimic/cost_model.hpp"

namespace mimic {

struct Sweep {
    std::string key;  // a SimConfig key, e.g. "strategy" or "scheduler.L_ST"
    std::vector<std::string> values;

    friend bool operator==(const Sweep&, const Sweep&) = default;
};

struct ExperimentMatrix {
    SimConfig base;
    std::vector<Sweep> sweeps;
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "results";
};

struct CostJob {
    CostParams params;
    double t = 0.0;          // runtime length
    double cleanings = 0.0;  // N_C
};

struct ConfigFile {
    ExperimentMatrix matrix;
    std::optional<CostJob> cost;
};

/// Parses the key/value config format. Lines are `key = value`; `#` starts
/// a comment; `[section]` prefixes following keys with `section.`. Unknown
/// keys are errors.
ConfigFile parse_config(std::string_view text);
ConfigFile load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ConfigFile& config);

/// Sets one SimConfig field from its textual value.
void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value);

/// Every SimConfig key with its current value, in canonical order.
std::vector<std::pair<std::string, std::string>> sim_settings(const SimConfig& cfg);

bool operator==(const SimConfig& a, const SimConfig& b);

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace mimic

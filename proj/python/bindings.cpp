#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mimic/attack_sim.hpp"
#include "mimic/config.hpp"
#include "mimic/cost_model.hpp"
#include "mimic/heterogeneity.hpp"
#include "mimic/io.hpp"
#include "mimic/scheduler.hpp"
#include "mimic/vuln_discovery.hpp"

namespace py = pybind11;
using namespace mimic;

namespace {

using Coords = std::vector<double>;

std::vector<InputPoint> to_points(const std::vector<Coords>& raw) {
    std::vector<InputPoint> out;
    out.reserve(raw.size());
    for (const auto& c : raw) out.emplace_back(c);
    return out;
}

std::vector<Coords> to_coords(const std::vector<InputPoint>& pts) {
    std::vector<Coords> out;
    for (const auto& p : pts) out.emplace_back(p.coords().begin(), p.coords().end());
    return out;
}

MetricConfig metric(double epsilon0) {
    MetricConfig cfg;
    cfg.epsilon0 = epsilon0;
    cfg.validate();
    return cfg;
}

py::dict summary_dict(const ClusterSummary& s) { return py::module_::import("json").attr("loads")(to_json(s).dump()); }

ClusterSummary summary_from(const py::dict& d) {
    return summary_from_json(json::parse(py::module_::import("json").attr("dumps")(d).cast<std::string>()));
}

SimConfig sim_config(const std::map<std::string, std::string>& settings) {
    SimConfig cfg;
    for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
    cfg.validate();
    return cfg;
}

py::dict metrics_dict(const RunMetrics& m) {
    py::dict d;
    d["N"] = m.N;
    d["launched"] = m.launched;
    d["P"] = m.P;
    d["T"] = m.T;
    d["n_surv"] = m.n_surv;
    d["P2"] = m.P2;
    d["ET"] = m.ET;
    return d;
}

}  // namespace

PYBIND11_MODULE(_mimic, m) {
    m.doc() = "Input-based mimic defense simulation core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("distance", [](const Coords& a, const Coords& b) { return distance(InputPoint(a), InputPoint(b), MetricConfig{}); });

    m.def("tolerant_intersection",
          [](const std::vector<std::vector<Coords>>& sets, double epsilon0) {
              std::vector<PointSet> ps;
              for (const auto& s : sets) ps.emplace_back(to_points(s));
              return to_coords(tolerant_intersection(ps, metric(epsilon0)).points);
          },
          py::arg("sets"), py::arg("epsilon0"));

    m.def("k_order_similarity",
          [](const std::vector<std::vector<Coords>>& sets, int k, double epsilon0, double sample_mass) {
              std::vector<PointSet> ps;
              for (const auto& s : sets) ps.emplace_back(to_points(s));
              return k_order_similarity(ps, k, metric(epsilon0), sample_mass);
          },
          py::arg("sets"), py::arg("k"), py::arg("epsilon0"), py::arg("sample_mass"));

    m.def("cluster_chunk",
          [](const std::vector<Coords>& points, double r, int N, int time_index, std::uint64_t seed) {
              ClusteringParams params;
              params.r = r;
              params.N = N;
              std::mt19937_64 rng(seed);
              return summary_dict(cluster_chunk({time_index, to_points(points)}, params, MetricConfig{}, rng));
          },
          py::arg("points"), py::arg("r") = 2.0, py::arg("N") = 100, py::arg("time_index") = 1, py::arg("seed") = 1);

    m.def("merge_summary",
          [](const py::dict& iss, const py::dict& chs, double r0) {
              ClusteringParams params;
              params.r0 = r0;
              return summary_dict(merge_summary(summary_from(iss), summary_from(chs), params, MetricConfig{}));
          },
          py::arg("iss"), py::arg("chs"), py::arg("r0") = 4.0);

    m.def("run_experiment",
          [](const std::map<std::string, std::string>& settings) {
              RunResult r;
              {
                  py::gil_scoped_release release;
                  r = run_experiment(sim_config(settings));
              }
              py::dict out;
              out["metrics"] = metrics_dict(r.metrics);
              py::list summaries;
              for (const auto& s : r.summaries) summaries.append(summary_dict(s));
              out["summaries"] = summaries;
              out["truth"] = py::module_::import("json").attr("loads")(truth_to_json(r.pool, r.config.box).dump());
              const auto [qualifying, recovered] = recovery_stats(r, 20, 6.0);
              out["recovery"] = py::make_tuple(qualifying, recovered);
              return out;
          },
          py::arg("settings") = std::map<std::string, std::string>{},
          "Runs one simulation. settings maps config keys (as in the config file) to values.");

    m.def("config_settings", [](const std::map<std::string, std::string>& settings) {
        return sim_settings(sim_config(settings));
    });

    m.def("total_cost",
          [](double cost_f, double N_f, double cost_D1, double cost_D2, double T_period, double cost_R0,
             double cost_C, double n, double t, double cleanings) {
              CostParams p{cost_f, N_f, cost_D1, cost_D2, T_period, cost_R0, cost_C, n};
              p.validate();
              return total_cost(p, t, cleanings);
          },
          py::arg("cost_f") = 0.0, py::arg("N_f") = 0.0, py::arg("cost_D1") = 0.0, py::arg("cost_D2") = 0.0,
          py::arg("T_period") = 1.0, py::arg("cost_R0") = 0.0, py::arg("cost_C") = 0.0, py::arg("n") = 1.0,
          py::arg("t") = 0.0, py::arg("cleanings") = 0.0);
}

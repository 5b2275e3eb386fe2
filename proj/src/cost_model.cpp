#include "mimic/cost_model.hpp"

#include <stdexcept>

#include "mimic/core_model.hpp"

namespace mimic {

void CostParams::validate() const {
    for (double c : {cost_f, N_f, cost_D1, cost_D2, cost_R0, cost_C}) {
        if (c < 0.0) throw ConfigError("cost parameters must be >= 0");
    }
    if (!(T_period > 0.0)) throw ConfigError("cost.T_period must be > 0");
    if (n < 1.0) throw ConfigError("cost.n must be >= 1");
}

double heterogeneity_cost(const CostParams& p) { return p.cost_f * p.N_f; }

double dynamic_cost_per_unit_time(const CostParams& p) {
    if (!(p.T_period > 0.0)) throw std::invalid_argument("scheduling period must be > 0");
    return (p.cost_D1 + p.n * p.cost_D2) / p.T_period;
}

// Per unit time; the running total multiplies by t once.
double redundancy_cost_per_unit_time(const CostParams& p) { return p.cost_R0 * p.n; }

CostBreakdown cost_breakdown(const CostParams& p, double t, double cleanings) {
    if (t < 0.0 || cleanings < 0.0)
        throw std::invalid_argument("runtime and cleaning count must be >= 0");
    CostBreakdown b;
    b.heterogeneity = heterogeneity_cost(p);
    b.redundancy_rate = redundancy_cost_per_unit_time(p);
    b.dynamic_rate = dynamic_cost_per_unit_time(p);
    b.running = t * (b.redundancy_rate + b.dynamic_rate);
    b.cleaning = p.cost_C * cleanings;
    b.total = b.heterogeneity + b.running + b.cleaning;
    return b;
}

double total_cost(const CostParams& p, double t, double cleanings) {
    return cost_breakdown(p, t, cleanings).total;
}

}  // namespace mimic

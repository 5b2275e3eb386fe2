#pragma once

namespace mimic {

// Deployment cost of a mimic-defense system.
struct CostParams {
    double cost_f = 0.0;    // build cost per heterogeneous executor
    double N_f = 0.0;       // executors in the pool
    double cost_D1 = 0.0;   // cost of one replacement
    double cost_D2 = 0.0;   // scheduling loss per online executor
    double T_period = 1.0;  // scheduling period
    double cost_R0 = 0.0;   // running cost of one executor per unit time
    double cost_C = 0.0;    // cost of one clean-and-refactor
    double n = 1.0;         // online-set size

    void validate() const;
};

struct CostBreakdown {
    double heterogeneity = 0.0;  // one-time
    double redundancy_rate = 0.0;
    double dynamic_rate = 0.0;
    double running = 0.0;   // t * (redundancy_rate + dynamic_rate)
    double cleaning = 0.0;
    double total = 0.0;
};

double heterogeneity_cost(const CostParams& p);
double dynamic_cost_per_unit_time(const CostParams& p);
double redundancy_cost_per_unit_time(const CostParams& p);
double total_cost(const CostParams& p, double t, double cleanings);
CostBreakdown cost_breakdown(const CostParams& p, double t, double cleanings);

}  // namespace mimic

#pragma once

#include "segreflow/flow.hpp"
#include "segreflow/partition.hpp"

namespace segreflow {

struct LadderRung {
    double beta = 0.0;
    flow_status status = flow_status::budget_exhausted;
    long steps = 0;
    double J = 0.0;
    std::vector<double> lambda;
    double v_h1 = 0.0;
    double max_residual = 0.0;
    double defect = 0.0;            // max_{i<j} beta int u_i^2 u_j^2
    double partition_energy = 0.0;  // sum_i lambda_{k_i} of the extracted masks
    double uncovered_fraction = 0.0;
    std::vector<double> interfaces;  // 1D only
    double state_diff = 0.0;  // max_i |u_i - u_i(previous rung)|_L2, 0 on the first rung
};

struct LadderParams {
    std::vector<double> schedule{1.0, 10.0, 100.0, 1000.0};
    // With an explicit user-given schedule every rung runs. Otherwise the
    // ladder stops early once the relative partition-energy change between
    // consecutive rungs falls below plateau_rel_tol.
    bool explicit_schedule = true;
    double plateau_rel_tol = 1e-3;
    FlowParams flow;
    std::vector<int> k;
    double extract_tol = 1e-3;
    double eig_tol = 1e-8;
};

struct LadderReport {
    std::vector<LadderRung> rungs;
    State final_state;
    bool plateau_stopped = false;
};

// Continuation in the competition parameter: flows to a critical point at
// each beta in the schedule, warm-starting from the previous rung's state,
// and records per-rung diagnostics.
LadderReport run_ladder(const State& seed, const NonlinearitySpec& base,
                        const LadderParams& params, rng_t& rng);

// Exponent ladder delta(1) = 0, 2 + delta(k+1) = s (2 + delta(k)) / 2.
std::vector<double> delta_sequence(int levels, double surrogate);

// Discrete L^{2+delta(k)} norms of each component, k = 1..levels:
// norms[level][i] = ( sum |u_i|^r h^N )^{1/r} with r = 2 + delta(level+1).
std::vector<std::vector<double>> norm_ladder(const State& s, int levels, double surrogate);

}  // namespace segreflow

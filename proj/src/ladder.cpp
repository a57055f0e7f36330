#include "segreflow/ladder.hpp"

#include <cmath>

namespace segreflow {

LadderReport run_ladder(const State& seed, const NonlinearitySpec& base,
                        const LadderParams& params, rng_t& rng) {
    if (params.schedule.empty()) throw config_error("ladder: empty beta schedule");
    for (double b : params.schedule)
        if (!(b > 0.0)) throw config_error("ladder: beta values must be positive");
    if ((int)params.k.size() != base.m)
        throw config_error("ladder: k must have one entry per component");

    LadderReport rep;
    rep.final_state = seed;
    renormalize(rep.final_state);

    double prev_energy = 0.0;
    State prev_state = rep.final_state;
    for (std::size_t r = 0; r < params.schedule.size(); ++r) {
        NonlinearitySpec nl = base;
        nl.beta = params.schedule[r];
        log_info("ladder rung " + std::to_string(r + 1) + ": beta = " +
                 std::to_string(nl.beta));

        FlowResult fr = run_flow(rep.final_state, nl, params.flow);
        rep.final_state = fr.state;

        LadderRung rung;
        rung.beta = nl.beta;
        rung.status = fr.status;
        rung.steps = fr.steps;
        rung.J = fr.J;
        rung.lambda = fr.lambda;
        rung.v_h1 = fr.v_h1;
        rung.max_residual = fr.max_residual;
        rung.defect = segregation_defect(rep.final_state, nl.beta);

        Partition part = extract_partition(rep.final_state, params.extract_tol);
        rung.partition_energy = partition_energy(part, params.k, params.eig_tol, rng);
        rung.uncovered_fraction = part.uncovered_fraction;
        if (rep.final_state.grid().dim == 1) rung.interfaces = interface_points_1d(part);

        if (r > 0) {
            double diff = 0.0;
            for (int i = 0; i < rep.final_state.m(); ++i) {
                Field d = rep.final_state.u[i];
                for (int p = 0; p < d.grid->total; ++p) d.v[p] -= prev_state.u[i].v[p];
                diff = std::max(diff, l2_norm(d));
            }
            rung.state_diff = diff;
        }
        prev_state = rep.final_state;

        bool plateau = r > 0 && std::abs(rung.partition_energy - prev_energy) <
                                    params.plateau_rel_tol *
                                        std::max(1.0, std::abs(rung.partition_energy));
        prev_energy = rung.partition_energy;
        rep.rungs.push_back(std::move(rung));

        if (!params.explicit_schedule && plateau && r + 1 < params.schedule.size()) {
            rep.plateau_stopped = true;
            break;
        }
    }
    return rep;
}

std::vector<double> delta_sequence(int levels, double surrogate) {
    if (levels < 1) throw config_error("delta_sequence: levels must be >= 1");
    if (!(surrogate > 2.0)) throw config_error("delta_sequence: surrogate exponent must exceed 2");
    std::vector<double> delta{0.0};
    for (int k = 1; k < levels; ++k)
        delta.push_back(surrogate * (2.0 + delta.back()) / 2.0 - 2.0);
    return delta;
}

std::vector<std::vector<double>> norm_ladder(const State& s, int levels, double surrogate) {
    std::vector<double> delta = delta_sequence(levels, surrogate);
    std::vector<std::vector<double>> norms;
    const Grid& g = s.grid();
    for (int lev = 0; lev < levels; ++lev) {
        double r = 2.0 + delta[lev];
        std::vector<double> row;
        for (int i = 0; i < s.m(); ++i) {
            double acc = 0.0;
            for (int p = 0; p < g.total; ++p) acc += std::pow(std::abs(s.u[i].v[p]), r);
            row.push_back(std::pow(acc * g.measure, 1.0 / r));
        }
        norms.push_back(std::move(row));
    }
    return norms;
}

}  // namespace segreflow

#pragma once

#include "segreflow/kop.hpp"

namespace segreflow {

// J(u) = sum_i ( <A0 u_i, u_i> + 2 a_i int G(u_i) ) + cpl sum_{i != j} int F(u_i) F(u_j)
double energy_J(const State& s, const NonlinearitySpec& nl);

struct ConeDistance {
    double dist = 0.0;  // min_i min(|u_i^+|_L2, |u_i^-|_L2)
    int comp = 0;       // attaining component
    int sign = 1;       // +1: negative part is the smaller one, -1: positive part
};

ConeDistance cone_distance(const State& s);

struct TraceRow {
    double t = 0.0;
    double J = 0.0;
    double v_h1 = 0.0;  // pseudogradient norm |u - K(u)|_H1
    double cone_dist = 0.0;
    int cone_comp = 0;
    int cone_sign = 1;
    std::vector<double> lambda;    // Rayleigh multipliers per component
    std::vector<double> pos_norm;  // |u_i^+|_L2
    std::vector<double> neg_norm;  // |u_i^-|_L2
    double dt = 0.0;               // step that produced this row (0 for the initial row)
};

struct FlowParams {
    double tol = 1e-6;        // convergence: |V|_H1 <= tol and residual <= 10*tol
    double dt0 = 0.1;
    double dt_min = 1e-10;
    double dt_max = 0.5;
    long max_steps = 50000;   // accepted steps
    double max_seconds = 0.0;  // 0 = unlimited
    double slack = 1e-9;      // acceptance: J_new <= J_cur + slack
    double cone_delta = 0.1;  // in (0, sqrt(2)/2); recorded against cone_dist
    int workers = 1;
};

void validate_flow_params(const FlowParams& p);

enum class flow_status { converged, budget_exhausted };
const char* to_string(flow_status st);

struct FlowResult {
    State state;
    std::vector<TraceRow> trace;  // initial row plus one row per accepted step
    flow_status status = flow_status::budget_exhausted;
    long steps = 0;
    double J = 0.0;
    double v_h1 = 0.0;
    double max_residual = 0.0;  // max_i |grad_i - lambda_i u_i|_L2 at the final state
    std::vector<double> lambda;
};

// One projected descent step from state s: computes K(s), V = s - K(s), and
// proposes normalize(u_i - dt V_i). The proposal is accepted iff
// J(trial) <= J(s) + slack, in which case s is replaced by the trial.
struct StepResult {
    bool accepted = false;
    double J_before = 0.0;
    double J_after = 0.0;  // trial energy whether or not accepted
    double v_h1 = 0.0;
};

StepResult flow_step(State& s, const NonlinearitySpec& nl, double dt, double slack = 1e-9);

// Projected descent to a constrained critical point. dt halves on rejection
// (reusing the already-computed descent direction), grows by 1.2x after five
// consecutive accepts up to dt_max, and stopping is declared when both the
// pseudogradient norm (<= tol in H1) and the Euler-Lagrange residual
// certificate (<= 10 tol in L2 per component) hold.
FlowResult run_flow(const State& u0, const NonlinearitySpec& nl, const FlowParams& params);

}  // namespace segreflow

#include "segreflow/flow.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace segreflow {

double energy_J(const State& s, const NonlinearitySpec& nl) {
    const Grid& g = s.grid();
    int m = s.m();
    if (nl.m != m) throw invariant_error("energy_J: state/spec component count mismatch");
    LinearOperator A0 = laplacian(g);
    double J = 0.0;
    for (int i = 0; i < m; ++i) {
        Field Au = apply(A0, s.u[i]);
        J += l2_inner(Au, s.u[i]);
        double gi = 0.0;
        for (int p = 0; p < g.total; ++p) gi += G_kernel(nl, s.u[i].v[p]);
        J += 2.0 * nl.a[i] * gi * g.measure;
    }
    // sum_{i != j} F_i F_j = (sum_i F_i)^2 - sum_i F_i^2 pointwise
    double cross = 0.0;
    for (int p = 0; p < g.total; ++p) {
        double tot = 0.0, sq = 0.0;
        for (int i = 0; i < m; ++i) {
            double Fi = F_kernel(nl, s.u[i].v[p]);
            tot += Fi;
            sq += Fi * Fi;
        }
        cross += tot * tot - sq;
    }
    J += nl.coupling() * cross * g.measure;
    return J;
}

static void split_norms(const Field& u, double& pos, double& neg) {
    double sp = 0.0, sn = 0.0;
    for (double v : u.v) {
        if (v > 0.0)
            sp += v * v;
        else
            sn += v * v;
    }
    pos = std::sqrt(sp * u.grid->measure);
    neg = std::sqrt(sn * u.grid->measure);
}

ConeDistance cone_distance(const State& s) {
    ConeDistance cd;
    cd.dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.m(); ++i) {
        double pos, neg;
        split_norms(s.u[i], pos, neg);
        double d = std::min(pos, neg);
        if (d < cd.dist) {
            cd.dist = d;
            cd.comp = i;
            cd.sign = neg <= pos ? 1 : -1;
        }
    }
    return cd;
}

void validate_flow_params(const FlowParams& p) {
    if (!(p.tol > 0.0)) throw config_error("flow.tol must be positive");
    if (!(p.dt0 > 0.0 && p.dt0 <= p.dt_max))
        throw config_error("flow.dt0 must lie in (0, dt_max]");
    if (!(p.dt_min > 0.0)) throw config_error("flow.dt_min must be positive");
    if (p.max_steps < 1) throw config_error("flow.max_steps must be >= 1");
    const double bound = std::sqrt(2.0) / 2.0;
    if (!(p.cone_delta > 0.0 && p.cone_delta < bound))
        throw config_error("flow.cone_delta must lie in (0, " + std::to_string(bound) +
                           "), got " + std::to_string(p.cone_delta));
    if (p.workers < 1) throw config_error("flow.workers must be >= 1");
}

static TraceRow make_row(const State& s, const NonlinearitySpec& nl, double t, double J,
                         double v_h1, double dt, std::vector<double> lambda) {
    TraceRow row;
    row.t = t;
    row.J = J;
    row.v_h1 = v_h1;
    row.dt = dt;
    ConeDistance cd = cone_distance(s);
    row.cone_dist = cd.dist;
    row.cone_comp = cd.comp;
    row.cone_sign = cd.sign;
    row.lambda = std::move(lambda);
    for (int i = 0; i < s.m(); ++i) {
        double pos, neg;
        split_norms(s.u[i], pos, neg);
        row.pos_norm.push_back(pos);
        row.neg_norm.push_back(neg);
    }
    (void)nl;
    return row;
}

// Rayleigh multipliers and Euler-Lagrange residual norms at the current state
static void multipliers_and_residuals(const State& s, const NonlinearitySpec& nl,
                                      std::vector<double>& lambda,
                                      std::vector<double>& resid) {
    std::vector<Field> env = coupling_env(s, nl);
    lambda.clear();
    resid.clear();
    for (int i = 0; i < s.m(); ++i) {
        Field grad = energy_gradient_comp(s, nl, env, i);
        double uu = l2_inner(s.u[i], s.u[i]);
        double li = l2_inner(grad, s.u[i]) / uu;
        double rr = 0.0;
        for (int p = 0; p < s.grid().total; ++p) {
            double d = grad.v[p] - li * s.u[i].v[p];
            rr += d * d;
        }
        lambda.push_back(li);
        resid.push_back(std::sqrt(rr * s.grid().measure));
        if (li < -1e-8)
            throw invariant_error("flow: negative multiplier lambda_" + std::to_string(i + 1) +
                                  " = " + std::to_string(li));
    }
}

static State propose(const State& s, const std::vector<Field>& V, double dt) {
    State trial = s;
    for (int i = 0; i < s.m(); ++i)
        for (int p = 0; p < s.grid().total; ++p) trial.u[i].v[p] -= dt * V[i].v[p];
    renormalize(trial);
    return trial;
}

StepResult flow_step(State& s, const NonlinearitySpec& nl, double dt, double slack) {
    double ktol = 1e-8;
    KSolveResult k = solve_K(s, nl, ktol);
    PseudoGradient pg = pseudo_gradient(s, k);
    StepResult res;
    res.v_h1 = pg.h1_norm;
    res.J_before = energy_J(s, nl);
    State trial = propose(s, pg.V, dt);
    res.J_after = energy_J(trial, nl);
    res.accepted = res.J_after <= res.J_before + slack;
    if (res.accepted) s = std::move(trial);
    return res;
}

FlowResult run_flow(const State& u0, const NonlinearitySpec& nl, const FlowParams& params) {
    validate_flow_params(params);
    auto t_start = std::chrono::steady_clock::now();
    auto seconds_spent = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    FlowResult out;
    out.state = u0;
    renormalize(out.state);
    double ktol = std::min(1e-8, params.tol);

    double J_cur = energy_J(out.state, nl);
    double t = 0.0;
    double dt = params.dt0;
    int consecutive_accepts = 0;
    KSolveResult k;
    bool have_k = false;

    std::vector<double> lambda, resid;
    multipliers_and_residuals(out.state, nl, lambda, resid);

    for (long step = 0;; ++step) {
        try {
            k = solve_K(out.state, nl, ktol, have_k ? &k : nullptr, params.workers);
        } catch (const numerical_error& e) {
            throw numerical_error("flow step " + std::to_string(step) + " (t=" +
                                  std::to_string(t) + ", J=" + std::to_string(J_cur) +
                                  "): " + e.what());
        }
        have_k = true;
        PseudoGradient pg = pseudo_gradient(out.state, k);

        if (step == 0)
            out.trace.push_back(make_row(out.state, nl, t, J_cur, pg.h1_norm, 0.0, lambda));

        double max_res = 0.0;
        for (double r : resid) max_res = std::max(max_res, r);
        if (pg.h1_norm <= params.tol && max_res <= 10.0 * params.tol) {
            out.status = flow_status::converged;
            out.v_h1 = pg.h1_norm;
            break;
        }
        if (step >= params.max_steps ||
            (params.max_seconds > 0.0 && seconds_spent() > params.max_seconds)) {
            out.status = flow_status::budget_exhausted;
            out.v_h1 = pg.h1_norm;
            break;
        }

        // retry the same descent direction with halved dt until accepted
        bool accepted = false;
        while (true) {
            State trial = propose(out.state, pg.V, dt);
            double J_trial = energy_J(trial, nl);
            if (J_trial <= J_cur + params.slack) {
                out.state = std::move(trial);
                J_cur = J_trial;
                t += dt;
                accepted = true;
                ++consecutive_accepts;
                if (consecutive_accepts >= 5) {
                    dt = std::min(dt * 1.2, params.dt_max);
                    consecutive_accepts = 0;
                }
                break;
            }
            consecutive_accepts = 0;
            dt *= 0.5;
            if (dt < params.dt_min) break;
        }
        if (!accepted) {
            out.status = flow_status::budget_exhausted;
            out.v_h1 = pg.h1_norm;
            break;
        }

        double dev = manifold_deviation(out.state);
        if (dev > 1e-12)
            throw invariant_error("flow: renormalized state off manifold by " +
                                  std::to_string(dev));

        multipliers_and_residuals(out.state, nl, lambda, resid);
        out.steps = step + 1;
        out.trace.push_back(
            make_row(out.state, nl, t, J_cur, pg.h1_norm, dt, lambda));
    }

    out.J = J_cur;
    out.lambda = lambda;
    out.max_residual = 0.0;
    for (double r : resid) out.max_residual = std::max(out.max_residual, r);
    return out;
}

const char* to_string(flow_status st) {
    switch (st) {
        case flow_status::converged: return "converged";
        case flow_status::budget_exhausted: return "budget-exhausted";
    }
    return "unknown";
}

}  // namespace segreflow

#include "segreflow/kop.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

namespace segreflow {

State make_state(const Grid& g, int m) {
    State s;
    for (int i = 0; i < m; ++i) s.u.push_back(make_field(g));
    return s;
}

double manifold_deviation(const State& s) {
    double dev = 0.0;
    for (const Field& f : s.u) dev = std::max(dev, std::abs(l2_norm(f) - 1.0));
    return dev;
}

void renormalize(State& s) {
    for (Field& f : s.u) {
        double n = l2_norm(f);
        if (n < 1e-14) throw numerical_error("renormalize: component collapsed to zero");
        for (double& v : f.v) v /= n;
    }
}

std::vector<Field> coupling_env(const State& s, const NonlinearitySpec& nl) {
    const Grid& g = s.grid();
    int m = s.m();
    if (nl.m != m) throw invariant_error("coupling_env: state/spec component count mismatch");
    // one pass for the total, then subtract own contribution
    std::vector<double> total(g.total, 0.0);
    std::vector<std::vector<double>> Fu(m, std::vector<double>(g.total));
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < g.total; ++p) {
            double v = F_kernel(nl, s.u[i].v[p]);
            Fu[i][p] = v;
            total[p] += v;
        }
    }
    std::vector<Field> env;
    for (int i = 0; i < m; ++i) {
        Field e = make_field(g);
        for (int p = 0; p < g.total; ++p) e.v[p] = total[p] - Fu[i][p];
        env.push_back(std::move(e));
    }
    return env;
}

Field energy_gradient_comp(const State& s, const NonlinearitySpec& nl,
                           const std::vector<Field>& env, int i) {
    const Grid& g = s.grid();
    LinearOperator A0 = laplacian(g);
    Field grad = apply(A0, s.u[i]);
    double ai = nl.a[i];
    double cpl = nl.coupling();
    for (int p = 0; p < g.total; ++p) {
        double up = s.u[i].v[p];
        grad.v[p] += ai * g_kernel(nl, up) + cpl * f_kernel(nl, up) * env[i].v[p];
    }
    return grad;
}

namespace {

std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

// constrained energy E(w) = 1/2 <A0 w,w> + a int G(w) + cpl int F(w) S
double constrained_energy(const NonlinearitySpec& nl, double ai, double cpl,
                          const LinearOperator& A0, const Field& w, const Field& S) {
    const Grid& g = *w.grid;
    Field Aw = apply(A0, w);
    double quad = 0.5 * l2_inner(Aw, w);
    double nonq = 0.0;
    for (int p = 0; p < g.total; ++p)
        nonq += ai * G_kernel(nl, w.v[p]) + cpl * F_kernel(nl, w.v[p]) * S.v[p];
    return quad + nonq * g.measure;
}

KComponent solve_component(const State& s, const NonlinearitySpec& nl, double tol,
                           const std::vector<Field>& env, int i, const Field* warm_w) {
    const Grid& g = s.grid();
    const Field& u = s.u[i];
    const Field& S = env[i];
    double ai = nl.a[i];
    double cpl = nl.coupling();
    LinearOperator A0 = laplacian(g);
    double unorm = l2_norm(u);
    const int cg_iters = 60 * g.total + 2000;

    // rounding floor of evaluating the stationarity residual: dominated by the
    // stencil apply (Gershgorin: |A0|_2 <= 2 max diag) plus the coupling term
    double a0_diag = 0.0, s_max = 0.0;
    for (int p = 0; p < g.total; ++p) {
        a0_diag = std::max(a0_diag, A0.diag(p));
        s_max = std::max(s_max, std::abs(S.v[p]));
    }
    const double op_bound = 2.0 * a0_diag + std::abs(cpl) * s_max;
    const double eps = std::numeric_limits<double>::epsilon();
    auto res_floor = [&](const Field& w) { return 16.0 * eps * op_bound * l2_norm(w); };

    KComponent out;

    bool linear = ai == 0.0 && !nl.truncated;
    if (linear) {
        // (A0 + cpl*S) w = mu u: one solve and a rescale
        std::vector<double> pot(g.total);
        for (int p = 0; p < g.total; ++p) pot[p] = cpl * S.v[p];
        LinearOperator A{&g, nullptr, &pot};
        CgResult sol = cg_solve(A, u, 1e-12, cg_iters, warm_w);
        double uz = l2_inner(u, sol.x);
        if (uz <= 0.0)
            throw invariant_error("solve_K: <u, A^-1 u> must be positive, got " +
                                  std::to_string(uz));
        out.mu = 1.0 / uz;
        out.w = std::move(sol.x);
        for (double& v : out.w.v) v *= out.mu;
        out.iterations = 0;
    } else {
        // damped Newton on the convex constrained energy, feasible throughout
        Field w = make_field(g);
        if (warm_w != nullptr) {
            double c = l2_inner(u, *warm_w);
            if (std::abs(c) > 1e-8) {
                w = *warm_w;
                for (double& v : w.v) v /= c;
            } else {
                double uu = l2_inner(u, u);
                w = u;
                for (double& v : w.v) v /= uu;
            }
        } else {
            double uu = l2_inner(u, u);
            w = u;
            for (double& v : w.v) v /= uu;
        }

        std::vector<double> pot(g.total);
        double E = constrained_energy(nl, ai, cpl, A0, w, S);
        Field d2_warm = make_field(g);
        const int max_newton = 100;
        bool done = false;
        for (int it = 0; it < max_newton && !done; ++it) {
            Field grad = apply(A0, w);
            for (int p = 0; p < g.total; ++p)
                grad.v[p] += ai * g_kernel(nl, w.v[p]) + cpl * f_kernel(nl, w.v[p]) * S.v[p];
            double mu_hat = l2_inner(grad, u) / l2_inner(u, u);
            Field r = grad;
            for (int p = 0; p < g.total; ++p) r.v[p] -= mu_hat * u.v[p];
            double rnorm = l2_norm(r);
            if (rnorm <= std::max(tol * unorm, res_floor(w))) {
                out.mu = mu_hat;
                out.residual = rnorm;
                out.iterations = it;
                done = true;
                break;
            }
            for (int p = 0; p < g.total; ++p)
                pot[p] = ai * g_prime(nl, w.v[p]) + cpl * f_prime(nl, w.v[p]) * S.v[p];
            LinearOperator L{&g, nullptr, &pot};
            Field neg_r = r;
            for (double& v : neg_r.v) v = -v;
            CgResult d1 = cg_solve(L, neg_r, 1e-10, cg_iters);
            CgResult d2 = cg_solve(L, u, 1e-10, cg_iters, &d2_warm);
            d2_warm = d2.x;
            double ud2 = l2_inner(u, d2.x);
            if (std::abs(ud2) < 1e-14)
                throw numerical_error("solve_K: constraint direction degenerate");
            double nu = (1.0 - l2_inner(u, w) - l2_inner(u, d1.x)) / ud2;
            Field delta = d1.x;
            for (int p = 0; p < g.total; ++p) delta.v[p] += nu * d2.x.v[p];
            double dd = l2_inner(grad, delta);
            double dnorm = l2_norm(delta);
            double alpha = 1.0;
            Field trial = w;
            while (true) {
                for (int p = 0; p < g.total; ++p) trial.v[p] = w.v[p] + alpha * delta.v[p];
                double Et = constrained_energy(nl, ai, cpl, A0, trial, S);
                // near the minimum the attainable decrease |<r, delta>| sinks
                // below the rounding noise of E itself and the energy merit
                // carries no information; the energy is convex, so take the
                // full Newton step there instead of halving against noise
                double noise = 8.0 * eps * (std::abs(E) + std::abs(Et));
                bool merit_blind = rnorm * dnorm <= noise;
                if (merit_blind || Et <= E + 1e-4 * alpha * dd + noise || alpha < 1e-12) {
                    if (!merit_blind && alpha < 1e-12 && Et > E + noise)
                        throw numerical_error("solve_K: line search failed at step " +
                                              std::to_string(it));
                    w = trial;
                    E = Et;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if (!done)
            throw numerical_error("solve_K: Newton did not converge in 100 iterations");
        out.w = std::move(w);
    }

    // shared postconditions
    double constraint = l2_inner(u, out.w);
    if (std::abs(constraint - 1.0) > 1e-8)
        throw invariant_error("solve_K: constraint <u,w>=1 violated by " +
                              fmt_sci(std::abs(constraint - 1.0)));
    if (out.mu < -1e-10)
        throw invariant_error("solve_K: negative multiplier mu = " + fmt_sci(out.mu));
    Field Aw = apply(A0, out.w);
    double rr = 0.0, mu_id = 0.0;
    for (int p = 0; p < g.total; ++p) {
        double lhs = Aw.v[p] + ai * g_kernel(nl, out.w.v[p]) +
                     cpl * f_kernel(nl, out.w.v[p]) * S.v[p];
        double d = lhs - out.mu * u.v[p];
        rr += d * d;
        mu_id += lhs * out.w.v[p];
    }
    out.residual = std::sqrt(rr * g.measure);
    mu_id *= g.measure;  // equals mu when <u,w>=1
    if (std::abs(mu_id - out.mu) > 1e-6 * std::max(1.0, std::abs(out.mu)))
        throw invariant_error("solve_K: multiplier identity violated: mu=" + fmt_sci(out.mu) +
                              " vs integral " + fmt_sci(mu_id));
    double allowed = std::max(tol * unorm * 1.001 + 1e-14, res_floor(out.w));
    if (out.residual > allowed)
        throw numerical_error("solve_K: residual " + fmt_sci(out.residual) +
                              " above tolerance " + fmt_sci(allowed));
    return out;
}

}  // namespace

KSolveResult solve_K(const State& s, const NonlinearitySpec& nl, double tol,
                     const KSolveResult* warm, int workers) {
    int m = s.m();
    if (nl.m != m) throw invariant_error("solve_K: state/spec component count mismatch");
    std::vector<Field> env = coupling_env(s, nl);
    KSolveResult out;
    out.comp.resize(m);

    auto run = [&](int i) {
        const Field* warm_w = nullptr;
        if (warm != nullptr && (int)warm->comp.size() == m && warm->comp[i].w.grid == &s.grid())
            warm_w = &warm->comp[i].w;
        out.comp[i] = solve_component(s, nl, tol, env, i, warm_w);
    };

    if (workers <= 1 || m == 1) {
        for (int i = 0; i < m; ++i) run(i);
    } else {
        // components are independent; results are written to disjoint slots so
        // the outcome is bitwise identical to the sequential order
        std::vector<std::thread> pool;
        std::exception_ptr err;
        std::mutex err_mu;
        int nw = std::min(workers, m);
        for (int t = 0; t < nw; ++t) {
            pool.emplace_back([&, t] {
                for (int i = t; i < m; i += nw) {
                    try {
                        run(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mu);
                        if (!err) err = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }
    return out;
}

PseudoGradient pseudo_gradient(const State& s, const KSolveResult& k) {
    PseudoGradient pg;
    double acc = 0.0;
    for (int i = 0; i < s.m(); ++i) {
        Field V = s.u[i];
        for (int p = 0; p < s.grid().total; ++p) V.v[p] -= k.comp[i].w.v[p];
        double h1 = h1_norm(V);
        acc += h1 * h1;
        pg.V.push_back(std::move(V));
    }
    pg.h1_norm = std::sqrt(acc);
    return pg;
}

double gradient_pairing(const State& s, const NonlinearitySpec& nl,
                        const std::vector<Field>& V) {
    std::vector<Field> env = coupling_env(s, nl);
    double acc = 0.0;
    for (int i = 0; i < s.m(); ++i) {
        Field grad = energy_gradient_comp(s, nl, env, i);
        acc += l2_inner(grad, V[i]);
    }
    return 2.0 * acc;
}

}  // namespace segreflow

// Acceptance harness: twelve end-to-end checks of the solver stack, each
// printed as one PASS/FAIL line with its wall time. Stated runtime budgets
// are part of the check. The process exit code is the number of failures.
//
// C06 and C10 state desired properties of balanced sign-changing states that
// this method does not deliver (see README "Known limitations"); they are
// expected to fail and print the measured values.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "segreflow/ladder.hpp"
#include "segreflow/seed.hpp"

using namespace segreflow;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void run_criterion(int id, const std::string& label, double budget_s,
                   const std::function<Outcome()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome oc;
    try {
        oc = fn();
    } catch (const std::exception& e) {
        oc.pass = false;
        oc.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = budget_s <= 0.0 || secs < budget_s;
    bool pass = oc.pass && in_budget;
    std::printf("C%02d %s (%.1fs%s) %s%s%s\n", id, pass ? "PASS" : "FAIL", secs,
                in_budget ? "" : ", over budget", label.c_str(), oc.detail.empty() ? "" : ": ",
                oc.detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double x, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

NonlinearitySpec plain_system(int m, double beta) {
    NonlinearitySpec nl;
    nl.m = m;
    nl.a.assign(m, 0.0);
    nl.beta = beta;
    return nl;
}

State random_state(const Grid& g, int m, rng_t& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    State s = make_state(g, m);
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < g.total; ++p) s.u[i].v[p] = u(rng);
    renormalize(s);
    return s;
}

std::pair<double, double> signed_norms(const Field& u) {
    double pos = 0.0, neg = 0.0;
    for (double v : u.v) {
        if (v > 0.0) pos += v * v;
        if (v < 0.0) neg += v * v;
    }
    return {std::sqrt(pos * u.grid->measure), std::sqrt(neg * u.grid->measure)};
}

State halves_seed(const Grid& g, const std::vector<int>& k, rng_t& rng) {
    auto rects = default_trial_rects(g, (int)k.size());
    TrialPartition tp = make_trial_partition(g, rects, k, 1e-9, rng);
    return seed_from_partition(tp);
}

// shared between criteria (6 -> 7, 8/9 -> 10)
std::optional<FlowResult> g_run_k22;
std::optional<LadderReport> g_ladder_k11;
std::optional<LadderReport> g_ladder_k22;

Outcome c01_spectrum() {
    const double pi2 = M_PI * M_PI;
    double worst_disc = 0.0, worst_cont = 0.0;
    {
        Grid g = build_grid_1d(1.0, 2000);
        rng_t rng(12345);
        LinearOperator A = laplacian(g);
        EigResult e = dirichlet_eigs(A, 3, 1e-11, rng);
        for (int k = 1; k <= 3; ++k) {
            double exact = discrete_eig_1d(1.0, 2000, k);
            worst_disc = std::max(worst_disc, std::abs(e.values[k - 1] - exact) / exact);
        }
        worst_cont = std::max(worst_cont, std::abs(e.values[0] - pi2) / pi2);
        worst_cont = std::max(worst_cont, std::abs(e.values[1] - 4.0 * pi2) / (4.0 * pi2));
    }
    {
        Grid g = build_grid_2d(1.0, 1.0, 63, 63);
        rng_t rng(12345);
        LinearOperator A = laplacian(g);
        EigResult e = dirichlet_eigs(A, 2, 1e-9, rng);
        worst_cont = std::max(worst_cont, std::abs(e.values[0] - 2.0 * pi2) / (2.0 * pi2));
        worst_cont = std::max(worst_cont, std::abs(e.values[1] - 5.0 * pi2) / (5.0 * pi2));
    }
    Outcome oc;
    oc.pass = worst_disc <= 1e-10 && worst_cont <= 0.01;
    oc.detail = "discrete rel err " + fmt(worst_disc, 3) + ", continuum rel err " +
                fmt(worst_cont, 3);
    return oc;
}

Outcome c02_inequalities() {
    double worst = 0.0;
    for (double n : {1.0, 5.0, 100.0}) {
        NonlinearitySpec nl;
        nl.m = 1;
        nl.a = {1.0};
        nl.truncated = true;
        nl.n = n;
        nl.p = 1.5;
        nl.q = 2.0;
        InequalityReport rep = check_inequalities(nl, 100000, 12345 + (std::uint64_t)n);
        worst = std::max(worst, rep.worst());
    }
    Outcome oc;
    oc.pass = worst <= 1e-12;
    oc.detail = "worst violation " + fmt(worst, 3) + " over 3x100000 pairs";
    return oc;
}

Outcome c03_k_operator() {
    Grid g = build_grid_1d(1.0, 500);
    rng_t rng(12345);
    LinearOperator A = laplacian(g);

    // decoupled reduction: K fixes the ground state with mu = lambda_1
    EigResult e = dirichlet_eigs(A, 1, 1e-11, rng);
    State gs;
    gs.u = {e.vectors[0]};
    KSolveResult kr = solve_K(gs, plain_system(1, 1.0), 1e-9);
    Field diff = kr.comp[0].w;
    for (int p = 0; p < g.total; ++p) diff.v[p] -= e.vectors[0].v[p];
    double dw = l2_norm(diff);
    double dmu = std::abs(kr.comp[0].mu - e.values[0]);

    // uniqueness: the damped Newton path lands on the same solution from a
    // deliberately skewed start
    NonlinearitySpec trunc = plain_system(2, 1.0);
    trunc.a = {1.0, 1.0};
    trunc.truncated = true;
    trunc.n = 10.0;
    Grid g2 = build_grid_1d(1.0, 300);
    State rs = random_state(g2, 2, rng);
    KSolveResult r1 = solve_K(rs, trunc, 1e-10);
    KSolveResult warm = r1;
    for (int i = 0; i < 2; ++i)
        for (int p = 0; p < g2.total; ++p)
            warm.comp[i].w.v[p] = 2.0 * warm.comp[i].w.v[p] + 0.1 * rs.u[(i + 1) % 2].v[p];
    KSolveResult r2 = solve_K(rs, trunc, 1e-10, &warm);
    double dstart = 0.0;
    for (int i = 0; i < 2; ++i) {
        Field d = r1.comp[i].w;
        for (int p = 0; p < g2.total; ++p) d.v[p] -= r2.comp[i].w.v[p];
        dstart = std::max(dstart, l2_norm(d));
    }

    // constraint on 20 random states
    double worst_constraint = 0.0;
    NonlinearitySpec nl2 = plain_system(2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        State s = random_state(g2, 2, rng);
        KSolveResult k = solve_K(s, nl2, 1e-9);
        for (int i = 0; i < 2; ++i)
            worst_constraint =
                std::max(worst_constraint, std::abs(l2_inner(s.u[i], k.comp[i].w) - 1.0));
    }

    Outcome oc;
    oc.pass = dw <= 1e-7 && dmu <= 1e-6 && dstart <= 1e-7 && worst_constraint <= 1e-8;
    oc.detail = "|w-phi1| " + fmt(dw, 3) + ", |mu-lambda1| " + fmt(dmu, 3) +
                ", start sensitivity " + fmt(dstart, 3) + ", worst constraint " +
                fmt(worst_constraint, 3);
    return oc;
}

Outcome c04_descent_pairing() {
    Grid g = build_grid_1d(1.0, 300);
    rng_t rng(777);
    double worst_margin = 1e300;
    for (double beta : {1.0, 50.0}) {
        NonlinearitySpec nl = plain_system(2, beta);
        for (int trial = 0; trial < 50; ++trial) {
            State s = random_state(g, 2, rng);
            KSolveResult k = solve_K(s, nl, 1e-8);
            PseudoGradient pg = pseudo_gradient(s, k);
            double pairing = gradient_pairing(s, nl, pg.V);
            double scale = std::max(1.0, std::abs(pairing));
            double margin = pairing - 2.0 * pg.h1_norm * pg.h1_norm + 1e-6 * scale;
            worst_margin = std::min(worst_margin, margin);
        }
    }
    Outcome oc;
    oc.pass = worst_margin >= 0.0;
    oc.detail = "worst slack-adjusted margin " + fmt(worst_margin, 3) + " over 100 states";
    return oc;
}

Outcome c05_flow_invariants() {
    Grid g = build_grid_1d(1.0, 1000);
    rng_t rng(12345);
    double worst_res = 0.0, worst_norm = 0.0;
    long total_steps = 0;
    int converged = 0, monotone = 0, runs = 0;
    for (std::vector<int> k : {std::vector<int>{1, 1}, std::vector<int>{2, 1}}) {
        for (double beta : {1.0, 5.0, 10.0, 20.0, 50.0}) {
            ++runs;
            State seed = halves_seed(g, k, rng);
            FlowParams fp;
            fp.tol = 1e-6;
            fp.max_steps = 60000;
            FlowResult fr = run_flow(seed, plain_system(2, beta), fp);
            total_steps += fr.steps;
            if (fr.status == flow_status::converged) ++converged;
            bool mono = true;
            for (std::size_t i = 1; i < fr.trace.size(); ++i)
                mono = mono && fr.trace[i].J <= fr.trace[i - 1].J + 1e-9;
            if (mono) ++monotone;
            for (const auto& row : fr.trace)
                for (int c = 0; c < 2; ++c) {
                    double nrm = std::sqrt(row.pos_norm[c] * row.pos_norm[c] +
                                           row.neg_norm[c] * row.neg_norm[c]);
                    worst_norm = std::max(worst_norm, std::abs(nrm - 1.0));
                }
            worst_res = std::max(worst_res, fr.max_residual);
        }
    }
    Outcome oc;
    oc.pass = converged == runs && monotone == runs && worst_norm <= 1e-12 && worst_res <= 1e-5;
    oc.detail = std::to_string(converged) + "/" + std::to_string(runs) + " converged, " +
                std::to_string(monotone) + "/" + std::to_string(runs) +
                " monotone, worst norm dev " + fmt(worst_norm, 3) + ", worst residual " +
                fmt(worst_res, 3) + ", " + std::to_string(total_steps) + " steps";
    return oc;
}

Outcome c06_sign_persistence() {
    Grid g = build_grid_1d(1.0, 1000);
    rng_t rng(12345);
    State seed = halves_seed(g, {2, 2}, rng);
    FlowParams fp;
    fp.tol = 1e-6;
    fp.max_steps = 80000;
    FlowResult fr = run_flow(seed, plain_system(2, 100.0), fp);
    g_run_k22 = fr;

    Outcome oc;
    if (fr.status != flow_status::converged) {
        oc.pass = false;
        oc.detail = "flow did not converge";
        return oc;
    }
    double worst = 1e300;
    std::string parts;
    for (int i = 0; i < 2; ++i) {
        auto [pos, neg] = signed_norms(fr.state.u[i]);
        worst = std::min(worst, std::min(pos, neg));
        parts += (i ? ", " : "") + std::string("component ") + std::to_string(i + 1) + " min(+,-) " +
                 fmt(std::min(pos, neg), 3);
    }
    oc.pass = worst >= 0.1;
    oc.detail = parts + " (need >= 0.1)";
    return oc;
}

Outcome c07_sandwich() {
    const double pi2 = M_PI * M_PI;
    Grid g = build_grid_1d(1.0, 400);
    rng_t rng(12345);
    auto rects = default_trial_rects(g, 2);
    TrialPartition tp = make_trial_partition(g, rects, {2, 2}, 1e-9, rng);
    BoundsReport bounds = bounds_report(g, tp, 1e-9, rng);

    bool ok = true;
    std::string js;
    for (double beta : {1.0, 10.0}) {
        State seed = seed_from_partition(tp);
        FlowParams fp;
        fp.tol = 1e-5;
        fp.max_steps = 60000;
        FlowResult fr = run_flow(seed, plain_system(2, beta), fp);
        ok = ok && fr.status == flow_status::converged;
        ok = ok && bounds.lower <= fr.J + 1e-9 && fr.J <= bounds.upper * 1.01;
        ok = ok && 2.0 * pi2 <= fr.J + 1e-9 && fr.J <= 32.0 * pi2 * 1.01;
        js += (js.empty() ? "" : ", ") + std::string("J(beta=") + fmt(beta, 3) + ") = " + fmt(fr.J);
    }
    if (g_run_k22 && g_run_k22->status == flow_status::converged) {
        double J = g_run_k22->J;
        ok = ok && 2.0 * pi2 <= J + 1e-9 && J <= 32.0 * pi2 * 1.01;
        js += ", J(beta=100) = " + fmt(J);
    }
    Outcome oc;
    oc.pass = ok;
    oc.detail = js + "; window [" + fmt(2.0 * pi2) + ", " + fmt(32.0 * pi2 * 1.01) + "]";
    return oc;
}

LadderReport run_ladder_1000(const std::vector<int>& k, long max_steps) {
    Grid g = build_grid_1d(1.0, 1000);
    rng_t rng(12345);
    State seed = halves_seed(g, k, rng);
    LadderParams lp;
    lp.schedule = {1.0, 10.0, 100.0, 1000.0};
    lp.explicit_schedule = true;
    lp.k = k;
    lp.flow.tol = 1e-5;
    lp.flow.max_steps = max_steps;
    NonlinearitySpec nl = plain_system(2, 1.0);
    return run_ladder(seed, nl, lp, rng);
}

Outcome c08_first_eigen_partition() {
    const double target = 8.0 * M_PI * M_PI;
    LadderReport rep = run_ladder_1000({1, 1}, 60000);
    g_ladder_k11 = rep;
    bool all_conv = true;
    for (const auto& r : rep.rungs) all_conv = all_conv && r.status == flow_status::converged;
    const LadderRung& last = rep.rungs.back();
    double rel = std::abs(last.partition_energy - target) / target;
    double iface = last.interfaces.empty() ? -1.0 : last.interfaces[0];
    for (double x : last.interfaces)
        if (std::abs(x - 0.5) < std::abs(iface - 0.5)) iface = x;
    Outcome oc;
    oc.pass = all_conv && rel <= 0.02 && !last.interfaces.empty() && std::abs(iface - 0.5) <= 0.02;
    oc.detail = "partition energy " + fmt(last.partition_energy) + " vs " + fmt(target) +
                " (rel " + fmt(rel, 3) + "), interface at " + fmt(iface);
    return oc;
}

Outcome c09_second_eigen_partition() {
    const double target = 32.0 * M_PI * M_PI;
    LadderReport rep = run_ladder_1000({2, 2}, 80000);
    g_ladder_k22 = rep;
    bool all_conv = true;
    for (const auto& r : rep.rungs) all_conv = all_conv && r.status == flow_status::converged;
    const LadderRung& last = rep.rungs.back();
    double rel = std::abs(last.partition_energy - target) / target;
    Outcome oc;
    oc.pass = all_conv && rel <= 0.05;
    oc.detail = "partition energy " + fmt(last.partition_energy) + " vs oracle " + fmt(target) +
                " (rel " + fmt(rel, 3) + ")";
    return oc;
}

Outcome c10_defect_decay() {
    Outcome oc;
    if (!g_ladder_k11 || !g_ladder_k22) {
        oc.pass = false;
        oc.detail = "prerequisite ladders unavailable";
        return oc;
    }
    bool ok = true;
    std::string seqs;
    for (const auto* rep : {&*g_ladder_k11, &*g_ladder_k22}) {
        std::string seq;
        for (std::size_t r = 0; r < rep->rungs.size(); ++r) {
            double d = rep->rungs[r].defect;
            seq += (r ? ", " : "") + fmt(d, 4);
            if (r > 0) ok = ok && d <= rep->rungs[r - 1].defect * (1.0 + 1e-9);
        }
        ok = ok && rep->rungs.back().defect <= 0.1 * rep->rungs.front().defect;
        seqs += (seqs.empty() ? "k=(1,1): " : "; k=(2,2): ") + seq;
    }
    oc.pass = ok;
    oc.detail = "defect over beta = {1,10,100,1000}: " + seqs;
    return oc;
}

Outcome c11_square_smoke() {
    const double pi2 = M_PI * M_PI;
    Grid g = build_grid_2d(1.0, 1.0, 96, 96);
    rng_t rng(12345);
    State seed = halves_seed(g, {1, 1}, rng);
    FlowParams fp;
    fp.tol = 1e-5;
    fp.max_steps = 30000;
    FlowResult fr = run_flow(seed, plain_system(2, 200.0), fp);
    Outcome oc;
    if (fr.status != flow_status::converged) {
        oc.pass = false;
        oc.detail = "did not converge in " + std::to_string(fr.steps) + " steps";
        return oc;
    }
    Partition part = extract_partition(fr.state, 1e-3);
    oc.pass = part.uncovered_fraction <= 0.05 && fr.J <= 10.0 * pi2 * 1.05;
    oc.detail = "J " + fmt(fr.J) + " (cap " + fmt(10.0 * pi2 * 1.05) + "), uncovered " +
                fmt(part.uncovered_fraction, 3) + ", " + std::to_string(fr.steps) + " steps";
    return oc;
}

int shell(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

Outcome c12_determinism() {
    const char* cfg_path = "acceptance_det.json";
    {
        std::ofstream f(cfg_path);
        f << R"({"grid": [200], "m": 2, "k": [1, 1], "beta": 10.0,
                 "flow": {"tol": 1e-5, "max_steps": 30000}})";
    }
    std::string base = std::string("\"") + SEGREFLOW_CLI_PATH + "\" --config " + cfg_path;
    int rc1 = shell(base + " --out acceptance_det_a solve > /dev/null 2>&1");
    int rc2 = shell(base + " --out acceptance_det_b solve > /dev/null 2>&1");
    Outcome oc;
    if (rc1 != 0 || rc2 != 0) {
        oc.pass = false;
        oc.detail = "solver exit codes " + std::to_string(rc1) + ", " + std::to_string(rc2);
        return oc;
    }
    std::string a = slurp("acceptance_det_a/summary.json");
    std::string b = slurp("acceptance_det_b/summary.json");
    std::string ta = slurp("acceptance_det_a/trace.csv");
    std::string tb = slurp("acceptance_det_b/trace.csv");
    oc.pass = !a.empty() && a == b && !ta.empty() && ta == tb;
    oc.detail = oc.pass ? "summary and trace byte-identical across runs"
                        : "outputs differ between identical runs";
    std::remove(cfg_path);
    return oc;
}

}  // namespace

int main() {
    run_criterion(1, "spectrum matches discrete and continuum references", 30.0, c01_spectrum);
    run_criterion(2, "kernel inequality suite has no violations above 1e-12", 5.0,
                  c02_inequalities);
    run_criterion(3, "auxiliary solve: fixed point, start independence, constraint", 60.0,
                  c03_k_operator);
    run_criterion(4, "descent pairing dominates twice the squared step norm", 120.0,
                  c04_descent_pairing);
    run_criterion(5, "flow keeps energy monotone and the constraint exact", 300.0,
                  c05_flow_invariants);
    run_criterion(6, "sign-changing components persist at beta=100", 0.0, c06_sign_persistence);
    run_criterion(7, "converged energies sit between the spectral bounds", 0.0, c07_sandwich);
    run_criterion(8, "first-eigenvalue ladder reaches the certified optimum", 600.0,
                  c08_first_eigen_partition);
    run_criterion(9, "second-eigenvalue ladder approaches the certified optimum", 900.0,
                  c09_second_eigen_partition);
    run_criterion(10, "segregation defect decays along both ladders", 0.0, c10_defect_decay);
    run_criterion(11, "unit-square run converges to a covering partition", 1800.0,
                  c11_square_smoke);
    run_criterion(12, "identical config and seed give identical output bytes", 0.0,
                  c12_determinism);

    std::printf("acceptance: %d/12 criteria passed\n", 12 - g_failures);
    return g_failures;
}

#include "segreflow/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace {
std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}
}  // namespace

namespace segreflow {

double rayleigh(const LinearOperator& A, const Field& u) {
    Field Au = apply(A, u);
    double uu = l2_inner(u, u);
    if (uu == 0.0) throw invariant_error("rayleigh: zero field");
    return l2_inner(Au, u) / uu;
}

double discrete_eig_1d(double extent, int n, int k) {
    double h = extent / (n + 1);
    double s = std::sin(0.5 * k * M_PI * h / extent);
    return 4.0 / (h * h) * s * s;
}

// subtract the projections onto already-converged vectors (classical GS, two
// passes for stability)
static void deflate(Field& y, const std::vector<Field>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const Field& b : basis) {
            double c = l2_inner(y, b);
            for (int i = 0; i < y.grid->total; ++i) y.v[i] -= c * b.v[i];
        }
}

static void fix_sign(Field& v) {
    int p = 0;
    double best = 0.0;
    for (int i = 0; i < v.grid->total; ++i) {
        double a = std::abs(v.v[i]);
        if (a > best) {
            best = a;
            p = i;
        }
    }
    if (v.v[p] < 0.0)
        for (double& x : v.v) x = -x;
}

EigResult dirichlet_eigs(const LinearOperator& A, int k, double tol, rng_t& rng) {
    const Grid& g = *A.grid;
    int subspace = g.total;
    if (A.mask != nullptr) subspace = A.mask->count_on;
    if (k < 1) throw config_error("dirichlet_eigs: k must be >= 1");
    if (k > subspace)
        throw config_error("dirichlet_eigs: requested " + std::to_string(k) +
                           " pairs from a subspace of dimension " + std::to_string(subspace));

    EigResult out;
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const int max_outer = 500;
    const int cg_iters = 40 * g.total + 1000;

    // residuals cannot beat the rounding floor of applying A (Gershgorin bound
    // on |A|_2: row sums are at most twice the diagonal for this stencil);
    // deflation against earlier pairs compounds it, hence the generous factor
    double max_diag = 0.0;
    for (int i = 0; i < g.total; ++i) max_diag = std::max(max_diag, A.diag(i));
    const double res_floor = 32.0 * std::numeric_limits<double>::epsilon() * 2.0 * max_diag;

    for (int j = 0; j < k; ++j) {
        Field x = make_field(g);
        for (int i = 0; i < g.total; ++i) {
            double r = unif(rng);  // draw unconditionally: rng stream is mask-independent
            if (A.mask == nullptr || A.mask->on[i]) x.v[i] = r;
        }
        deflate(x, out.vectors);
        double nx = l2_norm(x);
        if (nx == 0.0) throw numerical_error("dirichlet_eigs: degenerate start vector");
        for (double& v : x.v) v /= nx;

        double lambda = 0.0, res = 0.0;
        bool converged = false;
        for (int outer = 0; outer < max_outer; ++outer) {
            CgResult sol = cg_solve(A, x, 1e-10, cg_iters, outer > 0 ? &x : nullptr);
            Field& y = sol.x;
            deflate(y, out.vectors);
            double ny = l2_norm(y);
            if (ny == 0.0) throw numerical_error("dirichlet_eigs: iterate vanished");
            for (double& v : y.v) v /= ny;
            Field Ay = apply(A, y);
            lambda = l2_inner(Ay, y);
            double rr = 0.0;
            for (int i = 0; i < g.total; ++i) {
                double d = Ay.v[i] - lambda * y.v[i];
                rr += d * d;
            }
            res = std::sqrt(rr * g.measure);
            x = y;
            if (res <= std::max(tol * std::abs(lambda), res_floor)) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw numerical_error("dirichlet_eigs: pair " + std::to_string(j + 1) +
                                  " did not reach relative residual " + fmt_sci(tol) +
                                  " (achieved " + fmt_sci(res / std::abs(lambda)) + ")");
        fix_sign(x);
        out.vectors.push_back(std::move(x));
        out.values.push_back(lambda);
        out.residuals.push_back(res);
    }

    // ascending order; deflated inverse iteration yields this already, but a
    // near-degenerate pair can land out of order at solver precision
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return out.values[a] < out.values[b]; });
    EigResult sorted;
    for (int i : idx) {
        sorted.values.push_back(out.values[i]);
        sorted.vectors.push_back(std::move(out.vectors[i]));
        sorted.residuals.push_back(out.residuals[i]);
    }

    // re-orthonormalize clusters of near-degenerate values
    for (int i = 1; i < k; ++i) {
        if (std::abs(sorted.values[i] - sorted.values[i - 1]) <=
            1e-8 * std::max(std::abs(sorted.values[i]), 1.0)) {
            Field& v = sorted.vectors[i];
            const Field& prev = sorted.vectors[i - 1];
            double c = l2_inner(v, prev);
            for (int p = 0; p < g.total; ++p) v.v[p] -= c * prev.v[p];
            double nv = l2_norm(v);
            if (nv > 0.0)
                for (double& x : v.v) x /= nv;
            sorted.values[i] = rayleigh(A, v);
        }
    }
    return sorted;
}

}  // namespace segreflow

#include "segreflow/linops.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace segreflow {

LinearOperator laplacian(const Grid& g) { return LinearOperator{&g, nullptr, nullptr}; }

LinearOperator laplacian(const Grid& g, const SubdomainMask& mask) {
    return LinearOperator{&g, &mask, nullptr};
}

double LinearOperator::diag(int p) const {
    if (mask != nullptr && !mask->on[p]) return 1.0;
    const Grid& g = *grid;
    double d = 2.0 / (g.h[0] * g.h[0]);
    if (g.dim == 2) d += 2.0 / (g.h[1] * g.h[1]);
    if (potential != nullptr) d += (*potential)[p];
    return d;
}

void apply(const LinearOperator& A, const std::vector<double>& in, std::vector<double>& out) {
    const Grid& g = *A.grid;
    out.resize(g.total);
    const std::uint8_t* on = A.mask != nullptr ? A.mask->on.data() : nullptr;
    const double* V = A.potential != nullptr ? A.potential->data() : nullptr;
    const double ix2 = 1.0 / (g.h[0] * g.h[0]);
    const double iy2 = g.dim == 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    const double center = 2.0 * ix2 + (g.dim == 2 ? 2.0 * iy2 : 0.0);
    const int nx = g.n[0], ny = g.n[1];
    for (int iy = 0; iy < ny; ++iy) {
        for (int ixx = 0; ixx < nx; ++ixx) {
            int p = iy * nx + ixx;
            if (on != nullptr && !on[p]) {
                out[p] = in[p];
                continue;
            }
            double acc = center * in[p];
            auto nb = [&](int q, double w) {
                if (on == nullptr || on[q]) acc -= w * in[q];
            };
            if (ixx > 0) nb(p - 1, ix2);
            if (ixx < nx - 1) nb(p + 1, ix2);
            if (g.dim == 2) {
                if (iy > 0) nb(p - nx, iy2);
                if (iy < ny - 1) nb(p + nx, iy2);
            }
            if (V != nullptr) acc += V[p] * in[p];
            out[p] = acc;
        }
    }
}

Field apply(const LinearOperator& A, const Field& u) {
    Field out = make_field(*A.grid);
    apply(A, u.v, out.v);
    return out;
}

double h1_norm(const Field& u) {
    LinearOperator A = laplacian(*u.grid);
    Field Au = apply(A, u);
    return std::sqrt(l2_inner(Au, u));
}

static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

static double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

static std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

CgResult cg_solve(const LinearOperator& A, const Field& rhs, double rel_tol, int max_iter,
                  const Field* x0) {
    const Grid& g = *A.grid;
    if (rhs.grid != &g) throw invariant_error("cg_solve: rhs grid mismatch");
    const int n = g.total;

    CgResult res;
    res.x = x0 != nullptr ? *x0 : make_field(g);

    double bnorm = nrm2(rhs.v);
    if (bnorm == 0.0) {
        res.x = make_field(g);
        return res;
    }

    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) inv_diag[i] = 1.0 / A.diag(i);

    std::vector<double> r(n), z(n), p(n), Ap(n);
    apply(A, res.x.v, Ap);
    for (int i = 0; i < n; ++i) r[i] = rhs.v[i] - Ap[i];
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);

    double target = rel_tol * bnorm;
    double best_true = std::numeric_limits<double>::infinity();
    int stalls = 0;
    int it = 0;
    while (it < max_iter) {
        if (nrm2(r) <= target) {
            // recurrence says converged; confirm with the true residual
            apply(A, res.x.v, Ap);
            double true_res = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = rhs.v[i] - Ap[i];
                true_res += d * d;
            }
            true_res = std::sqrt(true_res);
            if (true_res <= target) {
                res.iterations = it;
                res.residual = true_res / bnorm;
                return res;
            }
            // true residual above target: either keep polishing or accept the
            // rounding floor once repeated confirmations stop improving
            if (true_res >= 0.9 * best_true) {
                if (++stalls >= 3) {
                    res.iterations = it;
                    res.residual = true_res / bnorm;
                    return res;
                }
            } else {
                stalls = 0;
            }
            best_true = std::min(best_true, true_res);
            for (int i = 0; i < n; ++i) r[i] = rhs.v[i] - Ap[i];
            for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
            p = z;
            rz = dot(r, z);
        }
        apply(A, p, Ap);
        double pAp = dot(p, Ap);
        if (pAp <= 0.0)
            throw invariant_error("cg_solve: operator not positive definite (pAp <= 0)");
        double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) res.x.v[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++it;
    }
    apply(A, res.x.v, Ap);
    double true_res = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = rhs.v[i] - Ap[i];
        true_res += d * d;
    }
    true_res = std::sqrt(true_res);
    if (true_res <= target) {
        res.iterations = it;
        res.residual = true_res / bnorm;
        return res;
    }
    throw numerical_error("cg_solve: no convergence after " + std::to_string(max_iter) +
                          " iterations, residual " + fmt_sci(true_res / bnorm) + " (target " +
                          fmt_sci(rel_tol) + ")");
}

}  // namespace segreflow

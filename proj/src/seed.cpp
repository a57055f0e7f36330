#include "segreflow/seed.hpp"

#include <cmath>

namespace segreflow {

std::vector<std::vector<Rect>> default_trial_rects(const Grid& g, int m) {
    std::vector<std::vector<Rect>> rects(m);
    double w = g.extent[0] / m;
    for (int i = 0; i < m; ++i) {
        Rect r;
        r.xlo = i * w;
        r.xhi = (i + 1) * w;
        r.ylo = 0.0;
        r.yhi = g.dim == 2 ? g.extent[1] : 0.0;
        rects[i] = {r};
    }
    return rects;
}

TrialPartition make_trial_partition(const Grid& g, const std::vector<std::vector<Rect>>& rects,
                                    const std::vector<int>& k, double eig_tol, rng_t& rng,
                                    bool allow_high_k) {
    int m = (int)k.size();
    if (m < 1) throw config_error("trial partition: need at least one component");
    if ((int)rects.size() != m)
        throw config_error("trial partition: rectangle lists (" + std::to_string(rects.size()) +
                           ") must match component count (" + std::to_string(m) + ")");
    for (int ki : k) {
        if (ki < 1) throw config_error("trial partition: k entries must be >= 1");
        if (ki > 2 && !allow_high_k)
            throw config_error("trial partition: k=" + std::to_string(ki) +
                               " requires the experimental high-k flag");
    }

    TrialPartition tp;
    tp.grid = &g;
    tp.k = k;
    for (int i = 0; i < m; ++i) {
        SubdomainMask mask = mask_from_rects(g, rects[i]);
        if (mask.count_on == 0)
            throw config_error("trial partition: subdomain " + std::to_string(i + 1) +
                               " contains no grid points");
        tp.masks.push_back(std::move(mask));
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (!masks_disjoint(tp.masks[i], tp.masks[j]))
                throw config_error("trial partition: subdomains " + std::to_string(i + 1) +
                                   " and " + std::to_string(j + 1) + " overlap");

    for (int i = 0; i < m; ++i) {
        LinearOperator A = laplacian(g, tp.masks[i]);
        tp.eigs.push_back(dirichlet_eigs(A, k[i], eig_tol, rng));
    }
    return tp;
}

// squared L2 norm of the positive part of cos(t) phi1 + sin(t) phi2
static double positive_mass(const Field& phi1, const Field& phi2, double t) {
    double c = std::cos(t), s = std::sin(t);
    double acc = 0.0;
    for (int p = 0; p < phi1.grid->total; ++p) {
        double v = c * phi1.v[p] + s * phi2.v[p];
        if (v > 0.0) acc += v * v;
    }
    return acc * phi1.grid->measure;
}

static Field balanced_combination(const Field& phi1, const Field& phi2, double t0) {
    const double tol = 1e-6;
    auto g = [&](double t) { return positive_mass(phi1, phi2, t) - 0.5; };
    double a = t0, b = t0 + M_PI;
    double ga = g(a), gb = g(b);
    double t = a;
    if (std::abs(ga) <= tol) {
        t = a;
    } else if (std::abs(gb) <= tol) {
        t = b;
    } else {
        if (ga * gb > 0.0)
            throw numerical_error("seed balance: bracket endpoints have equal sign");
        bool found = false;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            double gm = g(mid);
            if (std::abs(gm) <= tol) {
                t = mid;
                found = true;
                break;
            }
            if (ga * gm <= 0.0) {
                b = mid;
                gb = gm;
            } else {
                a = mid;
                ga = gm;
            }
        }
        if (!found)
            throw numerical_error("seed balance: bisection did not reach 1e-6 in 200 steps");
    }
    Field u = make_field(*phi1.grid);
    double c = std::cos(t), s = std::sin(t);
    for (int p = 0; p < phi1.grid->total; ++p) u.v[p] = c * phi1.v[p] + s * phi2.v[p];
    return u;
}

State seed_from_partition(const TrialPartition& tp, const std::vector<double>& mix) {
    int m = (int)tp.k.size();
    if (!mix.empty() && (int)mix.size() != m)
        throw config_error("seed: mix angles must have one entry per component");
    State s;
    for (int i = 0; i < m; ++i) {
        const EigResult& e = tp.eigs[i];
        double t0 = mix.empty() ? 0.0 : mix[i];
        if (tp.k[i] == 1) {
            s.u.push_back(e.vectors[0]);
        } else if (tp.k[i] == 2) {
            s.u.push_back(balanced_combination(e.vectors[0], e.vectors[1], t0));
        } else {
            Field u = make_field(*tp.grid);
            for (int j = 0; j < tp.k[i]; ++j)
                for (int p = 0; p < tp.grid->total; ++p) u.v[p] += e.vectors[j].v[p];
            s.u.push_back(std::move(u));
        }
    }
    renormalize(s);
    return s;
}

double upper_bound_c_infty(const TrialPartition& tp) {
    double ub = 0.0;
    for (std::size_t i = 0; i < tp.k.size(); ++i) ub += tp.eigs[i].values[tp.k[i] - 1];
    return ub;
}

double lower_bound(const Grid& g, const std::vector<int>& k, double eig_tol, rng_t& rng) {
    int kmax = 0;
    for (int ki : k) kmax = std::max(kmax, ki - 1);
    if (kmax == 0) return 0.0;
    LinearOperator A = laplacian(g);
    EigResult e = dirichlet_eigs(A, kmax, eig_tol, rng);
    double lb = 0.0;
    for (int ki : k)
        if (ki >= 2) lb += e.values[ki - 2];
    return lb;
}

BoundsReport bounds_report(const Grid& g, const TrialPartition& tp, double eig_tol, rng_t& rng) {
    BoundsReport rep;
    int kmax = 0;
    for (int ki : tp.k) kmax = std::max(kmax, ki - 1);
    EigResult whole;
    if (kmax > 0) {
        LinearOperator A = laplacian(g);
        whole = dirichlet_eigs(A, kmax, eig_tol, rng);
    }
    for (std::size_t i = 0; i < tp.k.size(); ++i) {
        double lo = tp.k[i] >= 2 ? whole.values[tp.k[i] - 2] : 0.0;
        double hi = tp.eigs[i].values[tp.k[i] - 1];
        rep.lambda_lower.push_back(lo);
        rep.lambda_upper.push_back(hi);
        rep.lower += lo;
        rep.upper += hi;
    }
    return rep;
}

}  // namespace segreflow

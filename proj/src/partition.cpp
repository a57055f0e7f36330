#include "segreflow/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace segreflow {

Partition extract_partition(const State& s, double tol) {
    const Grid& g = s.grid();
    int m = s.m();
    Partition part;
    part.grid = &g;
    for (int i = 0; i < m; ++i) part.masks.push_back(make_mask(g));

    std::vector<double> thresh(m);
    for (int i = 0; i < m; ++i) {
        double peak = linf_norm(s.u[i]);
        if (peak == 0.0)
            throw numerical_error("extract_partition: component " + std::to_string(i + 1) +
                                  " is identically zero");
        thresh[i] = tol * peak;
    }

    int uncovered = 0;
    for (int p = 0; p < g.total; ++p) {
        int exceed = 0, best = -1;
        double best_val = 0.0;
        for (int i = 0; i < m; ++i) {
            double a = std::abs(s.u[i].v[p]);
            if (a > thresh[i]) {
                ++exceed;
                if (a > best_val) {  // strict: equal values keep the lower index
                    best_val = a;
                    best = i;
                }
            }
        }
        if (best < 0) {
            ++uncovered;
            continue;
        }
        if (exceed >= 2) ++part.overlap_count;
        part.masks[best].on[p] = 1;
        ++part.masks[best].count_on;
    }
    part.uncovered_fraction = double(uncovered) / double(g.total);

    for (int i = 0; i < m; ++i)
        if (part.masks[i].count_on == 0)
            throw numerical_error("extract_partition: degenerate partition, component " +
                                  std::to_string(i + 1) + " has empty support");
    return part;
}

double partition_energy(Partition& part, const std::vector<int>& k, double eig_tol, rng_t& rng) {
    int m = (int)part.masks.size();
    if ((int)k.size() != m)
        throw config_error("partition_energy: k must have one entry per component");
    part.lambda1.assign(m, 0.0);
    part.lambda2.assign(m, 0.0);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        int ki = k[i];
        if (ki < 1) throw config_error("partition_energy: k entries must be >= 1");
        int want = std::max(2, ki);
        want = std::min(want, part.masks[i].count_on);
        LinearOperator A = laplacian(*part.grid, part.masks[i]);
        EigResult e = dirichlet_eigs(A, want, eig_tol, rng);
        part.lambda1[i] = e.values[0];
        part.lambda2[i] = want >= 2 ? e.values[1] : 0.0;
        if (ki > want)
            throw config_error("partition_energy: subdomain " + std::to_string(i + 1) +
                               " too small for k=" + std::to_string(ki));
        total += e.values[ki - 1];
    }
    return total;
}

double segregation_defect(const State& s, double beta) {
    const Grid& g = s.grid();
    int m = s.m();
    double worst = 0.0;
    std::vector<std::vector<double>> sq(m, std::vector<double>(g.total));
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < g.total; ++p) sq[i][p] = s.u[i].v[p] * s.u[i].v[p];
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double acc = 0.0;
            for (int p = 0; p < g.total; ++p) acc += sq[i][p] * sq[j][p];
            worst = std::max(worst, beta * acc * g.measure);
        }
    return worst;
}

std::vector<double> interface_points_1d(const Partition& part) {
    const Grid& g = *part.grid;
    if (g.dim != 1) throw config_error("interface_points_1d: 1D partitions only");
    int m = (int)part.masks.size();
    std::vector<double> cuts;
    int prev_label = -1;
    double prev_x = 0.0;
    for (int p = 0; p < g.total; ++p) {
        int label = -1;
        for (int i = 0; i < m; ++i)
            if (part.masks[i].on[p]) {
                label = i;
                break;
            }
        if (label < 0) continue;  // uncovered gap
        double x = g.coord(0, p);
        if (prev_label >= 0 && label != prev_label) cuts.push_back(0.5 * (prev_x + x));
        prev_label = label;
        prev_x = x;
    }
    return cuts;
}

namespace {

// spectrum of a union of intervals: k-th smallest of {j^2 pi^2 / len^2}
double union_lambda_k(const std::vector<double>& lengths, int k) {
    std::vector<double> vals;
    for (double len : lengths)
        for (int j = 1; j <= k; ++j) vals.push_back(double(j) * j * M_PI * M_PI / (len * len));
    std::sort(vals.begin(), vals.end());
    return vals[k - 1];
}

// canonical form: relabel by first appearance, then min with the reversed
// string's relabeling (mirror symmetry)
std::string canonical_layout(const std::string& lay, int m) {
    auto relabel = [&](const std::string& x) {
        std::vector<int> map(m, -1);
        int next = 0;
        std::string out = x;
        for (char& c : out) {
            int v = c - '0';
            if (map[v] < 0) map[v] = next++;
            c = char('0' + map[v]);
        }
        return out;
    };
    std::string fwd = relabel(lay);
    std::string rev = relabel(std::string(lay.rbegin(), lay.rend()));
    return std::min(fwd, rev);
}

}  // namespace

Oracle1DResult oracle_1d(int m, const std::vector<int>& k, int segments) {
    if (m < 1 || (int)k.size() != m)
        throw config_error("oracle_1d: k must have one entry per component");
    if (segments < m || segments > 16)
        throw config_error("oracle_1d: segments must lie in [m, 16]");
    for (int ki : k)
        if (ki < 1) throw config_error("oracle_1d: k entries must be >= 1");
    double count = std::pow(double(m), segments);
    if (count > double(1 << 27))
        throw config_error("oracle_1d: enumeration too large (m^segments > 2^27)");

    double seg_len = 1.0 / segments;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::string>> hits;

    std::string lay(segments, '0');
    std::vector<int> digits(segments, 0);
    long long total = 1;
    for (int i = 0; i < segments; ++i) total *= m;

    std::vector<std::vector<double>> runs(m);
    for (long long idx = 0; idx < total; ++idx) {
        long long v = idx;
        for (int i = 0; i < segments; ++i) {
            digits[i] = int(v % m);
            lay[i] = char('0' + digits[i]);
            v /= m;
        }
        std::string canon = canonical_layout(lay, m);
        if (canon != lay) continue;  // symmetry-pruned duplicate

        for (auto& r : runs) r.clear();
        int run_label = digits[0], run_len = 1;
        bool all_used = true;
        for (int i = 1; i <= segments; ++i) {
            if (i < segments && digits[i] == run_label) {
                ++run_len;
                continue;
            }
            runs[run_label].push_back(run_len * seg_len);
            if (i < segments) {
                run_label = digits[i];
                run_len = 1;
            }
        }
        double value = 0.0;
        for (int i = 0; i < m; ++i) {
            if (runs[i].empty()) {
                all_used = false;
                break;
            }
            value += union_lambda_k(runs[i], k[i]);
        }
        if (!all_used) continue;
        if (hits.empty() || value < best - 1e-9 * std::max(1.0, std::abs(best))) {
            best = value;
            hits.clear();
        }
        if (value <= best + 1e-9 * std::max(1.0, std::abs(best)))
            hits.push_back({value, lay});
    }
    if (hits.empty()) throw config_error("oracle_1d: no labeling uses every component");

    Oracle1DResult out;
    out.value = best;
    for (auto& h : hits) out.layouts.push_back(h.second);
    std::sort(out.layouts.begin(), out.layouts.end());
    out.layouts.erase(std::unique(out.layouts.begin(), out.layouts.end()), out.layouts.end());
    return out;
}

void write_partition_pgm(const Partition& part, const std::string& path) {
    const Grid& g = *part.grid;
    if (g.dim != 2) throw config_error("write_partition_pgm: 2D partitions only");
    int m = (int)part.masks.size();
    int level = 255 / m;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open " + path + " for writing");
    f << "P5\n" << g.n[0] << " " << g.n[1] << "\n255\n";
    for (int iy = g.n[1] - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < g.n[0]; ++ix) {
            int p = g.index(ix, iy);
            unsigned char pix = 0;
            for (int i = 0; i < m; ++i)
                if (part.masks[i].on[p]) {
                    pix = (unsigned char)((i + 1) * level);
                    break;
                }
            f.put(char(pix));
        }
    }
    if (!f) throw config_error("failed writing " + path);
}

void write_partition_csv(const Partition& part, const std::string& path) {
    const Grid& g = *part.grid;
    if (g.dim != 1) throw config_error("write_partition_csv: 1D partitions only");
    std::ofstream f(path);
    if (!f) throw config_error("cannot open " + path + " for writing");
    f << "component,xlo,xhi\n";
    int m = (int)part.masks.size();
    double half = 0.5 * g.h[0];
    for (int i = 0; i < m; ++i) {
        int p = 0;
        while (p < g.total) {
            if (!part.masks[i].on[p]) {
                ++p;
                continue;
            }
            int q = p;
            while (q + 1 < g.total && part.masks[i].on[q + 1]) ++q;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i + 1, g.coord(0, p) - half,
                          g.coord(0, q) + half);
            f << buf;
            p = q + 1;
        }
    }
    if (!f) throw config_error("failed writing " + path);
}

}  // namespace segreflow

#include "segreflow/grid.hpp"

#include <cmath>
#include <queue>

namespace segreflow {

Grid build_grid_1d(double extent, int interior_count) {
    if (!(extent > 0.0))
        throw config_error("grid extent must be positive, got " + std::to_string(extent));
    if (interior_count < 1)
        throw config_error("grid interior count must be >= 1, got " +
                           std::to_string(interior_count));
    Grid g;
    g.dim = 1;
    g.extent = {extent, 0.0};
    g.n = {interior_count, 1};
    g.h = {extent / (interior_count + 1), 0.0};
    g.total = interior_count;
    g.measure = g.h[0];
    return g;
}

Grid build_grid_2d(double extent_x, double extent_y, int nx, int ny) {
    if (!(extent_x > 0.0) || !(extent_y > 0.0))
        throw config_error("grid extents must be positive");
    if (nx < 1 || ny < 1)
        throw config_error("grid interior counts must be >= 1");
    Grid g;
    g.dim = 2;
    g.extent = {extent_x, extent_y};
    g.n = {nx, ny};
    g.h = {extent_x / (nx + 1), extent_y / (ny + 1)};
    g.total = nx * ny;
    g.measure = g.h[0] * g.h[1];
    return g;
}

Field make_field(const Grid& g) { return Field{&g, std::vector<double>(g.total, 0.0)}; }

Field make_field(const Grid& g, double fill) {
    return Field{&g, std::vector<double>(g.total, fill)};
}

static void require_same_grid(const Grid* a, const Grid* b) {
    if (a == nullptr || b == nullptr || a != b)
        throw invariant_error("fields live on different grids");
}

double l2_inner(const Field& a, const Field& b) {
    require_same_grid(a.grid, b.grid);
    double s = 0.0;
    for (int i = 0; i < a.grid->total; ++i) s += a.v[i] * b.v[i];
    return s * a.grid->measure;
}

double l2_norm(const Field& a) { return std::sqrt(l2_inner(a, a)); }

double linf_norm(const Field& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

SubdomainMask make_mask(const Grid& g, bool fill) {
    SubdomainMask m;
    m.grid = &g;
    m.on.assign(g.total, fill ? 1 : 0);
    m.count_on = fill ? g.total : 0;
    return m;
}

SubdomainMask support_mask(const Field& u, double tol) {
    double peak = linf_norm(u);
    if (peak == 0.0)
        throw config_error("support_mask: field is identically zero");
    SubdomainMask m = make_mask(*u.grid);
    double thresh = tol * peak;
    for (int i = 0; i < u.grid->total; ++i) {
        if (std::abs(u.v[i]) > thresh) {
            m.on[i] = 1;
            ++m.count_on;
        }
    }
    return m;
}

int mask_component_count(const SubdomainMask& m) {
    const Grid& g = *m.grid;
    std::vector<std::uint8_t> seen(g.total, 0);
    int components = 0;
    std::queue<int> q;
    for (int start = 0; start < g.total; ++start) {
        if (!m.on[start] || seen[start]) continue;
        ++components;
        seen[start] = 1;
        q.push(start);
        while (!q.empty()) {
            int p = q.front();
            q.pop();
            int ix = p % g.n[0], iy = p / g.n[0];
            auto visit = [&](int jx, int jy) {
                if (jx < 0 || jx >= g.n[0] || jy < 0 || jy >= g.n[1]) return;
                int j = g.index(jx, jy);
                if (m.on[j] && !seen[j]) {
                    seen[j] = 1;
                    q.push(j);
                }
            };
            visit(ix - 1, iy);
            visit(ix + 1, iy);
            if (g.dim == 2) {
                visit(ix, iy - 1);
                visit(ix, iy + 1);
            }
        }
    }
    return components;
}

SubdomainMask mask_from_rects(const Grid& g, const std::vector<Rect>& rects) {
    SubdomainMask m = make_mask(g);
    for (int iy = 0; iy < g.n[1]; ++iy) {
        double y = g.dim == 2 ? g.coord(1, iy) : 0.0;
        for (int ix = 0; ix < g.n[0]; ++ix) {
            double x = g.coord(0, ix);
            for (const Rect& r : rects) {
                bool inside = x > r.xlo && x < r.xhi;
                if (g.dim == 2) inside = inside && y > r.ylo && y < r.yhi;
                if (inside) {
                    int p = g.index(ix, iy);
                    if (!m.on[p]) {
                        m.on[p] = 1;
                        ++m.count_on;
                    }
                    break;
                }
            }
        }
    }
    return m;
}

bool masks_disjoint(const SubdomainMask& a, const SubdomainMask& b) {
    require_same_grid(a.grid, b.grid);
    for (int i = 0; i < a.grid->total; ++i)
        if (a.on[i] && b.on[i]) return false;
    return true;
}

}  // namespace segreflow

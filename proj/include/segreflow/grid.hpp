#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "segreflow/common.hpp"

namespace segreflow {

// Uniform vertex-centered grid on a rectangle (0,ex) or (0,ex)x(0,ey) with
// homogeneous Dirichlet conditions. Only interior points are stored: along
// axis d there are n[d] unknowns and h[d] = extent[d]/(n[d]+1), so the
// boundary points sit at 0 and extent[d] and are implicitly zero.
struct Grid {
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> n{0, 1};  // interior counts; n[1] == 1 in 1D
    std::array<double, 2> h{0.0, 0.0};
    int total = 0;          // n[0]*n[1]
    double measure = 0.0;   // h[0] in 1D, h[0]*h[1] in 2D

    // physical coordinate of interior index i along axis d (0-based)
    double coord(int d, int i) const { return h[d] * (i + 1); }
    // row-major flattening, x fastest
    int index(int ix, int iy) const { return iy * n[0] + ix; }
};

Grid build_grid_1d(double extent, int interior_count);
Grid build_grid_2d(double extent_x, double extent_y, int nx, int ny);

// A scalar field over the interior points of a grid. The grid must outlive
// the field.
struct Field {
    const Grid* grid = nullptr;
    std::vector<double> v;
};

Field make_field(const Grid& g);
Field make_field(const Grid& g, double fill);

// discrete L2 inner product: sum(a*b) * grid.measure; grids must match
double l2_inner(const Field& a, const Field& b);
double l2_norm(const Field& a);
double linf_norm(const Field& a);

struct SubdomainMask {
    const Grid* grid = nullptr;
    std::vector<std::uint8_t> on;
    int count_on = 0;
};

SubdomainMask make_mask(const Grid& g, bool fill = false);

// Mask of points where |u| > tol * max|u|. Errors if u is identically zero.
SubdomainMask support_mask(const Field& u, double tol);

// Number of connected components of the mask (axis-neighbor connectivity).
int mask_component_count(const SubdomainMask& m);

// Axis-aligned open rectangle (xlo,xhi)x(ylo,yhi); y bounds ignored in 1D.
struct Rect {
    double xlo = 0.0, xhi = 0.0;
    double ylo = 0.0, yhi = 0.0;
};

// Mask of interior points strictly inside any of the rectangles. Points on a
// rectangle edge are excluded, so touching rectangles give disjoint masks.
SubdomainMask mask_from_rects(const Grid& g, const std::vector<Rect>& rects);

bool masks_disjoint(const SubdomainMask& a, const SubdomainMask& b);

}  // namespace segreflow

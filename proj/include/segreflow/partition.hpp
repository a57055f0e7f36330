#pragma once

#include <string>

#include "segreflow/kop.hpp"

namespace segreflow {

// Nodal-domain partition extracted from a state. Masks are disjoint by
// construction (argmax tie-break); overlap_count is the number of points
// where two or more components exceeded the threshold before tie-breaking.
struct Partition {
    const Grid* grid = nullptr;
    std::vector<SubdomainMask> masks;
    int overlap_count = 0;
    double uncovered_fraction = 0.0;
    // per-subdomain spectral data, filled by partition_energy
    std::vector<double> lambda1;
    std::vector<double> lambda2;
};

// A point belongs to component argmax_i |u_i| among the components whose
// |u_i| exceeds tol * max|u_i| there (ties: larger |u_i|, then lower index);
// points where no component exceeds its threshold stay uncovered. Errors if
// some component ends up with empty support.
Partition extract_partition(const State& s, double tol = 1e-3);

// sum_i lambda_{k_i}(mask_i) via masked eigensolves; fills lambda1/lambda2.
double partition_energy(Partition& part, const std::vector<int>& k, double eig_tol, rng_t& rng);

// max_{i<j} beta * <u_i^2, u_j^2>_L2
double segregation_defect(const State& s, double beta);

// x-coordinates separating consecutive differently-labeled covered runs (1D):
// the midpoint of each gap/label change. Used to report interface locations.
std::vector<double> interface_points_1d(const Partition& part);

struct Oracle1DResult {
    double value = 0.0;
    std::vector<std::string> layouts;  // canonical optimal labelings, e.g. "00001111"
};

// Exhaustive optimal spectral partition of (0,1) into m components over
// labelings of `segments` equal segments: adjacent same-label segments merge,
// component subdomains are unions of runs with spectrum {j^2 pi^2 / len^2},
// and the objective is sum_i lambda_{k_i}(omega_i). Layouts are deduplicated
// by label-relabeling and mirror symmetry.
Oracle1DResult oracle_1d(int m, const std::vector<int>& k, int segments);

// P5 binary PGM of a 2D partition: component i maps to gray (i+1)*(255/m),
// uncovered (interface) points to 0. Top image row is the y = max row.
void write_partition_pgm(const Partition& part, const std::string& path);

// CSV of covered runs for a 1D partition: header component,xlo,xhi with
// half-cell margins around the covered grid points.
void write_partition_csv(const Partition& part, const std::string& path);

}  // namespace segreflow

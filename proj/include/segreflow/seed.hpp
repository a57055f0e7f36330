#pragma once

#include "segreflow/kop.hpp"

namespace segreflow {

// A trial partition: m pairwise-disjoint subdomain masks with the first k_i
// Dirichlet eigenpairs of each masked subdomain.
struct TrialPartition {
    const Grid* grid = nullptr;
    std::vector<SubdomainMask> masks;
    std::vector<EigResult> eigs;  // per component, k_i pairs each
    std::vector<int> k;
};

// Equal axis-aligned slabs along x, the default when no rectangles are given.
std::vector<std::vector<Rect>> default_trial_rects(const Grid& g, int m);

// Builds masks from rectangle lists (one list per component; open rectangles,
// so touching lists stay disjoint) and solves k_i eigenpairs per subdomain.
// k entries must be 1 or 2 unless allow_high_k (experimental) is set.
TrialPartition make_trial_partition(const Grid& g, const std::vector<std::vector<Rect>>& rects,
                                    const std::vector<int>& k, double eig_tol, rng_t& rng,
                                    bool allow_high_k = false);

// Seed state from a trial partition: k_i = 1 takes the (positive) subdomain
// ground state; k_i = 2 takes the sign-balanced combination
// cos(t) phi_1 + sin(t) phi_2 with t located by bisection on
// |(.)^+|_L2^2 - 1/2 over [t0, t0+pi] (t0 = mix angle, default 0), balanced
// to 1e-6; k_i > 2 (experimental) takes the equal-weight normalized sum.
State seed_from_partition(const TrialPartition& tp, const std::vector<double>& mix = {});

struct BoundsReport {
    double lower = 0.0;  // sum_i lambda_{k_i - 1}(Omega), lambda_0 := 0
    double upper = 0.0;  // sum_i lambda_{k_i}(omega_i^trial)
    std::vector<double> lambda_lower;  // lambda_{k_i-1}(Omega) per component
    std::vector<double> lambda_upper;  // lambda_{k_i}(omega_i) per component
};

double upper_bound_c_infty(const TrialPartition& tp);
double lower_bound(const Grid& g, const std::vector<int>& k, double eig_tol, rng_t& rng);
BoundsReport bounds_report(const Grid& g, const TrialPartition& tp, double eig_tol, rng_t& rng);

}  // namespace segreflow

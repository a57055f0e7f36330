#pragma once

#include <vector>

#include "segreflow/common.hpp"

namespace segreflow {

// Interaction kernels: self-interaction a_i*g(t), competition coupling
// cpl*f(u_i)*sum_{j!=i} F(u_j) with cpl = 2*beta, base kernels f(t)=t,
// g(t)=t^3, F(t)=t^2/2, G(t)=t^4/4. With a truncation level n the kernels
// switch at |t| = n to power growth t^{p-1} (f) and t^{q-1} (g), matched to
// be C^1 and odd (f,g) / even (F,G).
struct NonlinearitySpec {
    int m = 1;
    std::vector<double> a;  // size m, nonnegative
    double beta = 1.0;
    bool truncated = false;
    double n = 0.0;  // truncation level, used only when truncated
    double p = 1.5;  // f tail exponent, in (1,3)
    double q = 2.0;  // g tail exponent, in (1,3)

    double theta() const { return (q - 1.0 > 3.0 ? q - 1.0 : 3.0) + 1.0; }
    double coupling() const { return 2.0 * beta; }
};

void validate_nonlin(const NonlinearitySpec& s);

// pointwise kernels; a_i is applied by callers, these are the base functions
double f_kernel(const NonlinearitySpec& s, double t);
double g_kernel(const NonlinearitySpec& s, double t);
double F_kernel(const NonlinearitySpec& s, double t);  // primitive of f, F(0)=0
double G_kernel(const NonlinearitySpec& s, double t);  // primitive of g, G(0)=0
double f_prime(const NonlinearitySpec& s, double t);
double g_prime(const NonlinearitySpec& s, double t);

struct InequalityReport {
    // signed worst-case violations (positive value = inequality broken):
    double max_violation_upper_f = 0.0;   // f_n(t)t - theta*F_n(t)
    double max_violation_upper_g = 0.0;   // g_n(t)t - theta*G_n(t)
    double max_violation_monotone = 0.0;  // -(f_n(s)-f_n(t))(s-t), same for g
    double max_violation_cubic = 0.0;     // g_n(t) - t^3 for t >= 0
    int samples = 0;

    double worst() const;
};

// Samples (s,t) uniformly in [-10n,10n]^2 (or [-10,10]^2 untruncated) and
// reports the worst violation of each inequality. The monotonicity check uses
// the product form (f(s)-f(t))(s-t) >= 0, which is algebraically equal to
// f(s)t+f(t)s <= f(s)s+f(t)t but free of the cancellation error the expanded
// form picks up at the sampling range edges.
InequalityReport check_inequalities(const NonlinearitySpec& s, int samples, std::uint64_t seed);

}  // namespace segreflow

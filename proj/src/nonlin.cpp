#include "segreflow/nonlin.hpp"

#include <algorithm>
#include <cmath>

namespace segreflow {

void validate_nonlin(const NonlinearitySpec& s) {
    if (s.m < 1) throw config_error("nonlin: m must be >= 1, got " + std::to_string(s.m));
    if ((int)s.a.size() != s.m)
        throw config_error("nonlin: a must have m entries (m=" + std::to_string(s.m) +
                           ", got " + std::to_string(s.a.size()) + ")");
    for (double ai : s.a)
        if (!(ai >= 0.0)) throw config_error("nonlin: a entries must be nonnegative");
    if (!(s.beta > 0.0)) throw config_error("nonlin: beta must be positive");
    if (s.truncated && !(s.n > 0.0))
        throw config_error("nonlin: truncation level must be positive");
    if (!(s.p > 1.0 && s.p < 3.0))
        throw config_error("nonlin: p must lie in (1,3), got " + std::to_string(s.p));
    if (!(s.q > 1.0 && s.q < 3.0))
        throw config_error("nonlin: q must lie in (1,3), got " + std::to_string(s.q));
}

double f_kernel(const NonlinearitySpec& s, double t) {
    if (!s.truncated) return t;
    double a = std::abs(t);
    if (a <= s.n) return t;
    double n = s.n, p = s.p;
    double val = std::pow(a, p - 1.0) / ((p - 1.0) * std::pow(n, p - 2.0)) + n - n / (p - 1.0);
    return t >= 0.0 ? val : -val;
}

double g_kernel(const NonlinearitySpec& s, double t) {
    if (!s.truncated) return t * t * t;
    double a = std::abs(t);
    if (a <= s.n) return t * t * t;
    double n = s.n, q = s.q;
    double n3 = n * n * n;
    double val =
        3.0 * std::pow(a, q - 1.0) / ((q - 1.0) * std::pow(n, q - 4.0)) + n3 - 3.0 * n3 / (q - 1.0);
    return t >= 0.0 ? val : -val;
}

double F_kernel(const NonlinearitySpec& s, double t) {
    double a = std::abs(t);
    if (!s.truncated || a <= s.n) return 0.5 * t * t;
    double n = s.n, p = s.p;
    return 0.5 * n * n +
           (std::pow(a, p) - std::pow(n, p)) / (p * (p - 1.0) * std::pow(n, p - 2.0)) +
           (n - n / (p - 1.0)) * (a - n);
}

double G_kernel(const NonlinearitySpec& s, double t) {
    double a = std::abs(t);
    if (!s.truncated || a <= s.n) return 0.25 * t * t * t * t;
    double n = s.n, q = s.q;
    double n3 = n * n * n;
    return 0.25 * n3 * n +
           3.0 * (std::pow(a, q) - std::pow(n, q)) / (q * (q - 1.0) * std::pow(n, q - 4.0)) +
           (n3 - 3.0 * n3 / (q - 1.0)) * (a - n);
}

double f_prime(const NonlinearitySpec& s, double t) {
    if (!s.truncated) return 1.0;
    double a = std::abs(t);
    if (a <= s.n) return 1.0;
    return std::pow(a / s.n, s.p - 2.0);
}

double g_prime(const NonlinearitySpec& s, double t) {
    double a = std::abs(t);
    if (!s.truncated || a <= s.n) return 3.0 * t * t;
    return 3.0 * std::pow(a, s.q - 2.0) * std::pow(s.n, 4.0 - s.q);
}

double InequalityReport::worst() const {
    return std::max({max_violation_upper_f, max_violation_upper_g, max_violation_monotone,
                     max_violation_cubic});
}

InequalityReport check_inequalities(const NonlinearitySpec& s, int samples, std::uint64_t seed) {
    if (samples < 1) throw config_error("check_inequalities: samples must be >= 1");
    double range = s.truncated ? 10.0 * s.n : 10.0;
    rng_t rng(seed);
    std::uniform_real_distribution<double> unif(-range, range);
    double theta = s.theta();

    InequalityReport rep;
    rep.samples = samples;
    for (int k = 0; k < samples; ++k) {
        double sv = unif(rng), tv = unif(rng);
        for (double t : {sv, tv}) {
            rep.max_violation_upper_f =
                std::max(rep.max_violation_upper_f, f_kernel(s, t) * t - theta * F_kernel(s, t));
            rep.max_violation_upper_g =
                std::max(rep.max_violation_upper_g, g_kernel(s, t) * t - theta * G_kernel(s, t));
            double tp = std::abs(t);
            rep.max_violation_cubic =
                std::max(rep.max_violation_cubic, g_kernel(s, tp) - tp * tp * tp);
        }
        rep.max_violation_monotone = std::max(
            rep.max_violation_monotone, -(f_kernel(s, sv) - f_kernel(s, tv)) * (sv - tv));
        rep.max_violation_monotone = std::max(
            rep.max_violation_monotone, -(g_kernel(s, sv) - g_kernel(s, tv)) * (sv - tv));
    }
    return rep;
}

}  // namespace segreflow

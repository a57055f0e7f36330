#pragma once

#include "segreflow/nonlin.hpp"
#include "segreflow/spectrum.hpp"

namespace segreflow {

// An m-tuple of fields on a common grid. The constraint manifold M is
// |u_i|_L2 = 1 for every component; states are kept within 1e-10 of M by
// explicit renormalization.
struct State {
    std::vector<Field> u;

    int m() const { return (int)u.size(); }
    const Grid& grid() const { return *u.at(0).grid; }
};

State make_state(const Grid& g, int m);
// largest deviation max_i | |u_i|_L2 - 1 |
double manifold_deviation(const State& s);
void renormalize(State& s);  // throws numerical_error if a component vanishes

// Coupling environments S_i = sum_{j != i} F(u_j), shared by the K equation,
// the energy gradient, and the residual certificate.
std::vector<Field> coupling_env(const State& s, const NonlinearitySpec& nl);

// L2 representative of half the J-gradient for component i:
//   grad_i = A0 u_i + a_i g(u_i) + cpl f(u_i) S_i
Field energy_gradient_comp(const State& s, const NonlinearitySpec& nl,
                           const std::vector<Field>& env, int i);

struct KComponent {
    Field w;
    double mu = 0.0;
    double residual = 0.0;  // |A0 w + a g(w) + cpl f(w) S - mu u|_L2
    int iterations = 0;     // Newton steps (0 for the closed-form linear path)
};

struct KSolveResult {
    std::vector<KComponent> comp;
};

// Solves, for each component, the auxiliary problem
//   A0 w + a_i g(w) + cpl f(w) S_i = mu u_i,   <u_i, w>_L2 = 1,
// with the environment S_i frozen at the input state. Uses the closed-form
// single-CG route when the component equation is linear (a_i = 0, truncation
// off) and a feasible-start damped Newton on the convex constrained energy
// otherwise. warm, when given, seeds the Newton iteration with the previous
// w fields. Postconditions checked here: constraint within 1e-8, mu within
// 1e-6 relative of its integral identity, mu >= -1e-10, and residual <= tol
// or the rounding floor of evaluating the stationarity defect (about
// 16 eps |A| |w|), whichever is looser.
KSolveResult solve_K(const State& s, const NonlinearitySpec& nl, double tol,
                     const KSolveResult* warm = nullptr, int workers = 1);

struct PseudoGradient {
    std::vector<Field> V;  // V_i = u_i - w_i
    double h1_norm = 0.0;  // sqrt(sum_i |V_i|_H1^2)
};

PseudoGradient pseudo_gradient(const State& s, const KSolveResult& k);

// Duality pairing J'(u)[V] = 2 sum_i <grad_i, V_i>_L2. Together with
// pseudo_gradient this realizes the descent inequality
// J'(u)[V] >= 2 |V|_H1^2 (up to solver tolerance).
double gradient_pairing(const State& s, const NonlinearitySpec& nl,
                        const std::vector<Field>& V);

}  // namespace segreflow

#pragma once

#include "segreflow/linops.hpp"

namespace segreflow {

struct EigResult {
    std::vector<double> values;    // ascending
    std::vector<Field> vectors;    // L2-normalized, pairwise orthogonal
    std::vector<double> residuals; // |A u - lambda u|_L2 per pair
};

// Rayleigh quotient <Au,u>/<u,u> in the discrete L2 inner product.
double rayleigh(const LinearOperator& A, const Field& u);

// Smallest k Dirichlet eigenpairs of A by deflated inverse power iteration
// with CG inner solves. Stops each pair when |Au - lambda u|_L2 <= tol*lambda
// or at the rounding floor of applying A (about 16 eps max_diag), whichever is
// looser; reported eigenvalues are Rayleigh quotients, so their error is
// quadratic in the residual. For masked operators the iteration is confined
// to the masked-in subspace, so the artificial unit eigenvalues of the
// identity block never appear.
EigResult dirichlet_eigs(const LinearOperator& A, int k, double tol, rng_t& rng);

// Exact eigenvalues of the discrete 1D Dirichlet Laplacian on (0,extent) with
// n interior points: (4/h^2) sin^2(k pi h / (2 extent)), k = 1..n.
double discrete_eig_1d(double extent, int n, int k);

}  // namespace segreflow

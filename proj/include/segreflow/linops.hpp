#pragma once

#include "segreflow/grid.hpp"

namespace segreflow {

// A = -Laplace_h + diag(potential), optionally restricted to a mask. On
// masked-out points the operator is the identity and stencil couplings to
// those points are dropped, so the masked-in block is the Dirichlet operator
// of the induced subdomain. potential (if set) must be nonnegative.
// The pointed-to grid/mask/potential must outlive the operator.
struct LinearOperator {
    const Grid* grid = nullptr;
    const SubdomainMask* mask = nullptr;           // nullptr: whole domain
    const std::vector<double>* potential = nullptr;  // nullptr: none

    double diag(int p) const;
};

LinearOperator laplacian(const Grid& g);
LinearOperator laplacian(const Grid& g, const SubdomainMask& mask);

void apply(const LinearOperator& A, const std::vector<double>& in, std::vector<double>& out);
Field apply(const LinearOperator& A, const Field& u);

// discrete H1_0 norm: sqrt(<-Laplace_h u, u>_L2)
double h1_norm(const Field& u);

struct CgResult {
    Field x;
    int iterations = 0;
    double residual = 0.0;  // final true residual |Ax - rhs|_2 / |rhs|_2
};

// Jacobi-preconditioned conjugate gradients. Stops when the true residual
// satisfies |Ax - rhs|_2 <= rel_tol * |rhs|_2. When rel_tol is tighter than
// the rounding floor (roughly eps * cond(A)), the solve returns once repeated
// true-residual checks stop improving, with result.residual reporting the
// achieved floor above rel_tol. Throws numerical_error if max_iter is
// exhausted while still making progress. x0, when given, is the starting
// guess (must be zero on masked-out points for masked operators).
CgResult cg_solve(const LinearOperator& A, const Field& rhs, double rel_tol, int max_iter,
                  const Field* x0 = nullptr);

}  // namespace segreflow

#pragma once

#include "qadd/cmatrix.hpp"

namespace qadd {

struct HermEig {
    std::vector<double> eigenvalues;  // sorted descending
    CMatrix eigenvectors;             // unitary, column k pairs with eigenvalues[k]
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized first;
/// a hermiticity defect above 1e-8 is an error. Cyclic Jacobi for d <= 32,
/// Householder tridiagonalization + implicit-shift QL above.
HermEig hermitian_eig(const CMatrix& a);

enum class MatFn { Log2, Sqrt, InvSqrt };

/// Apply fn to the eigenvalues of a Hermitian PSD matrix. Eigenvalues below
/// 1e-12 * ||A||_inf count as exact zeros: log2 and inv_sqrt act as
/// pseudo-functions on the support (0 -> 0).
CMatrix matrix_fn(const CMatrix& a, MatFn fn);

struct PsdResult {
    bool psd;
    double min_eigenvalue;
};

PsdResult psd_check(const CMatrix& a, double tol);

/// Moore-Penrose pseudo-inverse via the Hermitian eigensystem of M^dag M.
/// Singular values below rel_cutoff * s_max are dropped.
CMatrix pinv(const CMatrix& m, double rel_cutoff = 1e-10);

/// Ratio of largest to smallest singular value (inf if rank-deficient at the
/// 1e-13 relative level).
double condition_number(const CMatrix& m);

/// Solve the least-squares problem X * A = B, i.e. X = B * pinv(A).
CMatrix solve_xa_b(const CMatrix& a, const CMatrix& b, double rel_cutoff = 1e-10);

}  // namespace qadd

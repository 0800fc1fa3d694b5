#pragma once

#include "ddpc/types.hpp"

namespace ddpc {

// Rank decisions follow the standard convention max(rows, cols) * sigma_max * 1e-12
// unless the caller supplies a positive threshold of their own.
double default_rank_tolerance(const Matrix& M, double sigma_max);

// Numerical rank from singular values. tol_rank <= 0 selects the default threshold.
Index numerical_rank(const Matrix& M, double tol_rank = -1.0);

// Moore-Penrose pseudoinverse via SVD with small singular values truncated.
Matrix pseudoinverse(const Matrix& M, double tol_rank = -1.0);

// Orthonormal basis of ker(M) with columns sign-normalized so that the
// largest-magnitude entry of each column is positive (deterministic output).
Matrix nullspace_basis(const Matrix& M, double tol_rank = -1.0);

// Left inverse (M'M)^{-1} M' of a full-column-rank matrix, computed through an
// orthogonal factorization instead of the normal equations for conditioning.
Matrix left_pseudoinverse(const Matrix& M, double tol_rank = -1.0);

// Symmetry check (entrywise) followed by an eigenvalue sign test.
bool is_symmetric(const Matrix& M, double tol = 1e-12);
bool is_positive_definite(const Matrix& H, double tol = 1e-10);
bool is_positive_semidefinite(const Matrix& H, double tol = 1e-10);

} // namespace ddpc

#pragma once

#include "ddpc/types.hpp"

namespace ddpc {

// Discrete-time LTI plant x(k+1) = A x(k) + B u(k), y(k) = C x(k) + D u(k).
struct SystemModel {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }

  // Throws std::invalid_argument on dimension inconsistencies.
  void validate() const;
};

// Simulates N = u.size()/m steps from x0 and returns the stacked outputs
// (y(0); ...; y(N-1)). If x_final is non-null it receives x(N).
Vector simulate(const SystemModel& model, const Vector& x0, const Vector& u,
                Vector* x_final = nullptr);

// Stacked observability matrix O_N = (C; CA; ...; CA^{N-1}).
Matrix observability_matrix(const SystemModel& model, Index N);

// Block lower-triangular impulse-response (Toeplitz) matrix T_N mapping
// stacked inputs to stacked outputs: block (i,j) = D for i = j,
// C A^{i-j-1} B for i > j, zero above the diagonal.
Matrix toeplitz_matrix(const SystemModel& model, Index N);

// Gamma = ( (A^{Np-1}B ... B) - A^{Np} O+ T  |  A^{Np} O+ ) with O+ the left
// inverse of O_{Np}; reconstructs x(0) from the past window xi = (u_p; y_p).
Matrix gamma_matrix(const SystemModel& model, Index N_p, double tol_rank = -1.0);

// Smallest depth N <= n with full-column-rank O_N, or 0 if none exists.
Index observability_index(const SystemModel& model, double tol_rank = -1.0);

// True iff ||y - O_N x0 - T_N u||_inf <= tol.
bool is_consistent(const SystemModel& model, const Vector& x0, const Vector& u,
                   const Vector& y, double tol);

// x0 = Gamma * xi for the stacked past window xi = (u_p; y_p).
Vector reconstruct_initial_state(const SystemModel& model, Index N_p, const Vector& xi,
                                 double tol_rank = -1.0);

} // namespace ddpc
